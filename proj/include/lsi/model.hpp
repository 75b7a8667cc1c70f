#ifndef LSI_MODEL_HPP
#define LSI_MODEL_HPP

// Physical parameters, the exact sech solitary-wave family and the residual
// of the coupled profile equations
//
//   -u'' + Omega u - gamma (u^2 + v^2) u = 0,
//   -v'' + Omega v - gamma (u^2 + v^2) v = 0,   Omega = w - c^2/4, gamma = beta^2/c.

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <utility>

#include "lsi/errors.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

struct PhysParams {
  double beta;
  double c;
  double omega;
  double Omega;  // omega - c^2/4
  double gamma;  // beta^2 / c
};

inline PhysParams make_params(double beta, double c, double omega) {
  if (!std::isfinite(beta) || !std::isfinite(c) || !std::isfinite(omega)) {
    throw ParameterError("make_params: parameters must be finite");
  }
  if (!(c > 0.0)) {
    std::ostringstream os;
    os << "make_params: c > 0 violated (c = " << c << ")";
    throw ParameterError(os.str());
  }
  if (!(4.0 * omega - c * c > 0.0)) {
    std::ostringstream os;
    os << "make_params: 4*omega - c^2 > 0 violated (4*omega - c^2 = " << 4.0 * omega - c * c << ")";
    throw ParameterError(os.str());
  }
  if (beta == 0.0) throw ParameterError("make_params: beta != 0 violated");
  return PhysParams{beta, c, omega, omega - 0.25 * c * c, beta * beta / c};
}

/// Canonical parameter set used throughout the tests: Omega = gamma = 1.
inline PhysParams canonical_params() { return make_params(std::numbers::sqrt2, 2.0, 2.0); }

inline constexpr double kDefaultTheta = std::numbers::pi / 4.0;

/// Relative size of the sech envelope at the periodic seam.
inline double profile_tail(double Omega, const PeriodicGrid& grid) {
  return 1.0 / std::cosh(std::sqrt(Omega) * 0.5 * grid.length());
}

inline constexpr double kTailTolerance = 1e-8;

/// Grid with the canonical decay margin sqrt(Omega) L / 2 = 40 (twice the
/// minimal rule L >= 40/sqrt(Omega), whose e^-20 tail leaves ODE residuals near
/// 1e-7 through the seam) at the canonical resolution of 1024 points per 80
/// length units, scaled with sqrt(Omega).
inline PeriodicGrid recommended_grid(const PhysParams& p) {
  const double s = std::sqrt(p.Omega);
  const double length = std::max(80.0, 80.0 / s);
  const double per_unit = 1024.0 / 80.0 * std::max(1.0, s);
  std::size_t n = 8;
  while (static_cast<double>(n) < per_unit * length) n *= 2;
  return PeriodicGrid(n, length, 0.0);
}

struct SolitonProfile {
  PhysParams params;
  double theta;
  RealField r1;
  RealField r2;
  RealField w;

  const PeriodicGrid& grid() const noexcept { return r1.grid(); }
};

/// (R1, R2) = (cos theta, sin theta) sqrt(2 Omega / gamma) sech(sqrt(Omega)(x - center)),
/// W = -beta (R1^2 + R2^2) / c.
inline SolitonProfile ground_state_profile(const PhysParams& p, double theta,
                                           const PeriodicGrid& grid) {
  const double tail = profile_tail(p.Omega, grid);
  if (tail > kTailTolerance) {
    std::ostringstream os;
    os << "ground_state_profile: domain length " << grid.length()
       << " too short, relative tail " << tail << " exceeds " << kTailTolerance
       << " (need length >= " << 2.0 * std::acosh(1.0 / kTailTolerance) / std::sqrt(p.Omega)
       << ")";
    throw ResolutionError(os.str());
  }
  const double amp = std::sqrt(2.0 * p.Omega / p.gamma);
  const double k = std::sqrt(p.Omega);
  const double x0 = grid.center();
  const auto base = RealField::from_function(grid, [&](double x) { return amp / std::cosh(k * (x - x0)); });
  auto r1 = base * std::cos(theta);
  auto r2 = base * std::sin(theta);
  auto w = map(base, [&](double r) { return -p.beta * r * r / p.c; });
  return SolitonProfile{p, theta, std::move(r1), std::move(r2), std::move(w)};
}

/// Two complex short-wave fields, the real long-wave field, and the time.
struct LsiState {
  ComplexField phi;
  ComplexField psi;
  RealField w;
  double t = 0.0;

  LsiState(ComplexField phi_, ComplexField psi_, RealField w_, double t_ = 0.0)
      : phi(std::move(phi_)), psi(std::move(psi_)), w(std::move(w_)), t(t_) {
    require_same_grid(phi.grid(), psi.grid(), "LsiState");
    require_same_grid(phi.grid(), w.grid(), "LsiState");
  }

  const PeriodicGrid& grid() const noexcept { return phi.grid(); }

  static LsiState zero(const PeriodicGrid& g) {
    return LsiState(ComplexField(g), ComplexField(g), RealField(g), 0.0);
  }
};

/// Carrier exp(i c xi / 2) with xi the position relative to the wave, wrapped
/// into the fundamental cell so that it follows the periodically wrapped envelope.
inline ComplexField carrier(const PeriodicGrid& g, double c, double shift) {
  return ComplexField::from_function(g, [&](double x) {
    return std::polar(1.0, 0.5 * c * g.wrap(x - shift));
  });
}

/// Exact travelling solution at time t:
/// phi = R1(x - ct) e^{i(c/2)(x - ct)} e^{i omega t}, psi likewise, w = W(x - ct).
inline LsiState solitary_state(const SolitonProfile& prof, double t) {
  const auto& p = prof.params;
  const auto& g = prof.grid();
  const double shift = p.c * t;
  const auto car = carrier(g, p.c, shift);
  const cplx rot = std::polar(1.0, p.omega * t);
  const auto r1 = translate(prof.r1, -shift);
  const auto r2 = translate(prof.r2, -shift);
  auto phi = zip(r1, car, [&](double r, cplx e) { return r * e * rot; });
  auto psi = zip(r2, car, [&](double r, cplx e) { return r * e * rot; });
  return LsiState(std::move(phi), std::move(psi), translate(prof.w, -shift), t);
}

/// Sup-norm residuals of the two profile equations (spectral second derivative).
inline std::pair<double, double> residual_cs1(const SolitonProfile& prof) {
  const auto& p = prof.params;
  const auto u2 = deriv(prof.r1, 2);
  const auto v2 = deriv(prof.r2, 2);
  double e1 = 0.0;
  double e2 = 0.0;
  for (std::size_t j = 0; j < prof.r1.size(); ++j) {
    const double u = prof.r1[j];
    const double v = prof.r2[j];
    const double rho = u * u + v * v;
    e1 = std::max(e1, std::abs(-u2[j] + p.Omega * u - p.gamma * rho * u));
    e2 = std::max(e2, std::abs(-v2[j] + p.Omega * v - p.gamma * rho * v));
  }
  return {e1, e2};
}

/// Same profile with R1, R2 multiplied by `factor` (W recomputed). Used to
/// build non-solutions for the residual diagnostics.
inline SolitonProfile scaled_amplitude(const SolitonProfile& prof, double factor) {
  auto out = prof;
  out.r1 *= factor;
  out.r2 *= factor;
  out.w = zip(out.r1, out.r2, [&](double a, double b) { return -prof.params.beta * (a * a + b * b) / prof.params.c; });
  return out;
}

}  // namespace lsi

#endif  // LSI_MODEL_HPP
