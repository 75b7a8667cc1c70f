#ifndef LSI_FUNCTIONALS_HPP
#define LSI_FUNCTIONALS_HPP

// Conserved integrals I1..I4, the Lyapunov functional
// L = omega (I1 + I2) + (c/2) I3 + I4, the Gagliardo-Nirenberg type functional J,
// the Pohozaev identities of the profile equations, the profile energy and the
// mass-preserving dilation (u, v) -> sqrt(q) (u(qx), v(qx)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsi/errors.hpp"
#include "lsi/model.hpp"
#include "lsi/random_fields.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

struct InvariantRecord {
  double t = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double I4 = 0.0;
  double L = 0.0;
  // Sum of the magnitudes of the terms making up I3, I4 and L. I4 vanishes on
  // the canonical soliton, so drifts are measured against these instead.
  double I3_scale = 0.0;
  double I4_scale = 0.0;
  double L_scale = 0.0;
};

inline constexpr double kImaginaryResidueTolerance = 1e-12;

inline InvariantRecord invariants(const LsiState& s, const PhysParams& p) {
  const auto phix = deriv(s.phi, 1);
  const auto psix = deriv(s.psi, 1);
  const std::size_t n = s.grid().n();

  InvariantRecord r;
  r.t = s.t;
  r.I1 = norm2_sq(s.phi);
  r.I2 = norm2_sq(s.psi);

  const cplx i(0.0, 1.0);
  ComplexField mom(s.grid());
  RealField w2(s.grid());
  RealField coupling(s.grid());
  for (std::size_t j = 0; j < n; ++j) {
    const cplx f = s.phi[j];
    const cplx fx = phix[j];
    const cplx g = s.psi[j];
    const cplx gx = psix[j];
    mom[j] = i * (std::conj(f) * fx - f * std::conj(fx) + std::conj(g) * gx - g * std::conj(gx));
    w2[j] = s.w[j] * s.w[j];
    coupling[j] = p.beta * (std::norm(f) + std::norm(g)) * s.w[j];
  }
  const cplx momentum = quadrature(mom);
  const double wsq = quadrature(w2);
  const double scale3 = wsq + std::abs(momentum);
  if (std::abs(momentum.imag()) > kImaginaryResidueTolerance * std::max(1.0, scale3)) {
    std::ostringstream os;
    os << "invariants: momentum integrand has imaginary residue " << momentum.imag();
    throw std::logic_error(os.str());
  }
  r.I3 = wsq + momentum.real();

  const double grad = norm2_sq(phix) + norm2_sq(psix);
  const double coup = quadrature(coupling);
  r.I4 = grad + coup;

  r.L = p.omega * (r.I1 + r.I2) + 0.5 * p.c * r.I3 + r.I4;
  r.I3_scale = scale3;
  r.I4_scale = grad + std::abs(coup);
  r.L_scale = std::abs(p.omega) * (r.I1 + r.I2) + 0.5 * p.c * r.I3_scale + r.I4_scale;
  return r;
}

inline double lyapunov(const LsiState& s, const PhysParams& p) { return invariants(s, p).L; }

/// |a - b| relative to max(|b|, scale).
inline double relative_drift(double now, double ref, double scale) {
  return std::abs(now - ref) / std::max(std::abs(ref), scale);
}

struct InvariantDrifts {
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double I4 = 0.0;
  double L = 0.0;

  void absorb(const InvariantRecord& now, const InvariantRecord& ref) {
    I1 = std::max(I1, relative_drift(now.I1, ref.I1, ref.I1));
    I2 = std::max(I2, relative_drift(now.I2, ref.I2, ref.I2));
    I3 = std::max(I3, relative_drift(now.I3, ref.I3, ref.I3_scale));
    I4 = std::max(I4, relative_drift(now.I4, ref.I4, ref.I4_scale));
    L = std::max(L, relative_drift(now.L, ref.L, ref.L_scale));
  }
};

/// J(u, v) = (|u|^2 + |v|^2)^{1 - t/2} (|u_x|^2 + |v_x|^2)^{t/2} / |u^2 + v^2|_2^{1/2}, t = 1/4.
///
/// Homogeneous of degree one in (u, v) and invariant under the mass-preserving
/// dilation; minimality statements therefore refer to a fixed total mass.
inline double j_functional(const RealField& u, const RealField& v) {
  require_same_grid(u.grid(), v.grid(), "j_functional");
  constexpr double theta = 0.25;
  const double mass = norm2_sq(u) + norm2_sq(v);
  const double grad = norm2_sq(deriv(u, 1)) + norm2_sq(deriv(v, 1));
  const auto rho = zip(u, v, [](double a, double b) { return a * a + b * b; });
  const double quartic = norm2(rho);
  if (!(quartic > 0.0)) throw std::invalid_argument("j_functional: u^2 + v^2 vanishes identically");
  return std::pow(mass, 1.0 - 0.5 * theta) * std::pow(grad, 0.5 * theta) / std::sqrt(quartic);
}

/// Max |dJ/de| over `count` seeded random smooth directions tangent to the mass
/// sphere at (R1, R2), by central differences with step eps.
inline double j_tangent_gradient(const SolitonProfile& prof, std::size_t count, std::uint64_t seed,
                                 double eps = 1e-4) {
  Rng rng(seed);
  const auto& g = prof.grid();
  const double mass = norm2_sq(prof.r1) + norm2_sq(prof.r2);
  double worst = 0.0;
  for (std::size_t d = 0; d < count; ++d) {
    auto e1 = random_bumps(g, rng);
    auto e2 = random_bumps(g, rng);
    const double along = (dot(e1, prof.r1) + dot(e2, prof.r2)) / mass;
    e1 -= prof.r1 * along;
    e2 -= prof.r2 * along;
    const double nrm = std::sqrt(h1_norm_sq(e1) + h1_norm_sq(e2));
    e1 *= 1.0 / nrm;
    e2 *= 1.0 / nrm;
    const double jp = j_functional(prof.r1 + e1 * eps, prof.r2 + e2 * eps);
    const double jm = j_functional(prof.r1 - e1 * eps, prof.r2 - e2 * eps);
    worst = std::max(worst, std::abs(jp - jm) / (2.0 * eps));
  }
  return worst;
}

struct PohozaevTerms {
  double kinetic;  // 3 * int (u_x^2 + v_x^2)
  double mass;     // Omega * int (u^2 + v^2)
  double quartic;  // (3 gamma / 4) * int (u^2 + v^2)^2

  double first() const noexcept { return kinetic - mass; }
  double second() const noexcept { return mass - quartic; }
};

inline PohozaevTerms pohozaev_terms(const SolitonProfile& prof) {
  const auto& p = prof.params;
  const double grad = norm2_sq(deriv(prof.r1, 1)) + norm2_sq(deriv(prof.r2, 1));
  const auto rho = zip(prof.r1, prof.r2, [](double a, double b) { return a * a + b * b; });
  return {3.0 * grad, p.Omega * quadrature(rho), 0.75 * p.gamma * norm2_sq(rho)};
}

/// (A - B, B - C) for A = 3 int(u_x^2+v_x^2), B = Omega int(u^2+v^2), C = (3 gamma/4) int(u^2+v^2)^2.
inline std::pair<double, double> pohozaev_residuals(const SolitonProfile& prof) {
  const auto t = pohozaev_terms(prof);
  return {t.first(), t.second()};
}

/// int (u_x^2 + v_x^2 + (c^2/4)(u^2 + v^2) - gamma (u^2 + v^2)^2).
inline double profile_energy(const RealField& u, const RealField& v, const PhysParams& p) {
  require_same_grid(u.grid(), v.grid(), "profile_energy");
  const double grad = norm2_sq(deriv(u, 1)) + norm2_sq(deriv(v, 1));
  const auto rho = zip(u, v, [](double a, double b) { return a * a + b * b; });
  return grad + 0.25 * p.c * p.c * quadrature(rho) - p.gamma * norm2_sq(rho);
}

inline double profile_energy(const SolitonProfile& prof) {
  return profile_energy(prof.r1, prof.r2, prof.params);
}

/// Fails with ResolutionError when f is not negligible near the seam or carries
/// visible energy in the top third of the spectrum.
template <class T>
void require_resolved(const Field<T>& f, const char* where, double tail_tol = 1e-8,
                      double spectral_tol = 1e-10) {
  const auto& g = f.grid();
  const double peak = sup_norm(f);
  if (peak == 0.0) return;
  double edge = 0.0;
  for (std::size_t j = 0; j < g.n(); ++j) {
    if (std::abs(g.x(j) - g.center()) >= 0.45 * g.length()) edge = std::max(edge, std::abs(f[j]));
  }
  if (edge > tail_tol * peak) {
    std::ostringstream os;
    os << where << ": field does not decay inside the domain (edge/peak = " << edge / peak << ")";
    throw ResolutionError(os.str());
  }
  const auto m = modes(f);
  double top = 0.0;
  double all = 0.0;
  const long cutoff = static_cast<long>(g.n()) / 3;
  for (std::size_t j = 0; j < m.size(); ++j) {
    all = std::max(all, std::abs(m[j]));
    if (std::abs(g.mode_index(j)) > cutoff) top = std::max(top, std::abs(m[j]));
  }
  if (top > spectral_tol * all) {
    std::ostringstream os;
    os << where << ": field is under-resolved (top-band/peak modal ratio = " << top / all << ")";
    throw ResolutionError(os.str());
  }
}

/// (u_q, v_q)(x) = sqrt(q) (u, v)(center + q (x - center)), by band-limited resampling.
inline std::pair<RealField, RealField> scale_profile(const RealField& u, const RealField& v, double q) {
  require_same_grid(u.grid(), v.grid(), "scale_profile");
  if (!(q > 0.0) || !std::isfinite(q)) throw std::invalid_argument("scale_profile: q must be positive");
  const auto& g = u.grid();
  if (q == 1.0) return {u, v};
  // For q > 1 part of the samples land outside the cell; the fields are taken
  // to vanish there rather than wrapping periodically.
  std::vector<double> pts;
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < g.n(); ++j) {
    const double y = g.center() + q * (g.x(j) - g.center());
    if (y >= g.left() && y < g.left() + g.length()) {
      pts.push_back(y);
      idx.push_back(j);
    }
  }
  const auto ui = evaluate(u, pts);
  const auto vi = evaluate(v, pts);
  const double s = std::sqrt(q);
  std::vector<double> us(g.n(), 0.0);
  std::vector<double> vs(g.n(), 0.0);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    us[idx[i]] = s * ui[i];
    vs[idx[i]] = s * vi[i];
  }
  RealField uq(g, std::move(us));
  RealField vq(g, std::move(vs));
  require_resolved(uq, "scale_profile");
  require_resolved(vq, "scale_profile");
  return {std::move(uq), std::move(vq)};
}

/// Profile record built from arbitrary (u, v) with the long wave slaved as
/// W = -beta (u^2 + v^2) / c. theta is the polar angle of (|u|, |v|).
inline SolitonProfile profile_from_fields(const PhysParams& p, RealField u, RealField v) {
  require_same_grid(u.grid(), v.grid(), "profile_from_fields");
  auto w = zip(u, v, [&](double a, double b) { return -p.beta * (a * a + b * b) / p.c; });
  const double theta = std::atan2(norm2(v), norm2(u));
  return SolitonProfile{p, theta, std::move(u), std::move(v), std::move(w)};
}

}  // namespace lsi

#endif  // LSI_FUNCTIONALS_HPP
