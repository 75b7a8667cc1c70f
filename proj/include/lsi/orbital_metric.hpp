#ifndef LSI_ORBITAL_METRIC_HPP
#define LSI_ORBITAL_METRIC_HPP

// Distance from a state to the orbit of the solitary wave,
//
//   I_Omega(x0, th1, th2) = N_Omega(D1 - R1) + N_Omega(D2 - R2),
//   D_k(x) = e^{i th_k} e^{-i (c/2)(x + x0 - c t)} phi_k(x + x0),
//
// minimized over phases in closed form and over x0 by an FFT scan of every
// grid shift followed by golden-section refinement.
//
// The carrier e^{-i c x / 2} is not periodic on the box, so D_k is never
// differentiated spectrally. Its derivative comes from the product rule,
// D_k' = e^{...} chi_k(x + x0) with chi = phi_x - i (c/2) phi, which only
// involves the periodic fields phi and chi.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

#include "lsi/model.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

struct IncrementFields {
  RealField p1, q1, p2, q2;
  RealField eta;
};

struct OrbitalFit {
  double x0 = 0.0;  // in [-L/2, L/2)
  double theta1 = 0.0;
  double theta2 = 0.0;
  double i_omega = 0.0;
  double rho = 0.0;
  double w_dist = 0.0;      // |w(. + x0) - W| at the shared x0
  double w_dist_min = 0.0;  // min over its own translation
  double w_x0 = 0.0;        // translation attaining w_dist_min
  bool degenerate = false;  // flat x0 landscape or an undefined phase
  IncrementFields increments;
};

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0.0) a += two_pi;
  return a >= two_pi ? 0.0 : a;
}

namespace detail {

inline double wrap_shift(double x0, double length) {
  double s = std::fmod(x0 + 0.5 * length, length);
  if (s < 0.0) s += length;
  return s - 0.5 * length;
}

/// e^{i th} e^{-i (c/2)(x + x0 - c t)} on the grid.
inline ComplexField demod_carrier(const PeriodicGrid& g, const PhysParams& p, double x0, double theta, double t) {
  return ComplexField::from_function(g, [&](double x) {
    return std::polar(1.0, theta - 0.5 * p.c * (x + x0 - p.c * t));
  });
}

inline ComplexField chi_of(const ComplexField& f, double c) {
  auto chi = deriv(f, 1);
  const cplx ic2(0.0, 0.5 * c);
  for (std::size_t j = 0; j < chi.size(); ++j) chi[j] -= ic2 * f[j];
  return chi;
}

/// Overlaps z_k(x0) = e^{-i c (x0 - c t)/2} int e^{-i c x/2} [Omega R_k phi_k(x + x0) + R_k' chi_k(x + x0)] dx,
/// in terms of which I_Omega = sum_k [Omega |phi_k|^2 + |chi_k|^2 + N_Omega(R_k) - 2 Re(e^{i th_k} z_k)].
class OverlapKernel {
 public:
  OverlapKernel(const LsiState& s, const SolitonProfile& prof) : grid_(s.grid()), params_(prof.params), t_(s.t) {
    require_same_grid(s.grid(), prof.grid(), "orbital metric");
    const auto& p = params_;
    const std::array<const ComplexField*, 2> fields{&s.phi, &s.psi};
    const std::array<const RealField*, 2> profs{&prof.r1, &prof.r2};
    base_ = 0.0;
    for (int k = 0; k < 2; ++k) {
      const auto& f = *fields[k];
      const auto chi = chi_of(f, p.c);
      const auto rk = *profs[k];
      const auto rkx = deriv(rk, 1);
      base_ += p.Omega * norm2_sq(f) + norm2_sq(chi) + p.Omega * norm2_sq(rk) + norm2_sq(rkx);
      phi_modes_[k] = modes(f);
      chi_modes_[k] = modes(chi);
      kphi_[k].resize(grid_.n());
      kchi_[k].resize(grid_.n());
      for (std::size_t j = 0; j < grid_.n(); ++j) {
        const cplx e = std::polar(1.0, -0.5 * p.c * grid_.x(j));
        kphi_[k][j] = e * p.Omega * rk[j];
        kchi_[k][j] = e * rkx[j];
      }
      scale_[k] = std::sqrt((p.Omega * norm2_sq(rk) + norm2_sq(rkx)) *
                            (p.Omega * norm2_sq(f) + norm2_sq(chi)));
    }
  }

  double base() const noexcept { return base_; }
  double scale(int k) const noexcept { return scale_[k]; }
  const PeriodicGrid& grid() const noexcept { return grid_; }

  cplx global_phase(double x0) const { return std::polar(1.0, -0.5 * params_.c * (x0 - params_.c * t_)); }

  /// z_k(x0) and, when dz is given, dz_k/dx0.
  cplx overlap(int k, double x0, cplx* dz = nullptr) const {
    const std::size_t n = grid_.n();
    std::vector<cplx> a(n), b(n);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx sh = shift_symbol(grid_, j, x0);
      a[j] = phi_modes_[k][j] * sh;
      b[j] = chi_modes_[k][j] * sh;
    }
    const cplx g = global_phase(x0);
    const cplx z = g * correlate(k, ifft(a), ifft(b));
    if (dz != nullptr) {
      for (std::size_t j = 0; j < n; ++j) {
        const cplx ik = derivative_symbol(grid_, j, 1);
        a[j] *= ik;
        b[j] *= ik;
      }
      const cplx dcore = g * correlate(k, ifft(a), ifft(b));
      *dz = cplx(0.0, -0.5 * params_.c) * z + dcore;
    }
    return z;
  }

  /// z_k at every grid shift x0 = s h, s = 0..n-1, by FFT cross-correlation.
  std::vector<cplx> overlap_scan(int k) const {
    const std::size_t n = grid_.n();
    const auto kp = fft(kphi_[k]);
    const auto kc = fft(kchi_[k]);
    std::vector<cplx> prod(n);
    for (std::size_t m = 0; m < n; ++m) {
      const std::size_t neg = (n - m) % n;
      prod[m] = phi_modes_[k][m] * kp[neg] + chi_modes_[k][m] * kc[neg];
    }
    auto c = ifft(prod);
    const double h = grid_.spacing();
    for (std::size_t s = 0; s < n; ++s) c[s] *= h * global_phase(static_cast<double>(s) * h);
    return c;
  }

 private:
  cplx correlate(int k, const std::vector<cplx>& f, const std::vector<cplx>& chi) const {
    cplx acc(0.0);
    for (std::size_t j = 0; j < f.size(); ++j) acc += kphi_[k][j] * f[j] + kchi_[k][j] * chi[j];
    return acc * grid_.spacing();
  }

  PeriodicGrid grid_;
  PhysParams params_;
  double t_;
  double base_ = 0.0;
  std::array<double, 2> scale_{};
  std::array<std::vector<cplx>, 2> phi_modes_;
  std::array<std::vector<cplx>, 2> chi_modes_;
  std::array<std::vector<cplx>, 2> kphi_;
  std::array<std::vector<cplx>, 2> kchi_;
};

inline constexpr double kDegenerateOverlap = 1e-13;

/// Golden-section maximization of fn on [a, b] down to width tol.
template <class Fn>
std::pair<double, double> golden_max(Fn&& fn, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a);
  double x2 = a + r * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (b - a > tol) {
    if (f1 >= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = fn(x2);
    }
  }
  return {a, b};
}

}  // namespace detail

/// e^{i theta} e^{-i (c/2)(x + x0 - c t)} f(x + x0).
inline ComplexField demodulate(const ComplexField& f, const PhysParams& p, double x0, double theta, double t) {
  return multiply(detail::demod_carrier(f.grid(), p, x0, theta, t), translate(f, x0));
}

/// d/dx of demodulate(f, ...), by the product rule on the carrier.
inline ComplexField demodulate_derivative(const ComplexField& f, const PhysParams& p, double x0, double theta,
                                          double t) {
  return multiply(detail::demod_carrier(f.grid(), p, x0, theta, t), translate(detail::chi_of(f, p.c), x0));
}

/// N_Omega(D1 - R1) + N_Omega(D2 - R2) evaluated directly.
inline double i_omega_value(const LsiState& s, const SolitonProfile& prof, double x0, double theta1, double theta2) {
  require_same_grid(s.grid(), prof.grid(), "i_omega_value");
  const auto& p = prof.params;
  const std::array<const ComplexField*, 2> fields{&s.phi, &s.psi};
  const std::array<const RealField*, 2> profs{&prof.r1, &prof.r2};
  const std::array<double, 2> th{theta1, theta2};
  double total = 0.0;
  for (int k = 0; k < 2; ++k) {
    const auto d = demodulate(*fields[k], p, x0, th[k], s.t);
    const auto dx = demodulate_derivative(*fields[k], p, x0, th[k], s.t);
    const auto& r = *profs[k];
    const auto rx = deriv(r, 1);
    double a = 0.0;
    double b = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      a += std::norm(d[j] - r[j]);
      b += std::norm(dx[j] - rx[j]);
    }
    total += (p.Omega * a + b) * s.grid().spacing();
  }
  return total;
}

struct PhaseFit {
  double theta1 = 0.0;
  double theta2 = 0.0;
  bool degenerate = false;
};

/// Phases minimizing I_Omega for fixed x0: th_k = -arg z_k(x0).
inline PhaseFit optimal_phases(const LsiState& s, const SolitonProfile& prof, double x0) {
  const detail::OverlapKernel ker(s, prof);
  PhaseFit out;
  std::array<double, 2> th{};
  for (int k = 0; k < 2; ++k) {
    const cplx z = ker.overlap(k, x0);
    if (std::abs(z) <= detail::kDegenerateOverlap * std::max(ker.scale(k), 1e-300)) {
      th[k] = 0.0;
      out.degenerate = true;
    } else {
      th[k] = wrap_angle(-std::arg(z));
    }
  }
  out.theta1 = th[0];
  out.theta2 = th[1];
  return out;
}

/// Real and imaginary parts of D_k - R_k and eta = w(x + x0) + (beta/c)(R1^2 + R2^2).
inline IncrementFields increments_at(const LsiState& s, const SolitonProfile& prof, double x0, double theta1,
                                     double theta2) {
  const auto& p = prof.params;
  const auto d1 = demodulate(s.phi, p, x0, theta1, s.t);
  const auto d2 = demodulate(s.psi, p, x0, theta2, s.t);
  auto eta = translate(s.w, x0);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    eta[j] += p.beta / p.c * (prof.r1[j] * prof.r1[j] + prof.r2[j] * prof.r2[j]);
  }
  return {real_part(d1) - prof.r1, imag_part(d1), real_part(d2) - prof.r2, imag_part(d2), std::move(eta)};
}

/// int rho R1 q1, int rho R2 q2 and int rho (R1 p1' + R2 p2'), rho = R1^2 + R2^2.
/// The last one is integrated by parts onto the smooth weights, since p_k is not
/// periodic across the seam.
inline std::array<double, 3> constraint_residuals(const IncrementFields& inc, const SolitonProfile& prof) {
  const auto rho = zip(prof.r1, prof.r2, [](double a, double b) { return a * a + b * b; });
  const auto w1 = multiply(rho, prof.r1);
  const auto w2 = multiply(rho, prof.r2);
  const double c1 = dot(w1, inc.q1);
  const double c2 = dot(w2, inc.q2);
  const double c3 = -(dot(inc.p1, deriv(w1, 1)) + dot(inc.p2, deriv(w2, 1)));
  return {c1, c2, c3};
}

namespace detail {

/// Minimizes |w(. + x0) - W| over x0: FFT scan of grid shifts, then golden section.
inline std::pair<double, double> w_distance_min(const RealField& w, const RealField& ref) {
  const auto& g = w.grid();
  const std::size_t n = g.n();
  const auto wm = modes(w);
  const auto rm = modes(ref);
  std::vector<cplx> prod(n);
  for (std::size_t m = 0; m < n; ++m) prod[m] = wm[m] * rm[(n - m) % n];
  const auto corr = ifft(prod);
  std::size_t best = 0;
  for (std::size_t s = 1; s < n; ++s) {
    if (corr[s].real() > corr[best].real()) best = s;
  }
  const double h = g.spacing();
  auto corr_at = [&](double x0) { return dot(translate(w, x0), ref); };
  const double xs = static_cast<double>(best) * h;
  auto [a, b] = golden_max(corr_at, xs - h, xs + h, 1e-8 * g.length());
  double x0 = 0.5 * (a + b);
  // Newton on d/dx0 <w(. + x0), W> inside the bracket.
  a -= 1e-8 * g.length();
  b += 1e-8 * g.length();
  const auto wx = deriv(w, 1);
  const auto wxx = deriv(w, 2);
  for (int it = 0; it < 8; ++it) {
    const double d1 = dot(translate(wx, x0), ref);
    const double d2 = dot(translate(wxx, x0), ref);
    if (!(d2 < 0.0)) break;
    const double next = x0 - d1 / d2;
    if (next < a || next > b) break;
    const double step = std::abs(next - x0);
    x0 = next;
    if (step < 1e-14 * g.length()) break;
  }
  return {wrap_shift(x0, g.length()), norm2(translate(w, x0) - ref)};
}

}  // namespace detail

/// inf over (x0, th1, th2) of I_Omega, with the increments at the minimizer.
inline OrbitalFit orbital_distance(const LsiState& s, const SolitonProfile& prof) {
  const detail::OverlapKernel ker(s, prof);
  const auto& g = ker.grid();
  const std::size_t n = g.n();
  const double h = g.spacing();
  const double length = g.length();

  const auto z1 = ker.overlap_scan(0);
  const auto z2 = ker.overlap_scan(1);

  // Leftmost maximizer of |z1| + |z2| with shifts ordered from -L/2 upward.
  std::size_t best = n / 2;
  double best_val = -1.0;
  double worst_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s_idx = (i + n / 2) % n;
    const double v = std::abs(z1[s_idx]) + std::abs(z2[s_idx]);
    if (v > best_val) {
      best_val = v;
      best = s_idx;
    }
    worst_val = std::min(worst_val, v);
  }

  bool degenerate = false;
  const double scale = std::max(ker.scale(0) + ker.scale(1), 1e-300);
  double x0 = static_cast<double>(best) * h;
  if (best_val - worst_val <= detail::kDegenerateOverlap * scale) {
    degenerate = true;
  } else {
    auto objective = [&](double x) { return std::abs(ker.overlap(0, x)) + std::abs(ker.overlap(1, x)); };
    auto [a, b] = detail::golden_max(objective, x0 - h, x0 + h, 1e-8 * length);
    x0 = 0.5 * (a + b);
    // Polish on the derivative, keeping the golden bracket as a safeguard.
    a -= 1e-8 * length;
    b += 1e-8 * length;
    for (int it = 0; it < 8; ++it) {
      cplx d1, d2;
      const cplx v1 = ker.overlap(0, x0, &d1);
      const cplx v2 = ker.overlap(1, x0, &d2);
      const double g1 = (std::abs(v1) > 0.0 ? (std::conj(v1) * d1).real() / std::abs(v1) : 0.0) +
                        (std::abs(v2) > 0.0 ? (std::conj(v2) * d2).real() / std::abs(v2) : 0.0);
      const double eps = 1e-6 * h;
      cplx e1, e2;
      const cplx u1 = ker.overlap(0, x0 + eps, &e1);
      const cplx u2 = ker.overlap(1, x0 + eps, &e2);
      const double g2 = (std::abs(u1) > 0.0 ? (std::conj(u1) * e1).real() / std::abs(u1) : 0.0) +
                        (std::abs(u2) > 0.0 ? (std::conj(u2) * e2).real() / std::abs(u2) : 0.0);
      const double curv = (g2 - g1) / eps;
      if (!(curv < 0.0)) break;
      const double next = x0 - g1 / curv;
      if (next < a || next > b) break;
      const double step = std::abs(next - x0);
      x0 = next;
      if (step < 1e-14 * length) break;
    }
  }
  x0 = detail::wrap_shift(x0, length);

  std::array<double, 2> th{};
  for (int k = 0; k < 2; ++k) {
    const cplx z = ker.overlap(k, x0);
    if (std::abs(z) <= detail::kDegenerateOverlap * std::max(ker.scale(k), 1e-300)) {
      degenerate = true;
      th[k] = 0.0;
    } else {
      th[k] = wrap_angle(-std::arg(z));
    }
  }
  const double i_omega = std::max(0.0, i_omega_value(s, prof, x0, th[0], th[1]));
  const auto [wx, wd] = detail::w_distance_min(s.w, prof.w);
  return OrbitalFit{.x0 = x0,
                    .theta1 = th[0],
                    .theta2 = th[1],
                    .i_omega = i_omega,
                    .rho = std::sqrt(i_omega),
                    .w_dist = std::sqrt(std::max(0.0, norm2_sq(translate(s.w, x0) - prof.w))),
                    .w_dist_min = wd,
                    .w_x0 = wx,
                    .degenerate = degenerate,
                    .increments = increments_at(s, prof, x0, th[0], th[1])};
}

}  // namespace lsi

#endif  // LSI_ORBITAL_METRIC_HPP
