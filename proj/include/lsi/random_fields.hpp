#ifndef LSI_RANDOM_FIELDS_HPP
#define LSI_RANDOM_FIELDS_HPP

// Seeded smooth random fields used for perturbations, trial functions and
// property checks. Everything draws from std::mt19937_64 so a seed fully
// determines the output on a given platform.

#include <cmath>
#include <cstdint>
#include <random>

#include "lsi/spectral.hpp"

namespace lsi {

using Rng = std::mt19937_64;

struct BumpSpec {
  double spread = 6.0;     // centers drawn from center +- spread
  double min_width = 0.5;  // sech widths drawn from [min_width, max_width]
  double max_width = 3.0;
  int min_bumps = 2;
  int max_bumps = 6;
};

/// Sum of a few sech bumps with random centers, widths and signed amplitudes.
inline RealField random_bumps(const PeriodicGrid& g, Rng& rng, const BumpSpec& spec = {}) {
  std::uniform_int_distribution<int> count(spec.min_bumps, spec.max_bumps);
  std::uniform_real_distribution<double> pos(-spec.spread, spec.spread);
  std::uniform_real_distribution<double> width(spec.min_width, spec.max_width);
  std::normal_distribution<double> amp(0.0, 1.0);
  RealField f(g);
  const int nb = count(rng);
  for (int b = 0; b < nb; ++b) {
    const double x0 = g.center() + pos(rng);
    const double s = width(rng);
    const double a = amp(rng);
    for (std::size_t j = 0; j < g.n(); ++j) f[j] += a / std::cosh((g.x(j) - x0) / s);
  }
  return f;
}

/// Strictly positive localized trial function: positive amplitudes only.
inline RealField random_positive_bumps(const PeriodicGrid& g, Rng& rng, const BumpSpec& spec = {}) {
  std::uniform_int_distribution<int> count(spec.min_bumps, spec.max_bumps);
  std::uniform_real_distribution<double> pos(-spec.spread, spec.spread);
  std::uniform_real_distribution<double> width(spec.min_width, spec.max_width);
  std::uniform_real_distribution<double> amp(0.1, 2.0);
  RealField f(g);
  const int nb = count(rng);
  for (int b = 0; b < nb; ++b) {
    const double x0 = g.center() + pos(rng);
    const double s = width(rng);
    const double a = amp(rng);
    for (std::size_t j = 0; j < g.n(); ++j) f[j] += a / std::cosh((g.x(j) - x0) / s);
  }
  return f;
}

/// Complex band-limited noise with modes |m| <= max_mode and Gaussian coefficients
/// damped as 1/(1 + (m/max_mode)^2).
inline ComplexField random_band_limited(const PeriodicGrid& g, Rng& rng, long max_mode) {
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<cplx> m(g.n(), cplx(0.0));
  for (std::size_t j = 0; j < g.n(); ++j) {
    const long idx = g.mode_index(j);
    if (std::abs(idx) > max_mode || g.is_nyquist(j)) continue;
    const double r = static_cast<double>(idx) / static_cast<double>(max_mode);
    const double damp = 1.0 / (1.0 + r * r);
    m[j] = cplx(nd(rng), nd(rng)) * damp;
  }
  return field_from_modes<cplx>(g, m);
}

}  // namespace lsi

#endif  // LSI_RANDOM_FIELDS_HPP
