#ifndef LSI_SPECTRAL_HPP
#define LSI_SPECTRAL_HPP

// Uniform periodic grids, real/complex fields on them, and the Fourier
// machinery every other module is built on: spectral derivatives, periodic
// trapezoid quadrature, L2 inner products, the N_Omega norm and continuous
// (sub-grid) translation by modal phase ramps.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <memory>
#include <mutex>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lsi/errors.hpp"

namespace lsi {

using cplx = std::complex<double>;

/// Uniform sampling of [center - length/2, center + length/2) with n points.
class PeriodicGrid {
 public:
  PeriodicGrid(std::size_t n, double length, double center = 0.0)
      : n_(n), length_(length), center_(center) {
    if (n < 8 || n % 2 != 0) {
      throw std::invalid_argument("PeriodicGrid: n must be even and >= 8, got " +
                                  std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
      throw std::invalid_argument("PeriodicGrid: length must be positive and finite");
    }
    if (!std::isfinite(center)) {
      throw std::invalid_argument("PeriodicGrid: center must be finite");
    }
  }

  std::size_t n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double center() const noexcept { return center_; }
  double spacing() const noexcept { return length_ / static_cast<double>(n_); }
  double left() const noexcept { return center_ - 0.5 * length_; }
  double x(std::size_t j) const noexcept { return left() + static_cast<double>(j) * spacing(); }

  std::vector<double> points() const {
    std::vector<double> xs(n_);
    for (std::size_t j = 0; j < n_; ++j) xs[j] = x(j);
    return xs;
  }

  /// Signed mode index of FFT slot j; the Nyquist slot maps to +n/2.
  long mode_index(std::size_t j) const noexcept {
    const auto jj = static_cast<long>(j);
    const auto nn = static_cast<long>(n_);
    return jj <= nn / 2 ? jj : jj - nn;
  }

  bool is_nyquist(std::size_t j) const noexcept { return j == n_ / 2; }

  /// k_j = 2 pi m_j / L.
  double wavenumber(std::size_t j) const noexcept {
    return 2.0 * std::numbers::pi * static_cast<double>(mode_index(j)) / length_;
  }

  double nyquist_wavenumber() const noexcept {
    return std::numbers::pi * static_cast<double>(n_) / length_;
  }

  /// Maps x into the fundamental cell [left, left + length).
  double wrap(double xv) const noexcept {
    double r = std::fmod(xv - left(), length_);
    if (r < 0.0) r += length_;
    if (r >= length_) r -= length_;
    return left() + r;
  }

  friend bool operator==(const PeriodicGrid& a, const PeriodicGrid& b) noexcept {
    return a.n_ == b.n_ && a.length_ == b.length_ && a.center_ == b.center_;
  }

 private:
  std::size_t n_;
  double length_;
  double center_;
};

/// Samples of a real or complex function on a PeriodicGrid.
template <class T>
class Field {
  static_assert(std::is_same_v<T, double> || std::is_same_v<T, cplx>,
                "Field holds double or std::complex<double>");

 public:
  using value_type = T;

  explicit Field(PeriodicGrid grid) : grid_(grid), samples_(grid.n(), T{}) {}

  Field(PeriodicGrid grid, std::vector<T> samples) : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.n()) {
      throw std::invalid_argument("Field: sample count " + std::to_string(samples_.size()) +
                                  " does not match grid size " + std::to_string(grid_.n()));
    }
  }

  template <class Fn>
  static Field from_function(const PeriodicGrid& grid, Fn&& fn) {
    std::vector<T> s(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) s[j] = static_cast<T>(fn(grid.x(j)));
    return Field(grid, std::move(s));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }

  std::span<const T> values() const noexcept { return samples_; }
  std::span<T> values() noexcept { return samples_; }
  const std::vector<T>& samples() const noexcept { return samples_; }

  const T& operator[](std::size_t j) const noexcept { return samples_[j]; }
  T& operator[](std::size_t j) noexcept { return samples_[j]; }

  Field& operator+=(const Field& o) {
    check(o, "operator+=");
    for (std::size_t j = 0; j < size(); ++j) samples_[j] += o.samples_[j];
    return *this;
  }
  Field& operator-=(const Field& o) {
    check(o, "operator-=");
    for (std::size_t j = 0; j < size(); ++j) samples_[j] -= o.samples_[j];
    return *this;
  }
  Field& operator*=(T a) {
    for (auto& v : samples_) v *= a;
    return *this;
  }

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, T s) { return a *= s; }
  friend Field operator*(T s, Field a) { return a *= s; }
  friend Field operator-(Field a) { return a *= T(-1.0); }

 private:
  void check(const Field& o, const char* where) const {
    if (!(grid_ == o.grid_)) throw GridMismatch(std::string("Field::") + where + ": grid mismatch");
  }

  PeriodicGrid grid_;
  std::vector<T> samples_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

inline void require_same_grid(const PeriodicGrid& a, const PeriodicGrid& b, const char* where) {
  if (!(a == b)) throw GridMismatch(std::string(where) + ": fields live on different grids");
}

// ---------------------------------------------------------------------------
// Pointwise helpers

template <class T, class Fn>
auto map(const Field<T>& f, Fn&& fn) {
  using R = std::decay_t<decltype(fn(f[0]))>;
  std::vector<R> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = fn(f[j]);
  return Field<R>(f.grid(), std::move(out));
}

template <class A, class B, class Fn>
auto zip(const Field<A>& f, const Field<B>& g, Fn&& fn) {
  require_same_grid(f.grid(), g.grid(), "zip");
  using R = std::decay_t<decltype(fn(f[0], g[0]))>;
  std::vector<R> out(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out[j] = fn(f[j], g[j]);
  return Field<R>(f.grid(), std::move(out));
}

template <class A, class B>
auto multiply(const Field<A>& f, const Field<B>& g) {
  return zip(f, g, [](auto a, auto b) { return a * b; });
}

inline ComplexField to_complex(const RealField& f) {
  return map(f, [](double v) { return cplx(v, 0.0); });
}
inline RealField real_part(const ComplexField& f) {
  return map(f, [](cplx v) { return v.real(); });
}
inline RealField imag_part(const ComplexField& f) {
  return map(f, [](cplx v) { return v.imag(); });
}
inline RealField abs2(const ComplexField& f) {
  return map(f, [](cplx v) { return std::norm(v); });
}
inline RealField square(const RealField& f) {
  return map(f, [](double v) { return v * v; });
}

template <class T>
double sup_norm(const Field<T>& f) {
  double m = 0.0;
  for (const auto& v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

template <class T>
bool all_finite(const Field<T>& f) {
  for (const auto& v : f.values()) {
    if constexpr (std::is_same_v<T, double>) {
      if (!std::isfinite(v)) return false;
    } else {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// FFT backend. FFTW plans are created under a process-wide lock (the planner
// is not re-entrant) and cached per thread; execution uses the new-array API.

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    std::vector<cplx> a(n), b(n);
    auto* pa = reinterpret_cast<fftw_complex*>(a.data());
    auto* pb = reinterpret_cast<fftw_complex*>(b.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
    std::lock_guard lock(fftw_planner_mutex());
    forward_ = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_1d(static_cast<int>(n), pa, pb, FFTW_BACKWARD, flags);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  void forward(const cplx* in, cplx* out) const {
    fftw_execute_dft(forward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  // Unnormalized.
  void backward(const cplx* in, cplx* out) const {
    fftw_execute_dft(backward_, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
  }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

inline const FftPlan& plan_for(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::unique_ptr<FftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<FftPlan>(n);
  return *slot;
}

}  // namespace detail

/// Forward DFT F_m = sum_j f_j exp(-2 pi i j m / n).
inline std::vector<cplx> fft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  detail::plan_for(in.size()).forward(in.data(), out.data());
  return out;
}

/// Inverse DFT including the 1/n normalization.
inline std::vector<cplx> ifft(std::span<const cplx> in) {
  std::vector<cplx> out(in.size());
  detail::plan_for(in.size()).backward(in.data(), out.data());
  const double s = 1.0 / static_cast<double>(in.size());
  for (auto& v : out) v *= s;
  return out;
}

template <class T>
std::vector<cplx> modes(const Field<T>& f) {
  if constexpr (std::is_same_v<T, cplx>) {
    return fft(f.values());
  } else {
    std::vector<cplx> tmp(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) tmp[j] = cplx(f[j], 0.0);
    return fft(tmp);
  }
}

template <class T>
Field<T> field_from_modes(const PeriodicGrid& grid, std::span<const cplx> m) {
  auto v = ifft(m);
  if constexpr (std::is_same_v<T, cplx>) {
    return Field<T>(grid, std::move(v));
  } else {
    std::vector<double> r(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) r[j] = v[j].real();
    return Field<T>(grid, std::move(r));
  }
}

/// Applies a Fourier multiplier symbol(j) slot by slot.
template <class T, class Symbol>
Field<T> apply_multiplier(const Field<T>& f, Symbol&& symbol) {
  auto m = modes(f);
  for (std::size_t j = 0; j < m.size(); ++j) m[j] *= symbol(j);
  return field_from_modes<T>(f.grid(), m);
}

/// Fourier symbol of d^order/dx^order; the Nyquist slot is zeroed for odd orders.
inline cplx derivative_symbol(const PeriodicGrid& g, std::size_t j, int order) {
  const double k = g.wavenumber(j);
  switch (order) {
    case 1:
      return g.is_nyquist(j) ? cplx(0.0) : cplx(0.0, k);
    case 2:
      return cplx(-k * k, 0.0);
    default:
      throw std::invalid_argument("derivative order must be 1 or 2, got " + std::to_string(order));
  }
}

/// Spectral derivative of order 1 or 2.
template <class T>
Field<T> deriv(const Field<T>& f, int order) {
  if (order != 1 && order != 2) {
    throw std::invalid_argument("deriv: order must be 1 or 2, got " + std::to_string(order));
  }
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) { return derivative_symbol(g, j, order); });
}

template <class T>
Field<T> deriv(const Field<T>& f, const PeriodicGrid& expected, int order) {
  require_same_grid(f.grid(), expected, "deriv");
  return deriv(f, order);
}

/// Modal phase of a shift by x0. The Nyquist slot uses cos so real fields stay real.
inline cplx shift_symbol(const PeriodicGrid& g, std::size_t j, double x0) {
  const double k = g.wavenumber(j);
  if (g.is_nyquist(j)) return cplx(std::cos(k * x0), 0.0);
  return std::polar(1.0, k * x0);
}

/// Returns x -> f(x + x0) on the periodic grid (any real x0, sub-grid included).
template <class T>
Field<T> translate(const Field<T>& f, double x0) {
  const auto& g = f.grid();
  return apply_multiplier(f, [&](std::size_t j) { return shift_symbol(g, j, x0); });
}

/// Band-limited interpolant of f evaluated at arbitrary points (periodic).
template <class T>
std::vector<T> evaluate(const Field<T>& f, std::span<const double> points) {
  const auto& g = f.grid();
  const auto m = modes(f);
  const double inv_n = 1.0 / static_cast<double>(g.n());
  std::vector<T> out(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) {
    const double y = points[p] - g.left();
    cplx acc(0.0);
    for (std::size_t j = 0; j < m.size(); ++j) acc += m[j] * shift_symbol(g, j, y);
    acc *= inv_n;
    if constexpr (std::is_same_v<T, double>) {
      out[p] = acc.real();
    } else {
      out[p] = acc;
    }
  }
  return out;
}

/// Zeroes modes with |m| > n/3 (2/3 rule).
inline void dealias_inplace(const PeriodicGrid& g, std::span<cplx> m) {
  const long cutoff = static_cast<long>(g.n()) / 3;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (std::abs(g.mode_index(j)) > cutoff) m[j] = 0.0;
  }
}

// ---------------------------------------------------------------------------
// Quadrature and norms

/// h * sum of samples (periodic trapezoid rule).
template <class T>
T quadrature(const Field<T>& f) {
  T acc{};
  for (const auto& v : f.values()) acc += v;
  return acc * f.grid().spacing();
}

/// <f, g> = integral of conj(f) g.
template <class A, class B>
cplx inner(const Field<A>& f, const Field<B>& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  cplx acc(0.0);
  for (std::size_t j = 0; j < f.size(); ++j) acc += std::conj(cplx(f[j])) * cplx(g[j]);
  return acc * f.grid().spacing();
}

/// Real inner product for real fields (no complex round trip).
inline double dot(const RealField& f, const RealField& g) {
  require_same_grid(f.grid(), g.grid(), "dot");
  double acc = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * g[j];
  return acc * f.grid().spacing();
}

template <class T>
double norm2_sq(const Field<T>& f) {
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::norm(v);
  return acc * f.grid().spacing();
}

template <class T>
double norm2(const Field<T>& f) {
  return std::sqrt(norm2_sq(f));
}

template <class T>
double h1_norm_sq(const Field<T>& f) {
  return norm2_sq(f) + norm2_sq(deriv(f, 1));
}

/// N_Omega(f) = Omega ||f||^2 + ||f_x||^2.
template <class T>
double n_omega(const Field<T>& f, double Omega) {
  if (!(Omega > 0.0)) throw std::invalid_argument("n_omega: Omega must be positive");
  return Omega * norm2_sq(f) + norm2_sq(deriv(f, 1));
}

// ---------------------------------------------------------------------------
// Snapshot export: x,value (real) or x,re,im (complex) at 17 significant digits.

template <class T>
void write_csv(std::ostream& os, const Field<T>& f) {
  const auto old_flags = os.flags();
  const auto old_prec = os.precision();
  os << std::setprecision(17);
  if constexpr (std::is_same_v<T, double>) {
    os << "x,value\n";
    for (std::size_t j = 0; j < f.size(); ++j) os << f.grid().x(j) << ',' << f[j] << '\n';
  } else {
    os << "x,re,im\n";
    for (std::size_t j = 0; j < f.size(); ++j) {
      os << f.grid().x(j) << ',' << f[j].real() << ',' << f[j].imag() << '\n';
    }
  }
  os.flags(old_flags);
  os.precision(old_prec);
}

}  // namespace lsi

#endif  // LSI_SPECTRAL_HPP
