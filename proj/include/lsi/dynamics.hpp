#ifndef LSI_DYNAMICS_HPP
#define LSI_DYNAMICS_HPP

// Fourier pseudospectral integration of
//
//   i phi_t + phi_xx = beta w phi,
//   i psi_t + psi_xx = beta w psi,
//   w_t = beta (|phi|^2 + |psi|^2)_x
//
// with integrating-factor RK4 (Lawson): the dispersion exp(-i k^2 t) of phi and
// psi is applied exactly in modal space, the remaining nonlinear terms are
// integrated by classical RK4. w has no linear part and is stepped directly.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "lsi/errors.hpp"
#include "lsi/model.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

struct EvolveConfig {
  double dt = 1e-3;
  double t_end = 0.0;
  std::size_t record_every = 100;
  bool dealias = true;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("EvolveConfig: dt must be positive");
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("EvolveConfig: t_end must be >= 0");
    if (record_every < 1) throw std::invalid_argument("EvolveConfig: record_every must be >= 1");
  }
};

struct StateDerivative {
  ComplexField dphi;
  ComplexField dpsi;
  RealField dw;
};

namespace detail {

struct ModalState {
  std::vector<cplx> phi;
  std::vector<cplx> psi;
  std::vector<cplx> w;
};

inline ModalState to_modal(const LsiState& s) { return {modes(s.phi), modes(s.psi), modes(s.w)}; }

inline LsiState from_modal(const PeriodicGrid& g, const ModalState& m, double t) {
  return LsiState(field_from_modes<cplx>(g, m.phi), field_from_modes<cplx>(g, m.psi),
                  field_from_modes<double>(g, m.w), t);
}

class IfRk4 {
 public:
  IfRk4(const PeriodicGrid& g, const PhysParams& p, bool dealias)
      : grid_(g), params_(p), dealias_(dealias), k2_(g.n()), dx_(g.n()) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double k = g.wavenumber(j);
      k2_[j] = k * k;
      dx_[j] = derivative_symbol(g, j, 1);
    }
    if (dealias_) {
      mask_.assign(g.n(), 1.0);
      const long cutoff = static_cast<long>(g.n()) / 3;
      for (std::size_t j = 0; j < g.n(); ++j) {
        if (std::abs(g.mode_index(j)) > cutoff) mask_[j] = 0.0;
      }
    }
  }

  /// Nonlinear part in modal form: (-i beta w phi, -i beta w psi, beta d_x(|phi|^2+|psi|^2)).
  ModalState nonlinear(const ModalState& u) const {
    const std::size_t n = grid_.n();
    auto phi = physical(u.phi);
    auto psi = physical(u.psi);
    auto w = physical(u.w);
    const cplx mib(0.0, -params_.beta);
    std::vector<cplx> a(n), b(n), d(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = w[j].real();
      a[j] = mib * wj * phi[j];
      b[j] = mib * wj * psi[j];
      d[j] = params_.beta * (std::norm(phi[j]) + std::norm(psi[j]));
    }
    ModalState out{fft(a), fft(b), fft(d)};
    for (std::size_t j = 0; j < n; ++j) out.w[j] *= dx_[j];
    if (dealias_) {
      for (std::size_t j = 0; j < n; ++j) {
        out.phi[j] *= mask_[j];
        out.psi[j] *= mask_[j];
        out.w[j] *= mask_[j];
      }
    }
    return out;
  }

  /// Full time derivative in modal form (linear dispersion included).
  ModalState full_rhs(const ModalState& u) const {
    auto out = nonlinear(u);
    for (std::size_t j = 0; j < grid_.n(); ++j) {
      const cplx lin(0.0, -k2_[j]);
      out.phi[j] += lin * u.phi[j];
      out.psi[j] += lin * u.psi[j];
    }
    return out;
  }

  void step(ModalState& u, double dt) const {
    const std::size_t n = grid_.n();
    std::vector<cplx> e(n);
    for (std::size_t j = 0; j < n; ++j) e[j] = std::polar(1.0, -0.5 * k2_[j] * dt);

    // Lawson RK4 with per-component half-step factor E (E = 1 for w).
    const auto k1 = nonlinear(u);
    ModalState s = u;
    for (std::size_t j = 0; j < n; ++j) {
      s.phi[j] = e[j] * (u.phi[j] + 0.5 * dt * k1.phi[j]);
      s.psi[j] = e[j] * (u.psi[j] + 0.5 * dt * k1.psi[j]);
      s.w[j] = u.w[j] + 0.5 * dt * k1.w[j];
    }
    const auto k2 = nonlinear(s);
    for (std::size_t j = 0; j < n; ++j) {
      s.phi[j] = e[j] * u.phi[j] + 0.5 * dt * k2.phi[j];
      s.psi[j] = e[j] * u.psi[j] + 0.5 * dt * k2.psi[j];
      s.w[j] = u.w[j] + 0.5 * dt * k2.w[j];
    }
    const auto k3 = nonlinear(s);
    for (std::size_t j = 0; j < n; ++j) {
      const cplx e2 = e[j] * e[j];
      s.phi[j] = e2 * u.phi[j] + dt * e[j] * k3.phi[j];
      s.psi[j] = e2 * u.psi[j] + dt * e[j] * k3.psi[j];
      s.w[j] = u.w[j] + dt * k3.w[j];
    }
    const auto k4 = nonlinear(s);
    const double c6 = dt / 6.0;
    for (std::size_t j = 0; j < n; ++j) {
      const cplx e1 = e[j];
      const cplx e2 = e1 * e1;
      u.phi[j] = e2 * u.phi[j] +
                 c6 * (e2 * k1.phi[j] + 2.0 * e1 * (k2.phi[j] + k3.phi[j]) + k4.phi[j]);
      u.psi[j] = e2 * u.psi[j] +
                 c6 * (e2 * k1.psi[j] + 2.0 * e1 * (k2.psi[j] + k3.psi[j]) + k4.psi[j]);
      u.w[j] = u.w[j] + c6 * (k1.w[j] + 2.0 * (k2.w[j] + k3.w[j]) + k4.w[j]);
    }
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }

 private:
  std::vector<cplx> physical(const std::vector<cplx>& m) const {
    if (!dealias_) return ifft(m);
    std::vector<cplx> t(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) t[j] = m[j] * mask_[j];
    return ifft(t);
  }

  PeriodicGrid grid_;
  PhysParams params_;
  bool dealias_;
  std::vector<double> k2_;
  std::vector<cplx> dx_;
  std::vector<double> mask_;
};

inline bool modal_finite(const ModalState& m) {
  double acc = 0.0;
  for (const auto* v : {&m.phi, &m.psi, &m.w}) {
    for (const auto& z : *v) acc += std::abs(z.real()) + std::abs(z.imag());
  }
  return std::isfinite(acc);
}

}  // namespace detail

/// (phi_t, psi_t, w_t) evaluated spectrally; products 2/3-truncated when dealias is set.
inline StateDerivative rhs(const LsiState& s, const PhysParams& p, bool dealias = true) {
  const detail::IfRk4 op(s.grid(), p, dealias);
  const auto d = op.full_rhs(detail::to_modal(s));
  const auto& g = s.grid();
  return {field_from_modes<cplx>(g, d.phi), field_from_modes<cplx>(g, d.psi),
          field_from_modes<double>(g, d.w)};
}

/// One integrating-factor RK4 step. A negative dt integrates backward in time.
inline LsiState step_ifrk4(const LsiState& s, const PhysParams& p, double dt, bool dealias = true) {
  if (dt == 0.0 || !std::isfinite(dt)) throw std::invalid_argument("step_ifrk4: dt must be finite and non-zero");
  const detail::IfRk4 op(s.grid(), p, dealias);
  auto m = detail::to_modal(s);
  op.step(m, dt);
  if (!detail::modal_finite(m)) throw BlowUpError(1, s.t + dt);
  return detail::from_modal(s.grid(), m, s.t + dt);
}

template <class Payload>
struct Record {
  double t;
  Payload payload;
};

template <class Payload>
struct EvolveResult {
  LsiState final_state;
  std::vector<Record<Payload>> records;
};

/// Integrates from s.t to config.t_end, calling observer at the start, every
/// record_every steps and at t_end. The last step is shortened to land on t_end.
template <class Observer>
auto evolve(const LsiState& s, const PhysParams& p, const EvolveConfig& config, Observer&& observer)
    -> EvolveResult<std::decay_t<std::invoke_result_t<Observer&, const LsiState&>>> {
  using Payload = std::decay_t<std::invoke_result_t<Observer&, const LsiState&>>;
  config.validate();
  if (config.t_end < s.t) throw std::invalid_argument("evolve: t_end precedes the state's time");

  const auto& g = s.grid();
  const detail::IfRk4 op(g, p, config.dealias);
  EvolveResult<Payload> result{s, {}};
  result.records.push_back({s.t, observer(s)});

  const double span = config.t_end - s.t;
  if (span <= 0.0) return result;
  auto nsteps = static_cast<std::size_t>(std::ceil(span / config.dt - 1e-9));
  if (nsteps == 0) nsteps = 1;

  auto m = detail::to_modal(s);
  double t = s.t;
  for (std::size_t k = 1; k <= nsteps; ++k) {
    const bool last = (k == nsteps);
    const double t_next = last ? config.t_end : s.t + static_cast<double>(k) * config.dt;
    op.step(m, t_next - t);
    if (!detail::modal_finite(m)) throw BlowUpError(k, t_next);
    t = t_next;
    if (last || k % config.record_every == 0) {
      auto state = detail::from_modal(g, m, t);
      result.records.push_back({t, observer(state)});
      if (last) result.final_state = std::move(state);
    }
  }
  return result;
}

/// Fixed number of steps with no observer; handy for tests and backward runs.
inline LsiState advance(const LsiState& s, const PhysParams& p, double dt, std::size_t steps,
                        bool dealias = true) {
  const detail::IfRk4 op(s.grid(), p, dealias);
  auto m = detail::to_modal(s);
  for (std::size_t k = 1; k <= steps; ++k) {
    op.step(m, dt);
    if (!detail::modal_finite(m)) throw BlowUpError(k, s.t + static_cast<double>(k) * dt);
  }
  return detail::from_modal(s.grid(), m, s.t + static_cast<double>(steps) * dt);
}

}  // namespace lsi

#endif  // LSI_DYNAMICS_HPP
