#ifndef LSI_EXPERIMENT_HPP
#define LSI_EXPERIMENT_HPP

// Experiment orchestration: perturbations of the solitary wave, single
// stability runs, parameter sweeps over the perturbation size, and the static
// identity check report.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lsi/config.hpp"
#include "lsi/dynamics.hpp"
#include "lsi/functionals.hpp"
#include "lsi/model.hpp"
#include "lsi/orbital_metric.hpp"
#include "lsi/random_fields.hpp"
#include "lsi/spectral.hpp"
#include "lsi/stability_operators.hpp"

namespace lsi {

// ---------------------------------------------------------------------------
// Perturbations

struct Perturbed {
  LsiState state;
  double h1_phi = 0.0;  // |phi0 - Phi|_{H^1}
  double h1_psi = 0.0;
  double l2_w = 0.0;    // |w0 - W|_2
};

namespace detail {

inline ComplexField envelope(const ComplexField& f, const ComplexField& car) {
  return zip(f, car, [](cplx a, cplx e) { return a * std::conj(e); });
}

inline void rescale_mass(ComplexField& f, double target) {
  const double m = norm2(f);
  if (m > 0.0) f *= cplx(target / m, 0.0);
}

/// Scalar a_k = <Re(env_k) - R_k, R_k> / |R_k|^2 of the real increment along the ray.
inline double ray_coefficient(const ComplexField& env, const RealField& r) {
  return dot(real_part(env) - r, r) / norm2_sq(r);
}

}  // namespace detail

/// Perturbs the t = 0 solitary state of `prof`.
///
/// amplitude multiplies phi, psi by (1 + delta). Combined with preserve_mass
/// that would be undone exactly by the renormalization, so in that case the
/// envelope is instead dilated mass-preservingly: (1 + delta) E(x0 + (1 + delta)^2 (x - x0)).
inline Perturbed perturb(const SolitonProfile& prof, const PerturbationSpec& spec) {
  spec.validate();
  const auto& p = prof.params;
  const auto& g = prof.grid();
  const auto base = solitary_state(prof, 0.0);
  const auto car = carrier(g, p.c, 0.0);
  auto phi = base.phi;
  auto psi = base.psi;
  auto w = base.w;
  const double delta = spec.delta;
  const double xb = g.center() + spec.offset;

  if (delta > 0.0) {
    switch (spec.kind) {
      case PerturbationKind::amplitude: {
        if (spec.preserve_mass) {
          const double s = (1.0 + delta) * (1.0 + delta);
          std::vector<double> pts(g.n());
          for (std::size_t j = 0; j < g.n(); ++j) pts[j] = g.center() + s * (g.x(j) - g.center());
          for (auto* f : {&phi, &psi}) {
            auto vals = evaluate(detail::envelope(*f, car), pts);
            for (std::size_t j = 0; j < g.n(); ++j) vals[j] *= (1.0 + delta) * car[j];
            *f = ComplexField(g, std::move(vals));
          }
        } else {
          phi *= cplx(1.0 + delta, 0.0);
          psi *= cplx(1.0 + delta, 0.0);
        }
        break;
      }
      case PerturbationKind::localized_bump: {
        const auto bump = ComplexField::from_function(g, [&](double x) { return delta / std::cosh(2.0 * (x - xb)); });
        const auto add = multiply(bump, car);
        phi += add;
        psi += add;
        break;
      }
      case PerturbationKind::random_fourier: {
        Rng rng(spec.seed);
        const long max_mode = std::max<long>(4, static_cast<long>(g.n()) / 32);
        for (auto* f : {&phi, &psi}) {
          auto noise = random_band_limited(g, rng, max_mode);
          noise *= cplx(delta / std::sqrt(h1_norm_sq(noise)), 0.0);
          *f += noise;
        }
        break;
      }
      case PerturbationKind::w_only: {
        w += RealField::from_function(g, [&](double x) {
          const double s = 1.0 / std::cosh(x - xb);
          return delta * s * s;
        });
        break;
      }
    }

    const double m1 = norm2(prof.r1);
    const double m2 = norm2(prof.r2);
    if (spec.preserve_ray) {
      // Split env_k = (1 + a_k) R_k + rest_k and move both a_k to their mean.
      // With preserve_mass, |rest_k| is then set from
      // |env_k|^2 = (1 + a)^2 |R_k|^2 + |rest_k|^2 = |R_k|^2, which needs -2 <= a <= 0.
      if (spec.preserve_mass) {
        detail::rescale_mass(phi, m1);
        detail::rescale_mass(psi, m2);
      }
      std::array<ComplexField*, 2> fs{&phi, &psi};
      std::array<const RealField*, 2> rs{&prof.r1, &prof.r2};
      std::array<double, 2> a{};
      std::array<ComplexField, 2> rest{ComplexField(g), ComplexField(g)};
      int active = 0;
      for (int k = 0; k < 2; ++k) {
        if (norm2(*rs[k]) == 0.0) continue;
        const auto env = detail::envelope(*fs[k], car);
        a[k] = detail::ray_coefficient(env, *rs[k]);
        rest[k] = env - to_complex(*rs[k] * (1.0 + a[k]));
        ++active;
      }
      if (active == 2) {
        double target = 0.5 * (a[0] + a[1]);
        if (spec.preserve_mass) target = std::clamp(target, -2.0, 0.0);
        for (int k = 0; k < 2; ++k) {
          const double rn2 = norm2_sq(*rs[k]);
          if (spec.preserve_mass) {
            const double want = std::sqrt(std::max(0.0, rn2 * (1.0 - (1.0 + target) * (1.0 + target))));
            const double have = norm2(rest[k]);
            if (have > 0.0) rest[k] *= cplx(want / have, 0.0);
          }
          *fs[k] = multiply(to_complex(*rs[k] * (1.0 + target)) + rest[k], car);
        }
      }
    } else if (spec.preserve_mass) {
      detail::rescale_mass(phi, m1);
      detail::rescale_mass(psi, m2);
    }
  }

  const double h1_phi = std::sqrt(h1_norm_sq(phi - base.phi));
  const double h1_psi = std::sqrt(h1_norm_sq(psi - base.psi));
  const double l2_w = norm2(w - base.w);
  return Perturbed{LsiState(std::move(phi), std::move(psi), std::move(w), 0.0), h1_phi, h1_psi, l2_w};
}

// ---------------------------------------------------------------------------
// Stability runs

struct TrajectoryRow {
  InvariantRecord inv;
  double mean_w = 0.0;
  double rho = 0.0;
  double i_omega = 0.0;
  double x0 = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double w_dist_shared = 0.0;
  double w_dist_min = 0.0;
};

inline TrajectoryRow trajectory_row(const LsiState& s, const SolitonProfile& prof) {
  const auto fit = orbital_distance(s, prof);
  return TrajectoryRow{invariants(s, prof.params), quadrature(s.w) / s.grid().length(), fit.rho, fit.i_omega,
                       fit.x0, fit.theta1, fit.theta2, fit.w_dist, fit.w_dist_min};
}

/// Thresholds a run is judged against (conservation of the scheme).
inline constexpr double kMassDriftTolerance = 1e-9;
inline constexpr double kInvariantDriftTolerance = 1e-8;
inline constexpr double kMeanWDriftTolerance = 1e-12;

struct StabilityReport {
  PerturbationKind kind = PerturbationKind::amplitude;
  double delta = 0.0;
  std::uint64_t seed = 0;
  bool preserve_mass = false;
  double h1_phi = 0.0;
  double h1_psi = 0.0;
  double l2_w = 0.0;
  double sup_rho = 0.0;
  double final_rho = 0.0;
  double sup_w_dist = 0.0;      // shared x0
  double sup_w_dist_min = 0.0;  // independently translated
  InvariantDrifts drifts;
  double mean_w_drift = 0.0;    // max |mean(w)(t) - mean(w)(0)|
  double delta_L0 = 0.0;        // L(perturbed) - L(soliton)
  double delta_L_drift = 0.0;   // max |dL(t) - dL(0)| relative to the size of L's terms
  double runtime_s = 0.0;
  bool failed = false;
  double failure_time = 0.0;
  std::string error;
  std::vector<TrajectoryRow> rows;

  bool within_tolerance() const {
    return !failed && std::isfinite(sup_rho) && drifts.I1 < kMassDriftTolerance && drifts.I2 < kMassDriftTolerance &&
           drifts.I3 < kInvariantDriftTolerance && drifts.I4 < kInvariantDriftTolerance &&
           drifts.L < kInvariantDriftTolerance && delta_L_drift < kInvariantDriftTolerance;
  }
};

using RecordHook = std::function<void(const LsiState&, std::size_t record_index)>;

/// Evolves `initial` and records invariants and the orbital fit against `prof`.
inline StabilityReport run_trajectory(const LsiState& initial, const SolitonProfile& prof, const EvolveConfig& run,
                                      const RecordHook& hook = {}) {
  const auto start = std::chrono::steady_clock::now();
  const auto& p = prof.params;
  StabilityReport rep;
  const double l_soliton = lyapunov(solitary_state(prof, 0.0), p);
  std::size_t index = 0;
  auto observer = [&](const LsiState& s) {
    rep.rows.push_back(trajectory_row(s, prof));
    if (hook) hook(s, index);
    ++index;
    return 0;
  };
  try {
    (void)evolve(initial, p, run, observer);
  } catch (const BlowUpError& e) {
    rep.failed = true;
    rep.failure_time = e.time();
    rep.error = e.what();
  }
  if (!rep.rows.empty()) {
    const auto& r0 = rep.rows.front();
    rep.delta_L0 = r0.inv.L - l_soliton;
    for (const auto& r : rep.rows) {
      rep.sup_rho = std::max(rep.sup_rho, r.rho);
      rep.sup_w_dist = std::max(rep.sup_w_dist, r.w_dist_shared);
      rep.sup_w_dist_min = std::max(rep.sup_w_dist_min, r.w_dist_min);
      rep.drifts.absorb(r.inv, r0.inv);
      rep.mean_w_drift = std::max(rep.mean_w_drift, std::abs(r.mean_w - r0.mean_w));
      rep.delta_L_drift = std::max(rep.delta_L_drift, std::abs(r.inv.L - r0.inv.L) / r0.inv.L_scale);
    }
    rep.final_rho = rep.rows.back().rho;
  }
  rep.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline StabilityReport run_stability(const ExperimentConfig& cfg, const RecordHook& hook = {}) {
  cfg.validate();
  const auto p = cfg.params();
  const auto prof = ground_state_profile(p, cfg.theta, cfg.grid());
  const auto pert = perturb(prof, cfg.perturbation);
  auto rep = run_trajectory(pert.state, prof, cfg.run, hook);
  rep.kind = cfg.perturbation.kind;
  rep.delta = cfg.perturbation.delta;
  rep.seed = cfg.perturbation.seed;
  rep.preserve_mass = cfg.perturbation.preserve_mass;
  rep.h1_phi = pert.h1_phi;
  rep.h1_psi = pert.h1_psi;
  rep.l2_w = pert.l2_w;
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepSummary {
  std::vector<StabilityReport> reports;
  double quadratic_coefficient = 0.0;  // a in dL(0) ~ a delta^2 (least squares)
  double loglog_slope = std::numeric_limits<double>::quiet_NaN();  // of dL(0) vs delta
  bool delta_L0_positive = true;
  bool rho_monotone = true;
  bool w_monotone = true;
  double rho_ratio_spread = 1.0;  // max/min of sup_rho / delta
  double w_ratio_spread = 1.0;
  bool any_failed = false;

  bool within_tolerance(bool mass_preserving) const {
    if (reports.empty()) return true;
    bool ok = !any_failed && rho_monotone && rho_ratio_spread < 3.0;
    for (const auto& r : reports) ok = ok && r.within_tolerance();
    if (mass_preserving) ok = ok && delta_L0_positive;
    return ok;
  }
};

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

inline SweepSummary summarize_sweep(std::vector<StabilityReport> reports) {
  SweepSummary s;
  s.reports = std::move(reports);
  if (s.reports.empty()) return s;
  double num = 0.0, den = 0.0;
  std::vector<double> ds, dl;
  double rmin = std::numeric_limits<double>::infinity(), rmax = 0.0;
  double wmin = std::numeric_limits<double>::infinity(), wmax = 0.0;
  for (std::size_t i = 0; i < s.reports.size(); ++i) {
    const auto& r = s.reports[i];
    s.any_failed = s.any_failed || r.failed;
    const double d2 = r.delta * r.delta;
    num += d2 * r.delta_L0;
    den += d2 * d2;
    ds.push_back(r.delta);
    dl.push_back(r.delta_L0);
    s.delta_L0_positive = s.delta_L0_positive && r.delta_L0 > 0.0;
    rmin = std::min(rmin, r.sup_rho / r.delta);
    rmax = std::max(rmax, r.sup_rho / r.delta);
    wmin = std::min(wmin, r.sup_w_dist / r.delta);
    wmax = std::max(wmax, r.sup_w_dist / r.delta);
    if (i > 0) {
      s.rho_monotone = s.rho_monotone && r.sup_rho > s.reports[i - 1].sup_rho;
      s.w_monotone = s.w_monotone && r.sup_w_dist > s.reports[i - 1].sup_w_dist;
    }
  }
  s.quadratic_coefficient = den > 0.0 ? num / den : 0.0;
  s.loglog_slope = loglog_slope(ds, dl);
  s.rho_ratio_spread = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
  s.w_ratio_spread = wmin > 0.0 ? wmax / wmin : std::numeric_limits<double>::infinity();
  return s;
}

/// One stability run per delta on a pool of at most `threads` workers. A
/// failing run is reported in place and does not stop the others.
inline SweepSummary run_sweep(const ExperimentConfig& cfg, const std::vector<double>& deltas, unsigned threads = 1) {
  cfg.validate();
  std::vector<StabilityReport> reports(deltas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < deltas.size(); i = next++) {
      auto run_cfg = cfg;
      run_cfg.perturbation.delta = deltas[i];
      try {
        reports[i] = run_stability(run_cfg);
      } catch (const std::exception& e) {
        reports[i].kind = run_cfg.perturbation.kind;
        reports[i].delta = deltas[i];
        reports[i].seed = run_cfg.perturbation.seed;
        reports[i].failed = true;
        reports[i].error = e.what();
      }
    }
  };
  const unsigned nt = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(deltas.size())));
  if (nt <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return summarize_sweep(std::move(reports));
}

inline void write_sweep_csv(std::ostream& os, const SweepSummary& s) {
  os << std::setprecision(17) << "delta,sup_rho,final_rho,sup_w_dist,sup_w_dist_min,delta_L0,delta_L_drift,failed\n";
  for (const auto& r : s.reports) {
    os << r.delta << ',' << r.sup_rho << ',' << r.final_rho << ',' << r.sup_w_dist << ',' << r.sup_w_dist_min << ','
       << r.delta_L0 << ',' << r.delta_L_drift << ',' << (r.failed ? 1 : 0) << '\n';
  }
}

inline void print_sweep_table(std::ostream& os, const SweepSummary& s) {
  const auto flags = os.flags();
  os << std::left << std::setw(11) << "delta" << std::setw(13) << "sup_rho" << std::setw(13) << "rho/delta"
     << std::setw(13) << "final_rho" << std::setw(13) << "sup_w_dist" << std::setw(13) << "delta_L0" << "status\n";
  os << std::scientific << std::setprecision(4);
  for (const auto& r : s.reports) {
    os << std::setw(11) << r.delta << std::setw(13) << r.sup_rho << std::setw(13) << r.sup_rho / r.delta
       << std::setw(13) << r.final_rho << std::setw(13) << r.sup_w_dist << std::setw(13) << r.delta_L0
       << (r.failed ? "FAILED: " + r.error : "ok") << '\n';
  }
  if (!s.reports.empty()) {
    os << "quadratic fit dL0 ~ a delta^2: a = " << s.quadratic_coefficient << '\n'
       << "log-log slope of dL0:          " << s.loglog_slope << '\n'
       << "sup_rho/delta spread:          " << s.rho_ratio_spread << (s.rho_monotone ? " (monotone)" : " (NOT monotone)")
       << '\n';
  }
  os.flags(flags);
}

// ---------------------------------------------------------------------------
// Identity check report

struct CheckTolerances {
  double residual = 1e-8;
  double rayleigh_zero = 1e-8;
  double alignment = 0.999;
  double j_gradient = 1e-6;
};

struct CheckReport {
  std::pair<double, double> ode_residuals;
  std::pair<double, double> pohozaev;
  std::array<double, 3> kernel_identities{};
  double mu_constrained = 0.0;
  std::array<double, 2> mu_components{};
  double rayleigh_p_min = 0.0;
  double rayleigh_p_alignment = 0.0;
  double j_value = 0.0;
  double j_gradient_norm = 0.0;
  bool passed = false;
};

inline CheckReport run_check(const ExperimentConfig& cfg, const CheckTolerances& tol = {}) {
  cfg.validate();
  const auto p = cfg.params();
  const auto prof = ground_state_profile(p, cfg.theta, cfg.grid());
  CheckReport rep;
  rep.ode_residuals = residual_cs1(prof);
  rep.pohozaev = pohozaev_residuals(prof);
  rep.kernel_identities = kernel_identities(prof);

  // A component that vanishes identically (theta = 0 or pi/2) carries no constraint.
  rep.mu_constrained = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 2; ++k) {
    const auto& r = k == 1 ? prof.r1 : prof.r2;
    if (sup_norm(r) == 0.0) {
      rep.mu_components[k - 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    rep.mu_components[k - 1] = constrained_rayleigh(prof, QuadraticForm::l0, l0_constraints(prof, k)).mu;
    rep.mu_constrained = std::min(rep.mu_constrained, rep.mu_components[k - 1]);
  }

  std::vector<BlockField> pc;
  const RealField zero(prof.grid());
  if (sup_norm(prof.r1) > 0.0) pc.push_back(BlockField{prof.r1, zero});
  if (sup_norm(prof.r2) > 0.0) pc.push_back(BlockField{zero, prof.r2});
  const auto rp = constrained_rayleigh(prof, QuadraticForm::p_block, pc);
  rep.rayleigh_p_min = rp.mu;
  const BlockField translation{deriv(prof.r1, 1), deriv(prof.r2, 1)};
  if (pc.size() == 2) {
    rep.rayleigh_p_alignment = block_cosine(rp.minimizer, translation);
  } else {
    // With one component identically zero its constraint is vacuous and the
    // rotation mode (-R2, R1) joins the kernel; measure against both modes.
    const BlockField rotation{prof.r2 * -1.0, prof.r1};
    double tt = 0.0, rr = 0.0, mt = 0.0, mr = 0.0, mm = 0.0;
    for (std::size_t c = 0; c < 2; ++c) {
      tt += norm2_sq(translation[c]);
      rr += norm2_sq(rotation[c]);
      mt += dot(rp.minimizer[c], translation[c]);
      mr += dot(rp.minimizer[c], rotation[c]);
      mm += norm2_sq(rp.minimizer[c]);
    }
    // translation and rotation are L2-orthogonal (odd against even).
    rep.rayleigh_p_alignment = std::sqrt((mt * mt / tt + mr * mr / rr) / mm);
  }

  rep.j_value = j_functional(prof.r1, prof.r2);
  rep.j_gradient_norm = j_tangent_gradient(prof, 10, cfg.perturbation.seed);

  const auto small = [&](double v) { return std::abs(v) < tol.residual; };
  rep.passed = small(rep.ode_residuals.first) && small(rep.ode_residuals.second) && small(rep.pohozaev.first) &&
               small(rep.pohozaev.second) && small(rep.kernel_identities[0]) && small(rep.kernel_identities[1]) &&
               small(rep.kernel_identities[2]) && rep.mu_constrained > 0.0 &&
               std::abs(rep.rayleigh_p_min) < tol.rayleigh_zero && rep.rayleigh_p_alignment > tol.alignment &&
               rep.j_gradient_norm < tol.j_gradient;
  return rep;
}

inline nlohmann::json to_json(const CheckReport& r) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return nlohmann::json{
      {"ode_residuals", {r.ode_residuals.first, r.ode_residuals.second}},
      {"pohozaev", {r.pohozaev.first, r.pohozaev.second}},
      {"kernel_identities", {r.kernel_identities[0], r.kernel_identities[1], r.kernel_identities[2]}},
      {"mu_constrained", num(r.mu_constrained)},
      {"mu_components", {num(r.mu_components[0]), num(r.mu_components[1])}},
      {"rayleigh_p_min", r.rayleigh_p_min},
      {"rayleigh_p_alignment", r.rayleigh_p_alignment},
      {"j_value", r.j_value},
      {"j_gradient_norm", r.j_gradient_norm},
      {"passed", r.passed},
  };
}

inline nlohmann::json to_json(const StabilityReport& r) {
  return nlohmann::json{
      {"kind", std::string(to_string(r.kind))},
      {"delta", r.delta},
      {"seed", r.seed},
      {"preserve_mass", r.preserve_mass},
      {"h1_phi", r.h1_phi},
      {"h1_psi", r.h1_psi},
      {"l2_w", r.l2_w},
      {"sup_rho", r.sup_rho},
      {"final_rho", r.final_rho},
      {"sup_w_dist", r.sup_w_dist},
      {"sup_w_dist_min", r.sup_w_dist_min},
      {"invariant_drifts", {{"I1", r.drifts.I1}, {"I2", r.drifts.I2}, {"I3", r.drifts.I3}, {"I4", r.drifts.I4},
                            {"L", r.drifts.L}}},
      {"mean_w_drift", r.mean_w_drift},
      {"delta_L0", r.delta_L0},
      {"delta_L_drift", r.delta_L_drift},
      {"runtime_s", r.runtime_s},
      {"failed", r.failed},
      {"failure_time", r.failure_time},
      {"error", r.error},
      {"within_tolerance", r.within_tolerance()},
  };
}

// ---------------------------------------------------------------------------
// Variation of the Lyapunov functional

/// |L(soliton + eps * e) - L(soliton)| with e = (e1 carrier, e2 carrier, e3) built
/// from seeded real bumps normalized to unit H^1 x H^1 x L^2 norm.
inline std::vector<double> lyapunov_increments(const SolitonProfile& prof, std::uint64_t seed,
                                               const std::vector<double>& eps) {
  const auto& p = prof.params;
  const auto& g = prof.grid();
  const auto base = solitary_state(prof, 0.0);
  const double l0 = lyapunov(base, p);
  Rng rng(seed);
  auto e1 = random_bumps(g, rng);
  auto e2 = random_bumps(g, rng);
  auto e3 = random_bumps(g, rng);
  const double nrm = std::sqrt(h1_norm_sq(e1) + h1_norm_sq(e2) + norm2_sq(e3));
  const auto car = carrier(g, p.c, 0.0);
  const auto d1 = multiply(to_complex(e1 * (1.0 / nrm)), car);
  const auto d2 = multiply(to_complex(e2 * (1.0 / nrm)), car);
  const auto d3 = e3 * (1.0 / nrm);
  std::vector<double> out;
  for (double e : eps) {
    const LsiState s(base.phi + d1 * cplx(e, 0.0), base.psi + d2 * cplx(e, 0.0), base.w + d3 * e, 0.0);
    out.push_back(std::abs(lyapunov(s, p) - l0));
  }
  return out;
}

}  // namespace lsi

#endif  // LSI_EXPERIMENT_HPP
