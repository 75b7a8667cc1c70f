// lsi: command-line front end for the LSI solitary-wave toolkit.
//
//   lsi soliton   --config cfg --out dir    profile CSV + JSON sidecar
//   lsi evolve    ...                       trajectory CSV and field snapshots
//   lsi stability ...                       one perturbed run, JSON report
//   lsi sweep     ... --threads N           one run per sweep.deltas entry
//   lsi check     ...                       identity report JSON
//
// Exit codes: 0 all checks within tolerance, 1 tolerance violation,
// 2 usage or configuration error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "lsi/lsi.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
};

lsi::ExperimentConfig load(const Common& opt) {
  auto cfg = opt.config.empty() ? lsi::parse_config_string("") : lsi::load_config(opt.config);
  if (!opt.out.empty()) cfg.out_dir = opt.out;
  if (opt.seed) cfg.perturbation.seed = *opt.seed;
  return cfg;
}

fs::path prepare_out(const lsi::ExperimentConfig& cfg) {
  fs::path dir(cfg.out_dir);
  fs::create_directories(dir);
  lsi::write_text_file((dir / "config.cfg").string(), lsi::format_config(cfg));
  return dir;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

int cmd_soliton(const Common& opt) {
  const auto cfg = load(opt);
  const auto dir = prepare_out(cfg);
  const auto prof = lsi::ground_state_profile(cfg.params(), cfg.theta, cfg.grid());
  auto csv = open_out(dir / "profile.csv");
  lsi::write_profile_csv(csv, prof);
  auto side = lsi::profile_sidecar(prof);
  const auto [e1, e2] = lsi::residual_cs1(prof);
  side["ode_residuals"] = {e1, e2};
  open_out(dir / "profile.json") << side.dump(2) << '\n';
  std::cout << "profile written to " << (dir / "profile.csv").string() << " (ODE residuals " << e1 << ", " << e2
            << ")\n";
  return std::max(e1, e2) < 1e-8 ? kOk : kViolation;
}

int cmd_evolve(const Common& opt) {
  const auto cfg = load(opt);
  const auto dir = prepare_out(cfg);
  const auto prof = lsi::ground_state_profile(cfg.params(), cfg.theta, cfg.grid());
  const auto pert = lsi::perturb(prof, cfg.perturbation);
  lsi::RecordHook hook;
  if (cfg.snapshot_every > 0) {
    hook = [&](const lsi::LsiState& s, std::size_t k) {
      if (k % cfg.snapshot_every != 0) return;
      std::ostringstream stem;
      stem << "snapshot_" << std::setw(5) << std::setfill('0') << k;
      auto f1 = open_out(dir / (stem.str() + "_phi.csv"));
      lsi::write_csv(f1, s.phi);
      auto f2 = open_out(dir / (stem.str() + "_psi.csv"));
      lsi::write_csv(f2, s.psi);
      auto f3 = open_out(dir / (stem.str() + "_w.csv"));
      lsi::write_csv(f3, s.w);
    };
  }
  const auto rep = lsi::run_trajectory(pert.state, prof, cfg.run, hook);
  auto traj = open_out(dir / "trajectory.csv");
  lsi::write_trajectory(traj, rep.rows);
  std::cout << "trajectory: " << rep.rows.size() << " records, sup rho " << rep.sup_rho << ", L drift "
            << rep.drifts.L << '\n';
  if (rep.failed) std::cerr << "blow-up: " << rep.error << '\n';
  return rep.within_tolerance() ? kOk : kViolation;
}

int cmd_stability(const Common& opt) {
  const auto cfg = load(opt);
  const auto dir = prepare_out(cfg);
  const auto rep = lsi::run_stability(cfg);
  auto traj = open_out(dir / "trajectory.csv");
  lsi::write_trajectory(traj, rep.rows);
  const auto js = lsi::to_json(rep);
  open_out(dir / "stability.json") << js.dump(2) << '\n';
  std::cout << js.dump(2) << '\n';
  return rep.within_tolerance() ? kOk : kViolation;
}

int cmd_sweep(const Common& opt) {
  const auto cfg = load(opt);
  const auto dir = prepare_out(cfg);
  const auto summary = lsi::run_sweep(cfg, cfg.sweep_deltas, opt.threads);
  auto csv = open_out(dir / "sweep_summary.csv");
  lsi::write_sweep_csv(csv, summary);
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : summary.reports) runs.push_back(lsi::to_json(r));
  const nlohmann::json js{{"runs", runs},
                          {"quadratic_coefficient", summary.quadratic_coefficient},
                          {"loglog_slope", std::isfinite(summary.loglog_slope) ? nlohmann::json(summary.loglog_slope)
                                                                               : nlohmann::json(nullptr)},
                          {"delta_L0_positive", summary.delta_L0_positive},
                          {"rho_monotone", summary.rho_monotone},
                          {"rho_ratio_spread", summary.rho_ratio_spread},
                          {"w_monotone", summary.w_monotone},
                          {"w_ratio_spread", summary.w_ratio_spread}};
  open_out(dir / "sweep.json") << js.dump(2) << '\n';
  lsi::print_sweep_table(std::cout, summary);
  return summary.within_tolerance(cfg.perturbation.preserve_mass) ? kOk : kViolation;
}

int cmd_check(const Common& opt) {
  const auto cfg = load(opt);
  const auto dir = prepare_out(cfg);
  const auto rep = lsi::run_check(cfg);
  const auto js = lsi::to_json(rep);
  open_out(dir / "check.json") << js.dump(2) << '\n';
  std::cout << js.dump(2) << '\n';
  return rep.passed ? kOk : kViolation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral simulator and verification toolkit for the long wave-short wave interaction system"};
  app.require_subcommand(1);
  Common opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "configuration file (key = value)");
    sub->add_option("--out", opt.out, "output directory (overrides outputs.dir)");
    sub->add_option("--seed", opt.seed, "perturbation seed (overrides perturbation.seed)");
    sub->add_option("--threads", opt.threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
  };
  int (*handler)(const Common&) = nullptr;
  const std::pair<const char*, int (*)(const Common&)> commands[] = {
      {"soliton", cmd_soliton}, {"evolve", cmd_evolve}, {"stability", cmd_stability},
      {"sweep", cmd_sweep},     {"check", cmd_check}};
  const char* help[] = {"write the solitary-wave profile", "evolve the configured initial data",
                        "single perturbed stability run", "stability runs over sweep.deltas",
                        "static identity checks"};
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    auto* sub = app.add_subcommand(commands[i].first, help[i]);
    add_common(sub);
    sub->callback([&, i] { handler = commands[i].second; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    return handler(opt);
  } catch (const lsi::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kUsage;
  } catch (const lsi::ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kUsage;
  } catch (const lsi::ResolutionError& e) {
    std::cerr << "resolution error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kViolation;
  }
}
