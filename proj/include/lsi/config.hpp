#ifndef LSI_CONFIG_HPP
#define LSI_CONFIG_HPP

// Flat `section.key = value` experiment configuration. Parsing is strict:
// unknown keys, repeated keys and malformed values are ConfigErrors.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lsi/dynamics.hpp"
#include "lsi/errors.hpp"
#include "lsi/model.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

enum class PerturbationKind { amplitude, localized_bump, random_fourier, w_only };

inline std::string_view to_string(PerturbationKind k) {
  switch (k) {
    case PerturbationKind::amplitude: return "amplitude";
    case PerturbationKind::localized_bump: return "localized_bump";
    case PerturbationKind::random_fourier: return "random_fourier";
    case PerturbationKind::w_only: return "w_only";
  }
  return "?";
}

struct PerturbationSpec {
  PerturbationKind kind = PerturbationKind::amplitude;
  double delta = 0.0;
  std::uint64_t seed = 1;
  bool preserve_mass = true;
  bool preserve_ray = false;
  double offset = 1.0;  // bump position relative to the grid center

  void validate() const {
    if (!(delta >= 0.0) || !std::isfinite(delta)) throw ConfigError("perturbation.delta must be >= 0");
  }
};

struct ExperimentConfig {
  double beta = std::numbers::sqrt2;
  double c = 2.0;
  double omega = 2.0;
  double theta = kDefaultTheta;
  std::size_t n = 1024;
  double length = 80.0;
  EvolveConfig run{1e-3, 10.0, 100, true};
  std::size_t snapshot_every = 0;  // records between field snapshots, 0 = none
  PerturbationSpec perturbation;
  std::vector<double> sweep_deltas;
  std::string out_dir = ".";

  PhysParams params() const {
    try {
      return make_params(beta, c, omega);
    } catch (const ParameterError& e) {
      throw ConfigError(e.what());
    }
  }

  PeriodicGrid grid() const {
    try {
      return PeriodicGrid(n, length, 0.0);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  /// Everything that can be rejected before computing anything.
  void validate() const {
    const auto p = params();
    const auto g = grid();
    try {
      run.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    perturbation.validate();
    if (!std::isfinite(theta)) throw ConfigError("params.theta must be finite");
    if (profile_tail(p.Omega, g) > kTailTolerance) {
      std::ostringstream os;
      os << "grid.length = " << length << " is too short for Omega = " << p.Omega
         << " (profile tail exceeds " << kTailTolerance << ")";
      throw ConfigError(os.str());
    }
    for (std::size_t i = 0; i < sweep_deltas.size(); ++i) {
      if (!(sweep_deltas[i] > 0.0)) throw ConfigError("sweep.deltas must be positive");
      if (i > 0 && !(sweep_deltas[i] > sweep_deltas[i - 1])) throw ConfigError("sweep.deltas must be ascending");
    }
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key + ": expected a finite number, got '" + v + "'");
  }
  return out;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline PerturbationKind parse_kind(const std::string& v) {
  for (auto k : {PerturbationKind::amplitude, PerturbationKind::localized_bump, PerturbationKind::random_fourier,
                 PerturbationKind::w_only}) {
    if (v == to_string(k)) return k;
  }
  throw ConfigError("perturbation.kind: unknown kind '" + v +
                    "' (expected amplitude, localized_bump, random_fourier or w_only)");
}

}  // namespace detail

/// Parses a configuration. Missing keys keep their defaults; validate() is called.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const auto key = detail::trim(std::string_view(body).substr(0, eq));
    const auto val = detail::trim(std::string_view(body).substr(eq + 1));
    if (val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty value for " + key);
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key " + key);

    if (key == "params.beta") cfg.beta = detail::parse_double(key, val);
    else if (key == "params.c") cfg.c = detail::parse_double(key, val);
    else if (key == "params.omega") cfg.omega = detail::parse_double(key, val);
    else if (key == "params.theta") cfg.theta = detail::parse_double(key, val);
    else if (key == "grid.n") cfg.n = detail::parse_uint(key, val);
    else if (key == "grid.length") cfg.length = detail::parse_double(key, val);
    else if (key == "run.dt") cfg.run.dt = detail::parse_double(key, val);
    else if (key == "run.t_end") cfg.run.t_end = detail::parse_double(key, val);
    else if (key == "run.record_every") cfg.run.record_every = detail::parse_uint(key, val);
    else if (key == "run.dealias") cfg.run.dealias = detail::parse_bool(key, val);
    else if (key == "run.snapshot_every") cfg.snapshot_every = detail::parse_uint(key, val);
    else if (key == "perturbation.kind") cfg.perturbation.kind = detail::parse_kind(val);
    else if (key == "perturbation.delta") cfg.perturbation.delta = detail::parse_double(key, val);
    else if (key == "perturbation.seed") cfg.perturbation.seed = detail::parse_uint(key, val);
    else if (key == "perturbation.preserve_mass") cfg.perturbation.preserve_mass = detail::parse_bool(key, val);
    else if (key == "perturbation.preserve_ray") cfg.perturbation.preserve_ray = detail::parse_bool(key, val);
    else if (key == "perturbation.offset") cfg.perturbation.offset = detail::parse_double(key, val);
    else if (key == "sweep.deltas") {
      cfg.sweep_deltas.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto t = detail::trim(item);
        if (t.empty()) continue;
        cfg.sweep_deltas.push_back(detail::parse_double(key, t));
      }
    } else if (key == "outputs.dir") cfg.out_dir = val;
    else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

/// Writes cfg back in the same format (archived next to outputs).
inline std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "params.beta = " << cfg.beta << '\n'
     << "params.c = " << cfg.c << '\n'
     << "params.omega = " << cfg.omega << '\n'
     << "params.theta = " << cfg.theta << '\n'
     << "grid.n = " << cfg.n << '\n'
     << "grid.length = " << cfg.length << '\n'
     << "run.dt = " << cfg.run.dt << '\n'
     << "run.t_end = " << cfg.run.t_end << '\n'
     << "run.record_every = " << cfg.run.record_every << '\n'
     << "run.dealias = " << (cfg.run.dealias ? "true" : "false") << '\n'
     << "run.snapshot_every = " << cfg.snapshot_every << '\n'
     << "perturbation.kind = " << to_string(cfg.perturbation.kind) << '\n'
     << "perturbation.delta = " << cfg.perturbation.delta << '\n'
     << "perturbation.seed = " << cfg.perturbation.seed << '\n'
     << "perturbation.preserve_mass = " << (cfg.perturbation.preserve_mass ? "true" : "false") << '\n'
     << "perturbation.preserve_ray = " << (cfg.perturbation.preserve_ray ? "true" : "false") << '\n'
     << "perturbation.offset = " << cfg.perturbation.offset << '\n';
  if (!cfg.sweep_deltas.empty()) {
    os << "sweep.deltas = ";
    for (std::size_t i = 0; i < cfg.sweep_deltas.size(); ++i) os << (i ? ", " : "") << cfg.sweep_deltas[i];
    os << '\n';
  }
  os << "outputs.dir = " << cfg.out_dir << '\n';
  return os.str();
}

}  // namespace lsi

#endif  // LSI_CONFIG_HPP
