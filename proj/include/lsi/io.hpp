#ifndef LSI_IO_HPP
#define LSI_IO_HPP

// Plot-ready exports: profile CSV (x, R1, R2, W) with a JSON parameter sidecar,
// and trajectory CSV rows.

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lsi/errors.hpp"
#include "lsi/experiment.hpp"
#include "lsi/model.hpp"

namespace lsi {

inline void write_profile_csv(std::ostream& os, const SolitonProfile& prof) {
  os << std::setprecision(17) << "x,R1,R2,W\n";
  const auto& g = prof.grid();
  for (std::size_t j = 0; j < g.n(); ++j) {
    os << g.x(j) << ',' << prof.r1[j] << ',' << prof.r2[j] << ',' << prof.w[j] << '\n';
  }
}

inline nlohmann::json profile_sidecar(const SolitonProfile& prof) {
  const auto& p = prof.params;
  const auto& g = prof.grid();
  return {{"beta", p.beta}, {"c", p.c},         {"omega", p.omega}, {"Omega", p.Omega},
          {"gamma", p.gamma}, {"theta", prof.theta}, {"n", g.n()},   {"length", g.length()}};
}

/// Rebuilds a profile from the CSV and sidecar written above.
inline SolitonProfile read_profile(std::istream& csv, const nlohmann::json& side) {
  const auto p = make_params(side.at("beta").get<double>(), side.at("c").get<double>(), side.at("omega").get<double>());
  const PeriodicGrid g(side.at("n").get<std::size_t>(), side.at("length").get<double>(), 0.0);
  std::string line;
  if (!std::getline(csv, line) || line != "x,R1,R2,W") throw ConfigError("profile CSV: bad header");
  std::vector<double> r1, r2, w;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 4) throw ConfigError("profile CSV: expected 4 columns");
    r1.push_back(v[1]);
    r2.push_back(v[2]);
    w.push_back(v[3]);
  }
  if (r1.size() != g.n()) throw GridMismatch("profile CSV: row count does not match the sidecar grid");
  return SolitonProfile{p, side.at("theta").get<double>(), RealField(g, std::move(r1)), RealField(g, std::move(r2)),
                        RealField(g, std::move(w))};
}

inline void write_trajectory_header(std::ostream& os) {
  os << "t,I1,I2,I3,I4,L,mean_w,rho,i_omega,x0,theta1,theta2,w_dist_shared,w_dist_min\n";
}

inline void write_trajectory_row(std::ostream& os, const TrajectoryRow& r) {
  os << std::setprecision(17) << r.inv.t << ',' << r.inv.I1 << ',' << r.inv.I2 << ',' << r.inv.I3 << ','
     << r.inv.I4 << ',' << r.inv.L << ',' << r.mean_w << ',' << r.rho << ',' << r.i_omega << ',' << r.x0 << ','
     << r.theta1 << ',' << r.theta2 << ',' << r.w_dist_shared << ',' << r.w_dist_min << '\n';
}

inline void write_trajectory(std::ostream& os, const std::vector<TrajectoryRow>& rows) {
  write_trajectory_header(os);
  for (const auto& r : rows) write_trajectory_row(os, r);
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

}  // namespace lsi

#endif  // LSI_IO_HPP
