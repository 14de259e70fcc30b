#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lwsw/evolution.hpp"
#include "lwsw/variational.hpp"

namespace lwsw {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

/// Serialized wave profile plus the metadata needed to reuse it downstream.
struct ProfileDocument {
  int schema_version = 1;
  WaveProfile profile;
  std::string provenance;  // "minimize" | "standing" | "shoot"
};

inline nlohmann::json to_json(const ProfileDocument& doc) {
  nlohmann::json j;
  j["schema_version"] = doc.schema_version;
  j["params"] = {{"a", doc.profile.params.a},
                 {"gamma", doc.profile.params.gamma},
                 {"p", doc.profile.params.p},
                 {"w", doc.profile.params.w}};
  j["grid"] = {{"x_min", doc.profile.grid.x_min},
               {"dx", doc.profile.grid.dx},
               {"n", doc.profile.grid.n},
               {"periodic", doc.profile.grid.periodic}};
  j["phi"] = doc.profile.phi.samples;
  j["psi"] = doc.profile.psi.samples;
  j["c"] = doc.profile.c;
  j["cstar"] = doc.profile.cstar;
  j["w"] = doc.profile.w;
  if (doc.profile.lambda) j["lambda"] = *doc.profile.lambda; else j["lambda"] = nullptr;
  if (doc.profile.mu) j["mu"] = *doc.profile.mu; else j["mu"] = nullptr;
  if (doc.profile.d) j["d"] = *doc.profile.d; else j["d"] = nullptr;
  j["provenance"] = doc.provenance;
  return j;
}

inline ProfileDocument profile_from_json(const nlohmann::json& j) {
  ProfileDocument doc;
  doc.schema_version = j.at("schema_version").get<int>();
  if (doc.schema_version != 1)
    throw std::runtime_error("ProfileDocument: unsupported schema_version");
  const auto& jp = j.at("params");
  doc.profile.params.a = jp.at("a").get<double>();
  doc.profile.params.gamma = jp.at("gamma").get<double>();
  doc.profile.params.p = jp.at("p").get<double>();
  doc.profile.params.w = jp.at("w").get<double>();
  const auto& jg = j.at("grid");
  Grid g(jg.at("x_min").get<double>(), jg.at("dx").get<double>(),
         jg.at("n").get<std::size_t>(), jg.at("periodic").get<bool>());
  doc.profile.grid = g;
  doc.profile.phi = RealField(g, j.at("phi").get<std::vector<double>>());
  doc.profile.psi = RealField(g, j.at("psi").get<std::vector<double>>());
  if (doc.profile.phi.samples.size() != g.n || doc.profile.psi.samples.size() != g.n)
    throw std::runtime_error("ProfileDocument: array length mismatch with grid");
  doc.profile.c = j.at("c").get<double>();
  doc.profile.cstar = j.at("cstar").get<double>();
  doc.profile.w = j.at("w").get<double>();
  if (!j.at("lambda").is_null()) doc.profile.lambda = j.at("lambda").get<double>();
  if (!j.at("mu").is_null()) doc.profile.mu = j.at("mu").get<double>();
  if (!j.at("d").is_null()) doc.profile.d = j.at("d").get<double>();
  doc.provenance = j.at("provenance").get<std::string>();
  return doc;
}

inline void write_profile(const ProfileDocument& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_profile: cannot open " + path);
  out << to_json(doc).dump(2) << "\n";
  if (!out) throw std::runtime_error("write_profile: write failed for " + path);
}

inline ProfileDocument read_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_profile: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return profile_from_json(j);
}

/// Sweep CSV; the column order is a stable contract.
inline void write_sweep_csv(const std::vector<SweepRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sweep_csv: cannot open " + path);
  out << "mu,alpha,d,lambda,c,cstar,tau,h1_u,l2_v,iterations,el_residual_1,el_residual_2,converged\n";
  for (const auto& r : records) {
    out << format_double(r.mu) << ',' << format_double(r.alpha) << ',' << format_double(r.d)
        << ',' << format_double(r.lambda) << ',' << format_double(r.c) << ','
        << format_double(r.cstar) << ',' << format_double(r.tau) << ','
        << format_double(r.h1_u) << ',' << format_double(r.l2_v) << ',' << r.iterations << ','
        << format_double(r.el_residual_1) << ',' << format_double(r.el_residual_2) << ','
        << (r.converged ? "true" : "false") << '\n';
  }
}

/// Simulation trace row: shape/lag fields compare |u(t)| against the
/// reference profile translated by the cross-correlation lag.
struct SimTraceRow {
  double t = 0.0;
  double mass = 0.0;
  double v_total = 0.0;
  double shape_error = 0.0;
  double lag_estimate = 0.0;
};

inline void write_sim_trace_csv(const std::vector<SimTraceRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_sim_trace_csv: cannot open " + path);
  out << "t,mass,v_total,shape_error,lag_estimate\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.v_total)
        << ',' << format_double(r.shape_error) << ',' << format_double(r.lag_estimate) << '\n';
  }
}

inline void write_linstab_trace_csv(const EnergyTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_linstab_trace_csv: cannot open " + path);
  out << "t,lin_energy\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    out << format_double(trace.times[i]) << ',' << format_double(trace.lin_energy[i]) << '\n';
}

}  // namespace lwsw
