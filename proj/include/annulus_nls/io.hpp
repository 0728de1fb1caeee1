#pragma once

// CSV/JSON emission and re-ingestion. Every CSV float goes through %.17g so
// binary64 values survive a round trip; files land via write-then-rename.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "annulus_nls/asymptotics.hpp"
#include "annulus_nls/dynamics.hpp"
#include "annulus_nls/errors.hpp"
#include "annulus_nls/mass_curve.hpp"
#include "annulus_nls/mesh.hpp"
#include "annulus_nls/radial_bvp.hpp"

namespace annulus_nls::io {

inline constexpr const char* kVersion = "1.0.0";

using Json = nlohmann::ordered_json;

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec)
      throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " +
                               ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
}

// ---- CSV ----

inline std::string profile_csv_text(const bvp::Profile& prof) {
  std::string s = "r,u\n";
  for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
    s += fmt17(prof.mesh[i]);
    s += ',';
    s += fmt17(prof.u[i]);
    s += '\n';
  }
  return s;
}

inline void write_profile_csv(const std::filesystem::path& path, const bvp::Profile& prof) {
  write_text_atomic(path, profile_csv_text(prof));
}

inline std::string curve_csv_text(const masscurve::MassCurve& curve) {
  std::string s = "lambda,mass,dmass_dlambda,umax,rbar,sslope\n";
  for (const auto& pt : curve.points) {
    s += fmt17(pt.lambda);
    s += ',';
    s += fmt17(pt.mass);
    s += ',';
    s += fmt17(pt.mass_slope);
    s += ',';
    s += fmt17(pt.u_max);
    s += ',';
    s += fmt17(pt.r_bar);
    s += ',';
    s += fmt17(pt.s_slope);
    s += '\n';
  }
  return s;
}

inline void write_curve_csv(const std::filesystem::path& path, const masscurve::MassCurve& curve) {
  write_text_atomic(path, curve_csv_text(curve));
}

inline std::string trace_csv_text(const dynamics::EvolutionTrace& tr) {
  std::string s = "t,mass,energy,orbital_distance,phase\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    s += fmt17(tr.times[i]);
    s += ',';
    s += fmt17(tr.mass_series[i]);
    s += ',';
    s += fmt17(tr.energy_series[i]);
    s += ',';
    s += fmt17(tr.orbital_distance_series[i]);
    s += ',';
    s += fmt17(tr.phase_series[i]);
    s += '\n';
  }
  return s;
}

inline void write_trace_csv(const std::filesystem::path& path,
                            const dynamics::EvolutionTrace& tr) {
  write_text_atomic(path, trace_csv_text(tr));
}

struct ProfileData {
  numerics::Mesh mesh;
  std::vector<double> u;
};

namespace detail {

inline double parse_double(std::string_view tok, const std::filesystem::path& path) {
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    throw std::runtime_error("bad numeric field '" + std::string(tok) + "' in " + path.string());
  return v;
}

}  // namespace detail

inline ProfileData read_profile_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty profile csv: " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "r,u") throw std::runtime_error("unexpected profile header in " + path.string());
  ProfileData data;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed row in " + path.string());
    const std::string_view row(line);
    data.mesh.nodes.push_back(detail::parse_double(row.substr(0, comma), path));
    data.u.push_back(detail::parse_double(row.substr(comma + 1), path));
  }
  const std::size_t n = data.mesh.nodes.size();
  if (n < 2) throw std::runtime_error("profile csv has fewer than two rows: " + path.string());
  const double h = (data.mesh.nodes.back() - data.mesh.nodes.front()) / double(n - 1);
  bool uniform = h > 0.0;
  for (std::size_t i = 0; i < n && uniform; ++i)
    uniform = std::abs(data.mesh.nodes[i] - (data.mesh.nodes.front() + double(i) * h)) <= 1e-12;
  if (uniform) data.mesh.uniform_step = h;
  return data;
}

// ---- JSON report blocks ----

inline Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

inline Json report_document(const std::string& command, const Json& config_echo,
                            const Json& tolerances, const Json& results) {
  Json prov;
  prov["version"] = kVersion;
  prov["config"] = config_echo;
  prov["tolerances"] = tolerances;
  Json doc;
  doc["provenance"] = prov;
  doc["results"] = Json::object();
  doc["results"][command] = results;
  return doc;
}

inline std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

inline void write_json(const std::filesystem::path& path, const Json& j) {
  write_text_atomic(path, dump_json(j));
}

inline Json profile_summary(const bvp::Profile& prof) {
  Json j;
  j["N"] = prof.spec.N;
  j["p"] = prof.spec.p;
  j["lambda"] = prof.spec.lambda;
  j["nodes"] = prof.mesh.size();
  j["mass"] = masscurve::mass(prof);
  j["u_max"] = prof.u_max;
  j["r_bar"] = prof.r_bar;
  j["s_slope"] = prof.s_slope;
  j["residual_inf"] = prof.residual_inf;
  return j;
}

inline Json curve_summary(const masscurve::MassCurve& curve) {
  Json j;
  j["N"] = curve.N;
  j["p"] = curve.p;
  j["lambda_min"] = curve.lambda_min;
  j["lambda_max"] = curve.lambda_max;
  j["n_points"] = curve.points.size();
  Json gaps = Json::array();
  for (const auto& g : curve.gaps) {
    Json gj;
    gj["lambda"] = g.lambda;
    gj["reason"] = g.reason;
    gaps.push_back(gj);
  }
  j["gaps"] = gaps;
  return j;
}

inline Json existence_summary(const masscurve::ExistenceReport& rep) {
  Json j;
  j["regime"] = masscurve::to_string(rep.regime);
  j["eta_low"] = optional_number(rep.eta_low);
  j["eta_high"] = optional_number(rep.eta_high);
  j["lambda_hat_low"] = optional_number(rep.lambda_hat_low);
  j["lambda_hat_high"] = optional_number(rep.lambda_hat_high);
  Json sols = Json::array();
  for (const auto& root : rep.solutions) {
    Json sj;
    sj["lambda"] = root.lambda;
    sj["mass"] = root.mass;
    sj["dmass_dlambda"] = root.dmass;
    sj["stability"] = masscurve::to_string(root.stability);
    sols.push_back(sj);
  }
  j["solutions"] = sols;
  return j;
}

inline Json rescale_summary(const asymptotics::RescaleReport& rep) {
  Json j;
  j["lambdas"] = rep.lambdas;
  j["sup_errors"] = rep.sup_errors;
  j["amplitude_ratios"] = rep.amplitude_ratios;
  j["r_bars"] = rep.r_bars;
  j["moment_errors"] = rep.moment_errors;
  j["fitted_mass_exponent"] = rep.fitted_mass_exponent;
  return j;
}

inline Json trace_summary(const dynamics::EvolutionTrace& tr) {
  Json j;
  j["samples"] = tr.times.size();
  j["steps_completed"] = tr.steps_completed;
  j["dt_used"] = tr.dt_used;
  j["aborted"] = tr.aborted;
  j["blow_up_time"] = optional_number(tr.blow_up_time);
  j["max_step_mass_change"] = tr.max_step_mass_change;
  if (!tr.times.empty()) {
    j["final_time"] = tr.times.back();
    j["final_mass"] = tr.mass_series.back();
    j["final_energy"] = tr.energy_series.back();
    j["final_orbital_distance"] = tr.orbital_distance_series.back();
    j["final_phase"] = tr.phase_series.back();
    double dmax = 0.0;
    for (double d : tr.orbital_distance_series) dmax = std::max(dmax, d);
    j["max_orbital_distance"] = dmax;
  }
  return j;
}

}  // namespace annulus_nls::io
