#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "chimap/blipfield.hpp"
#include "chimap/density.hpp"
#include "chimap/errors.hpp"
#include "chimap/lightcone.hpp"
#include "chimap/pulsetrain.hpp"
#include "chimap/trajectory.hpp"

namespace chimap::io {

using nlohmann::json;

/// 17 significant digits: round-trip exact for doubles.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// --- small CSV machinery ---------------------------------------------------

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(trim(field));
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw config_error("cannot parse number '" + s + "' in " + where);
  }
}

// Reads data rows under an exact header, skipping blank and '#' lines.
inline std::vector<std::vector<double>> read_csv_table(
    std::istream& in, const std::string& expected_header,
    std::size_t n_columns, const std::string& where) {
  std::string line;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (!header_seen) {
      if (t != expected_header)
        throw config_error("expected header '" + expected_header + "' in " +
                           where + ", got '" + t + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split_csv_line(t);
    if (fields.size() != n_columns)
      throw config_error("expected " + std::to_string(n_columns) +
                         " columns in " + where + ", got " +
                         std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(n_columns);
    for (const auto& f : fields) row.push_back(parse_double(f, where));
    rows.push_back(std::move(row));
  }
  if (!header_seen)
    throw config_error("missing header '" + expected_header + "' in " + where);
  return rows;
}

// --- wave packets ------------------------------------------------------------

inline void write_wavepacket_csv(std::ostream& out, const WavePacket& wp) {
  out << "chi,re,im\n";
  for (std::size_t i = 0; i < wp.grid.size(); ++i)
    out << format_double(wp.grid[i]) << ','
        << format_double(wp.amplitudes[i].real()) << ','
        << format_double(wp.amplitudes[i].imag()) << '\n';
}

inline WavePacket read_wavepacket_csv(std::istream& in, BlipMode mode) {
  const auto rows = read_csv_table(in, "chi,re,im", 3, "wave packet csv");
  std::vector<double> chi;
  std::vector<std::complex<double>> amps;
  chi.reserve(rows.size());
  amps.reserve(rows.size());
  for (const auto& r : rows) {
    chi.push_back(r[0]);
    amps.emplace_back(r[1], r[2]);
  }
  return WavePacket(mode, ChiGrid::from_points(std::move(chi)),
                    std::move(amps));
}

// --- field states (JSON, tagged by "kind") ----------------------------------

inline void require_keys(const json& obj,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!obj.is_object()) throw config_error(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw config_error("unknown key '" + it.key() + "' in " + where);
  }
}

inline json packet_to_json(const WavePacket& wp) {
  json j;
  j["s"] = static_cast<int>(wp.mode.s);
  j["lambda"] = (wp.mode.lambda == Polarization::H) ? "H" : "V";
  json chi = json::array(), re = json::array(), im = json::array();
  for (std::size_t i = 0; i < wp.grid.size(); ++i) {
    chi.push_back(wp.grid[i]);
    re.push_back(wp.amplitudes[i].real());
    im.push_back(wp.amplitudes[i].imag());
  }
  j["chi"] = std::move(chi);
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

inline WavePacket packet_from_json(const json& j) {
  require_keys(j, {"s", "lambda", "chi", "re", "im"}, "packet");
  for (const char* k : {"s", "lambda", "chi", "re", "im"})
    if (!j.contains(k))
      throw config_error(std::string("packet is missing key '") + k + "'");
  const Direction s = direction_from_int(j.at("s").get<int>());
  const std::string lam = j.at("lambda").get<std::string>();
  if (lam != "H" && lam != "V")
    throw config_error("packet lambda must be \"H\" or \"V\"");
  const auto chi = j.at("chi").get<std::vector<double>>();
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (re.size() != chi.size() || im.size() != chi.size())
    throw config_error("packet chi, re, im arrays must have equal length");
  std::vector<std::complex<double>> amps;
  amps.reserve(chi.size());
  for (std::size_t i = 0; i < chi.size(); ++i) amps.emplace_back(re[i], im[i]);
  return WavePacket(
      BlipMode{s, lam == "H" ? Polarization::H : Polarization::V},
      ChiGrid::from_points(chi), std::move(amps));
}

inline json state_to_json(const FieldState& state) {
  json j;
  if (std::holds_alternative<Vacuum>(state)) {
    j["kind"] = "vacuum";
  } else if (const auto* sp = std::get_if<SinglePhoton>(&state)) {
    j["kind"] = "single_photon";
    j["packet"] = packet_to_json(sp->packet);
  } else {
    j["kind"] = "coherent";
    j["packet"] = packet_to_json(std::get<CoherentState>(state).packet);
  }
  return j;
}

inline FieldState state_from_json(const json& j) {
  require_keys(j, {"kind", "packet"}, "state");
  if (!j.contains("kind")) throw config_error("state is missing key 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vacuum") {
    if (j.contains("packet"))
      throw config_error("vacuum state must not carry a packet");
    return Vacuum{};
  }
  if (!j.contains("packet"))
    throw config_error("state '" + kind + "' is missing key 'packet'");
  WavePacket packet = packet_from_json(j.at("packet"));
  if (kind == "single_photon") {
    if (std::abs(packet.norm_squared() - 1.0) > 1e-9)
      throw config_error(
          "single-photon packet must be normalized (|norm^2 - 1| <= 1e-9), "
          "got norm^2 = " + format_double(packet.norm_squared()));
    return SinglePhoton{std::move(packet)};
  }
  if (kind == "coherent") return CoherentState{std::move(packet)};
  throw config_error("unknown state kind '" + kind + "'");
}

// --- density profiles ---------------------------------------------------------

inline void write_profile_csv(std::ostream& out, const DensityProfile& p) {
  out << "chi_A,ratio\n";
  for (const auto& s : p.samples)
    out << format_double(s.chi_a) << ',' << format_double(s.ratio) << '\n';
}

// --- event records -----------------------------------------------------------

inline void write_events_csv(std::ostream& out,
                             std::span<const EventRecord> records,
                             double c_display = 1.0) {
  out << "n,t_A_emit,t_A_arrive,x_A_arrive,chi_A,chi_B,t_B_arrive\n";
  for (const auto& r : records)
    out << r.n << ',' << format_double(r.t_a_emit / c_display) << ','
        << format_double(r.t_a_arrive / c_display) << ','
        << format_double(r.x_a_arrive) << ',' << format_double(r.chi_a) << ','
        << format_double(r.chi_b) << ','
        << format_double(r.t_b_arrive / c_display) << '\n';
}

inline json events_to_json(std::span<const EventRecord> records,
                           double c_display = 1.0) {
  json arr = json::array();
  for (const auto& r : records) {
    json j;
    j["n"] = r.n;
    j["t_A_emit"] = r.t_a_emit / c_display;
    j["t_A_arrive"] = r.t_a_arrive / c_display;
    j["x_A_arrive"] = r.x_a_arrive;
    j["chi_A"] = r.chi_a;
    j["chi_B"] = r.chi_b;
    j["t_B_arrive"] = r.t_b_arrive / c_display;
    arr.push_back(std::move(j));
  }
  return arr;
}

/// Long-format table for spacetime-diagram rendering by external tools:
/// frame (A or B), series name, t, x; one row per sampled point.
inline void write_plot_csv(std::ostream& out, const ScenarioConfig& cfg,
                           std::span<const EventRecord> records,
                           std::span<const BobFrameSample> source_samples,
                           double c_display = 1.0) {
  out << "frame,series,t,x\n";
  const auto row = [&](const char* frame, const std::string& series, double t,
                       double x) {
    out << frame << ',' << series << ',' << format_double(t / c_display) << ','
        << format_double(x) << '\n';
  };
  const double t_last = records.empty() ? 0.0 : records.back().t_a_arrive;
  const std::size_t n_obs = 101;
  for (std::size_t i = 0; i < n_obs; ++i) {
    const double t = t_last * (static_cast<double>(i) /
                               static_cast<double>(n_obs - 1));
    row("A", "observer", t, cfg.traj.position_at(t));
  }
  for (const auto& r : records) {
    const std::string series = "pulse-" + std::to_string(r.n);
    row("A", series, r.t_a_emit, 0.0);
    row("A", series, r.t_a_arrive, r.x_a_arrive);
  }
  for (const auto& s : source_samples) row("B", "source", s.t_b, s.mu_b);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const std::string series = "pulse-" + std::to_string(records[i].n);
    row("B", series, source_samples[i + 1].t_b, source_samples[i + 1].mu_b);
    row("B", series, records[i].t_b_arrive, 0.0);
  }
}

// --- sampled trajectory CSV ----------------------------------------------------

inline std::pair<std::vector<double>, std::vector<double>> read_sampled_csv(
    std::istream& in) {
  const auto rows = read_csv_table(in, "t,x", 2, "sampled trajectory csv");
  std::vector<double> t, x;
  t.reserve(rows.size());
  x.reserve(rows.size());
  for (const auto& r : rows) {
    t.push_back(r[0]);
    x.push_back(r[1]);
  }
  return {std::move(t), std::move(x)};
}

// --- run configuration ----------------------------------------------------------

struct RunConfig {
  Trajectory trajectory = Trajectory::constant(Beta(0.6));
  QuadratureConfig quad{};
  Direction s = Direction::plus_x;
  double c_display = 1.0;
  std::string format = "csv";
  std::string out;  // empty: stdout
  json echo;        // resolved values, embedded in every output
};

inline json quadrature_to_json(const QuadratureConfig& q) {
  json j;
  j["abs_tol"] = q.abs_tol;
  j["rel_tol"] = q.rel_tol;
  j["max_subdivisions"] = q.max_subdivisions;
  return j;
}

inline Trajectory trajectory_from_json(const json& spec) {
  require_keys(spec,
               {"kind", "beta", "breakpoints", "betas", "a", "points", "csv"},
               "trajectory");
  if (!spec.contains("kind"))
    throw config_error("trajectory is missing key 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();
  const auto forbid = [&](const char* key) {
    if (spec.contains(key))
      throw config_error("trajectory kind '" + kind +
                         "' does not take key '" + key + "'");
  };
  if (kind == "constant") {
    for (const char* k : {"breakpoints", "betas", "a", "points", "csv"})
      forbid(k);
    if (!spec.contains("beta"))
      throw config_error("constant trajectory needs key 'beta'");
    return Trajectory::constant(Beta(spec.at("beta").get<double>()));
  }
  if (kind == "piecewise") {
    for (const char* k : {"beta", "a", "points", "csv"}) forbid(k);
    if (!spec.contains("breakpoints") || !spec.contains("betas"))
      throw config_error("piecewise trajectory needs 'breakpoints', 'betas'");
    const auto breakpoints = spec.at("breakpoints").get<std::vector<double>>();
    std::vector<Beta> betas;
    for (double b : spec.at("betas").get<std::vector<double>>())
      betas.emplace_back(b);
    return Trajectory::piecewise(breakpoints, std::move(betas));
  }
  if (kind == "rindler") {
    for (const char* k : {"beta", "breakpoints", "betas", "points", "csv"})
      forbid(k);
    if (!spec.contains("a"))
      throw config_error("rindler trajectory needs key 'a'");
    return Trajectory::uniform_acceleration(spec.at("a").get<double>());
  }
  if (kind == "sampled") {
    for (const char* k : {"beta", "breakpoints", "betas", "a"}) forbid(k);
    if (spec.contains("points") == spec.contains("csv"))
      throw config_error(
          "sampled trajectory needs exactly one of 'points', 'csv'");
    std::vector<double> t, x;
    if (spec.contains("points")) {
      for (const auto& p : spec.at("points")) {
        if (!p.is_array() || p.size() != 2)
          throw config_error("sampled points must be [t, x] pairs");
        t.push_back(p[0].get<double>());
        x.push_back(p[1].get<double>());
      }
    } else {
      const std::string path = spec.at("csv").get<std::string>();
      std::ifstream in(path);
      if (!in) throw config_error("cannot open sampled csv '" + path + "'");
      std::tie(t, x) = read_sampled_csv(in);
    }
    return Trajectory::sampled(std::move(t), std::move(x));
  }
  throw config_error("unknown trajectory kind '" + kind + "'");
}

inline RunConfig parse_config(const json& j) {
  require_keys(
      j, {"trajectory", "quadrature", "direction", "c_display", "format", "out"},
      "config");
  RunConfig cfg;
  json traj_echo = {{"kind", "constant"}, {"beta", 0.6}};
  if (j.contains("trajectory")) {
    cfg.trajectory = trajectory_from_json(j.at("trajectory"));
    traj_echo = j.at("trajectory");
  }
  if (j.contains("quadrature")) {
    const json& q = j.at("quadrature");
    require_keys(q, {"abs_tol", "rel_tol", "max_subdivisions"}, "quadrature");
    if (q.contains("abs_tol")) cfg.quad.abs_tol = q.at("abs_tol").get<double>();
    if (q.contains("rel_tol")) cfg.quad.rel_tol = q.at("rel_tol").get<double>();
    if (q.contains("max_subdivisions"))
      cfg.quad.max_subdivisions = q.at("max_subdivisions").get<std::size_t>();
    cfg.quad.validate();
  }
  if (j.contains("direction"))
    cfg.s = direction_from_int(j.at("direction").get<int>());
  if (j.contains("c_display")) {
    cfg.c_display = j.at("c_display").get<double>();
    if (!std::isfinite(cfg.c_display) || !(cfg.c_display > 0.0))
      throw config_error("c_display must be finite and > 0");
  }
  if (j.contains("format")) {
    cfg.format = j.at("format").get<std::string>();
    if (cfg.format != "csv" && cfg.format != "json")
      throw config_error("format must be \"csv\" or \"json\"");
  }
  if (j.contains("out")) cfg.out = j.at("out").get<std::string>();

  cfg.echo["trajectory"] = traj_echo;
  cfg.echo["quadrature"] = quadrature_to_json(cfg.quad);
  cfg.echo["direction"] = static_cast<int>(cfg.s);
  cfg.echo["c_display"] = cfg.c_display;
  cfg.echo["format"] = cfg.format;
  return cfg;
}

inline RunConfig default_config() { return parse_config(json::object()); }

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error("config file '" + path + "' is not valid JSON: " +
                       e.what());
  }
  return parse_config(j);
}

/// '# key=value' comment lines echoing the resolved configuration, placed
/// above every CSV table.
inline void write_echo_header(std::ostream& out, const json& echo) {
  for (auto it = echo.begin(); it != echo.end(); ++it)
    out << "# " << it.key() << '=' << it.value().dump() << '\n';
}

}  // namespace chimap::io
