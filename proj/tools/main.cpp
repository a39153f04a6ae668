// chimap command-line front end: frame maps, pulse-train simulation, state
// transforms, density profiles and the self-verification suite.
//
// Exit codes: 0 success, 1 verification failure, 2 invalid configuration or
// usage, 3 numerical failure (no intersection, tolerance not met, out of
// range).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "chimap/chimap.hpp"
#include "chimap/io.hpp"
#include "chimap/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct OutputTarget {
  std::ostream* stream;
  std::ofstream file;
};

std::unique_ptr<OutputTarget> open_output(const std::string& path) {
  auto target = std::make_unique<OutputTarget>();
  if (path.empty()) {
    target->stream = &std::cout;
    return target;
  }
  target->file.open(path);
  if (!target->file)
    throw chimap::config_error("cannot open output file '" + path + "'");
  target->stream = &target->file;
  return target;
}

void print_warnings(const chimap::Trajectory& traj) {
  for (const std::string& w : traj.warnings())
    std::cerr << "warning: " << w << '\n';
}

chimap::Direction resolve_direction(const chimap::io::RunConfig& cfg,
                                    std::optional<int> s_override) {
  if (s_override) return chimap::direction_from_int(*s_override);
  return cfg.s;
}

void emit_record(const chimap::io::RunConfig& cfg, const nlohmann::json& data,
                 const std::string& csv_header, const std::string& csv_row) {
  auto out = open_output(cfg.out);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["config"] = cfg.echo;
    j["data"] = data;
    *out->stream << j.dump(2) << '\n';
  } else {
    chimap::io::write_echo_header(*out->stream, cfg.echo);
    *out->stream << csv_header << '\n' << csv_row << '\n';
  }
}

int run_map(const chimap::io::RunConfig& cfg, double chi_a,
            std::optional<int> s_override) {
  const chimap::Direction s = resolve_direction(cfg, s_override);
  chimap::FrameMap fm(cfg.trajectory, s, cfg.quad);
  const double chi_b = fm.map(chi_a);
  const double jac = fm.jacobian_at(chi_a);
  const double ratio = chimap::worldline_density_ratio(fm, chi_a);
  nlohmann::json data;
  data["chi_A"] = chi_a;
  data["s"] = static_cast<int>(s);
  data["chi_B"] = chi_b;
  data["jacobian"] = jac;
  data["density_ratio"] = ratio;
  using chimap::io::format_double;
  emit_record(cfg, data, "chi_A,s,chi_B,jacobian,density_ratio",
              format_double(chi_a) + "," +
                  std::to_string(static_cast<int>(s)) + "," +
                  format_double(chi_b) + "," + format_double(jac) + "," +
                  format_double(ratio));
  return kExitOk;
}

int run_invert(const chimap::io::RunConfig& cfg, double chi_b,
               std::optional<int> s_override) {
  const chimap::Direction s = resolve_direction(cfg, s_override);
  chimap::FrameMap fm(cfg.trajectory, s, cfg.quad);
  const double chi_a = fm.inverse(chi_b);
  nlohmann::json data;
  data["chi_B"] = chi_b;
  data["s"] = static_cast<int>(s);
  data["chi_A"] = chi_a;
  using chimap::io::format_double;
  emit_record(cfg, data, "chi_B,s,chi_A",
              format_double(chi_b) + "," +
                  std::to_string(static_cast<int>(s)) + "," +
                  format_double(chi_a));
  return kExitOk;
}

int run_simulate(const chimap::io::RunConfig& cfg, double dt_display,
                 std::size_t count, const std::string& plot_path) {
  chimap::ScenarioConfig scenario{cfg.trajectory, dt_display * cfg.c_display,
                                  count, chimap::Direction::plus_x};
  const auto records = chimap::run_scenario(scenario, cfg.quad);
  auto out = open_output(cfg.out);
  if (cfg.format == "json") {
    nlohmann::json j;
    j["config"] = cfg.echo;
    j["data"] = chimap::io::events_to_json(records, cfg.c_display);
    *out->stream << j.dump(2) << '\n';
  } else {
    chimap::io::write_echo_header(*out->stream, cfg.echo);
    chimap::io::write_events_csv(*out->stream, records, cfg.c_display);
  }
  if (!plot_path.empty()) {
    const auto source = chimap::bob_frame_trajectory(scenario, cfg.quad);
    std::ofstream plot(plot_path);
    if (!plot)
      throw chimap::config_error("cannot open plot file '" + plot_path + "'");
    chimap::io::write_plot_csv(plot, scenario, records, source, cfg.c_display);
  }
  return kExitOk;
}

int run_transform_state(const chimap::io::RunConfig& cfg,
                        const std::string& state_path) {
  std::ifstream in(state_path);
  if (!in)
    throw chimap::config_error("cannot open state file '" + state_path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw chimap::config_error("state file '" + state_path +
                               "' is not valid JSON: " + e.what());
  }
  const chimap::FieldState state = chimap::io::state_from_json(j);

  // direction comes from the state itself; vacuum uses the config's
  chimap::Direction s = cfg.s;
  double norm_in = 0.0;
  if (const auto* sp = std::get_if<chimap::SinglePhoton>(&state)) {
    s = sp->packet.mode.s;
    norm_in = sp->packet.norm_squared();
  } else if (const auto* co = std::get_if<chimap::CoherentState>(&state)) {
    s = co->packet.mode.s;
    norm_in = co->packet.norm_squared();
  }
  chimap::FrameMap fm(cfg.trajectory, s, cfg.quad);
  const chimap::FieldState transformed = chimap::transform_state(fm, state);
  double norm_out = 0.0;
  if (const auto* sp = std::get_if<chimap::SinglePhoton>(&transformed))
    norm_out = sp->packet.norm_squared();
  else if (const auto* co = std::get_if<chimap::CoherentState>(&transformed))
    norm_out = co->packet.norm_squared();

  auto out = open_output(cfg.out);
  *out->stream << chimap::io::state_to_json(transformed).dump(2) << '\n';
  std::cerr << "norm report: norm_squared_in="
            << chimap::io::format_double(norm_in)
            << " norm_squared_out=" << chimap::io::format_double(norm_out)
            << '\n';
  return kExitOk;
}

int run_density(const chimap::io::RunConfig& cfg, double lo, double hi,
                std::size_t samples, std::optional<int> s_override) {
  const chimap::Direction s = resolve_direction(cfg, s_override);
  chimap::FrameMap fm(cfg.trajectory, s, cfg.quad);
  const chimap::DensityProfile profile =
      chimap::density_profile(fm, lo, hi, samples);
  auto out = open_output(cfg.out);
  if (cfg.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& sample : profile.samples)
      arr.push_back({{"chi_A", sample.chi_a}, {"ratio", sample.ratio}});
    nlohmann::json j;
    j["config"] = cfg.echo;
    j["data"] = arr;
    *out->stream << j.dump(2) << '\n';
  } else {
    chimap::io::write_echo_header(*out->stream, cfg.echo);
    chimap::io::write_profile_csv(*out->stream, profile);
  }
  return kExitOk;
}

int run_verify(const chimap::io::RunConfig& cfg, std::uint64_t seed) {
  const chimap::VerifyReport report =
      chimap::run_verification(cfg.trajectory, cfg.s, cfg.quad, seed);
  auto out = open_output(cfg.out);
  std::size_t passed = 0;
  for (const auto& check : report.checks) {
    *out->stream << (check.pass ? "PASS " : "FAIL ") << check.name
                 << " measured=" << chimap::io::format_double(check.measured)
                 << " tol=" << chimap::io::format_double(check.tolerance)
                 << '\n';
    if (check.pass) ++passed;
  }
  *out->stream << "RESULT: " << (report.all_pass() ? "PASS" : "FAIL") << " ("
               << passed << "/" << report.checks.size() << " checks)\n";
  return report.all_pass() ? kExitOk : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "chimap: light-cone coordinate maps between a stationary and a moving "
      "observer in 1+1 dimensions"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string format_override;
  std::string out_override;
  double abs_tol_override = -1.0;
  std::uint64_t seed = 987654321;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--format", format_override, "Output format: csv or json");
  app.add_option("--out", out_override, "Output path (default stdout)");
  app.add_option("--tol", abs_tol_override,
                 "Absolute quadrature tolerance override");
  app.add_option("--seed", seed, "Seed for randomized verification sampling");

  double chi_a = 0.0, chi_b = 0.0;
  std::optional<int> s_override;
  auto* cmd_map = app.add_subcommand("map", "Map chi_A to the moving frame");
  cmd_map->add_option("--chi", chi_a, "Natural coordinate chi_A")->required();
  cmd_map->add_option("--s", s_override, "Propagation direction (+1 or -1)");

  auto* cmd_invert =
      app.add_subcommand("invert", "Map chi_B back to the stationary frame");
  cmd_invert->add_option("--chi-b", chi_b, "Natural coordinate chi_B")
      ->required();
  cmd_invert->add_option("--s", s_override, "Propagation direction");

  double dt = 0.0;
  std::size_t count = 0;
  std::string plot_path;
  auto* cmd_simulate =
      app.add_subcommand("simulate", "Run the regular-pulse protocol");
  cmd_simulate->add_option("--dt", dt, "Emission interval")->required();
  cmd_simulate->add_option("--count", count, "Number of pulses")->required();
  cmd_simulate->add_option("--plot", plot_path,
                           "Also write a long-format spacetime-diagram CSV");

  std::string state_path;
  auto* cmd_transform = app.add_subcommand(
      "transform-state", "Transform a field state into the moving frame");
  cmd_transform->add_option("--state", state_path, "Input state JSON")
      ->required();

  double lo = 0.0, hi = 0.0;
  std::size_t samples = 0;
  auto* cmd_density =
      app.add_subcommand("density", "Worldline-density ratio profile");
  cmd_density->add_option("--lo", lo, "Interval start (chi_A)")->required();
  cmd_density->add_option("--hi", hi, "Interval end (chi_A)")->required();
  cmd_density->add_option("--samples", samples, "Sample count")->required();
  cmd_density->add_option("--s", s_override, "Propagation direction");

  auto* cmd_verify =
      app.add_subcommand("verify", "Run the invariant self-check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  // configuration phase: every failure is a config error
  chimap::io::RunConfig cfg;
  try {
    if (config_path.empty()) {
      if (const char* env = std::getenv("CHIMAP_CONFIG")) config_path = env;
    }
    cfg = config_path.empty() ? chimap::io::default_config()
                              : chimap::io::load_config_file(config_path);
    if (!format_override.empty()) {
      if (format_override != "csv" && format_override != "json")
        throw chimap::config_error("format must be \"csv\" or \"json\"");
      cfg.format = format_override;
      cfg.echo["format"] = cfg.format;
    }
    if (!out_override.empty()) cfg.out = out_override;
    if (abs_tol_override >= 0.0) {
      cfg.quad.abs_tol = abs_tol_override;
      cfg.quad.validate();
      cfg.echo["quadrature"] = chimap::io::quadrature_to_json(cfg.quad);
    }
    if (s_override) chimap::direction_from_int(*s_override);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  print_warnings(cfg.trajectory);

  // computation phase: numerical failures exit 3
  try {
    if (cmd_map->parsed()) return run_map(cfg, chi_a, s_override);
    if (cmd_invert->parsed()) return run_invert(cfg, chi_b, s_override);
    if (cmd_simulate->parsed()) return run_simulate(cfg, dt, count, plot_path);
    if (cmd_transform->parsed()) return run_transform_state(cfg, state_path);
    if (cmd_density->parsed())
      return run_density(cfg, lo, hi, samples, s_override);
    if (cmd_verify->parsed()) return run_verify(cfg, seed);
  } catch (const chimap::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const chimap::error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitConfig;
}
