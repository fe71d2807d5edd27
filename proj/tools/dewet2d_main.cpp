// Command-line front end: experiment dispatch and data emission.
//
// Subcommands: simulate, equilibrium, cauchy, wulff, angles.  Configuration
// comes from a flat JSON file (--config) with every key mirrored by a flag;
// flags override file values.  DEWET2D_LOG=quiet|info|debug controls stderr
// verbosity.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include "dewet2d/harness.hpp"

using json = nlohmann::json;
using namespace dewet;

namespace {

constexpr double kPi = 3.14159265358979323846;

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("DEWET2D_LOG");
  if (!env) {
    return LogLevel::Info;
  }
  const std::string v(env);
  if (v == "quiet") {
    return LogLevel::Quiet;
  }
  if (v == "debug") {
    return LogLevel::Debug;
  }
  return LogLevel::Info;
}

void log_info(const std::string& msg) {
  if (log_level() >= LogLevel::Info) {
    std::cerr << msg << "\n";
  }
}

/// Fully validated run configuration with defaults applied.
struct RunConfig {
  std::string command;
  std::string shape = "semi-ellipse";
  double a = 2.0;
  double b = 1.0;
  double area = 1.0; // wulff initial shape
  std::string node_file;
  int n = 128;
  double tau = 0.01;
  double T = 1.0;
  std::vector<double> times;
  std::string scheme = "pc";
  double theta = 0.0; // radians, set from theta_deg/theta_rad
  double eta = 100.0;
  double epsilon = 1e-12;
  std::string out = ".";
  int stride = 1;
  bool dry_run = false;
  double path_c = 0.05;
  double path_alpha = 1.0;
  int levels = 4;
  std::vector<double> tau_list;
  std::vector<int> n_list;
  long max_steps = 10'000'000;
  int wulff_ref_n = 8192;
};

/// Raw option values: every config key, each optionally set by file or flag.
struct RawConfig {
  std::optional<std::string> command, shape, node_file, scheme, out;
  std::optional<double> a, b, area, tau, T, theta_deg, theta_rad, eta, epsilon,
      path_c, path_alpha;
  std::optional<int> n, stride, levels, wulff_ref_n;
  std::optional<long> max_steps;
  std::optional<bool> dry_run;
  std::optional<std::vector<double>> times, tau_list;
  std::optional<std::vector<int>> n_list;
};

const std::set<std::string> kKnownKeys = {
    "command", "shape",      "a",         "b",        "area",
    "node_file", "N",        "tau",       "T",        "times",
    "scheme",  "theta_deg",  "theta_rad", "eta",      "epsilon",
    "out",     "stride",     "dry_run",   "path_c",   "path_alpha",
    "levels",  "tau_list",   "N_list",    "max_steps", "wulff_ref_N"};

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(key + ": unexpected value type");
  }
}

void merge_file(RawConfig& raw, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed config JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) {
    throw ConfigError("config must be a flat JSON object");
  }
  for (const auto& [key, value] : doc.items()) {
    if (!kKnownKeys.count(key)) {
      throw ConfigError("unknown config key '" + key + "'");
    }
    // File values must not override flags, so fill only unset slots.
    auto set_str = [&](std::optional<std::string>& slot) {
      if (!slot) slot = get_as<std::string>(value, key);
    };
    auto set_num = [&](std::optional<double>& slot) {
      if (!slot) slot = get_as<double>(value, key);
    };
    auto set_int = [&](std::optional<int>& slot) {
      if (!slot) slot = get_as<int>(value, key);
    };
    if (key == "command") set_str(raw.command);
    else if (key == "shape") set_str(raw.shape);
    else if (key == "node_file") set_str(raw.node_file);
    else if (key == "scheme") set_str(raw.scheme);
    else if (key == "out") set_str(raw.out);
    else if (key == "a") set_num(raw.a);
    else if (key == "b") set_num(raw.b);
    else if (key == "area") set_num(raw.area);
    else if (key == "tau") set_num(raw.tau);
    else if (key == "T") set_num(raw.T);
    else if (key == "theta_deg") set_num(raw.theta_deg);
    else if (key == "theta_rad") set_num(raw.theta_rad);
    else if (key == "eta") set_num(raw.eta);
    else if (key == "epsilon") set_num(raw.epsilon);
    else if (key == "path_c") set_num(raw.path_c);
    else if (key == "path_alpha") set_num(raw.path_alpha);
    else if (key == "N") set_int(raw.n);
    else if (key == "stride") set_int(raw.stride);
    else if (key == "levels") set_int(raw.levels);
    else if (key == "wulff_ref_N") set_int(raw.wulff_ref_n);
    else if (key == "max_steps") {
      if (!raw.max_steps) raw.max_steps = get_as<long>(value, key);
    } else if (key == "dry_run") {
      if (!raw.dry_run) raw.dry_run = get_as<bool>(value, key);
    } else if (key == "times") {
      if (!raw.times) raw.times = get_as<std::vector<double>>(value, key);
    } else if (key == "tau_list") {
      if (!raw.tau_list) raw.tau_list = get_as<std::vector<double>>(value, key);
    } else if (key == "N_list") {
      if (!raw.n_list) raw.n_list = get_as<std::vector<int>>(value, key);
    }
  }
}

RunConfig finalize_config(const RawConfig& raw, const std::string& command) {
  RunConfig cfg;
  cfg.command = command;
  if (raw.command && *raw.command != command) {
    throw ConfigError("command: config file says '" + *raw.command +
                      "' but the subcommand is '" + command + "'");
  }
  if (raw.shape) cfg.shape = *raw.shape;
  if (cfg.shape != "semi-ellipse" && cfg.shape != "flower" &&
      cfg.shape != "wulff" && cfg.shape != "file") {
    throw ConfigError("shape: unknown shape '" + cfg.shape + "'");
  }
  if (raw.a) cfg.a = *raw.a;
  if (raw.b) cfg.b = *raw.b;
  if (cfg.shape == "semi-ellipse" && (cfg.a <= 0.0 || cfg.b <= 0.0)) {
    throw ConfigError("a/b: semi-ellipse axes must be positive");
  }
  if (raw.area) cfg.area = *raw.area;
  if (raw.node_file) cfg.node_file = *raw.node_file;
  if (cfg.shape == "file" && cfg.node_file.empty()) {
    throw ConfigError("node_file: required for shape 'file'");
  }
  if (raw.n) cfg.n = *raw.n;
  if (cfg.n < 3) {
    throw ConfigError("N: need at least 3 segments");
  }
  if (raw.tau) cfg.tau = *raw.tau;
  if (!(cfg.tau > 0.0)) {
    throw ConfigError("tau: time step must be positive");
  }
  if (raw.T) cfg.T = *raw.T;
  if (cfg.T < 0.0) {
    throw ConfigError("T: final time must be nonnegative");
  }
  if (raw.times) cfg.times = *raw.times;
  if (cfg.times.empty()) {
    cfg.times = {0.25, 0.5};
  }
  if (raw.scheme) cfg.scheme = *raw.scheme;
  parse_scheme(cfg.scheme); // validates
  if (raw.theta_deg && raw.theta_rad) {
    throw ConfigError("theta: give exactly one of theta_deg or theta_rad");
  }
  if (raw.theta_deg) {
    if (!(*raw.theta_deg > 0.0 && *raw.theta_deg < 180.0)) {
      throw ConfigError("theta_deg: theta out of (0,180)");
    }
    cfg.theta = *raw.theta_deg * kPi / 180.0;
  } else if (raw.theta_rad) {
    if (!(*raw.theta_rad > 0.0 && *raw.theta_rad < kPi)) {
      throw ConfigError("theta_rad: theta out of (0,pi)");
    }
    cfg.theta = *raw.theta_rad;
  } else {
    throw ConfigError("theta: theta_deg or theta_rad is required");
  }
  if (raw.eta) cfg.eta = *raw.eta;
  if (!(cfg.eta > 0.0)) {
    throw ConfigError("eta: contact-line mobility must be positive");
  }
  if (raw.epsilon) cfg.epsilon = *raw.epsilon;
  if (!(cfg.epsilon > 0.0)) {
    throw ConfigError("epsilon: tolerance must be positive");
  }
  if (raw.out) cfg.out = *raw.out;
  if (raw.stride) cfg.stride = *raw.stride;
  if (cfg.stride < 1) {
    throw ConfigError("stride: must be >= 1");
  }
  if (raw.dry_run) cfg.dry_run = *raw.dry_run;
  if (raw.path_c) cfg.path_c = *raw.path_c;
  if (raw.path_alpha) cfg.path_alpha = *raw.path_alpha;
  if (!(cfg.path_c > 0.0) || !(cfg.path_alpha > 0.0)) {
    throw ConfigError("path_c/path_alpha: path constants must be positive");
  }
  if (raw.levels) cfg.levels = *raw.levels;
  if (cfg.levels < 1) {
    throw ConfigError("levels: must be >= 1");
  }
  if (raw.tau_list) cfg.tau_list = *raw.tau_list;
  if (raw.n_list) cfg.n_list = *raw.n_list;
  if (raw.max_steps) cfg.max_steps = *raw.max_steps;
  if (cfg.max_steps < 1) {
    throw ConfigError("max_steps: must be >= 1");
  }
  if (raw.wulff_ref_n) cfg.wulff_ref_n = *raw.wulff_ref_n;
  if (cfg.wulff_ref_n < 3) {
    throw ConfigError("wulff_ref_N: must be >= 3");
  }
  return cfg;
}

ShapeSpec shape_of(const RunConfig& cfg) {
  if (cfg.shape == "semi-ellipse") {
    return ShapeSpec::semi_ellipse(cfg.a, cfg.b);
  }
  if (cfg.shape == "flower") {
    return ShapeSpec::flower();
  }
  if (cfg.shape == "wulff") {
    return ShapeSpec::wulff(cfg.theta, cfg.area);
  }
  return ShapeSpec::file(cfg.node_file);
}

StudySpec study_of(const RunConfig& cfg) {
  StudySpec spec;
  spec.scheme = parse_scheme(cfg.scheme);
  spec.shape = shape_of(cfg);
  spec.theta = cfg.theta;
  spec.eta = cfg.eta;
  spec.path_c = cfg.path_c;
  spec.path_alpha = cfg.path_alpha;
  spec.tau0 = cfg.tau;
  spec.levels = cfg.levels;
  spec.tau_targets = cfg.tau_list;
  spec.times = cfg.times;
  spec.epsilon = cfg.epsilon;
  spec.max_steps = cfg.max_steps;
  spec.wulff_reference_n = cfg.wulff_ref_n;
  spec.mesh_levels = cfg.n_list;
  spec.fixed_tau = cfg.tau;
  return spec;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

SnapshotSink snapshot_sink(const std::filesystem::path& out) {
  return [out](long step, const PolygonalCurve& c) {
    write_curve_csv(c, (out / ("curve_" + std::to_string(step) + ".csv"))
                           .string());
  };
}

void print_final_summary(const TrajectoryRecord& rec) {
  const TrajectoryPoint& last = rec.rows.back();
  const double w0 = rec.energy_series.front();
  std::printf("t=%g steps=%ld W/W0=%.6f dA/A0=%.3e Psi=%.6f "
              "theta_l/pi=%.6f theta_r/pi=%.6f\n",
              last.t, rec.steps, last.energy / w0, last.area_loss,
              last.mesh_ratio, last.theta_left / kPi, last.theta_right / kPi);
}

void print_report(const ConvergenceReport& rep) {
  std::printf("%s%s: tau/h/error/order\n", rep.kind.c_str(),
              rep.time >= 0 ? (" T=" + time_tag(rep.time)).c_str()
                            : " (equilibrium)");
  for (const ConvergenceRow& r : rep.rows) {
    if (std::isnan(r.order)) {
      std::printf("  %.6e  %.6e  %.6e  ---\n", r.tau, r.h, r.error);
    } else {
      std::printf("  %.6e  %.6e  %.6e  %.4f\n", r.tau, r.h, r.error, r.order);
    }
  }
}

int run(const RunConfig& cfg) {
  if (cfg.dry_run) {
    std::printf("dry-run ok: command=%s scheme=%s shape=%s N=%d tau=%g "
                "theta=%g eta=%g\n",
                cfg.command.c_str(), cfg.scheme.c_str(), cfg.shape.c_str(),
                cfg.n, cfg.tau, cfg.theta, cfg.eta);
    return 0;
  }
  const std::filesystem::path out(cfg.out);
  std::filesystem::create_directories(out);
  const SchemeParams params = make_params(cfg.tau, cfg.eta, cfg.theta);
  const Scheme scheme = parse_scheme(cfg.scheme);

  if (cfg.command == "simulate") {
    log_info("simulate: " + cfg.scheme + " N=" + std::to_string(cfg.n) +
             " tau=" + std::to_string(cfg.tau));
    const TrajectoryRecord rec =
        evolve(from_shape(shape_of(cfg), cfg.n), scheme, params, cfg.T,
               cfg.stride, snapshot_sink(out));
    rec.write_diagnostics_csv((out / "diagnostics.csv").string());
    print_final_summary(rec);
    return 0;
  }
  if (cfg.command == "equilibrium") {
    log_info("equilibrium: " + cfg.scheme + " N=" + std::to_string(cfg.n));
    const TrajectoryRecord rec = evolve_to_equilibrium(
        from_shape(shape_of(cfg), cfg.n), scheme, params, cfg.epsilon,
        cfg.max_steps, cfg.stride, snapshot_sink(out));
    rec.write_diagnostics_csv((out / "diagnostics.csv").string());
    std::printf("equilibrium reached: residual=%.3e\n",
                rec.stationary_residual);
    print_final_summary(rec);
    return 0;
  }
  if (cfg.command == "cauchy") {
    const std::vector<ConvergenceReport> reps = cauchy_study(study_of(cfg));
    for (const ConvergenceReport& rep : reps) {
      const std::string tag = "report_t" + time_tag(rep.time);
      rep.write_csv((out / (tag + ".csv")).string());
      rep.write_json((out / (tag + ".json")).string());
      print_report(rep);
    }
    // Headline copy under the declared names (largest time).
    reps.back().write_csv((out / "report.csv").string());
    reps.back().write_json((out / "report.json").string());
    return 0;
  }
  if (cfg.command == "wulff") {
    const ConvergenceReport rep = wulff_study(study_of(cfg));
    rep.write_csv((out / "report.csv").string());
    rep.write_json((out / "report.json").string());
    print_report(rep);
    return 0;
  }
  if (cfg.command == "angles") {
    StudySpec spec = study_of(cfg);
    if (spec.mesh_levels.empty()) {
      spec.mesh_levels = {64, 128, 256, 512};
    }
    const ConvergenceReport rep = angle_convergence_study(spec);
    rep.write_csv((out / "report.csv").string());
    rep.write_json((out / "report.json").string());
    print_report(rep);
    return 0;
  }
  throw ConfigError("unknown command '" + cfg.command + "'");
}

void add_common_options(CLI::App* cmd, RawConfig& raw,
                        std::optional<std::string>& config_path) {
  cmd->add_option_function<std::string>(
      "--config", [&](const std::string& v) { config_path = v; },
      "flat JSON config file (flags override file values)");
  auto opt_str = [&](const char* name, std::optional<std::string>& slot,
                     const char* help) {
    cmd->add_option_function<std::string>(
        name, [&slot](const std::string& v) { slot = v; }, help);
  };
  auto opt_num = [&](const char* name, std::optional<double>& slot,
                     const char* help) {
    cmd->add_option_function<double>(
        name, [&slot](double v) { slot = v; }, help);
  };
  auto opt_int = [&](const char* name, std::optional<int>& slot,
                     const char* help) {
    cmd->add_option_function<int>(name, [&slot](int v) { slot = v; }, help);
  };
  opt_str("--shape", raw.shape, "semi-ellipse | flower | wulff | file");
  opt_num("--a", raw.a, "semi-ellipse semi-major axis");
  opt_num("--b", raw.b, "semi-ellipse semi-minor axis");
  opt_num("--area", raw.area, "wulff initial-shape area");
  opt_str("--node-file", raw.node_file, "curve CSV for shape=file");
  opt_int("--N", raw.n, "segment count");
  opt_num("--tau", raw.tau, "time step (study: coarsest target)");
  opt_num("--T", raw.T, "final time (simulate)");
  cmd->add_option_function<std::vector<double>>(
      "--times",
      [&raw](const std::vector<double>& v) { raw.times = v; },
      "cauchy sampling times")
      ->delimiter(',');
  opt_str("--scheme", raw.scheme, "zjb | pc | bdf2 | bdf3 | bdf4");
  opt_num("--theta-deg", raw.theta_deg, "Young angle in degrees");
  opt_num("--theta-rad", raw.theta_rad, "Young angle in radians");
  opt_num("--eta", raw.eta, "contact-line mobility (default 100)");
  opt_num("--epsilon", raw.epsilon, "equilibrium tolerance (default 1e-12)");
  opt_str("--out", raw.out, "output directory");
  opt_int("--stride", raw.stride, "snapshot stride (default 1)");
  cmd->add_flag_function(
      "--dry-run",
      [&raw](std::int64_t count) { raw.dry_run = count > 0; },
      "validate the configuration and exit");
  opt_num("--path-c", raw.path_c, "study path constant c in tau = c h^alpha");
  opt_num("--path-alpha", raw.path_alpha, "study path exponent alpha");
  opt_int("--levels", raw.levels, "number of refinement levels");
  cmd->add_option_function<std::vector<double>>(
      "--tau-list",
      [&raw](const std::vector<double>& v) { raw.tau_list = v; },
      "explicit per-level time steps")
      ->delimiter(',');
  cmd->add_option_function<std::vector<int>>(
      "--N-list", [&raw](const std::vector<int>& v) { raw.n_list = v; },
      "mesh sizes for the angles study")
      ->delimiter(',');
  cmd->add_option_function<long>(
      "--max-steps", [&raw](long v) { raw.max_steps = v; },
      "equilibrium step cap");
  opt_int("--wulff-ref-N", raw.wulff_ref_n,
          "target polygon resolution for the wulff study");
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D solid-state dewetting simulator (parametric FEM, "
               "first- to fourth-order time stepping)"};
  app.require_subcommand(1);

  RawConfig raw;
  std::optional<std::string> config_path;
  std::string command;
  for (const char* name :
       {"simulate", "equilibrium", "cauchy", "wulff", "angles"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common_options(sub, raw, config_path);
    sub->callback([&command, name]() { command = name; });
  }

  CLI11_PARSE(app, argc, argv);

  std::string out_dir = ".";
  try {
    if (config_path) {
      merge_file(raw, *config_path);
    }
    const RunConfig cfg = finalize_config(raw, command);
    out_dir = cfg.out;
    return run(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Flag partially written outputs.
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    std::ofstream marker(std::filesystem::path(out_dir) / "FAILED");
    marker << e.what() << "\n";
    return 2;
  }
}
