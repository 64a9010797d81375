#include "cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "costas/analysis.hpp"
#include "costas/error.hpp"
#include "costas/integrate.hpp"
#include "costas/json_io.hpp"
#include "costas/scenarios.hpp"

namespace costas::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigOptions {
  std::string path;
  std::vector<std::string> overrides;
};

struct PlanOptions {
  std::string variant = "averaged_phase";
  std::optional<double> t_end;
  std::optional<double> dt;
  std::optional<std::size_t> decimation;
};

struct ThresholdOptions {
  std::optional<double> window;
  std::optional<double> eps_f;
  double eps_theta = 0.2;

  LockThresholds get() const { return {window, eps_f, eps_theta}; }
};

std::string fmt(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

void log(std::ostream& err, const std::string& msg) { err << "costas: " << msg << '\n'; }

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + path.string());
  f << content;
}

// Config as a normalized JSON document with overrides applied, so every
// optional key exists and can be overridden.
Json config_document(const ConfigOptions& o) {
  Json doc;
  if (o.path.empty()) {
    doc = base_config();
  } else {
    std::ifstream in(o.path);
    if (!in) throw UsageError("cannot open config '" + o.path + "'");
    try {
      doc = Json(Json::parse(in).get<LoopConfig>());
    } catch (const Json::exception& e) {
      throw UsageError("config '" + o.path + "': " + e.what());
    }
  }
  for (const auto& a : o.overrides) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("override must look like key=value: '" + a + "'");
    apply_override(doc, a.substr(0, eq), a.substr(eq + 1));
  }
  return doc;
}

LoopConfig checked_config(const Json& doc) {
  LoopConfig cfg;
  try {
    cfg = doc.get<LoopConfig>();
  } catch (const Json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const auto violations = validate(cfg);
  if (!violations.empty()) {
    std::string msg = "invalid config:";
    for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.reason;
    throw UsageError(msg);
  }
  return cfg;
}

SimPlan make_plan(const LoopConfig& cfg, const PlanOptions& o) {
  const auto variant = parse_variant(o.variant);
  if (!variant) throw UsageError("unknown variant '" + o.variant + "'");
  const double t_end = o.t_end.value_or(scenario_horizon(cfg));
  SimPlan plan = default_plan(cfg, *variant, t_end);
  plan.t_end = t_end;
  if (o.dt) {
    plan.dt = *o.dt;
    plan.decimation = 1;
  }
  if (o.decimation) plan.decimation = *o.decimation;
  const auto problems = validate(plan);
  if (!problems.empty()) {
    std::string msg = "invalid plan:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw UsageError(msg);
  }
  return plan;
}

void add_config_options(CLI::App* cmd, ConfigOptions& o) {
  cmd->add_option("--config", o.path, "Loop configuration JSON (default: base configuration)");
  cmd->add_option("--override", o.overrides, "Dotted key=value applied to the configuration")
      ->take_all();
}

void add_plan_options(CLI::App* cmd, PlanOptions& o) {
  cmd->add_option("--variant", o.variant, "signal_space | baseband_lpf | averaged_phase")
      ->capture_default_str();
  cmd->add_option("--t-end", o.t_end, "Horizon in seconds");
  cmd->add_option("--dt", o.dt, "Step size in seconds");
  cmd->add_option("--decimation", o.decimation, "Record every k-th step");
}

void add_threshold_options(CLI::App* cmd, ThresholdOptions& o) {
  cmd->add_option("--window", o.window, "Lock window in seconds");
  cmd->add_option("--eps-f", o.eps_f, "Frequency tolerance in rad/s");
  cmd->add_option("--eps-theta", o.eps_theta, "Phase drift tolerance in rad")->capture_default_str();
}

std::string verdict_line(const LockVerdict& v) {
  std::ostringstream os;
  os << (v.locked ? "locked" : "not locked") << " (drift " << v.theta_drift << " rad, freq error "
     << v.mean_freq_error << " rad/s over " << v.window << " s)";
  return os.str();
}

// --- scenario --------------------------------------------------------------

struct ScenarioOptions {
  std::vector<std::string> ids;
  std::string out_dir;
  bool dump_traces = false;
  unsigned jobs = 0;
  std::optional<int> polarity;
  std::string format = "text";
};

int cmd_scenario(const ScenarioOptions& o, std::ostream& out, std::ostream& err) {
  const auto all = catalog();
  std::vector<Scenario> chosen;
  const bool everything = o.ids.empty() || (o.ids.size() == 1 && o.ids[0] == "all");
  if (everything) {
    chosen = all;
  } else {
    for (const auto& id : o.ids) {
      auto it = std::find_if(all.begin(), all.end(), [&](const Scenario& s) { return s.id == id; });
      if (it == all.end()) {
        std::string known;
        for (const auto& s : all) known += " " + s.id;
        throw UsageError("unknown scenario '" + id + "' (known:" + known + ")");
      }
      chosen.push_back(*it);
    }
  }
  if (o.polarity) chosen = with_polarity(std::move(chosen), *o.polarity);

  log(err, "running " + std::to_string(2 * chosen.size()) + " runs");
  const VerdictTable table = run_scenarios(chosen, o.jobs, o.dump_traces);
  const std::string text = format_table(table);
  const Json doc = table;

  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  if (!o.out_dir.empty()) {
    write_file(dir / "verdicts.json", doc.dump(2) + "\n");
    write_file(dir / "verdicts.txt", text);
  }
  if (o.dump_traces) {
    for (const auto& row : table.rows) {
      write_file(dir / (row.id + "_red.csv"), to_csv(*row.red.trace));
      write_file(dir / (row.id + "_black.csv"), to_csv(*row.black.trace));
    }
  }
  out << (o.format == "json" ? doc.dump(2) + "\n" : text);
  log(err, std::to_string(table.matching_runs()) + "/" + std::to_string(table.run_count()) +
               " runs match the expected verdicts");
  return table.all_match() ? kOk : kMismatch;
}

// --- simulate --------------------------------------------------------------

struct SimulateOptions {
  ConfigOptions config;
  PlanOptions plan;
  ThresholdOptions thresholds;
  std::string out_dir;
  std::string format = "csv";
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err) {
  const LoopConfig cfg = checked_config(config_document(o.config));
  const SimPlan plan = make_plan(cfg, o.plan);
  log(err, "simulating " + std::string(to_string(plan.variant)) + " to t = " + fmt(plan.t_end) +
               " s with dt = " + fmt(plan.dt) + " s");
  const Trace trace = simulate(cfg, plan);

  std::optional<LockVerdict> verdict;
  std::string verdict_error;
  try {
    verdict = detect_lock(trace, cfg, o.thresholds.get());
  } catch (const TraceTooShort& e) {
    verdict_error = e.what();
  }

  if (!o.out_dir.empty()) {
    const fs::path dir(o.out_dir);
    write_file(dir / "trace.csv", to_csv(trace));
    if (verdict) write_file(dir / "verdict.json", Json(*verdict).dump(2) + "\n");
  } else if (o.format == "json") {
    if (verdict) out << Json(*verdict).dump(2) << '\n';
  } else {
    write_csv(trace, out);
  }
  if (!verdict) throw UsageError(verdict_error);
  log(err, verdict_line(*verdict));
  return kOk;
}

// --- analyze ---------------------------------------------------------------

struct AnalyzeOptions {
  ConfigOptions config;
  std::optional<double> omega_low;
  std::optional<double> omega_high;
  std::string out_dir;
};

int cmd_analyze(const AnalyzeOptions& o, std::ostream& out, std::ostream& err) {
  const LoopConfig cfg = checked_config(config_document(o.config));
  const EquilibriumReport eq = equilibria(cfg);

  Json doc;
  doc["equilibria"] = eq;
  doc["stability"] = Json::array();
  for (double theta : eq.theta_eq) {
    try {
      doc["stability"].push_back(stability(cfg, theta));
    } catch (const Error& e) {
      doc["stability"].push_back({{"theta_eq", theta}, {"error", e.what()}});
    }
  }
  const double low = o.omega_low.value_or(std::abs(omega_delta_free(cfg)));
  const double high = o.omega_high.value_or(2.0 * cfg.omega_ref);
  doc["band_check"] = {{"lpf1", lpf_band_check(cfg.lpf1, low, high)},
                       {"lpf2", lpf_band_check(cfg.lpf2, low, high)}};

  log(err, std::to_string(eq.theta_eq.size()) + " equilibria per 2 pi");
  if (o.out_dir.empty()) {
    out << doc.dump(2) << '\n';
  } else {
    write_file(fs::path(o.out_dir) / "analysis.json", doc.dump(2) + "\n");
  }
  return kOk;
}

// --- sweep -----------------------------------------------------------------

struct SweepOptions {
  ConfigOptions config;
  PlanOptions plan;
  ThresholdOptions thresholds;
  std::string key;
  std::string range;
  std::string out_dir;
  std::string format = "csv";
  unsigned jobs = 0;
};

std::vector<double> sweep_values(const std::string& range) {
  std::vector<std::string> parts;
  std::stringstream ss(range);
  for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("--range must be lo,hi,n");
  double lo = 0.0;
  double hi = 0.0;
  long n = 0;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    n = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw UsageError("--range must be lo,hi,n, got '" + range + "'");
  }
  if (n < 1 || !std::isfinite(lo) || !std::isfinite(hi)) throw UsageError("--range needs finite bounds and n >= 1");
  std::vector<double> values(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    values[static_cast<std::size_t>(k)] =
        n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  return values;
}

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const Json doc = config_document(o.config);
  const Json* current = find_path(doc, o.key);
  if (current == nullptr) throw UsageError("unknown config key '" + o.key + "'");
  // theta_delta_0 is numeric but null until set
  if (!current->is_number() && !current->is_null()) {
    throw UsageError("config key '" + o.key + "' is not numeric");
  }
  const auto values = sweep_values(o.range);

  std::vector<LoopConfig> configs;
  std::vector<SimPlan> plans;
  for (double v : values) {
    Json point = doc;
    apply_override(point, o.key, fmt(v));
    configs.push_back(checked_config(point));
    plans.push_back(make_plan(configs.back(), o.plan));
  }

  log(err, "sweeping " + o.key + " over " + std::to_string(values.size()) + " points");
  std::vector<LockVerdict> verdicts(values.size());
  const LockThresholds thresholds = o.thresholds.get();
  parallel_for(values.size(), o.jobs, [&](std::size_t k) {
    verdicts[k] = detect_lock(simulate(configs[k], plans[k]), configs[k], thresholds);
  });

  std::string text;
  if (o.format == "json") {
    Json rows = Json::array();
    for (std::size_t k = 0; k < values.size(); ++k) rows.push_back({{"value", values[k]}, {"verdict", verdicts[k]}});
    text = Json{{"key", o.key}, {"points", rows}}.dump(2) + "\n";
  } else {
    text = o.key + ",locked,mean_freq_error,final_theta_mod\n";
    for (std::size_t k = 0; k < values.size(); ++k) {
      text += fmt(values[k]) + "," + (verdicts[k].locked ? "1" : "0") + "," +
              fmt(verdicts[k].mean_freq_error) + "," + fmt(verdicts[k].final_theta_mod) + "\n";
    }
  }
  if (o.out_dir.empty()) {
    out << text;
  } else {
    write_file(fs::path(o.out_dir) / (o.format == "json" ? "sweep.json" : "sweep.csv"), text);
  }
  return kOk;
}

// --- list ------------------------------------------------------------------

int cmd_list(std::ostream& out) {
  for (const auto& s : catalog()) {
    out << s.id << "  " << s.description << "  [" << to_string(s.red.plan.variant) << " / "
        << to_string(s.black.plan.variant) << ", t_end " << s.red.plan.t_end << " s]\n";
  }
  out << polarity_calibration_note() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"QPSK Costas loop simulation and analysis"};
  app.require_subcommand(1);

  ScenarioOptions scen;
  auto* scenario = app.add_subcommand("scenario", "Run catalog scenarios and compare verdicts");
  scenario->add_option("ids", scen.ids, "Scenario ids or 'all'");
  scenario->add_option("--out", scen.out_dir, "Directory for verdicts and traces");
  scenario->add_flag("--dump-traces", scen.dump_traces, "Write <id>_<red|black>.csv per run");
  scenario->add_option("--jobs", scen.jobs, "Worker threads (0: all cores)");
  scenario->add_option("--polarity", scen.polarity, "Override the detector polarity")
      ->check(CLI::IsMember({-1, 1}));
  scenario->add_option("--format", scen.format, "text | json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one configuration");
  add_config_options(simulate_cmd, sim.config);
  add_plan_options(simulate_cmd, sim.plan);
  add_threshold_options(simulate_cmd, sim.thresholds);
  simulate_cmd->add_option("--out", sim.out_dir, "Directory for trace.csv and verdict.json");
  simulate_cmd->add_option("--format", sim.format, "Standard output: csv trace or json verdict")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  AnalyzeOptions ana;
  auto* analyze = app.add_subcommand("analyze", "Equilibria, stability and LPF band check");
  add_config_options(analyze, ana.config);
  analyze->add_option("--omega-low", ana.omega_low, "Passband frequency (default |w_delta_free|)");
  analyze->add_option("--omega-high", ana.omega_high, "Stopband frequency (default 2 w_ref)");
  analyze->add_option("--out", ana.out_dir, "Directory for analysis.json");

  SweepOptions sw;
  auto* sweep = app.add_subcommand("sweep", "Lock verdicts across one numeric config field");
  add_config_options(sweep, sw.config);
  add_plan_options(sweep, sw.plan);
  add_threshold_options(sweep, sw.thresholds);
  sweep->add_option("--key", sw.key, "Dotted config key")->required();
  sweep->add_option("--range", sw.range, "lo,hi,n")->required();
  sweep->add_option("--out", sw.out_dir, "Directory for sweep.csv or sweep.json");
  sweep->add_option("--jobs", sw.jobs, "Worker threads (0: all cores)");
  sweep->add_option("--format", sw.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  auto* list = app.add_subcommand("list", "List catalog scenarios");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "costas: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*scenario) return cmd_scenario(scen, out, err);
    if (*simulate_cmd) return cmd_simulate(sim, out, err);
    if (*analyze) return cmd_analyze(ana, out, err);
    if (*sweep) return cmd_sweep(sw, out, err);
    if (*list) return cmd_list(out);
  } catch (const UsageError& e) {
    log(err, e.what());
    return kUsage;
  } catch (const InvalidArgument& e) {
    log(err, e.what());
    return kUsage;
  } catch (const TraceTooShort& e) {
    log(err, e.what());
    return kUsage;
  } catch (const IntegrationDiverged& e) {
    log(err, std::string("numerical divergence: ") + e.what());
    return kDiverged;
  } catch (const Json::exception& e) {
    log(err, e.what());
    return kUsage;
  } catch (const fs::filesystem_error& e) {
    log(err, e.what());
    return kUsage;
  }
  return kUsage;
}

}  // namespace costas::cli
