#include "costas/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>

#include "costas/json_io.hpp"
#include "costas/math.hpp"

namespace costas {

namespace {

constexpr double kCarrier = kTwoPi * 400000.0;
constexpr double kVcoGain = 6.3165e5;
constexpr double kTau1 = 20e-6;
constexpr double kTau2 = 4e-6;
constexpr double kLpfCorner = 1.2566e6;
constexpr double kBaseHorizon = 10e-3;

LoopConfig with_lpf(LoopConfig c, double omega_lpf) {
  c.lpf1 = make_first_order_lpf(omega_lpf);
  c.lpf2 = make_first_order_lpf(omega_lpf);
  return c;
}

LoopConfig with_free_frequency(LoopConfig c, double w) {
  c.omega_vco_free = w;
  return c;
}

ScenarioRun make_run(const LoopConfig& c, ModelVariant v) {
  return {c, default_plan(c, v, scenario_horizon(c))};
}

Scenario make(std::string id, std::string description, ScenarioRun red, ScenarioRun black,
              std::vector<std::string> varied) {
  Scenario s;
  s.id = std::move(id);
  s.description = std::move(description);
  s.red = std::move(red);
  s.black = std::move(black);
  s.expect_red_locked = false;
  s.expect_black_locked = true;
  s.varied_fields = std::move(varied);
  return s;
}

RunOutcome run_one(const std::string& label, const ScenarioRun& run, bool expected,
                   bool keep_trace) {
  const auto start = std::chrono::steady_clock::now();
  Trace trace;
  try {
    trace = simulate(run.config, run.plan);
  } catch (const IntegrationDiverged& e) {
    throw IntegrationDiverged(label + ": " + e.what());
  }
  RunOutcome out;
  out.expected_locked = expected;
  out.verdict = detect_lock(trace, run.config);
  out.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (keep_trace) out.trace = std::move(trace);
  return out;
}

}  // namespace

LoopConfig base_config() {
  LoopConfig c;
  c.omega_ref = kCarrier;
  c.omega_vco_free = kCarrier;
  c.k_vco = kVcoGain;
  c.theta_vco_0 = 0.0;
  c.detector_polarity = kCalibratedPolarity;
  c.loop_filter = make_pi_loop_filter(kTau1, kTau2);
  c.lpf1 = make_first_order_lpf(kLpfCorner);
  c.lpf2 = make_first_order_lpf(kLpfCorner);
  c.m1_spec = DataSignalSpec::constant(1.0);
  c.m2_spec = DataSignalSpec::constant(1.0);
  c.x_lf_0 = Eigen::VectorXd::Zero(1);
  c.x_lpf1_0 = Eigen::VectorXd::Zero(1);
  c.x_lpf2_0 = Eigen::VectorXd::Zero(1);
  return c;
}

std::string polarity_calibration_note() {
  return "detector polarity +1: both polarities lock the ex1a black run, so the whole catalog "
         "is used as the calibration set; +1 reproduces more expected verdicts "
         "(see calibrate_polarity)";
}

double scenario_horizon(const LoopConfig& config) {
  const double w_delta = std::abs(omega_delta_free(config));
  double horizon = kBaseHorizon;
  if (w_delta >= default_eps_f(config)) horizon = std::max(horizon, 5.0 * 100.0 / w_delta);
  return horizon;
}

std::vector<Scenario> catalog() {
  const LoopConfig base = base_config();
  std::vector<Scenario> out;
  const auto ss = ModelVariant::kSignalSpace;
  const auto bb = ModelVariant::kBasebandLpf;
  const auto avg = ModelVariant::kAveragedPhase;

  {
    const LoopConfig black = with_free_frequency(base, 2.6314e6);
    LoopConfig red = black;
    red.x_lf_0 = Eigen::VectorXd::Constant(1, 0.4);
    out.push_back(make("ex1a", "loop filter initial state 0.4 vs zero, physical model",
                       make_run(red, ss), make_run(black, ss), {"x_lf_0"}));
  }
  {
    const LoopConfig black = with_free_frequency(base, 2.8283e6);
    LoopConfig red = black;
    red.x_lpf1_0 = Eigen::VectorXd::Constant(1, 30.0);
    red.x_lpf2_0 = Eigen::VectorXd::Constant(1, 30.0);
    out.push_back(make("ex1b", "low-pass filter initial states 30 vs zero, physical model",
                       make_run(red, ss), make_run(black, ss), {"x_lpf1_0", "x_lpf2_0"}));
  }
  {
    const LoopConfig cfg = with_lpf(with_free_frequency(base, 2.8433e6), 6.2832e5);
    out.push_back(make("ex2",
                       "double-frequency terms kept (physical) vs dropped (baseband), "
                       "w_lpf = 6.2832e5",
                       make_run(cfg, ss), make_run(cfg, bb), {"variant"}));
  }
  {
    const LoopConfig black = with_free_frequency(base, 2.7495e6);
    LoopConfig red = black;
    red.m1_spec = DataSignalSpec::square(2.7495e6);
    out.push_back(make("ex3", "m1 = sign(sin(2.7495e6 t)) vs m1 = 1, physical model",
                       make_run(red, ss), make_run(black, ss), {"m1_spec"}));
  }
  {
    const LoopConfig black = with_free_frequency(base, 2.8767e6);
    LoopConfig red = black;
    red.theta_vco_0 = 0.8854;
    out.push_back(make("ex4", "initial VCO phase 0.8854 rad vs zero, physical model",
                       make_run(red, ss), make_run(black, ss), {"theta_vco_0"}));
  }
  {
    const LoopConfig common = with_free_frequency(base, 2.5933e6);
    LoopConfig red = common;
    red.x_lpf1_0 = Eigen::VectorXd::Constant(1, 3.0);
    red.x_lpf2_0 = Eigen::VectorXd::Constant(1, 4.2566);
    LoopConfig black = common;
    black.theta_delta_0 = -kQuarterPi;
    out.push_back(make("ex5",
                       "physical model with x1(0) = 3, x2(0) = 4.2566 vs averaged model "
                       "with theta_delta(0) = -pi/4",
                       make_run(red, ss), make_run(black, avg),
                       {"theta_delta_0", "variant", "x_lpf1_0", "x_lpf2_0"}));
  }
  {
    const LoopConfig common = with_free_frequency(base, kCarrier + 1000.0);
    out.push_back(make("ex6", "baseband model, w_lpf = 1.5708e5 vs 6.2832e5",
                       make_run(with_lpf(common, 1.5708e5), bb),
                       make_run(with_lpf(common, 6.2832e5), bb), {"lpf1", "lpf2"}));
  }
  return out;
}

std::optional<Scenario> find_scenario(const std::string& id) {
  for (auto& s : catalog())
    if (s.id == id) return s;
  return std::nullopt;
}

bool VerdictTable::all_match() const {
  return std::all_of(rows.begin(), rows.end(), [](const VerdictRow& r) { return r.matches(); });
}

std::size_t VerdictTable::matching_runs() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += static_cast<std::size_t>(r.red.matches()) + r.black.matches();
  return n;
}

void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn) {
  unsigned workers = jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

VerdictRow run_scenario(const Scenario& s, bool keep_traces) {
  VerdictRow row;
  row.id = s.id;
  row.description = s.description;
  row.red = run_one(s.id + " red", s.red, s.expect_red_locked, keep_traces);
  row.black = run_one(s.id + " black", s.black, s.expect_black_locked, keep_traces);
  return row;
}

VerdictTable run_scenarios(std::span<const Scenario> scenarios, unsigned jobs, bool keep_traces) {
  VerdictTable table;
  table.rows.resize(scenarios.size());
  if (!scenarios.empty()) table.polarity = scenarios.front().red.config.detector_polarity;
  parallel_for(2 * scenarios.size(), jobs, [&](std::size_t k) {
    const Scenario& s = scenarios[k / 2];
    VerdictRow& row = table.rows[k / 2];
    if (k % 2 == 0) {
      row.id = s.id;
      row.description = s.description;
      row.red = run_one(s.id + " red", s.red, s.expect_red_locked, keep_traces);
    } else {
      row.black = run_one(s.id + " black", s.black, s.expect_black_locked, keep_traces);
    }
  });
  return table;
}

std::string format_table(const VerdictTable& table) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "id" << std::setw(7) << "run" << std::setw(9) << "expected"
     << std::setw(9) << "observed" << std::right << std::setw(14) << "drift[rad]"
     << std::setw(16) << "freq_err[rad/s]" << std::setw(10) << "theta_mod" << "  match\n";
  auto line = [&](const std::string& id, const char* run, const RunOutcome& o) {
    os << std::left << std::setw(6) << id << std::setw(7) << run << std::setw(9)
       << (o.expected_locked ? "lock" : "no-lock") << std::setw(9)
       << (o.verdict.locked ? "lock" : "no-lock") << std::right << std::setw(14)
       << std::setprecision(4) << std::scientific << o.verdict.theta_drift << std::setw(16)
       << o.verdict.mean_freq_error << std::setw(10) << std::fixed << std::setprecision(4)
       << o.verdict.final_theta_mod << "  " << (o.matches() ? "yes" : "NO") << '\n';
    os.unsetf(std::ios::floatfield);
  };
  for (const auto& row : table.rows) {
    line(row.id, "red", row.red);
    line(row.id, "black", row.black);
  }
  os << table.matching_runs() << "/" << table.run_count() << " runs match (detector polarity "
     << (table.polarity > 0 ? "+1" : "-1") << ")\n";
  return os.str();
}

std::vector<Scenario> with_polarity(std::vector<Scenario> scenarios, int polarity) {
  for (auto& s : scenarios) {
    s.red.config.detector_polarity = polarity;
    s.black.config.detector_polarity = polarity;
  }
  return scenarios;
}

PolarityCalibration calibrate_polarity(unsigned jobs) {
  PolarityCalibration cal;
  const auto plus = with_polarity(catalog(), +1);
  const auto minus = with_polarity(catalog(), -1);
  cal.matches_plus = run_scenarios(plus, jobs).matching_runs();
  cal.matches_minus = run_scenarios(minus, jobs).matching_runs();
  cal.runs = 2 * plus.size();
  cal.chosen = cal.matches_minus > cal.matches_plus ? -1 : +1;
  return cal;
}

ModelComparison compare_models(const LoopConfig& config, std::span<const ModelVariant> variants,
                               const SimPlan& plan) {
  ModelComparison cmp;
  cmp.variants.assign(variants.begin(), variants.end());
  std::vector<Trace> traces;
  for (ModelVariant v : variants) {
    SimPlan p = plan;
    p.variant = v;
    traces.push_back(simulate(config, p));
    cmp.verdicts.push_back(detect_lock(traces.back(), config));
  }
  if (traces.empty()) return cmp;
  double sum_sq = 0.0;
  std::size_t count = 0;
  const Trace& ref = traces.front();
  for (std::size_t v = 1; v < traces.size(); ++v) {
    const Trace& other = traces[v];
    const std::size_t n = std::min(ref.size(), other.size());
    for (std::size_t k = 0; k < n; ++k) {
      const double d = std::abs(other.theta_delta[k] - ref.theta_delta[k]);
      cmp.sup_distance = std::max(cmp.sup_distance, d);
      sum_sq += d * d;
      ++count;
    }
    cmp.verdicts_agree = cmp.verdicts_agree && cmp.verdicts[v].locked == cmp.verdicts[0].locked;
  }
  cmp.rms_distance = count > 0 ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
  return cmp;
}

std::vector<std::string> differing_fields(const LoopConfig& a, const LoopConfig& b) {
  const Json ja = a;
  const Json jb = b;
  std::vector<std::string> out;
  for (const auto& item : ja.items()) {
    if (!jb.contains(item.key()) || jb.at(item.key()) != item.value()) out.push_back(item.key());
  }
  return out;
}

}  // namespace costas
