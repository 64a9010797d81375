#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "costas/analysis.hpp"
#include "costas/config.hpp"
#include "costas/integrate.hpp"

namespace costas {

/// One simulated curve: a config plus the plan it is integrated with.
struct ScenarioRun {
  LoopConfig config;
  SimPlan plan;
};

/// A counterexample pair: the red run is expected out of lock, the black run
/// in lock, and the two differ only in `varied_fields`.
struct Scenario {
  std::string id;
  std::string description;
  ScenarioRun red;
  ScenarioRun black;
  bool expect_red_locked = false;
  bool expect_black_locked = true;
  std::vector<std::string> varied_fields;
};

/// Shared parameters of every scenario: 400 kHz carrier, K = 6.3165e5,
/// PI loop filter (20 us, 4 us), unit-gain branch filters at 1.2566e6 rad/s,
/// m1 = m2 = +1, zero initial states, calibrated detector polarity.
LoopConfig base_config();

/// The polarity base_config() uses, and how it was chosen.
inline constexpr int kCalibratedPolarity = +1;
std::string polarity_calibration_note();

std::vector<Scenario> catalog();
std::optional<Scenario> find_scenario(const std::string& id);

/// Horizon used by the catalog: 10 ms, extended so that the lock window
/// 100/|w_delta| fits five times.
double scenario_horizon(const LoopConfig& config);

struct RunOutcome {
  bool expected_locked = false;
  LockVerdict verdict;
  double runtime_s = 0.0;
  std::optional<Trace> trace;

  bool matches() const { return verdict.locked == expected_locked; }
};

struct VerdictRow {
  std::string id;
  std::string description;
  RunOutcome red;
  RunOutcome black;

  bool matches() const { return red.matches() && black.matches(); }
};

struct VerdictTable {
  std::vector<VerdictRow> rows;
  int polarity = kCalibratedPolarity;

  bool all_match() const;
  std::size_t run_count() const { return 2 * rows.size(); }
  std::size_t matching_runs() const;
};

VerdictRow run_scenario(const Scenario& s, bool keep_traces = false);

/// Runs scenarios with up to `jobs` worker threads (0 = hardware concurrency).
/// Rows keep the input order regardless of scheduling.
VerdictTable run_scenarios(std::span<const Scenario> scenarios, unsigned jobs = 0,
                           bool keep_traces = false);

std::string format_table(const VerdictTable& table);

/// Scenario catalog with the detector polarity of every run replaced.
std::vector<Scenario> with_polarity(std::vector<Scenario> scenarios, int polarity);

struct PolarityCalibration {
  int chosen = kCalibratedPolarity;
  std::size_t matches_plus = 0;
  std::size_t matches_minus = 0;
  std::size_t runs = 0;
};

/// Brute force over both polarities on the full catalog; picks the one that
/// reproduces more expected verdicts (ties go to +1).
PolarityCalibration calibrate_polarity(unsigned jobs = 0);

struct ModelComparison {
  std::vector<ModelVariant> variants;
  std::vector<LockVerdict> verdicts;
  double sup_distance = 0.0;  // max over variants and samples vs the first variant
  double rms_distance = 0.0;
  bool verdicts_agree = true;
};

/// Runs each variant with the same step and decimation and compares the
/// theta_delta traces against the first variant.
ModelComparison compare_models(const LoopConfig& config, std::span<const ModelVariant> variants,
                               const SimPlan& plan);

/// Top-level config keys whose JSON values differ.
std::vector<std::string> differing_fields(const LoopConfig& a, const LoopConfig& b);

/// Calls fn(0..n-1) on up to `jobs` threads.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

}  // namespace costas
