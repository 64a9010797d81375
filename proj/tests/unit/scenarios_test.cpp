#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <set>

#include "costas/dynamics.hpp"
#include "costas/integrate.hpp"
#include "costas/json_io.hpp"
#include "costas/scenarios.hpp"

namespace costas {
namespace {

const Scenario& get(const std::vector<Scenario>& all, const std::string& id) {
  auto it = std::find_if(all.begin(), all.end(), [&](const Scenario& s) { return s.id == id; });
  EXPECT_NE(it, all.end()) << id;
  return *it;
}

TEST(Catalog, Shape) {
  const auto all = catalog();
  ASSERT_EQ(all.size(), 7u);
  std::set<std::string> ids;
  for (const auto& s : all) {
    ids.insert(s.id);
    EXPECT_FALSE(s.expect_red_locked);
    EXPECT_TRUE(s.expect_black_locked);
    EXPECT_TRUE(validate(s.red.config).empty()) << s.id;
    EXPECT_TRUE(validate(s.black.config).empty()) << s.id;
    EXPECT_EQ(s.red.config.detector_polarity, kCalibratedPolarity);
    EXPECT_GE(s.red.plan.t_end, 10e-3);
    EXPECT_EQ(s.red.plan.t_end, scenario_horizon(s.red.config));
  }
  EXPECT_EQ(ids, (std::set<std::string>{"ex1a", "ex1b", "ex2", "ex3", "ex4", "ex5", "ex6"}));
  EXPECT_EQ(find_scenario("ex3")->id, "ex3");
  EXPECT_FALSE(find_scenario("ex9").has_value());
}

TEST(Catalog, Parameters) {
  const auto all = catalog();
  EXPECT_EQ(get(all, "ex2").black.plan.variant, ModelVariant::kBasebandLpf);
  EXPECT_EQ(get(all, "ex2").red.plan.variant, ModelVariant::kSignalSpace);
  EXPECT_EQ(get(all, "ex6").red.config.lpf1.a(0, 0), -1.5708e5);
  EXPECT_EQ(get(all, "ex6").black.config.lpf2.a(0, 0), -6.2832e5);
  EXPECT_EQ(get(all, "ex4").red.config.theta_vco_0, 0.8854);
  EXPECT_EQ(get(all, "ex3").red.config.m1_spec, DataSignalSpec::square(2.7495e6));
  EXPECT_EQ(get(all, "ex5").black.plan.variant, ModelVariant::kAveragedPhase);
  EXPECT_NEAR(*get(all, "ex5").black.config.theta_delta_0, -0.78539816339744828, 1e-16);
  EXPECT_EQ(get(all, "ex1b").red.config.x_lpf1_0(0), 30.0);
  EXPECT_EQ(get(all, "ex1b").red.config.x_lpf2_0(0), 30.0);
  EXPECT_EQ(get(all, "ex1a").red.config.x_lf_0(0), 0.4);
  EXPECT_EQ(get(all, "ex1a").black.config.omega_vco_free, 2.6314e6);
}

TEST(Catalog, RunsDifferOnlyInVariedFields) {
  for (const auto& s : catalog()) {
    std::vector<std::string> diff = differing_fields(s.red.config, s.black.config);
    if (s.red.plan.variant != s.black.plan.variant) diff.push_back("variant");
    std::sort(diff.begin(), diff.end());
    auto expected = s.varied_fields;
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(diff, expected) << s.id;
  }
}

TEST(Catalog, InitialVcoFrequencies) {
  const auto all = catalog();
  // the low-pass filter states of ex1b cancel in the detector bracket
  const auto& ex1b = get(all, "ex1b");
  EXPECT_EQ(initial_vco_frequency(ex1b.red.config), initial_vco_frequency(ex1b.black.config));
  // recorded, not asserted equal: red starts with the detector bracket 1.2566
  const auto& ex5 = get(all, "ex5");
  EXPECT_NEAR(initial_vco_frequency(ex5.red.config) - initial_vco_frequency(ex5.black.config),
              ex5.red.config.k_vco * 0.2 * 1.2566, 1e-6);
}

TEST(Scenarios, RunIsReproducible) {
  const Scenario s = *find_scenario("ex6");
  const VerdictRow a = run_scenario(s, true);
  const VerdictRow b = run_scenario(s, true);
  EXPECT_EQ(Json(a.red.verdict), Json(b.red.verdict));
  EXPECT_EQ(Json(a.black.verdict), Json(b.black.verdict));
  EXPECT_EQ(to_csv(*a.red.trace), to_csv(*b.red.trace));
  EXPECT_FALSE(a.red.verdict.locked);
  EXPECT_TRUE(a.black.verdict.locked);
}

TEST(Scenarios, ParallelTableMatchesSerial) {
  const std::vector<Scenario> some{*find_scenario("ex6"), *find_scenario("ex5")};
  const VerdictTable one = run_scenarios(some, 1);
  const VerdictTable many = run_scenarios(some, 4);
  EXPECT_EQ(Json(one), Json(many));
  ASSERT_EQ(one.rows.size(), 2u);
  EXPECT_EQ(one.rows[0].id, "ex6");
  EXPECT_EQ(one.run_count(), 4u);
  EXPECT_NE(format_table(one).find("ex6"), std::string::npos);
}

TEST(Scenarios, WithPolarity) {
  for (const auto& s : with_polarity(catalog(), -1)) {
    EXPECT_EQ(s.red.config.detector_polarity, -1);
    EXPECT_EQ(s.black.config.detector_polarity, -1);
  }
  EXPECT_FALSE(polarity_calibration_note().empty());
}

TEST(ParallelFor, VisitsEveryIndexAndRethrows) {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t k) { hits[k]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](std::size_t k) {
                 if (k == 7) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}

TEST(CompareModels, IdenticalVariantsHaveZeroDistance) {
  const LoopConfig c = base_config();
  const ModelVariant v[] = {ModelVariant::kAveragedPhase, ModelVariant::kAveragedPhase};
  const ModelComparison cmp = compare_models(c, v, default_plan(c, v[0], 10e-3));
  EXPECT_EQ(cmp.sup_distance, 0.0);
  EXPECT_EQ(cmp.rms_distance, 0.0);
  EXPECT_TRUE(cmp.verdicts_agree);
}

TEST(CompareModels, SmallDetuningAgrees) {
  LoopConfig c = base_config();
  c.omega_vco_free = c.omega_ref - 1000.0;
  const ModelVariant v[] = {ModelVariant::kSignalSpace, ModelVariant::kAveragedPhase};
  const ModelComparison cmp =
      compare_models(c, v, default_plan(c, v[0], scenario_horizon(c)));
  EXPECT_TRUE(cmp.verdicts_agree);
  EXPECT_TRUE(cmp.verdicts[0].locked);
}

TEST(CompareModels, SecondExampleDisagrees) {
  const Scenario s = *find_scenario("ex2");
  const ModelVariant v[] = {ModelVariant::kSignalSpace, ModelVariant::kAveragedPhase};
  const ModelComparison cmp = compare_models(s.red.config, v, s.red.plan);
  EXPECT_FALSE(cmp.verdicts_agree);
  EXPECT_FALSE(cmp.verdicts[0].locked);
  EXPECT_TRUE(cmp.verdicts[1].locked);
}

}  // namespace
}  // namespace costas
