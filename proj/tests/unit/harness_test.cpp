#include <gtest/gtest.h>

#include <sstream>

#include "eigcoint/harness.hpp"
#include "eigcoint/ranksel.hpp"

using namespace eigcoint;

namespace {

ExperimentPlan small_plan(int reps, int parallelism) {
  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2), preset_example3(6, 2, 2)};
  plan.n_grid = {300, 500};
  plan.estimators = {Estimator::Ratio, Estimator::IcOmega2, Estimator::UnitRoot, Estimator::TrueRank};
  plan.reps = reps;
  plan.parallelism = parallelism;
  plan.master_seed = 99;
  plan.crit_reps = 1000;
  plan.crit_T = 200;
  return plan;
}

std::string plan_error_of(const nlohmann::json& j) {
  try {
    plan_from_json(j);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidPlan);
    return e.what();
  }
  ADD_FAILURE() << "plan accepted: " << j.dump();
  return {};
}

}  // namespace

TEST(RunPlan, SingleReplicateMatchesDirectPipeline) {
  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2)};
  plan.n_grid = {1000};
  plan.estimators = {Estimator::Ratio};
  plan.reps = 1;
  plan.master_seed = 7;
  const auto report = run_plan(plan);
  ASSERT_EQ(report.cells.size(), 1u);
  ASSERT_EQ(report.cells[0].replicates.size(), 1u);
  const auto& rec = report.cells[0].replicates[0];

  auto spec = preset_example2(6, 2, 1000, derive_seed(7, {0, 0}));
  EXPECT_EQ(rec.seed, spec.seed);
  const auto gp = gen_panel(spec);
  const auto cf = fit(gp.y, plan.j0);
  const int r = rank_ratio(cf.eigen, 1000);
  ASSERT_TRUE(rec.rank.has_value());
  EXPECT_EQ(*rec.rank, r);
  EXPECT_EQ(rec.distance, dist_d1<double>(cf.a_hat.rightCols(r), gp.b2));
}

TEST(RunPlan, IndependentOfWorkerCount) {
  const auto a = run_plan(small_plan(12, 1));
  const auto b = run_plan(small_plan(12, 8));
  EXPECT_EQ(emit_report(a, ReportFormat::Csv), emit_report(b, ReportFormat::Csv));
  EXPECT_EQ(emit_report(a, ReportFormat::Json), emit_report(b, ReportFormat::Json));
  EXPECT_EQ(emit_replicates_csv(a), emit_replicates_csv(b));
}

TEST(RunPlan, CellBookkeeping) {
  const auto report = run_plan(small_plan(5, 2));
  ASSERT_EQ(report.cells.size(), 2u * 2u * 4u);
  for (const auto& c : report.cells) {
    EXPECT_EQ(c.reps, 5);
    EXPECT_EQ(c.replicates.size(), 5u);
    EXPECT_GE(c.freq_correct, 0.0);
    EXPECT_LE(c.freq_correct, 1.0);
    if (c.estimator == Estimator::TrueRank) EXPECT_EQ(c.freq_correct, 1.0);
  }
}

TEST(RunPlan, RatioFrequencyGrowsWithN) {
  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2)};
  plan.n_grid = {300, 1000};
  plan.estimators = {Estimator::Ratio};
  plan.reps = 200;
  const auto report = run_plan(plan);
  EXPECT_GT(report.cells[1].freq_correct, report.cells[0].freq_correct);
}

TEST(EmitReport, EmptyReportIsHeaderOnly) {
  EXPECT_EQ(emit_report(ExperimentReport{}, ReportFormat::Csv),
            "scenario,p,r,n,estimator,freq,dist_mean,dist_sd,reps,failures,seed\n");
}

TEST(EmitReport, OneCellCsvAndJson) {
  ExperimentReport report;
  report.master_seed = 5;
  CellReport c;
  c.scenario = "example2_p6_r2";
  c.p = 6;
  c.r = 2;
  c.n = 300;
  c.reps = 200;
  c.freq_correct = 0.8351;
  c.dist_mean = 0.12345;
  c.dist_sd = 0.2;
  report.cells.push_back(c);
  const std::string csv = emit_report(report, ReportFormat::Csv);
  EXPECT_EQ(csv,
            "scenario,p,r,n,estimator,freq,dist_mean,dist_sd,reps,failures,seed\n"
            "example2_p6_r2,6,2,300,ratio,0.835,0.123,0.200,200,0,5\n");
  const auto j = nlohmann::json::parse(emit_report(report, ReportFormat::Json));
  const auto& row = j.at("cells").at(0);
  EXPECT_EQ(row.at("scenario"), "example2_p6_r2");
  EXPECT_EQ(row.at("estimator"), "ratio");
  EXPECT_DOUBLE_EQ(row.at("freq").get<double>(), 0.835);
  EXPECT_DOUBLE_EQ(row.at("dist_mean").get<double>(), 0.123);
  EXPECT_EQ(row.at("reps"), 200);
  EXPECT_EQ(row.at("seed"), 5);
}

TEST(PlanJson, PresetWithOverrides) {
  const auto plan = plan_from_json({{"preset", "example2"}, {"reps", 10}, {"n_grid", {300}},
                                    {"master_seed", 3}});
  EXPECT_EQ(plan.reps, 10);
  EXPECT_EQ(plan.n_grid, std::vector<int>{300});
  EXPECT_EQ(plan.master_seed, 3u);
  EXPECT_FALSE(plan.scenarios.empty());
}

TEST(PlanJson, RoundTrip) {
  const auto plan = small_plan(3, 2);
  const auto back = plan_from_json(plan_to_json(plan));
  EXPECT_EQ(plan_to_json(back), plan_to_json(plan));
}

TEST(PlanJson, DiagnosticsCarryPaths) {
  nlohmann::json base = {{"scenarios", {{{"preset", "example2"}, {"p", 6}, {"r", 2}}}},
                         {"n_grid", {300}},
                         {"estimators", {"ratio"}}};
  EXPECT_NO_THROW(plan_from_json(base));

  auto bad = base;
  bad["scenarios"][0]["r"] = 7;
  EXPECT_NE(plan_error_of(bad).find("/scenarios/0"), std::string::npos);

  bad = base;
  bad["estimators"] = {"ratio", "magic"};
  EXPECT_NE(plan_error_of(bad).find("/estimators/1"), std::string::npos);

  bad = base;
  bad["reps"] = 0;
  EXPECT_NE(plan_error_of(bad).find("/reps"), std::string::npos);

  bad = base;
  bad["n_grid"] = {5};
  EXPECT_NE(plan_error_of(bad).find("/n_grid/0"), std::string::npos);

  bad = base;
  bad["estimators"] = {"fractional_ratio"};
  EXPECT_NE(plan_error_of(bad).find("/estimators"), std::string::npos);

  bad = base;
  bad["scenarios"][0]["preset"] = "example9";
  EXPECT_NE(plan_error_of(bad).find("/scenarios/0/preset"), std::string::npos);
}

TEST(Estimators, NamesRoundTrip) {
  for (auto e : {Estimator::Ratio, Estimator::IcOmega1, Estimator::IcOmega2, Estimator::IcOmega3,
                 Estimator::Johansen, Estimator::UnitRoot, Estimator::FractionalRatio,
                 Estimator::TrueRank}) {
    EXPECT_EQ(parse_estimator(to_string(e)), e);
  }
  EXPECT_THROW(parse_estimator("nope"), Error);
}
