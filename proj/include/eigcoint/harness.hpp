#pragma once

// Monte Carlo runner for rank-estimation experiments.
//
// Replicate k of cell c draws its panel from the seed
//   derive_seed(master_seed, {c, k})
// (SplitMix64 folding, see rng.hpp), so every number in a report can be
// reproduced from (master_seed, cell, replicate) alone, whatever the worker
// count.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigcoint/baselines.hpp"
#include "eigcoint/simgen.hpp"

namespace eigcoint {

enum class Estimator {
  Ratio,
  IcOmega1,
  IcOmega2,
  IcOmega3,
  Johansen,
  UnitRoot,
  FractionalRatio,
  TrueRank,  // distance with the true r supplied; freq is trivially 1
};

std::string to_string(Estimator e);
Estimator parse_estimator(const std::string& name);

struct ExperimentPlan {
  std::vector<ScenarioSpec> scenarios;  // n and seed are overridden per cell/replicate
  std::vector<int> n_grid;
  std::vector<Estimator> estimators;
  int reps = 200;
  int parallelism = 1;
  std::uint64_t master_seed = 20240101;
  int j0 = kDefaultMaxLag;
  double level = 0.05;
  // Fractional ratio inputs; d_min defaults to the scenario's smallest order.
  std::optional<double> d_min;
  double delta = 0.0;
  int crit_T = kDefaultCriticalT;
  int crit_reps = kDefaultCriticalReps;
  std::optional<std::string> crit_cache;  // JSON file read/updated for trace critical values

  void validate() const;
};

/// Parses a plan document. Errors carry a JSON-pointer style path, e.g.
/// "/scenarios/1/r: ...". A top-level "preset" expands to the built-in grid
/// before explicit fields override it.
ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);

/// Built-in grids: "example1", "example2", "example3".
ExperimentPlan preset_plan(const std::string& name);

struct ReplicateRecord {
  int rep = 0;
  std::uint64_t seed = 0;
  std::optional<int> rank;  // empty when this estimator failed on the replicate
  double distance = 0.0;
  std::string error;
};

struct CellReport {
  std::string scenario;
  int p = 0;
  int r = 0;
  int n = 0;
  Estimator estimator = Estimator::Ratio;
  std::size_t cell_index = 0;
  int reps = 0;
  int failures = 0;
  bool failed = false;  // more than 5% of replicates failed
  double freq_correct = 0.0;
  double dist_mean = 0.0;
  double dist_sd = 0.0;
  double dist_q25 = 0.0;
  double dist_median = 0.0;
  double dist_q75 = 0.0;
  std::vector<ReplicateRecord> replicates;
};

struct ExperimentReport {
  std::uint64_t master_seed = 0;
  int j0 = kDefaultMaxLag;
  std::vector<CellReport> cells;
  double runtime_seconds = 0.0;  // wall clock; not serialized
};

/// Runs every (scenario, n) cell. Per-replicate failures are recorded and
/// excluded from the statistics of the affected estimator.
ExperimentReport run_plan(const ExperimentPlan& plan);

/// Trace critical values for dimensions 1..max_dim, read from and written
/// back to `cache` when given.
CriticalTable trace_table_for(int max_dim, const ExperimentPlan& plan);

enum class ReportFormat { Csv, Json };

/// One row per (scenario, n, estimator):
///   scenario,p,r,n,estimator,freq,dist_mean,dist_sd,reps,failures,seed
/// with frequencies and distances at three decimals.
std::string emit_report(const ExperimentReport& report, ReportFormat format);

/// Per-replicate rows for external plotting:
///   scenario,p,r,n,estimator,rep,seed,rank,distance,error
std::string emit_replicates_csv(const ExperimentReport& report);

/// Human-readable table: one row per (scenario, estimator), one column per n.
std::string format_table(const ExperimentReport& report);

}  // namespace eigcoint
