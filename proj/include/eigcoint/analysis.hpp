#pragma once

// End-to-end analysis of a user panel: eigenanalysis of W, the requested
// rank rules and the estimated cointegration space.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "eigcoint/baselines.hpp"
#include "eigcoint/ranksel.hpp"

namespace eigcoint {

struct AnalyzeConfig {
  int j0 = kDefaultMaxLag;
  std::vector<std::string> methods = {"ratio", "ic", "unitroot"};  // + johansen, fractional
  std::vector<PenaltySpec> penalties = {PenaltySpec::omega1(), PenaltySpec::omega2()};
  double level = 0.05;
  std::uint64_t seed = 1;  // critical-value simulations
  int crit_T = kDefaultCriticalT;
  int crit_reps = kDefaultCriticalReps;
  double d_min = 1.0;
  double delta = 0.0;

  void validate() const;
};

struct AnalysisResult {
  CointFit<double> fit;
  std::optional<int> ratio_rank;
  std::vector<std::pair<std::string, int>> ic_ranks;
  std::optional<int> unitroot_rank;
  std::optional<TraceResult> johansen;
  std::optional<int> fractional_rank;
  int a2_rank = 0;  // width of the reported estimate of the cointegration space
  Matrix<double> a2;
  std::vector<std::string> diagnostics;
};

/// Runs the configured methods. The reported A2 uses the first available of
/// ratio, IC (first penalty), unit-root, fractional or Johansen ranks.
AnalysisResult analyze(const SeriesMatrix<double>& panel, const AnalyzeConfig& config);

nlohmann::json analysis_to_json(const AnalysisResult& result, const SeriesMatrix<double>& panel);

}  // namespace eigcoint
