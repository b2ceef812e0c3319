#pragma once

// Comparison procedures: the Johansen trace test with simulated critical
// values, and a sequential unit-root test on the transformed components.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigcoint/covstack.hpp"
#include "eigcoint/rng.hpp"

namespace eigcoint {

/// Simulated critical values. `values[i][k]` belongs to `dims[i]` and
/// `levels[k]`. For kind "trace" the entries are upper (1 - level) quantiles
/// of the trace functional; for kind "unitroot" they are lower `level`
/// quantiles of the normalized autoregression statistic and `dims` is {1}.
struct CriticalTable {
  std::string kind = "trace";
  std::vector<int> dims;
  std::vector<double> levels;
  std::vector<std::vector<double>> values;
  int T = 1000;
  int reps = 6000;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument when (dim, level) is not tabulated.
  double lookup(int dim, double level) const;
  bool has(int dim, double level) const;
};

void to_json(nlohmann::json& j, const CriticalTable& table);
void from_json(const nlohmann::json& j, CriticalTable& table);

struct TraceResult {
  Vector<double> eigenvalues;  // canonical correlations squared, descending
  Vector<double> stats;        // stats(r0) for null rank r0 = 0..p-1
  Matrix<double> beta;         // cointegrating vectors, columns follow eigenvalues
  int selected_r = 0;
  double level = 0.05;
};

/// -T * sum_{i > r0} log(1 - mu_i) for r0 = 0..p-1.
Vector<double> trace_statistics(const Vector<double>& eigenvalues, Eigen::Index T);

/// First r0 whose statistic falls below the critical value for dimension
/// p - r0, else p.
int select_trace_rank(const Vector<double>& stats, const CriticalTable& crit, double level);

/// Johansen trace test for a VAR(1) in error-correction form with an
/// unrestricted intercept:  dy_t = mu + Pi y_{t-1} + e_t,  t = 2..n.
/// Requires n > 2p + 2 and critical values for dimensions 1..p.
TraceResult johansen_trace(const SeriesMatrix<double>& series, const CriticalTable& crit,
                           double level = 0.05);

/// One draw of the trace of
///   [sum e_t (X_{t-1} - Xbar)'] [sum (X_{t-1} - Xbar)(X_{t-1} - Xbar)']^{-1}
///   [sum (X_{t-1} - Xbar) e_t']
/// with X_0 = 0 and X_t the cumulative sum of i.i.d. N(0, I_dim) vectors e_t.
double trace_functional_draw(int dim, int T, RandomStream& rng);

/// Empirical (1 - level) quantile of `reps` draws of the trace functional.
double sim_trace_critical(int dim, double level, int T, int reps, RandomStream& rng);

/// Empirical quantile of sorted draws at probability q (inverse-CDF rule).
double empirical_quantile(std::vector<double> draws, double q);

/// Table over dimensions; dimension k uses the stream derive_seed(seed, {k}),
/// so an entry does not depend on which other dimensions are requested.
CriticalTable build_trace_table(const std::vector<int>& dims, const std::vector<double>& levels,
                                int T, int reps, std::uint64_t seed, int parallelism = 1);

inline constexpr int kDefaultCriticalT = 1000;
inline constexpr int kDefaultCriticalReps = 6000;

/// Bartlett bandwidth floor(4 (n / 100)^{2/9}).
int bartlett_bandwidth(Eigen::Index n);

/// Serial-correlation-corrected normalized autoregression statistic for a
/// unit root with intercept:
///   Z = T (rho - 1) - (lrv - s2) / (2 T^{-2} sum (y_{t-1} - ybar_{-1})^2)
/// where lrv is the Bartlett-kernel long-run variance of the residuals.
/// A negative bandwidth selects the default rule.
double unit_root_statistic(std::span<const double> y, int bandwidth = -1);

/// Lower `level` quantile of the statistic over `reps` Gaussian random walks
/// of length T.
double sim_unit_root_critical(double level, int T, int reps, RandomStream& rng);

CriticalTable build_unit_root_table(const std::vector<double>& levels, int T, int reps,
                                    std::uint64_t seed);

/// Tests x_hat columns p, p-1, ... for a unit root and stops at the first
/// non-rejection. Returns the number of rejections.
int sequential_unit_root(const SeriesMatrix<double>& x_hat, double level, const CriticalTable& crit,
                         int bandwidth = -1);

}  // namespace eigcoint
