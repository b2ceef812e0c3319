// Acceptance checks AC1..AC9. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "eigcoint/baselines.hpp"
#include "eigcoint/covstack.hpp"
#include "eigcoint/harness.hpp"
#include "eigcoint/linalg.hpp"
#include "eigcoint/ranksel.hpp"
#include "eigcoint/rng.hpp"
#include "eigcoint/simgen.hpp"
#include "eigcoint/subspace.hpp"

using namespace eigcoint;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::string failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures += " [failed: " + what + "]";
    }
  }
};

Matrix<double> normal_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  RandomStream rng(seed);
  Matrix<double> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

Matrix<double> orthogonal(Eigen::Index p, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix<double>> qr(normal_matrix(p, p, seed));
  return qr.householderQ();
}

EigenSystem<double> spectrum(std::initializer_list<double> values) {
  EigenSystem<double> es;
  es.values.resize(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) es.values(i++) = v;
  es.vectors = Matrix<double>::Identity(es.values.size(), es.values.size());
  return es;
}

const CellReport& cell(const ExperimentReport& report, const std::string& scenario, int n, Estimator e) {
  for (const auto& c : report.cells) {
    if (c.scenario == scenario && c.n == n && c.estimator == e) return c;
  }
  throw std::runtime_error("missing cell " + scenario);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

// AC1
Outcome formula_exactness() {
  Outcome o;
  o.require(rank_ratio(spectrum({1e6, 2, 1}), 100) == 2, "ratio (1e6,2,1)");
  o.require(rank_ratio(spectrum({5e5, 4e5, 1}), 100) == 1, "ratio (5e5,4e5,1)");
  o.require(rank_ratio(spectrum({2, 2, 2, 2}), 1) == 4, "ratio equal values");
  o.require(rank_ic(spectrum({1e6, 2, 1}), 10.0) == 2, "ic omega 10");
  o.require(rank_ic(spectrum({1e6, 2, 1}), 0.5) == 1, "ic omega 0.5");
  o.require(rank_ic(spectrum({3}), 5.0) == 1, "ic p = 1");

  double worst = 0.0;
  for (double theta : {0.0, 0.3, M_PI / 3, 1.2, M_PI / 2}) {
    Basis<double> a = Basis<double>::Zero(3, 1);
    a(0, 0) = 1.0;
    Basis<double> b(3, 1);
    b << std::cos(theta), std::sin(theta), 0.0;
    worst = std::max(worst, std::abs(dist_d(a, b) - std::abs(std::sin(theta))));
    worst = std::max(worst, std::abs(dist_d1(a, Basis<double>(b * 2.5)) - std::abs(std::sin(theta))));
  }
  const Basis<double> e12 = Basis<double>::Identity(3, 2);
  Basis<double> e1 = Basis<double>::Zero(3, 1);
  e1(0, 0) = 1.0;
  worst = std::max(worst, std::abs(dist_d1(e12, e1) - std::sqrt(0.5)));
  o.require(worst <= 1e-10, "sin-theta distances");
  o.detail << "ratio/IC examples exact; max distance error " << worst;
  return o;
}

// AC2
Outcome oracle_equivalence() {
  Outcome o;
  double worst_w = 0.0;
  for (int seed = 0; seed < 50; ++seed) {
    const Eigen::Index p = 1 + seed % 6;
    const Eigen::Index n = 8 + (seed * 11) % 43;
    const int j0 = seed % 6;
    const Matrix<double> y = normal_matrix(n, p, 7000 + seed) * 3.0;
    std::vector<double> mean(p, 0.0);
    for (Eigen::Index c = 0; c < p; ++c) {
      for (Eigen::Index t = 0; t < n; ++t) mean[c] += y(t, c);
      mean[c] /= static_cast<double>(n);
    }
    Matrix<double> w = Matrix<double>::Zero(p, p);
    for (int j = 0; j <= j0; ++j) {
      Matrix<double> s = Matrix<double>::Zero(p, p);
      for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
          for (Eigen::Index t = 0; t + j < n; ++t) s(a, b) += (y(t + j, a) - mean[a]) * (y(t, b) - mean[b]);
          s(a, b) /= static_cast<double>(n);
        }
      }
      for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = 0; b < p; ++b) {
          for (Eigen::Index k = 0; k < p; ++k) w(a, b) += s(a, k) * s(b, k);
        }
      }
    }
    const auto st = build_stack(SeriesMatrix<double>(y), j0);
    worst_w = std::max(worst_w, max_abs(Matrix<double>(st.w.matrix() - w)));
  }
  o.require(worst_w <= 1e-12, "build_stack oracle");

  double worst_f = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const int n = 40 + 5 * seed;
    const double d = -0.45 + 0.12 * seed + 0.013;
    RandomStream a(8000 + seed);
    RandomStream b(8000 + seed);
    const auto x = gen_arfima(n, d, {}, {}, a);
    std::vector<double> e(static_cast<std::size_t>(n));
    for (auto& v : e) v = b.normal();
    for (int t = 0; t < n; ++t) {
      double acc = 0.0;
      for (int j = 0; j <= t; ++j) acc += std::tgamma(j + d) / (std::tgamma(d) * std::tgamma(j + 1.0)) * e[t - j];
      worst_f = std::max(worst_f, std::abs(acc - x[t]) / std::max(1.0, std::abs(acc)));
    }
  }
  o.require(worst_f <= 1e-12, "gen_arfima oracle");
  o.detail << "W max-abs error " << worst_w << " over 50 panels; ARFIMA max error " << worst_f
           << " over 20 series";
  return o;
}

// AC3
Outcome eigen_quality() {
  Outcome o;
  double recon = 0.0;
  double ortho = 0.0;
  double trace = 0.0;
  for (int seed = 0; seed < 100; ++seed) {
    const Eigen::Index p = 1 + (seed * 7) % 30;
    const Matrix<double> g = normal_matrix(p, p, 9000 + seed);
    const Matrix<double> m = (g + g.transpose()) * std::pow(10.0, seed % 5 - 2);
    const auto es = eigh_desc(SymMatrix<double>(m));
    const double scale = 1 + max_abs(m);
    const Matrix<double> rebuilt = es.vectors * es.values.asDiagonal() * es.vectors.transpose();
    recon = std::max(recon, max_abs(Matrix<double>(rebuilt - SymMatrix<double>(m).matrix())) / scale);
    ortho = std::max(ortho, max_abs(Matrix<double>(es.vectors.transpose() * es.vectors -
                                                   Matrix<double>::Identity(p, p))));
    trace = std::max(trace, std::abs(es.values.sum() - m.trace()) / (1 + std::abs(m.trace())));
  }
  o.require(recon <= 1e-9, "reconstruction");
  o.require(ortho <= 1e-10, "orthonormality");
  o.require(trace <= 1e-9, "trace");
  o.detail << "relative reconstruction " << recon << ", orthonormality " << ortho << ", trace " << trace;
  return o;
}

// AC4
Outcome example2_table() {
  Outcome o;
  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2), preset_example2(6, 4)};
  plan.n_grid = {300, 1000};
  plan.estimators = {Estimator::Ratio, Estimator::IcOmega2};
  plan.reps = 200;
  const auto report = run_plan(plan);
  const double r300 = cell(report, "example2_p6_r2", 300, Estimator::Ratio).freq_correct;
  const double r1000 = cell(report, "example2_p6_r2", 1000, Estimator::Ratio).freq_correct;
  const double ic2 = cell(report, "example2_p6_r2", 1000, Estimator::IcOmega2).freq_correct;
  const double ic4 = cell(report, "example2_p6_r4", 1000, Estimator::IcOmega2).freq_correct;
  o.require(std::abs(r300 - 0.835) <= 0.08, "ratio n=300");
  o.require(std::abs(r1000 - 0.979) <= 0.05, "ratio n=1000");
  o.require(std::abs(ic2 - 0.998) <= 0.05, "IC omega2 (6,2) n=1000");
  o.require(std::abs(ic4 - 0.986) <= 0.05, "IC omega2 (6,4) n=1000");
  o.detail << "ratio (6,2): n=300 " << fmt(r300) << " (0.835 +/- 0.08), n=1000 " << fmt(r1000)
           << " (0.979 +/- 0.05); IC(omega2) n=1000: (6,2) " << fmt(ic2) << " (0.998 +/- 0.05), (6,4) "
           << fmt(ic4) << " (0.986 +/- 0.05)";
  return o;
}

// AC5
Outcome example3_table() {
  Outcome o;
  ExperimentPlan plan;
  plan.scenarios = {preset_example3(6, 2, 2)};
  plan.n_grid = {300, 1000};
  plan.estimators = {Estimator::Ratio};
  plan.reps = 200;
  const auto report = run_plan(plan);
  const double f300 = cell(report, "example3_p6_r2_s2", 300, Estimator::Ratio).freq_correct;
  const double f1000 = cell(report, "example3_p6_r2_s2", 1000, Estimator::Ratio).freq_correct;
  o.require(std::abs(f300 - 0.711) <= 0.10, "ratio n=300");
  o.require(std::abs(f1000 - 0.873) <= 0.08, "ratio n=1000");
  o.detail << "ratio (6,2,2): n=300 " << fmt(f300) << " (0.711 +/- 0.10), n=1000 " << fmt(f1000)
           << " (0.873 +/- 0.08)";
  return o;
}

// AC6
Outcome distance_trend() {
  Outcome o;
  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2)};
  plan.n_grid = {500, 1000, 2500};
  plan.estimators = {Estimator::TrueRank};
  plan.reps = 100;
  const auto report = run_plan(plan);
  std::vector<double> med;
  for (int n : plan.n_grid) med.push_back(cell(report, "example2_p6_r2", n, Estimator::TrueRank).dist_median);
  o.require(med[0] > med[1] && med[1] > med[2], "strict decrease");
  o.detail << "median D1 with true r: " << med[0] << " > " << med[1] << " > " << med[2];
  return o;
}

// AC7
Outcome baseline_sanity() {
  Outcome o;
  const CriticalTable trace = build_trace_table({1}, {0.05}, 1000, 6000, 71);
  int rejections = 0;
  for (int rep = 0; rep < 500; ++rep) {
    RandomStream rng(derive_seed(72, {static_cast<std::uint64_t>(rep)}));
    Matrix<double> y(500, 1);
    double level = 0.0;
    for (int t = 0; t < 500; ++t) y(t, 0) = level += rng.normal();
    rejections += johansen_trace(SeriesMatrix<double>(y), trace).selected_r > 0;
  }
  const double size = rejections / 500.0;
  o.require(std::abs(size - 0.05) <= 0.03, "Johansen size");

  const CriticalTable ur = build_unit_root_table({0.05}, 1000, 6000, 73);
  int full = 0;
  int none = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const Matrix<double> iid = normal_matrix(1000, 3, derive_seed(74, {static_cast<std::uint64_t>(rep)}));
    full += sequential_unit_root(SeriesMatrix<double>(iid), 0.05, ur) == 3;
    Matrix<double> walk = normal_matrix(1000, 3, derive_seed(75, {static_cast<std::uint64_t>(rep)}));
    for (Eigen::Index t = 1; t < 1000; ++t) walk.row(t) += walk.row(t - 1);
    none += sequential_unit_root(SeriesMatrix<double>(walk), 0.05, ur) == 0;
  }
  const double power = full / 200.0;
  const double keep = none / 200.0;
  o.require(power >= 0.7, "unit-root power");
  o.require(std::abs(keep - std::pow(0.95, 3)) <= 0.1, "unit-root size");

  ExperimentPlan plan;
  plan.scenarios = {preset_example1(8, 2)};
  plan.n_grid = {500};
  plan.estimators = {Estimator::Ratio, Estimator::Johansen};
  plan.reps = 200;
  const auto report = run_plan(plan);
  const double ratio = cell(report, "example1_p8_r2", 500, Estimator::Ratio).freq_correct;
  const double joh = cell(report, "example1_p8_r2", 500, Estimator::Johansen).freq_correct;
  o.require(ratio >= joh + 0.10, "eigenanalysis vs Johansen ordering");
  o.detail << "Johansen size " << fmt(size) << " (0.05 +/- 0.03); unit-root all-reject " << fmt(power)
           << " (>= 0.7), all-retain " << fmt(keep) << " (0.857 +/- 0.1); p=8 n=500 ratio " << fmt(ratio)
           << " vs Johansen " << fmt(joh) << " (margin >= 0.10)";
  return o;
}

// AC8
Outcome invariance_suite() {
  Outcome o;
  int rank_checks = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto gp = gen_panel(preset_example2(6, 2, 500, seed));
    const auto base = fit(gp.y, 5);
    for (double s : {0.1, 10.0}) {
      const auto scaled = fit(SeriesMatrix<double>(Matrix<double>(gp.y.data() * s)), 5);
      o.require(rank_ratio(scaled.eigen, 500) == rank_ratio(base.eigen, 500), "ratio scaling");
      for (const auto& pen : {PenaltySpec::omega1(), PenaltySpec::omega2(), PenaltySpec::omega3()}) {
        o.require(rank_ic(scaled.eigen, pen, 500) == rank_ic(base.eigen, pen, 500), "IC scaling");
      }
      o.require(rank_ratio_fractional(scaled.eigen, 500, 1.5, 0.2).rank ==
                    rank_ratio_fractional(base.eigen, 500, 1.5, 0.2).rank,
                "fractional scaling");
      rank_checks += 5;
    }
  }

  double rot = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    const Basis<double> a = orthogonal(7, 100 + seed).leftCols(3);
    const Basis<double> b = orthogonal(7, 200 + seed).leftCols(3);
    const Basis<double> b1 = normal_matrix(7, 2, 300 + seed);
    const Matrix<double> q = orthogonal(3, 400 + seed);
    const Matrix<double> q2 = orthogonal(2, 500 + seed);
    rot = std::max(rot, std::abs(dist_d(Basis<double>(a * q), b) - dist_d(a, b)));
    rot = std::max(rot, std::abs(dist_d(a, Basis<double>(b * q)) - dist_d(a, b)));
    rot = std::max(rot, std::abs(dist_d1(Basis<double>(a * q), b1) - dist_d1(a, b1)));
    rot = std::max(rot, std::abs(dist_d1(a, Basis<double>(b1 * q2)) - dist_d1(a, b1)));
  }
  o.require(rot <= 1e-10, "rotation invariance");

  ExperimentPlan plan;
  plan.scenarios = {preset_example2(6, 2), preset_example3(6, 2, 2)};
  plan.n_grid = {300};
  plan.estimators = {Estimator::Ratio, Estimator::IcOmega1, Estimator::UnitRoot};
  plan.reps = 40;
  plan.parallelism = 1;
  const auto a = run_plan(plan);
  plan.parallelism = 8;
  const auto b = run_plan(plan);
  const bool same = emit_report(a, ReportFormat::Json) == emit_report(b, ReportFormat::Json) &&
                    emit_replicates_csv(a) == emit_replicates_csv(b);
  o.require(same, "worker-count invariance");
  o.detail << rank_checks << " scaled rank comparisons equal; rotation deviation " << rot
           << "; reports for 1 and 8 workers " << (same ? "identical" : "differ");
  return o;
}

// AC9
Outcome fractional() {
  Outcome o;
  o.require(frac_coeffs(1.0, 3) == std::vector<double>{1, 1, 1, 1}, "alpha = 1");
  for (double a : {-0.3, 0.4, 1.7}) {
    const auto c = frac_coeffs(a, 2);
    o.require(c[0] == 1.0 && c[1] == a && std::abs(c[2] - a * (a + 1) / 2) <= 1e-15, "closed form");
  }
  o.require(std::abs(frac_coeffs(0.4, 2)[2] - 0.28) <= 1e-15, "a2(0.4)");
  double partial = 0.0;
  const auto ones = frac_coeffs(1.0, 100);
  for (int j = 0; j <= 100; ++j) {
    partial += ones[j];
    o.require(partial == j + 1.0, "partial sums");
  }
  o.require(frac_coeffs(0.0, 3) == std::vector<double>{1, 0, 0, 0}, "alpha = 0");
  o.require(rank_ratio_fractional(spectrum({1e6, 2, 1}), 100, 1.0, 0.0).rank == 1, "r* d_min 1");
  o.require(rank_ratio_fractional(spectrum({1e6, 2, 1}), 100, 1.5, 0.4).rank == 2, "r* d_min 1.5");
  const std::vector<double> ar = {0.4};
  const std::vector<double> ma = {0.3};
  for (int d : {0, 1}) {
    RandomStream a(600 + d);
    RandomStream b(600 + d);
    o.require(gen_arfima(400, d, ar, ma, a) == gen_arima(400, ar, d, ma, b), "ARFIMA integer order");
  }
  RandomStream a(602);
  RandomStream b(602);
  o.require(gen_arfima(400, 0.0, ar, ma, a) == gen_arma(400, ar, ma, b), "ARFIMA d = 0 core");
  o.detail << "coefficient identities, fractional ratio examples and integer-order degeneration exact";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "formula exactness", formula_exactness},
      {"AC2", "oracle equivalence", oracle_equivalence},
      {"AC3", "eigen quality", eigen_quality},
      {"AC4", "Example 2 table replication", example2_table},
      {"AC5", "Example 3 mixed orders", example3_table},
      {"AC6", "distance trend", distance_trend},
      {"AC7", "baseline sanity", baseline_sanity},
      {"AC8", "scale/rotation/worker invariance", invariance_suite},
      {"AC9", "fractional", fractional},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%s %s  %s: %s (%.1f s)\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                (o.detail.str() + o.failures).c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
