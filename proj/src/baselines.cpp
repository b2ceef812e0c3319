#include "eigcoint/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eigcoint/parallel.hpp"

namespace eigcoint {

namespace {

constexpr double kLevelMatchTol = 1e-12;

std::size_t level_index(const CriticalTable& t, double level) {
  for (std::size_t k = 0; k < t.levels.size(); ++k) {
    if (std::abs(t.levels[k] - level) < kLevelMatchTol) return k;
  }
  return t.levels.size();
}

std::size_t dim_index(const CriticalTable& t, int dim) {
  const auto it = std::find(t.dims.begin(), t.dims.end(), dim);
  return static_cast<std::size_t>(it - t.dims.begin());
}

void check_level(double level) {
  if (!(level > 0.0 && level < 0.5)) throw Error(Errc::InvalidArgument, "level must lie in (0, 0.5)");
}

SymMatrix<double> moment_matrix(const Matrix<double>& a, const Matrix<double>& b, double T) {
  return SymMatrix<double>(Matrix<double>(a.transpose() * b / T));
}

}  // namespace

bool CriticalTable::has(int dim, double level) const {
  return dim_index(*this, dim) < dims.size() && level_index(*this, level) < levels.size();
}

double CriticalTable::lookup(int dim, double level) const {
  const std::size_t i = dim_index(*this, dim);
  const std::size_t k = level_index(*this, level);
  if (i >= dims.size() || k >= levels.size()) {
    throw Error(Errc::InvalidArgument, "no " + kind + " critical value for dim " +
                                           std::to_string(dim) + " at level " + std::to_string(level));
  }
  return values[i][k];
}

void to_json(nlohmann::json& j, const CriticalTable& table) {
  j = {{"kind", table.kind},
       {"dims", table.dims},
       {"levels", table.levels},
       {"values", table.values},
       {"meta", {{"T", table.T}, {"reps", table.reps}, {"seed", table.seed}}}};
}

void from_json(const nlohmann::json& j, CriticalTable& table) {
  table.kind = j.value("kind", std::string("trace"));
  table.dims = j.at("dims").get<std::vector<int>>();
  table.levels = j.at("levels").get<std::vector<double>>();
  table.values = j.at("values").get<std::vector<std::vector<double>>>();
  const auto& meta = j.at("meta");
  table.T = meta.at("T").get<int>();
  table.reps = meta.at("reps").get<int>();
  table.seed = meta.at("seed").get<std::uint64_t>();
  if (table.values.size() != table.dims.size()) {
    throw Error(Errc::ParseError, "critical table: values/dims size mismatch");
  }
  for (const auto& row : table.values) {
    if (row.size() != table.levels.size()) {
      throw Error(Errc::ParseError, "critical table: values/levels size mismatch");
    }
  }
}

// Johansen ------------------------------------------------------------------

Vector<double> trace_statistics(const Vector<double>& eigenvalues, Eigen::Index T) {
  const Eigen::Index p = eigenvalues.size();
  Vector<double> stats = Vector<double>::Zero(p);
  double acc = 0.0;
  for (Eigen::Index r0 = p - 1; r0 >= 0; --r0) {
    acc += -static_cast<double>(T) * std::log1p(-eigenvalues(r0));
    stats(r0) = acc;
  }
  return stats;
}

int select_trace_rank(const Vector<double>& stats, const CriticalTable& crit, double level) {
  const auto p = static_cast<int>(stats.size());
  for (int r0 = 0; r0 < p; ++r0) {
    if (stats(r0) < crit.lookup(p - r0, level)) return r0;
  }
  return p;
}

TraceResult johansen_trace(const SeriesMatrix<double>& series, const CriticalTable& crit,
                           double level) {
  check_level(level);
  const Eigen::Index n = series.n();
  const Eigen::Index p = series.p();
  if (n <= 2 * p + 2) throw Error(Errc::InvalidArgument, "Johansen test needs n > 2p + 2");
  const Matrix<double>& y = series.data();
  const Eigen::Index T = n - 1;
  Matrix<double> r0 = y.bottomRows(T) - y.topRows(T);
  Matrix<double> r1 = y.topRows(T);
  r0.rowwise() -= r0.colwise().mean();
  r1.rowwise() -= r1.colwise().mean();
  const double td = static_cast<double>(T);

  const SymMatrix<double> s00 = moment_matrix(r0, r0, td);
  const SymMatrix<double> s11 = moment_matrix(r1, r1, td);
  const Matrix<double> s01 = r0.transpose() * r1 / td;

  Matrix<double> s00_inv_s01;
  try {
    s00_inv_s01 = solve_spd(s00, s01);
    solve_spd(s11, Matrix<double>::Identity(p, p));
  } catch (const Error& e) {
    throw Error(Errc::SingularMoments, "product-moment matrix is singular", e.condition());
  }
  // Whitened form of  S11^{-1} S10 S00^{-1} S01 v = mu v.
  Eigen::LLT<Matrix<double>> llt(s11.matrix());
  const Matrix<double> m = s01.transpose() * s00_inv_s01;
  Matrix<double> c = llt.matrixL().solve(m);
  c = llt.matrixL().solve(Matrix<double>(c.transpose()));
  const EigenSystem<double> es = eigh_desc(SymMatrix<double>(c));

  TraceResult out;
  out.level = level;
  out.eigenvalues = es.values.cwiseMax(0.0).cwiseMin(1.0 - std::numeric_limits<double>::epsilon());
  out.beta = llt.matrixU().solve(es.vectors);
  out.stats = trace_statistics(out.eigenvalues, T);
  out.selected_r = select_trace_rank(out.stats, crit, level);
  return out;
}

// Critical values -----------------------------------------------------------

double trace_functional_draw(int dim, int T, RandomStream& rng) {
  Matrix<double> e(T, dim);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < dim; ++k) e(t, k) = rng.normal();
  Matrix<double> x_lag(T, dim);
  x_lag.row(0).setZero();
  for (int t = 1; t < T; ++t) x_lag.row(t) = x_lag.row(t - 1) + e.row(t - 1);
  x_lag.rowwise() -= x_lag.colwise().mean();
  const Matrix<double> cross = e.transpose() * x_lag;           // sum e_t (X_{t-1} - Xbar)'
  const Matrix<double> gram = x_lag.transpose() * x_lag;        // sum (X - Xbar)(X - Xbar)'
  Eigen::LLT<Matrix<double>> llt(gram);
  const Matrix<double> half = llt.matrixL().solve(Matrix<double>(cross.transpose()));
  return half.squaredNorm();
}

double empirical_quantile(std::vector<double> draws, double q) {
  if (draws.empty()) throw Error(Errc::InvalidArgument, "no draws");
  std::sort(draws.begin(), draws.end());
  const auto count = static_cast<double>(draws.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * count));
  idx = std::clamp<std::size_t>(idx, 1, draws.size());
  return draws[idx - 1];
}

double sim_trace_critical(int dim, double level, int T, int reps, RandomStream& rng) {
  check_level(level);
  if (dim < 1 || T < 100 || reps < 1000) {
    throw Error(Errc::InvalidArgument, "need dim >= 1, T >= 100, reps >= 1000");
  }
  std::vector<double> draws(static_cast<std::size_t>(reps));
  for (auto& d : draws) d = trace_functional_draw(dim, T, rng);
  return empirical_quantile(std::move(draws), 1.0 - level);
}

CriticalTable build_trace_table(const std::vector<int>& dims, const std::vector<double>& levels,
                                int T, int reps, std::uint64_t seed, int parallelism) {
  for (double lv : levels) check_level(lv);
  if (T < 100 || reps < 1000) throw Error(Errc::InvalidArgument, "need T >= 100, reps >= 1000");
  CriticalTable table;
  table.kind = "trace";
  table.dims = dims;
  table.levels = levels;
  table.T = T;
  table.reps = reps;
  table.seed = seed;
  table.values.assign(dims.size(), std::vector<double>(levels.size(), 0.0));
  parallel_for(dims.size(), parallelism, [&](std::size_t i) {
    if (dims[i] < 1) throw Error(Errc::InvalidArgument, "dimension must be >= 1");
    RandomStream rng(derive_seed(seed, {static_cast<std::uint64_t>(dims[i])}));
    std::vector<double> draws(static_cast<std::size_t>(reps));
    for (auto& d : draws) d = trace_functional_draw(dims[i], T, rng);
    std::sort(draws.begin(), draws.end());
    for (std::size_t k = 0; k < levels.size(); ++k) {
      table.values[i][k] = empirical_quantile(draws, 1.0 - levels[k]);
    }
  });
  return table;
}

// Unit root -----------------------------------------------------------------

int bartlett_bandwidth(Eigen::Index n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

double unit_root_statistic(std::span<const double> y, int bandwidth) {
  const std::size_t n = y.size();
  if (n < 4) throw Error(Errc::InvalidArgument, "unit-root test needs at least 4 observations");
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  if (!(*hi > *lo)) throw Error(Errc::DegenerateComponent, "component is constant");
  const std::size_t T = n - 1;
  const double td = static_cast<double>(T);
  double m_lag = 0.0;
  double m_cur = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    m_lag += y[t];
    m_cur += y[t + 1];
  }
  m_lag /= td;
  m_cur /= td;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double a = y[t] - m_lag;
    sxx += a * a;
    sxy += a * (y[t + 1] - m_cur);
  }
  if (!(sxx > 0.0)) throw Error(Errc::DegenerateComponent, "lagged component has no variation");
  const double rho = sxy / sxx;
  std::vector<double> u(T);
  for (std::size_t t = 0; t < T; ++t) u[t] = (y[t + 1] - m_cur) - rho * (y[t] - m_lag);

  const int l = bandwidth < 0 ? bartlett_bandwidth(static_cast<Eigen::Index>(n)) : bandwidth;
  auto autocov = [&](std::size_t j) {
    double acc = 0.0;
    for (std::size_t t = j; t < T; ++t) acc += u[t] * u[t - j];
    return acc / td;
  };
  const double s2 = autocov(0);
  double lrv = s2;
  for (int j = 1; j <= l && static_cast<std::size_t>(j) < T; ++j) {
    lrv += 2.0 * (1.0 - static_cast<double>(j) / (l + 1.0)) * autocov(static_cast<std::size_t>(j));
  }
  return td * (rho - 1.0) - 0.5 * (lrv - s2) / (sxx / (td * td));
}

double sim_unit_root_critical(double level, int T, int reps, RandomStream& rng) {
  check_level(level);
  if (T < 100 || reps < 1000) throw Error(Errc::InvalidArgument, "need T >= 100, reps >= 1000");
  std::vector<double> draws(static_cast<std::size_t>(reps));
  std::vector<double> walk(static_cast<std::size_t>(T));
  for (auto& d : draws) {
    double acc = 0.0;
    for (auto& w : walk) w = (acc += rng.normal());
    d = unit_root_statistic(walk);
  }
  return empirical_quantile(std::move(draws), level);
}

CriticalTable build_unit_root_table(const std::vector<double>& levels, int T, int reps,
                                    std::uint64_t seed) {
  CriticalTable table;
  table.kind = "unitroot";
  table.dims = {1};
  table.levels = levels;
  table.T = T;
  table.reps = reps;
  table.seed = seed;
  table.values.assign(1, std::vector<double>(levels.size(), 0.0));
  for (std::size_t k = 0; k < levels.size(); ++k) {
    RandomStream rng(derive_seed(seed, {1}));
    table.values[0][k] = sim_unit_root_critical(levels[k], T, reps, rng);
  }
  return table;
}

int sequential_unit_root(const SeriesMatrix<double>& x_hat, double level, const CriticalTable& crit,
                         int bandwidth) {
  check_level(level);
  const double cv = crit.lookup(1, level);
  const Eigen::Index p = x_hat.p();
  int rejections = 0;
  std::vector<double> col(static_cast<std::size_t>(x_hat.n()));
  for (Eigen::Index k = p - 1; k >= 0; --k) {
    Eigen::Map<Vector<double>>(col.data(), x_hat.n()) = x_hat.data().col(k);
    if (unit_root_statistic(col, bandwidth) < cv) {
      ++rejections;
    } else {
      break;
    }
  }
  return rejections;
}

}  // namespace eigcoint
