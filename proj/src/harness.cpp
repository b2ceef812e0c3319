#include "eigcoint/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "eigcoint/parallel.hpp"
#include "eigcoint/ranksel.hpp"

namespace eigcoint {

namespace {

constexpr double kCellFailureFraction = 0.05;
constexpr std::uint64_t kTraceTableKey = 0x7472616365ULL;    // "trace"
constexpr std::uint64_t kUnitRootTableKey = 0x756e6974ULL;   // "unit"

const std::map<std::string, Estimator>& estimator_names() {
  static const std::map<std::string, Estimator> names = {
      {"ratio", Estimator::Ratio},         {"ic_omega1", Estimator::IcOmega1},
      {"ic_omega2", Estimator::IcOmega2},  {"ic_omega3", Estimator::IcOmega3},
      {"johansen", Estimator::Johansen},   {"unitroot", Estimator::UnitRoot},
      {"fractional_ratio", Estimator::FractionalRatio},
      {"true_rank", Estimator::TrueRank},
  };
  return names;
}

[[noreturn]] void plan_error(const std::string& path, const std::string& msg) {
  throw Error(Errc::InvalidPlan, (path.empty() ? std::string("/") : path) + ": " + msg);
}

template <typename T>
T get_field(const nlohmann::json& j, const std::string& key, const std::string& path) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    plan_error(path + "/" + key, e.what());
  }
}

ScenarioSpec scenario_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) plan_error(path, "scenario must be an object");
  ScenarioSpec spec;
  if (j.contains("preset")) {
    const auto preset = get_field<std::string>(j, "preset", path);
    const int p = get_field<int>(j, "p", path);
    const int r = get_field<int>(j, "r", path);
    try {
      if (preset == "example1") {
        spec = preset_example1(p, r);
      } else if (preset == "example2") {
        spec = preset_example2(p, r);
      } else if (preset == "example3") {
        spec = preset_example3(p, r, get_field<int>(j, "s", path));
      } else if (preset == "fractional") {
        spec = preset_fractional(p, r, get_field<double>(j, "d", path), j.value("delta", 0.0));
      } else {
        plan_error(path + "/preset", "unknown scenario preset '" + preset + "'");
      }
      if (j.contains("name")) spec.name = get_field<std::string>(j, "name", path);
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidPlan) throw;
      plan_error(path, e.what());
    }
  } else {
    try {
      spec = j.get<ScenarioSpec>();
    } catch (const nlohmann::json::exception& e) {
      plan_error(path, e.what());
    } catch (const Error& e) {
      plan_error(path, e.what());
    }
  }
  spec.n = std::max(spec.n, 10);
  try {
    spec.validate();
  } catch (const Error& e) {
    plan_error(path, e.what());
  }
  return spec;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

std::string fixed3(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << v;
  return os.str();
}

void aggregate(CellReport& cell, int true_r) {
  std::vector<double> dists;
  int correct = 0;
  for (const auto& rec : cell.replicates) {
    if (!rec.rank) {
      ++cell.failures;
      continue;
    }
    dists.push_back(rec.distance);
    if (*rec.rank == true_r) ++correct;
  }
  cell.failed = static_cast<double>(cell.failures) > kCellFailureFraction * cell.reps;
  const auto ok = static_cast<double>(dists.size());
  if (dists.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    cell.freq_correct = 0.0;
    cell.dist_mean = cell.dist_sd = cell.dist_q25 = cell.dist_median = cell.dist_q75 = nan;
    return;
  }
  cell.freq_correct = correct / ok;
  double sum = 0.0;
  for (double d : dists) sum += d;
  cell.dist_mean = sum / ok;
  double ss = 0.0;
  for (double d : dists) ss += (d - cell.dist_mean) * (d - cell.dist_mean);
  cell.dist_sd = dists.size() > 1 ? std::sqrt(ss / (ok - 1.0)) : 0.0;
  std::sort(dists.begin(), dists.end());
  cell.dist_q25 = quantile_sorted(dists, 0.25);
  cell.dist_median = quantile_sorted(dists, 0.5);
  cell.dist_q75 = quantile_sorted(dists, 0.75);
}

struct RunContext {
  const ExperimentPlan& plan;
  std::optional<CriticalTable> trace;
  std::optional<CriticalTable> unit_root;
};

// Rank and estimated cointegration basis for one estimator.
std::pair<int, Basis<double>> estimate(Estimator est, const GeneratedPanel& gp,
                                       const CointFit<double>& cf, const ScenarioSpec& spec,
                                       const RunContext& ctx) {
  const Eigen::Index n = gp.y.n();
  auto trailing = [&](int r) { return std::make_pair(r, split(cf, r).second); };
  switch (est) {
    case Estimator::Ratio: return trailing(rank_ratio(cf.eigen, n));
    case Estimator::IcOmega1: return trailing(rank_ic(cf.eigen, PenaltySpec::omega1(), n));
    case Estimator::IcOmega2: return trailing(rank_ic(cf.eigen, PenaltySpec::omega2(), n));
    case Estimator::IcOmega3: return trailing(rank_ic(cf.eigen, PenaltySpec::omega3(), n));
    case Estimator::FractionalRatio: {
      const double d_min = ctx.plan.d_min.value_or(spec.d_min());
      return trailing(rank_ratio_fractional(cf.eigen, n, d_min, ctx.plan.delta).rank);
    }
    case Estimator::UnitRoot:
      return trailing(sequential_unit_root(Panel(cf.x_hat), ctx.plan.level, *ctx.unit_root));
    case Estimator::TrueRank: return trailing(gp.true_r);
    case Estimator::Johansen: {
      const TraceResult tr = johansen_trace(gp.y, *ctx.trace, ctx.plan.level);
      return {tr.selected_r, orthonormalize<double>(tr.beta.leftCols(tr.selected_r))};
    }
  }
  throw Error(Errc::InvalidArgument, "unknown estimator");
}

std::vector<ReplicateRecord> run_replicate(const ScenarioSpec& base, int n, std::size_t cell,
                                           int rep, const RunContext& ctx) {
  const auto& plan = ctx.plan;
  ScenarioSpec spec = base;
  spec.n = n;
  spec.seed = derive_seed(plan.master_seed, {static_cast<std::uint64_t>(cell),
                                             static_cast<std::uint64_t>(rep)});
  std::vector<ReplicateRecord> out(plan.estimators.size());
  for (auto& rec : out) {
    rec.rep = rep;
    rec.seed = spec.seed;
  }
  std::optional<GeneratedPanel> gp;
  std::optional<CointFit<double>> cf;
  std::string setup_error;
  try {
    gp = gen_panel(spec);
    cf = fit(gp->y, plan.j0);
  } catch (const Error& e) {
    setup_error = e.what();
  }
  for (std::size_t k = 0; k < plan.estimators.size(); ++k) {
    auto& rec = out[k];
    if (!gp || !cf) {
      rec.error = setup_error;
      continue;
    }
    try {
      auto [rank, a2] = estimate(plan.estimators[k], *gp, *cf, spec, ctx);
      rec.distance = dist_d1(a2, gp->b2);
      rec.rank = rank;
    } catch (const Error& e) {
      rec.error = e.what();
    }
  }
  return out;
}

}  // namespace

std::string to_string(Estimator e) {
  for (const auto& [name, value] : estimator_names()) {
    if (value == e) return name;
  }
  return "unknown";
}

Estimator parse_estimator(const std::string& name) {
  const auto it = estimator_names().find(name);
  if (it == estimator_names().end()) {
    throw Error(Errc::InvalidArgument, "unknown estimator '" + name + "'");
  }
  return it->second;
}

void ExperimentPlan::validate() const {
  if (scenarios.empty()) plan_error("/scenarios", "at least one scenario is required");
  if (n_grid.empty()) plan_error("/n_grid", "at least one sample size is required");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 10) plan_error("/n_grid/" + std::to_string(i), "sample size must be >= 10");
    if (n_grid[i] <= j0 + 1) plan_error("/n_grid/" + std::to_string(i), "sample size must exceed j0 + 1");
  }
  if (estimators.empty()) plan_error("/estimators", "at least one estimator is required");
  if (reps < 1) plan_error("/reps", "must be >= 1");
  if (parallelism < 1) plan_error("/parallelism", "must be >= 1");
  if (j0 < 0) plan_error("/j0", "must be >= 0");
  if (!(level > 0.0 && level < 0.5)) plan_error("/level", "must lie in (0, 0.5)");
  if (!(delta >= 0.0 && delta < 0.5)) plan_error("/fractional/delta", "must lie in [0, 0.5)");
  if (d_min && !(*d_min > 0.5)) plan_error("/fractional/d_min", "must exceed 0.5");
  if (crit_T < 100) plan_error("/critical/T", "must be >= 100");
  if (crit_reps < 1000) plan_error("/critical/reps", "must be >= 1000");
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const std::string path = "/scenarios/" + std::to_string(i);
    for (std::size_t k = 0; k < estimators.size(); ++k) {
      const Estimator e = estimators[k];
      if (e == Estimator::FractionalRatio && !scenarios[i].fractional()) {
        plan_error("/estimators/" + std::to_string(k),
                   "fractional_ratio requires a fractional scenario (" + path + " is not)");
      }
      if (e == Estimator::Johansen) {
        for (int n : n_grid) {
          if (n <= 2 * scenarios[i].p + 2) plan_error(path, "johansen needs n > 2p + 2");
        }
      }
    }
  }
}

ExperimentPlan preset_plan(const std::string& name) {
  ExperimentPlan plan;
  plan.reps = 200;
  if (name == "example1") {
    for (int p : {8, 12, 20, 28}) plan.scenarios.push_back(preset_example1(p, p / 4));
    for (int p : {5, 10, 15, 20, 25, 30}) plan.scenarios.push_back(preset_example1(p, 3));
    plan.n_grid = {500, 1000, 1500, 2000, 2500};
    plan.estimators = {Estimator::Johansen, Estimator::Ratio, Estimator::IcOmega1, Estimator::IcOmega2};
  } else if (name == "example2") {
    for (auto [p, r] : {std::pair{6, 2}, {6, 4}, {10, 2}, {10, 4}, {20, 6}, {20, 10}, {20, 14}}) {
      plan.scenarios.push_back(preset_example2(p, r));
    }
    plan.n_grid = {300, 500, 1000, 1500, 2000, 2500};
    plan.estimators = {Estimator::Ratio, Estimator::IcOmega1, Estimator::IcOmega2, Estimator::UnitRoot};
  } else if (name == "example3") {
    for (auto [p, r, s] : {std::tuple{6, 2, 2}, {6, 4, 1}, {10, 4, 1}, {10, 6, 2}, {20, 10, 1}, {20, 14, 2}}) {
      plan.scenarios.push_back(preset_example3(p, r, s));
    }
    plan.n_grid = {300, 500, 1000, 1500, 2000, 2500};
    plan.estimators = {Estimator::Ratio, Estimator::IcOmega1, Estimator::IcOmega3, Estimator::UnitRoot};
  } else {
    throw Error(Errc::InvalidPlan, "/preset: unknown preset '" + name + "'");
  }
  return plan;
}

ExperimentPlan plan_from_json(const nlohmann::json& j) {
  if (!j.is_object()) plan_error("", "plan must be a JSON object");
  ExperimentPlan plan;
  if (j.contains("preset")) plan = preset_plan(get_field<std::string>(j, "preset", ""));
  if (j.contains("scenarios")) {
    const auto& arr = j.at("scenarios");
    if (!arr.is_array()) plan_error("/scenarios", "must be an array");
    plan.scenarios.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      plan.scenarios.push_back(scenario_from_json(arr[i], "/scenarios/" + std::to_string(i)));
    }
  }
  if (j.contains("n_grid")) plan.n_grid = get_field<std::vector<int>>(j, "n_grid", "");
  if (j.contains("estimators")) {
    const auto names = get_field<std::vector<std::string>>(j, "estimators", "");
    plan.estimators.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      try {
        plan.estimators.push_back(parse_estimator(names[i]));
      } catch (const Error& e) {
        plan_error("/estimators/" + std::to_string(i), e.what());
      }
    }
  }
  if (j.contains("reps")) plan.reps = get_field<int>(j, "reps", "");
  if (j.contains("parallelism")) plan.parallelism = get_field<int>(j, "parallelism", "");
  if (j.contains("master_seed")) plan.master_seed = get_field<std::uint64_t>(j, "master_seed", "");
  if (j.contains("j0")) plan.j0 = get_field<int>(j, "j0", "");
  if (j.contains("level")) plan.level = get_field<double>(j, "level", "");
  if (j.contains("fractional")) {
    const auto& f = j.at("fractional");
    if (f.contains("d_min")) plan.d_min = get_field<double>(f, "d_min", "/fractional");
    if (f.contains("delta")) plan.delta = get_field<double>(f, "delta", "/fractional");
  }
  if (j.contains("critical")) {
    const auto& c = j.at("critical");
    if (c.contains("T")) plan.crit_T = get_field<int>(c, "T", "/critical");
    if (c.contains("reps")) plan.crit_reps = get_field<int>(c, "reps", "/critical");
    if (c.contains("cache")) plan.crit_cache = get_field<std::string>(c, "cache", "/critical");
  }
  plan.validate();
  return plan;
}

nlohmann::json plan_to_json(const ExperimentPlan& plan) {
  nlohmann::json j;
  j["scenarios"] = plan.scenarios;
  j["n_grid"] = plan.n_grid;
  std::vector<std::string> names;
  for (Estimator e : plan.estimators) names.push_back(to_string(e));
  j["estimators"] = names;
  j["reps"] = plan.reps;
  j["parallelism"] = plan.parallelism;
  j["master_seed"] = plan.master_seed;
  j["j0"] = plan.j0;
  j["level"] = plan.level;
  j["fractional"] = {{"delta", plan.delta}};
  if (plan.d_min) j["fractional"]["d_min"] = *plan.d_min;
  j["critical"] = {{"T", plan.crit_T}, {"reps", plan.crit_reps}};
  if (plan.crit_cache) j["critical"]["cache"] = *plan.crit_cache;
  return j;
}

CriticalTable trace_table_for(int max_dim, const ExperimentPlan& plan) {
  const std::uint64_t seed = derive_seed(plan.master_seed, {kTraceTableKey});
  std::vector<int> dims(static_cast<std::size_t>(max_dim));
  for (int k = 1; k <= max_dim; ++k) dims[static_cast<std::size_t>(k - 1)] = k;

  std::optional<CriticalTable> cached;
  if (plan.crit_cache && std::filesystem::exists(*plan.crit_cache)) {
    std::ifstream in(*plan.crit_cache);
    try {
      cached = nlohmann::json::parse(in).get<CriticalTable>();
    } catch (const std::exception&) {
      cached.reset();
    }
    if (cached && (cached->kind != "trace" || cached->T != plan.crit_T ||
                   cached->reps != plan.crit_reps || cached->seed != seed)) {
      cached.reset();
    }
  }
  std::vector<int> missing;
  for (int d : dims) {
    if (!cached || !cached->has(d, plan.level)) missing.push_back(d);
  }
  if (cached && missing.empty()) return *cached;

  CriticalTable table = build_trace_table(dims, {plan.level}, plan.crit_T, plan.crit_reps, seed,
                                          plan.parallelism);
  if (plan.crit_cache) {
    std::ofstream out(*plan.crit_cache);
    out << nlohmann::json(table).dump(2) << '\n';
  }
  return table;
}

ExperimentReport run_plan(const ExperimentPlan& plan) {
  plan.validate();
  const auto start = std::chrono::steady_clock::now();
  RunContext ctx{plan, std::nullopt, std::nullopt};
  const auto uses = [&](Estimator e) {
    return std::find(plan.estimators.begin(), plan.estimators.end(), e) != plan.estimators.end();
  };
  if (uses(Estimator::Johansen)) {
    int max_p = 1;
    for (const auto& s : plan.scenarios) max_p = std::max(max_p, s.p);
    ctx.trace = trace_table_for(max_p, plan);
  }
  if (uses(Estimator::UnitRoot)) {
    ctx.unit_root = build_unit_root_table({plan.level}, plan.crit_T, plan.crit_reps,
                                          derive_seed(plan.master_seed, {kUnitRootTableKey}));
  }

  const std::size_t n_cells = plan.scenarios.size() * plan.n_grid.size();
  const auto reps = static_cast<std::size_t>(plan.reps);
  std::vector<std::vector<ReplicateRecord>> results(n_cells * reps);
  parallel_for(n_cells * reps, plan.parallelism, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const int rep = static_cast<int>(task % reps);
    const ScenarioSpec& spec = plan.scenarios[cell / plan.n_grid.size()];
    const int n = plan.n_grid[cell % plan.n_grid.size()];
    results[task] = run_replicate(spec, n, cell, rep, ctx);
  });

  ExperimentReport report;
  report.master_seed = plan.master_seed;
  report.j0 = plan.j0;
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    const ScenarioSpec& spec = plan.scenarios[cell / plan.n_grid.size()];
    for (std::size_t k = 0; k < plan.estimators.size(); ++k) {
      CellReport cr;
      cr.scenario = spec.name;
      cr.p = spec.p;
      cr.r = spec.r;
      cr.n = plan.n_grid[cell % plan.n_grid.size()];
      cr.estimator = plan.estimators[k];
      cr.cell_index = cell;
      cr.reps = plan.reps;
      cr.replicates.reserve(reps);
      for (std::size_t rep = 0; rep < reps; ++rep) cr.replicates.push_back(results[cell * reps + rep][k]);
      aggregate(cr, spec.r);
      report.cells.push_back(std::move(cr));
    }
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string emit_report(const ExperimentReport& report, ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::ostringstream os;
    os << "scenario,p,r,n,estimator,freq,dist_mean,dist_sd,reps,failures,seed\n";
    for (const auto& c : report.cells) {
      os << c.scenario << ',' << c.p << ',' << c.r << ',' << c.n << ',' << to_string(c.estimator)
         << ',' << fixed3(c.freq_correct) << ',' << fixed3(c.dist_mean) << ','
         << fixed3(c.dist_sd) << ',' << c.reps << ',' << c.failures << ',' << report.master_seed
         << '\n';
    }
    return os.str();
  }
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(round3(v)) : nlohmann::json(); };
    cells.push_back({{"scenario", c.scenario},
                     {"p", c.p},
                     {"r", c.r},
                     {"n", c.n},
                     {"estimator", to_string(c.estimator)},
                     {"freq", num(c.freq_correct)},
                     {"dist_mean", num(c.dist_mean)},
                     {"dist_sd", num(c.dist_sd)},
                     {"dist_quantiles",
                      {{"q25", num(c.dist_q25)}, {"median", num(c.dist_median)}, {"q75", num(c.dist_q75)}}},
                     {"reps", c.reps},
                     {"failures", c.failures},
                     {"failed", c.failed},
                     {"cell", c.cell_index},
                     {"seed", report.master_seed}});
  }
  nlohmann::json doc = {{"master_seed", report.master_seed}, {"j0", report.j0}, {"cells", cells}};
  return doc.dump(2) + "\n";
}

std::string emit_replicates_csv(const ExperimentReport& report) {
  std::ostringstream os;
  os << "scenario,p,r,n,estimator,rep,seed,rank,distance,error\n";
  os << std::setprecision(17);
  for (const auto& c : report.cells) {
    for (const auto& rec : c.replicates) {
      os << c.scenario << ',' << c.p << ',' << c.r << ',' << c.n << ',' << to_string(c.estimator)
         << ',' << rec.rep << ',' << rec.seed << ',';
      if (rec.rank) {
        os << *rec.rank << ',' << rec.distance << ',';
      } else {
        std::string msg = rec.error;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        os << ",,\"" << msg << '"';
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string format_table(const ExperimentReport& report) {
  std::vector<int> ns;
  for (const auto& c : report.cells) {
    if (std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
  }
  std::ostringstream os;
  os << std::left << std::setw(24) << "(p, r)" << std::setw(12) << "estimator";
  for (int n : ns) os << std::setw(16) << ("n=" + std::to_string(n));
  os << "\n" << std::setw(36) << "" ;
  for (std::size_t i = 0; i < ns.size(); ++i) os << std::setw(16) << "Freq  Dist";
  os << '\n';

  // Rows keyed by (scenario, estimator) in first-seen order.
  std::vector<std::pair<std::string, Estimator>> rows;
  for (const auto& c : report.cells) {
    const auto key = std::make_pair(c.scenario, c.estimator);
    if (std::find(rows.begin(), rows.end(), key) == rows.end()) rows.push_back(key);
  }
  for (const auto& [scenario, est] : rows) {
    os << std::setw(24) << scenario << std::setw(12) << to_string(est);
    for (int n : ns) {
      const auto it = std::find_if(report.cells.begin(), report.cells.end(), [&](const CellReport& c) {
        return c.scenario == scenario && c.estimator == est && c.n == n;
      });
      if (it == report.cells.end()) {
        os << std::setw(16) << "-";
      } else {
        os << std::setw(16) << (fixed3(it->freq_correct) + " " + fixed3(it->dist_mean));
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace eigcoint
