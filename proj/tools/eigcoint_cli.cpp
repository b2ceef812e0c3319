// eigcoint command-line interface: analyze | simulate | crit | version.
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eigcoint/analysis.hpp"
#include "eigcoint/csv_io.hpp"
#include "eigcoint/harness.hpp"
#include "eigcoint/version.hpp"

namespace fs = std::filesystem;
using namespace eigcoint;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case Errc::ParseError:
    case Errc::InvalidArgument:
    case Errc::InvalidPlan:
    case Errc::InvalidSeries:
    case Errc::LagTooLarge:
    case Errc::DimensionMismatch:
    case Errc::InvalidRank:
    case Errc::InvalidOrder:
      return kExitUsage;
    default:
      return kExitNumeric;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "3" -> {3}; "1..3" -> {1,2,3}; "1,4" -> {1,4}
std::vector<int> parse_dims(const std::string& s) {
  std::vector<int> out;
  for (const auto& part : split_list(s)) {
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      out.push_back(std::stoi(part));
    } else {
      const int lo = std::stoi(part.substr(0, dots));
      const int hi = std::stoi(part.substr(dots + 2));
      for (int d = lo; d <= hi; ++d) out.push_back(d);
    }
  }
  return out;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::InvalidArgument, "cannot write '" + path.string() + "'");
  out << content;
}

fs::path sibling(const fs::path& base, const std::string& suffix) {
  fs::path stem = base;
  stem.replace_extension();
  return fs::path(stem.string() + suffix);
}

struct AnalyzeArgs {
  std::string input;
  int j0 = kDefaultMaxLag;
  std::string methods = "ratio,ic,unitroot";
  std::string penalty = "omega1,omega2";
  double level = 0.05;
  int reps = kDefaultCriticalReps;
  std::uint64_t seed = 1;
  std::string out = "analysis.json";
  std::string format = "json";
  double d_min = 1.0;
  double delta = 0.0;
};

int run_analyze(const AnalyzeArgs& a) {
  AnalyzeConfig cfg;
  cfg.j0 = a.j0;
  cfg.methods = split_list(a.methods);
  cfg.penalties.clear();
  for (const auto& p : split_list(a.penalty)) cfg.penalties.push_back(PenaltySpec::parse(p));
  cfg.level = a.level;
  cfg.crit_reps = a.reps;
  cfg.seed = a.seed;
  cfg.d_min = a.d_min;
  cfg.delta = a.delta;

  const CsvPanel csv = read_panel_csv(a.input);
  if (csv.panel.n() <= a.j0 + 1) {
    throw Error(Errc::InvalidArgument, "sample size " + std::to_string(csv.panel.n()) +
                                           " must exceed j0 + 1 = " + std::to_string(a.j0 + 1));
  }
  const AnalysisResult result = analyze(csv.panel, cfg);
  const nlohmann::json doc = analysis_to_json(result, csv.panel);

  const fs::path out(a.out);
  if (a.format == "json") {
    write_file(out, doc.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "key,value\n";
    for (const auto& key : {"n", "p", "j0", "ratio_rank", "unitroot_rank", "fractional_rank", "a2_rank"}) {
      if (doc.contains(key)) os << key << ',' << doc[key].dump() << '\n';
    }
    if (doc.contains("ic_ranks")) {
      for (const auto& [k, v] : doc["ic_ranks"].items()) os << "ic_" << k << ',' << v.dump() << '\n';
    }
    if (doc.contains("johansen")) os << "johansen_rank," << doc["johansen"]["selected_r"].dump() << '\n';
    for (std::size_t i = 0; i < doc["eigenvalues"].size(); ++i) {
      os << "eigenvalue_" << i + 1 << ',' << doc["eigenvalues"][i].dump() << '\n';
    }
    write_file(out, os.str());
  }
  std::vector<std::string> header;
  for (Eigen::Index k = 0; k < result.fit.x_hat.cols(); ++k) header.push_back("x" + std::to_string(k + 1));
  std::ostringstream xs;
  write_matrix_csv(xs, result.fit.x_hat, header);
  write_file(sibling(out, "_xhat.csv"), xs.str());

  std::cout << "eigenvalues:";
  for (Eigen::Index k = 0; k < result.fit.eigen.dim(); ++k) std::cout << ' ' << result.fit.eigen.values(k);
  std::cout << '\n';
  if (result.ratio_rank) std::cout << "ratio rank: " << *result.ratio_rank << '\n';
  for (const auto& [name, rank] : result.ic_ranks) std::cout << "ic rank (" << name << "): " << rank << '\n';
  if (result.unitroot_rank) std::cout << "unit-root rank: " << *result.unitroot_rank << '\n';
  if (result.fractional_rank) std::cout << "fractional ratio rank: " << *result.fractional_rank << '\n';
  if (result.johansen) std::cout << "johansen rank: " << result.johansen->selected_r << '\n';
  for (const auto& d : result.diagnostics) std::cerr << "note: " << d << '\n';
  return 0;
}

struct SimulateArgs {
  std::string plan;
  std::string preset;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> parallelism;
  std::optional<int> j0;
  std::vector<int> n;
  std::string out = "report";
  std::string format = "csv";
};

int run_simulate(const SimulateArgs& a) {
  nlohmann::json doc = nlohmann::json::object();
  if (!a.plan.empty()) {
    std::ifstream in(a.plan);
    if (!in) throw Error(Errc::InvalidPlan, "/: cannot open plan '" + a.plan + "'");
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::InvalidPlan, std::string("/: ") + e.what());
    }
  }
  if (!a.preset.empty()) doc["preset"] = a.preset;
  if (!doc.contains("preset") && !doc.contains("scenarios")) {
    throw Error(Errc::InvalidPlan, "/: give --plan or --preset");
  }
  if (a.reps) doc["reps"] = *a.reps;
  if (a.seed) doc["master_seed"] = *a.seed;
  if (a.parallelism) doc["parallelism"] = *a.parallelism;
  if (a.j0) doc["j0"] = *a.j0;
  if (!a.n.empty()) doc["n_grid"] = a.n;
  const ExperimentPlan plan = plan_from_json(doc);
  const ExperimentReport report = run_plan(plan);

  const fs::path out(a.out);
  if (a.format == "json") {
    write_file(sibling(out, ".json"), emit_report(report, ReportFormat::Json));
  } else {
    write_file(sibling(out, ".csv"), emit_report(report, ReportFormat::Csv));
  }
  write_file(sibling(out, "_replicates.csv"), emit_replicates_csv(report));
  std::cout << format_table(report);
  std::cerr << "completed in " << report.runtime_seconds << " s\n";
  return 0;
}

struct CritArgs {
  std::string dims = "1";
  double level = 0.05;
  int T = kDefaultCriticalT;
  int reps = kDefaultCriticalReps;
  std::uint64_t seed = 1;
  std::string cache = "critical_values.json";
  std::string kind = "trace";
  int parallelism = 1;
};

int run_crit(const CritArgs& a) {
  if (a.reps < 1000) throw Error(Errc::InvalidArgument, "--reps must be >= 1000");
  if (a.T < 100) throw Error(Errc::InvalidArgument, "--T must be >= 100");
  if (!(a.level > 0.0 && a.level < 0.5)) throw Error(Errc::InvalidArgument, "--level must lie in (0, 0.5)");
  if (a.kind != "trace" && a.kind != "unitroot") throw Error(Errc::InvalidArgument, "--kind must be trace or unitroot");
  std::vector<int> dims;
  try {
    dims = parse_dims(a.dims);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "malformed --dim '" + a.dims + "'");
  }
  for (int d : dims) {
    if (d < 1) throw Error(Errc::InvalidArgument, "--dim entries must be >= 1");
  }
  std::set<int> dim_set(dims.begin(), dims.end());
  std::vector<double> levels = {a.level};

  if (fs::exists(a.cache)) {
    std::ifstream in(a.cache);
    try {
      const auto old = nlohmann::json::parse(in).get<CriticalTable>();
      if (old.kind == a.kind && old.T == a.T && old.reps == a.reps && old.seed == a.seed) {
        dim_set.insert(old.dims.begin(), old.dims.end());
        for (double lv : old.levels) {
          if (std::none_of(levels.begin(), levels.end(), [&](double x) { return std::abs(x - lv) < 1e-12; })) {
            levels.push_back(lv);
          }
        }
      }
    } catch (const std::exception&) {
      // unreadable cache is replaced
    }
  }
  std::sort(levels.begin(), levels.end());
  CriticalTable table;
  if (a.kind == "trace") {
    table = build_trace_table(std::vector<int>(dim_set.begin(), dim_set.end()), levels, a.T, a.reps,
                              a.seed, a.parallelism);
  } else {
    table = build_unit_root_table(levels, a.T, a.reps, a.seed);
  }
  write_file(a.cache, nlohmann::json(table).dump(2) + "\n");
  for (std::size_t i = 0; i < table.dims.size(); ++i) {
    std::cout << "dim " << table.dims[i] << ":";
    for (std::size_t k = 0; k < table.levels.size(); ++k) {
      std::cout << "  " << table.levels[k] << " -> " << table.values[i][k];
    }
    std::cout << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cointegration analysis by eigenanalysis of lag-covariance matrices"};
  app.require_subcommand(1);

  AnalyzeArgs aa;
  auto* analyze_cmd = app.add_subcommand("analyze", "Estimate cointegration rank and space of a CSV panel");
  analyze_cmd->add_option("--input", aa.input, "CSV file, rows are time points")->required();
  analyze_cmd->add_option("--j0", aa.j0, "Maximum lag in W")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--methods", aa.methods, "Comma list: ratio,ic,unitroot,johansen,fractional");
  analyze_cmd->add_option("--penalty", aa.penalty, "Comma list of omega1|omega2|omega3|custom=VALUE");
  analyze_cmd->add_option("--level", aa.level, "Test size for unit-root and Johansen tests");
  analyze_cmd->add_option("--reps", aa.reps, "Repetitions for critical-value simulation");
  analyze_cmd->add_option("--seed", aa.seed, "Seed for critical-value simulation");
  analyze_cmd->add_option("--out", aa.out, "Report path; x_hat goes to <stem>_xhat.csv");
  analyze_cmd->add_option("--format", aa.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  analyze_cmd->add_option("--d-min", aa.d_min, "Smallest integration order for the fractional rule");
  analyze_cmd->add_option("--delta", aa.delta, "Largest stationary order for the fractional rule");

  SimulateArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Run a Monte Carlo experiment plan");
  simulate_cmd->add_option("--plan", sa.plan, "Plan JSON file");
  simulate_cmd->add_option("--preset", sa.preset, "example1 | example2 | example3");
  simulate_cmd->add_option("--reps", sa.reps, "Replicates per cell");
  simulate_cmd->add_option("--seed", sa.seed, "Master seed");
  simulate_cmd->add_option("--parallelism", sa.parallelism, "Worker threads");
  simulate_cmd->add_option("--j0", sa.j0, "Maximum lag in W");
  simulate_cmd->add_option("--n", sa.n, "Sample sizes (overrides the plan grid)")->delimiter(',');
  simulate_cmd->add_option("--out", sa.out, "Output path prefix");
  simulate_cmd->add_option("--format", sa.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  CritArgs ca;
  auto* crit_cmd = app.add_subcommand("crit", "Simulate critical values into a JSON cache");
  crit_cmd->add_option("--dim", ca.dims, "Dimensions p - r, e.g. 3, 1..3 or 1,2,5");
  crit_cmd->add_option("--level", ca.level, "Test size");
  crit_cmd->add_option("--T", ca.T, "Inner series length");
  crit_cmd->add_option("--reps", ca.reps, "Repetitions");
  crit_cmd->add_option("--seed", ca.seed, "Seed");
  crit_cmd->add_option("--cache", ca.cache, "Cache file");
  crit_cmd->add_option("--kind", ca.kind, "trace | unitroot");
  crit_cmd->add_option("--parallelism", ca.parallelism, "Worker threads");

  auto* version_cmd = app.add_subcommand("version", "Print version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*analyze_cmd) return run_analyze(aa);
    if (*simulate_cmd) return run_simulate(sa);
    if (*crit_cmd) return run_crit(ca);
    if (*version_cmd) {
      std::cout << "eigcoint " << kVersion << '\n';
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitUsage;
}
