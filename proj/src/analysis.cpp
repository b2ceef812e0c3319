#include "eigcoint/analysis.hpp"

#include <algorithm>

namespace eigcoint {

namespace {

bool wants(const AnalyzeConfig& c, const std::string& m) {
  return std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end();
}

nlohmann::json columns(const Matrix<double>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    out.push_back(std::vector<double>(m.col(k).data(), m.col(k).data() + m.rows()));
  }
  return out;
}

std::vector<double> to_vec(const Vector<double>& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

void AnalyzeConfig::validate() const {
  if (j0 < 0) throw Error(Errc::InvalidArgument, "j0 must be >= 0");
  if (!(level > 0.0 && level < 0.5)) throw Error(Errc::InvalidArgument, "level must lie in (0, 0.5)");
  static const std::vector<std::string> known = {"ratio", "ic", "unitroot", "johansen", "fractional"};
  if (methods.empty()) throw Error(Errc::InvalidArgument, "no methods requested");
  for (const auto& m : methods) {
    if (std::find(known.begin(), known.end(), m) == known.end()) {
      throw Error(Errc::InvalidArgument, "unknown method '" + m + "'");
    }
  }
  if (wants(*this, "ic") && penalties.empty()) throw Error(Errc::InvalidArgument, "ic needs a penalty");
}

AnalysisResult analyze(const SeriesMatrix<double>& panel, const AnalyzeConfig& config) {
  config.validate();
  if (panel.n() <= config.j0 + 1) {
    throw Error(Errc::InvalidArgument, "sample size must exceed j0 + 1");
  }
  AnalysisResult out;
  out.fit = fit(panel, config.j0);
  const Eigen::Index n = panel.n();

  if (wants(config, "ratio")) {
    out.ratio_rank = rank_ratio(out.fit.eigen, n);
    out.fit.r_hat = out.ratio_rank;
  }
  if (wants(config, "ic")) {
    for (const auto& pen : config.penalties) {
      out.ic_ranks.emplace_back(pen.name(), rank_ic(out.fit.eigen, pen, n));
    }
    out.fit.r_tilde = out.ic_ranks.front().second;
  }
  if (wants(config, "unitroot")) {
    const CriticalTable table = build_unit_root_table({config.level}, config.crit_T, config.crit_reps,
                                                      derive_seed(config.seed, {1}));
    out.unitroot_rank = sequential_unit_root(SeriesMatrix<double>(out.fit.x_hat), config.level, table);
  }
  if (wants(config, "fractional")) {
    const FractionalRank fr = rank_ratio_fractional(out.fit.eigen, n, config.d_min, config.delta);
    out.fractional_rank = fr.rank;
    if (fr.diagnostic) out.diagnostics.push_back(*fr.diagnostic);
  }
  if (wants(config, "johansen")) {
    std::vector<int> dims(static_cast<std::size_t>(panel.p()));
    for (std::size_t k = 0; k < dims.size(); ++k) dims[k] = static_cast<int>(k) + 1;
    const CriticalTable table = build_trace_table(dims, {config.level}, config.crit_T,
                                                  config.crit_reps, derive_seed(config.seed, {2}));
    out.johansen = johansen_trace(panel, table, config.level);
  }

  if (out.ratio_rank) {
    out.a2_rank = *out.ratio_rank;
  } else if (!out.ic_ranks.empty()) {
    out.a2_rank = out.ic_ranks.front().second;
  } else if (out.unitroot_rank) {
    out.a2_rank = *out.unitroot_rank;
  } else if (out.fractional_rank) {
    out.a2_rank = *out.fractional_rank;
  } else if (out.johansen) {
    out.a2_rank = out.johansen->selected_r;
  }
  out.a2 = split(out.fit, out.a2_rank).second;
  return out;
}

nlohmann::json analysis_to_json(const AnalysisResult& result, const SeriesMatrix<double>& panel) {
  nlohmann::json j;
  j["n"] = panel.n();
  j["p"] = panel.p();
  j["j0"] = result.fit.j0;
  j["eigenvalues"] = to_vec(result.fit.eigen.values);
  j["a_hat"] = columns(result.fit.a_hat);
  if (result.ratio_rank) j["ratio_rank"] = *result.ratio_rank;
  if (!result.ic_ranks.empty()) {
    j["ic_ranks"] = nlohmann::json::object();
    for (const auto& [name, rank] : result.ic_ranks) j["ic_ranks"][name] = rank;
  }
  if (result.unitroot_rank) j["unitroot_rank"] = *result.unitroot_rank;
  if (result.fractional_rank) j["fractional_rank"] = *result.fractional_rank;
  if (result.johansen) {
    j["johansen"] = {{"eigenvalues", to_vec(result.johansen->eigenvalues)},
                     {"stats", to_vec(result.johansen->stats)},
                     {"selected_r", result.johansen->selected_r},
                     {"level", result.johansen->level}};
  }
  j["a2_rank"] = result.a2_rank;
  j["a2"] = columns(result.a2);
  j["diagnostics"] = result.diagnostics;
  return j;
}

}  // namespace eigcoint
