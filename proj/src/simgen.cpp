#include "eigcoint/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace eigcoint {

namespace {

constexpr double kHalfIntegerTol = 1e-12;
constexpr double kPanelConditionLimit = 1e10;
constexpr int kMixingRetries = 10;

bool is_integer(double v) { return std::abs(v - std::round(v)) < kHalfIntegerTol; }

bool is_half_integer(double v) { return is_integer(v - 0.5); }

Matrix<double> draw_mixing(const MixingLaw& law, int p, RandomStream& rng) {
  switch (law.kind) {
    case MixingLaw::Kind::Identity:
      return Matrix<double>::Identity(p, p);
    case MixingLaw::Kind::Uniform: {
      Matrix<double> a(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = rng.uniform(law.lo, law.hi);
      return a;
    }
    case MixingLaw::Kind::Orthogonal: {
      Matrix<double> g(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) g(i, j) = rng.normal();
      Eigen::HouseholderQR<Matrix<double>> qr(g);
      Matrix<double> q = qr.householderQ();
      const Matrix<double> rr = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int k = 0; k < p; ++k)
        if (rr(k, k) < 0.0) q.col(k) = -q.col(k);
      return q;
    }
  }
  throw Error(Errc::InvalidArgument, "unknown mixing law");
}

std::vector<double> component(const ProcessBlock& block, int index, int n, RandomStream& rng) {
  std::vector<double> ar;
  std::vector<double> ma;
  if (block.ar.present()) ar.push_back(block.ar.draw(index, block.count, rng));
  if (block.ma.present()) ma.push_back(block.ma.draw(index, block.count, rng));
  return gen_arfima(n, block.d, ar, ma, rng);
}

}  // namespace

double CoefLaw::draw(int index, int count, RandomStream& rng) const {
  switch (kind) {
    case Kind::None: return 0.0;
    case Kind::Fixed: return a;
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::Grid: return a + b * static_cast<double>(index) / static_cast<double>(count);
  }
  return 0.0;
}

bool ScenarioSpec::fractional() const {
  if (!is_integer(stationary.d)) return true;
  return std::any_of(nonstationary.begin(), nonstationary.end(),
                     [](const ProcessBlock& b) { return !is_integer(b.d); });
}

double ScenarioSpec::d_min() const {
  double out = 0.0;
  bool first = true;
  for (const auto& b : nonstationary) {
    if (b.count == 0) continue;
    if (first || b.d < out) out = b.d;
    first = false;
  }
  return out;
}

void ScenarioSpec::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::InvalidArgument, msg); };
  if (p < 1) fail("p must be >= 1");
  if (r < 0 || r > p) fail("r must lie in [0, p]");
  if (n < 10) fail("n must be >= 10");
  if (stationary.count != r) fail("stationary block count must equal r");
  if (!(stationary.d > -0.5 && stationary.d < 0.5)) fail("stationary d must lie in (-1/2, 1/2)");
  int total = 0;
  const bool frac = fractional();
  for (const auto& b : nonstationary) {
    if (b.count < 0) fail("block count must be non-negative");
    total += b.count;
    if (frac) {
      if (!(b.d > 0.5 && b.d <= 2.0) || is_half_integer(b.d)) {
        fail("fractional block order must lie in (1/2, 2] and avoid half-integers");
      }
    } else if (!(b.d >= 1.0) || b.d > 2.0) {
      fail("integer block order must be 1 or 2");
    }
  }
  if (total != p - r) fail("nonstationary block counts must sum to p - r");
  if (mixing.kind == MixingLaw::Kind::Uniform && !(mixing.hi > mixing.lo)) {
    fail("uniform mixing law needs lo < hi");
  }
}

std::vector<double> frac_coeffs(double alpha, int m) {
  if (m < 0) throw Error(Errc::InvalidArgument, "coefficient count must be non-negative");
  if (!std::isfinite(alpha)) throw Error(Errc::InvalidOrder, "order must be finite");
  if (alpha < 0.0 && is_integer(alpha)) {
    throw Error(Errc::InvalidOrder, "Gamma(alpha) has a pole at non-positive integers");
  }
  std::vector<double> a(static_cast<std::size_t>(m) + 1, 0.0);
  a[0] = 1.0;
  for (int j = 1; j <= m; ++j) {
    a[static_cast<std::size_t>(j)] =
        a[static_cast<std::size_t>(j - 1)] * (static_cast<double>(j - 1) + alpha) / j;
  }
  return a;
}

void check_stationary_ar(std::span<const double> ar) {
  const std::size_t k = ar.size();
  bool ok = true;
  if (k == 1) {
    ok = std::abs(ar[0]) < 1.0;
  } else if (k == 2) {
    ok = ar[0] + ar[1] < 1.0 && ar[1] - ar[0] < 1.0 && std::abs(ar[1]) < 1.0;
  } else if (k > 2) {
    Matrix<double> companion = Matrix<double>::Zero(static_cast<Eigen::Index>(k),
                                                    static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) companion(0, static_cast<Eigen::Index>(i)) = ar[i];
    for (std::size_t i = 1; i < k; ++i)
      companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
    Eigen::EigenSolver<Matrix<double>> es(companion, false);
    ok = es.eigenvalues().cwiseAbs().maxCoeff() < 1.0;
  }
  if (!ok) throw Error(Errc::NonstationaryAR, "AR polynomial has a root on or inside the unit circle");
}

std::vector<double> gen_arma(int n, std::span<const double> ar, std::span<const double> ma,
                             RandomStream& rng) {
  if (n < 1) throw Error(Errc::InvalidArgument, "series length must be >= 1");
  check_stationary_ar(ar);
  const auto len = static_cast<std::size_t>(n);
  std::vector<double> e(len);
  for (auto& v : e) v = rng.normal();
  std::vector<double> x(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    double v = e[t];
    for (std::size_t i = 0; i < ar.size() && i < t; ++i) v += ar[i] * x[t - 1 - i];
    for (std::size_t j = 0; j < ma.size() && j < t; ++j) v += ma[j] * e[t - 1 - j];
    x[t] = v;
  }
  return x;
}

std::vector<double> integrate(std::vector<double> core, int d) {
  if (d < 0) throw Error(Errc::InvalidOrder, "integration order must be non-negative");
  for (int k = 0; k < d; ++k) std::partial_sum(core.begin(), core.end(), core.begin());
  return core;
}

std::vector<double> gen_arima(int n, std::span<const double> ar, int d,
                              std::span<const double> ma, RandomStream& rng) {
  if (d < 0) throw Error(Errc::InvalidOrder, "integration order must be non-negative");
  return integrate(gen_arma(n, ar, ma, rng), d);
}

std::vector<double> gen_arfima(int n, double d, std::span<const double> ar,
                               std::span<const double> ma, RandomStream& rng) {
  if (!(d > -0.5 && d <= 2.0) || is_half_integer(d)) {
    throw Error(Errc::InvalidOrder, "order must lie in (-1/2, 2] and avoid half-integers");
  }
  if (is_integer(d)) return gen_arima(n, ar, static_cast<int>(std::lround(d)), ma, rng);
  const std::vector<double> core = gen_arma(n, ar, ma, rng);
  const std::vector<double> a = frac_coeffs(d, n - 1);
  std::vector<double> out(core.size(), 0.0);
  for (std::size_t t = 0; t < core.size(); ++t) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= t; ++j) acc += a[j] * core[t - j];
    out[t] = acc;
  }
  return out;
}

GeneratedPanel gen_panel(const ScenarioSpec& spec) {
  spec.validate();
  const int p = spec.p;
  const int n = spec.n;
  RandomStream latent_rng(derive_seed(spec.seed, {0}));
  Matrix<double> x(n, p);
  int col = 0;
  auto fill = [&](const ProcessBlock& block) {
    for (int i = 1; i <= block.count; ++i, ++col) {
      const std::vector<double> s = component(block, i, n, latent_rng);
      x.col(col) = Eigen::Map<const Vector<double>>(s.data(), n);
    }
  };
  for (const auto& block : spec.nonstationary) fill(block);
  fill(spec.stationary);

  for (int attempt = 0; attempt <= kMixingRetries; ++attempt) {
    RandomStream mix_rng(derive_seed(spec.seed, {1, static_cast<std::uint64_t>(attempt)}));
    Matrix<double> a = draw_mixing(spec.mixing, p, mix_rng);
    if (inverse_condition(a) * kPanelConditionLimit <= 1.0) continue;
    GeneratedPanel out;
    out.b2 = true_b2(a, spec.r);
    out.y = Panel(Matrix<double>(x * a.transpose()));
    out.x = Panel(x);
    out.mixing = std::move(a);
    out.true_r = spec.r;
    return out;
  }
  throw Error(Errc::SingularMixing, "no well-conditioned mixing matrix after retries");
}

namespace {

ScenarioSpec base_spec(const std::string& name, int p, int r, int n, std::uint64_t seed) {
  ScenarioSpec s;
  s.name = name;
  s.p = p;
  s.r = r;
  s.n = n;
  s.seed = seed;
  s.mixing = MixingLaw{MixingLaw::Kind::Uniform, -3.0, 3.0};
  return s;
}

std::string tag(const std::string& stem, std::initializer_list<std::pair<const char*, int>> kv) {
  std::string out = stem;
  for (const auto& [k, v] : kv) out += "_" + std::string(k) + std::to_string(v);
  return out;
}

}  // namespace

ScenarioSpec preset_example1(int p, int r, int n, std::uint64_t seed) {
  ScenarioSpec s = base_spec(tag("example1", {{"p", p}, {"r", r}}), p, r, n, seed);
  s.stationary = ProcessBlock{r, 0.0, CoefLaw::uniform(-0.8, 0.8), CoefLaw::none()};
  s.nonstationary = {ProcessBlock{p - r, 1.0, CoefLaw::uniform(0.3, 0.8), CoefLaw::uniform(0.0, 0.95)}};
  return s;
}

ScenarioSpec preset_example2(int p, int r, int n, std::uint64_t seed) {
  ScenarioSpec s = base_spec(tag("example2", {{"p", p}, {"r", r}}), p, r, n, seed);
  s.stationary = ProcessBlock{r, 0.0, CoefLaw::uniform(-0.8, 0.8), CoefLaw::none()};
  s.nonstationary = {ProcessBlock{p - r, 2.0, CoefLaw::uniform(0.3, 0.8), CoefLaw::uniform(0.0, 0.95)}};
  return s;
}

ScenarioSpec preset_example3(int p, int r, int s_count, int n, std::uint64_t seed) {
  ScenarioSpec s = base_spec(tag("example3", {{"p", p}, {"r", r}, {"s", s_count}}), p, r, n, seed);
  s.stationary = ProcessBlock{r, 0.0, CoefLaw::grid(-0.8, 1.6), CoefLaw::none()};
  s.nonstationary = {
      ProcessBlock{s_count, 1.0, CoefLaw::grid(0.3, 0.5), CoefLaw::grid(0.2, 0.6)},
      ProcessBlock{p - r - s_count, 2.0, CoefLaw::none(), CoefLaw::uniform(-0.95, 0.95)},
  };
  return s;
}

ScenarioSpec preset_fractional(int p, int r, double d, double delta, int n, std::uint64_t seed) {
  ScenarioSpec s = base_spec(tag("fractional", {{"p", p}, {"r", r}}), p, r, n, seed);
  s.stationary = ProcessBlock{r, delta, CoefLaw::uniform(-0.8, 0.8), CoefLaw::none()};
  s.nonstationary = {ProcessBlock{p - r, d, CoefLaw::none(), CoefLaw::none()}};
  return s;
}

// JSON -----------------------------------------------------------------------

void to_json(nlohmann::json& j, const CoefLaw& law) {
  switch (law.kind) {
    case CoefLaw::Kind::None: j = {{"law", "none"}}; break;
    case CoefLaw::Kind::Fixed: j = {{"law", "fixed"}, {"value", law.a}}; break;
    case CoefLaw::Kind::Uniform: j = {{"law", "uniform"}, {"lo", law.a}, {"hi", law.b}}; break;
    case CoefLaw::Kind::Grid: j = {{"law", "grid"}, {"offset", law.a}, {"step", law.b}}; break;
  }
}

void from_json(const nlohmann::json& j, CoefLaw& law) {
  const std::string kind = j.at("law").get<std::string>();
  if (kind == "none") {
    law = CoefLaw::none();
  } else if (kind == "fixed") {
    law = CoefLaw::fixed(j.at("value").get<double>());
  } else if (kind == "uniform") {
    law = CoefLaw::uniform(j.at("lo").get<double>(), j.at("hi").get<double>());
  } else if (kind == "grid") {
    law = CoefLaw::grid(j.at("offset").get<double>(), j.at("step").get<double>());
  } else {
    throw Error(Errc::InvalidArgument, "unknown coefficient law '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const ProcessBlock& block) {
  j = {{"count", block.count}, {"d", block.d}, {"ar", block.ar}, {"ma", block.ma}};
}

void from_json(const nlohmann::json& j, ProcessBlock& block) {
  block.count = j.at("count").get<int>();
  block.d = j.at("d").get<double>();
  block.ar = j.contains("ar") ? j.at("ar").get<CoefLaw>() : CoefLaw::none();
  block.ma = j.contains("ma") ? j.at("ma").get<CoefLaw>() : CoefLaw::none();
}

void to_json(nlohmann::json& j, const MixingLaw& law) {
  switch (law.kind) {
    case MixingLaw::Kind::Uniform: j = {{"law", "uniform"}, {"lo", law.lo}, {"hi", law.hi}}; break;
    case MixingLaw::Kind::Orthogonal: j = {{"law", "orthogonal"}}; break;
    case MixingLaw::Kind::Identity: j = {{"law", "identity"}}; break;
  }
}

void from_json(const nlohmann::json& j, MixingLaw& law) {
  const std::string kind = j.at("law").get<std::string>();
  if (kind == "uniform") {
    law = MixingLaw{MixingLaw::Kind::Uniform, j.value("lo", -3.0), j.value("hi", 3.0)};
  } else if (kind == "orthogonal") {
    law = MixingLaw{MixingLaw::Kind::Orthogonal};
  } else if (kind == "identity") {
    law = MixingLaw{MixingLaw::Kind::Identity};
  } else {
    throw Error(Errc::InvalidArgument, "unknown mixing law '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const ScenarioSpec& spec) {
  j = {{"name", spec.name},
       {"p", spec.p},
       {"r", spec.r},
       {"n", spec.n},
       {"seed", spec.seed},
       {"stationary", spec.stationary},
       {"nonstationary", spec.nonstationary},
       {"mixing", spec.mixing}};
}

void from_json(const nlohmann::json& j, ScenarioSpec& spec) {
  spec.name = j.value("name", std::string("custom"));
  spec.p = j.at("p").get<int>();
  spec.r = j.at("r").get<int>();
  spec.n = j.value("n", 1000);
  spec.seed = j.value("seed", std::uint64_t{0});
  spec.stationary = j.at("stationary").get<ProcessBlock>();
  spec.nonstationary = j.at("nonstationary").get<std::vector<ProcessBlock>>();
  spec.mixing = j.contains("mixing") ? j.at("mixing").get<MixingLaw>() : MixingLaw{};
}

}  // namespace eigcoint
