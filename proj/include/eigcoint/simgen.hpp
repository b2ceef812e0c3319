#pragma once

// Seeded generators for ARIMA/ARFIMA components and mixed panels y_t = A x_t.
//
// All processes use zero pre-sample values (x_t = e_t = 0 for t <= 0) and no
// burn-in. Innovations are standard normal.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "eigcoint/covstack.hpp"
#include "eigcoint/rng.hpp"
#include "eigcoint/subspace.hpp"

namespace eigcoint {

using Panel = SeriesMatrix<double>;

/// How one coefficient is chosen for each component of a block.
/// Grid assigns component i (1-based, of `count`) the value offset + step * i / count.
struct CoefLaw {
  enum class Kind { None, Fixed, Uniform, Grid };
  Kind kind = Kind::None;
  double a = 0.0;  // fixed value | uniform lower bound | grid offset
  double b = 0.0;  // uniform upper bound | grid step

  static CoefLaw none() { return {}; }
  static CoefLaw fixed(double v) { return {Kind::Fixed, v, 0.0}; }
  static CoefLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi}; }
  static CoefLaw grid(double offset, double step) { return {Kind::Grid, offset, step}; }

  bool present() const noexcept { return kind != Kind::None; }
  double draw(int index, int count, RandomStream& rng) const;
};

/// `count` components of integration order `d`, each ARMA(<=1, <=1) in
/// differences with coefficients drawn per `ar` / `ma`.
struct ProcessBlock {
  int count = 0;
  double d = 0.0;
  CoefLaw ar;
  CoefLaw ma;
};

struct MixingLaw {
  enum class Kind { Uniform, Orthogonal, Identity };
  Kind kind = Kind::Uniform;
  double lo = -3.0;
  double hi = 3.0;
};

struct ScenarioSpec {
  std::string name = "custom";
  int p = 0;
  int r = 0;
  int n = 0;
  ProcessBlock stationary;                 // count == r, d in [0, 1/2)
  std::vector<ProcessBlock> nonstationary; // counts sum to p - r
  MixingLaw mixing;
  std::uint64_t seed = 0;

  bool fractional() const;
  /// Smallest integration order among the nonstationary blocks (0 if none).
  double d_min() const;
  void validate() const;
};

struct GeneratedPanel {
  Panel y;
  Matrix<double> mixing;
  Basis<double> b2;
  Panel x;
  int true_r = 0;
};

/// a_j(alpha) = Gamma(j + alpha) / (Gamma(alpha) Gamma(j + 1)), j = 0..m.
/// alpha = 0 yields (1, 0, 0, ...).
std::vector<double> frac_coeffs(double alpha, int m);

/// Throws NonstationaryAR unless every root of 1 - sum phi_i z^i lies outside
/// the unit circle.
void check_stationary_ar(std::span<const double> ar);

/// ARMA core: x_t = sum phi_i x_{t-i} + e_t + sum theta_j e_{t-j}.
std::vector<double> gen_arma(int n, std::span<const double> ar, std::span<const double> ma,
                             RandomStream& rng);

/// Applies Delta^{-d} with zero pre-sample by repeated cumulative summation.
std::vector<double> integrate(std::vector<double> core, int d);

std::vector<double> gen_arima(int n, std::span<const double> ar, int d,
                              std::span<const double> ma, RandomStream& rng);

/// Truncated fractional filter sum_{j=0}^{t-1} a_j(d) u_{t-j} over an ARMA
/// core. Integer d is routed through `integrate`, so d = 0 and d = 1 match
/// gen_arima on the same stream exactly.
std::vector<double> gen_arfima(int n, double d, std::span<const double> ar,
                               std::span<const double> ma, RandomStream& rng);

/// Latent x (nonstationary blocks first, then the r stationary components),
/// mixing A, y = A x and B2 = last r columns of (A^{-1})'. Mixing matrices
/// with condition number above 1e10 are redrawn from the next derived stream,
/// at most 10 times.
GeneratedPanel gen_panel(const ScenarioSpec& spec);

// Named designs.
ScenarioSpec preset_example1(int p, int r, int n = 1000, std::uint64_t seed = 0);
ScenarioSpec preset_example2(int p, int r, int n = 1000, std::uint64_t seed = 0);
ScenarioSpec preset_example3(int p, int r, int s, int n = 1000, std::uint64_t seed = 0);
/// Fractional design: p - r ARFIMA(0, d, 0) components and r ARFIMA(1, delta, 0)
/// components with AR(1) coefficients from U(-0.8, 0.8).
ScenarioSpec preset_fractional(int p, int r, double d, double delta, int n = 1000,
                               std::uint64_t seed = 0);

void to_json(nlohmann::json& j, const CoefLaw& law);
void from_json(const nlohmann::json& j, CoefLaw& law);
void to_json(nlohmann::json& j, const ProcessBlock& block);
void from_json(const nlohmann::json& j, ProcessBlock& block);
void to_json(nlohmann::json& j, const MixingLaw& law);
void from_json(const nlohmann::json& j, MixingLaw& law);
void to_json(nlohmann::json& j, const ScenarioSpec& spec);
void from_json(const nlohmann::json& j, ScenarioSpec& spec);

}  // namespace eigcoint
