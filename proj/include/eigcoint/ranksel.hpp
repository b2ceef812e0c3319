#pragma once

// Eigenanalysis of W, cointegration-rank rules and the estimated
// cointegration space.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "eigcoint/covstack.hpp"

namespace eigcoint {

/// Result of fitting the eigenstructure of W. Columns of `a_hat` follow the
/// descending eigenvalue order, so the trailing columns span the estimated
/// cointegration space. Rank fields stay empty until a rule is applied.
template <typename Scalar>
struct CointFit {
  EigenSystem<Scalar> eigen;
  Matrix<Scalar> a_hat;
  Matrix<Scalar> x_hat;  // row t = (a_hat' y_t)'
  std::optional<int> r_hat;
  std::optional<int> r_tilde;
  int j0 = kDefaultMaxLag;

  Eigen::Index p() const noexcept { return a_hat.cols(); }
};

enum class PenaltyVariant { Omega1, Omega2, Omega3, Custom };

class PenaltySpec {
 public:
  static PenaltySpec omega1() { return PenaltySpec(PenaltyVariant::Omega1, std::nullopt); }
  static PenaltySpec omega2() { return PenaltySpec(PenaltyVariant::Omega2, std::nullopt); }
  static PenaltySpec omega3() { return PenaltySpec(PenaltyVariant::Omega3, std::nullopt); }
  static PenaltySpec custom(double value) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw Error(Errc::InvalidArgument, "custom penalty must be a positive finite value");
    }
    return PenaltySpec(PenaltyVariant::Custom, value);
  }

  /// Parses "omega1", "omega2", "omega3" or "custom=VALUE".
  static PenaltySpec parse(const std::string& text) {
    if (text == "omega1") return omega1();
    if (text == "omega2") return omega2();
    if (text == "omega3") return omega3();
    const std::string prefix = "custom=";
    if (text.rfind(prefix, 0) == 0) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(text.substr(prefix.size()), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != text.size() - prefix.size()) {
        throw Error(Errc::InvalidArgument, "malformed custom penalty '" + text + "'");
      }
      return custom(v);
    }
    throw Error(Errc::InvalidArgument, "unknown penalty '" + text + "'");
  }

  PenaltyVariant variant() const noexcept { return variant_; }
  std::optional<double> custom_value() const noexcept { return custom_value_; }

  std::string name() const {
    switch (variant_) {
      case PenaltyVariant::Omega1: return "omega1";
      case PenaltyVariant::Omega2: return "omega2";
      case PenaltyVariant::Omega3: return "omega3";
      case PenaltyVariant::Custom: return "custom=" + std::to_string(*custom_value_);
    }
    return {};
  }

 private:
  PenaltySpec(PenaltyVariant v, std::optional<double> c) : variant_(v), custom_value_(c) {}

  PenaltyVariant variant_;
  std::optional<double> custom_value_;
};

namespace detail {

// lambda_p counts as zero at or below (p * eps)^2 * lambda_1, the squared
// numerical-rank tolerance of the singular values of G. I(2) panels routinely
// reach lambda_p / lambda_1 ~ 1e-17, so a coarser relative floor would
// reject them.
template <typename Scalar>
void require_positive_tail(const EigenSystem<Scalar>& eigen) {
  if (eigen.dim() < 1) throw Error(Errc::InvalidArgument, "empty spectrum");
  const Scalar lp = eigen.values(eigen.dim() - 1);
  const Scalar tol = static_cast<Scalar>(eigen.dim()) * std::numeric_limits<Scalar>::epsilon();
  if (!(lp > tol * tol * eigen.values(0)) || !(lp > Scalar(0)) ||
      !std::isfinite(static_cast<double>(eigen.values(0)))) {
    throw Error(Errc::DegenerateSpectrum, "smallest eigenvalue of W is numerically zero");
  }
}

// Largest j in 1..p with lambda_{p+1-j} <= threshold.
template <typename Scalar>
int count_below(const EigenSystem<Scalar>& eigen, Scalar threshold) {
  const auto p = static_cast<int>(eigen.dim());
  int best = 0;
  for (int j = 1; j <= p; ++j) {
    if (eigen.values(p - j) <= threshold) best = j;
  }
  return best;
}

}  // namespace detail

template <typename Scalar>
CointFit<Scalar> fit(const SeriesMatrix<Scalar>& series, int j0 = kDefaultMaxLag) {
  const LagCovStack<Scalar> stack = build_stack(series, j0);
  CointFit<Scalar> out;
  out.j0 = j0;
  // W = G G' with G = [Sigma_0, ..., Sigma_j0]; decomposing G keeps the small
  // eigenvalues that explicit accumulation of W rounds away.
  const Eigen::Index p = series.p();
  Matrix<Scalar> g(p, p * (j0 + 1));
  for (int j = 0; j <= j0; ++j) g.middleCols(j * p, p) = stack.sigmas[static_cast<std::size_t>(j)];
  out.eigen = eigh_gram(g);
  out.a_hat = out.eigen.vectors;
  out.x_hat = series.data() * out.a_hat;
  return out;
}

/// Ratio rule: the largest j in 1..p with lambda_{p+1-j} <= n * lambda_p.
/// Never returns 0 (j = 1 always qualifies); screen for r = 0 with the
/// information criterion under a custom penalty or with a baseline test.
template <typename Scalar>
int rank_ratio(const EigenSystem<Scalar>& eigen, Eigen::Index n) {
  detail::require_positive_tail(eigen);
  const Scalar lp = eigen.values(eigen.dim() - 1);
  return detail::count_below(eigen, static_cast<Scalar>(n) * lp);
}

/// IC(l) = sum_{j=1}^{l} lambda_{p+1-j} + (p - l) * omega, for l in 1..p.
template <typename Scalar>
Scalar information_criterion(const EigenSystem<Scalar>& eigen, int l, Scalar omega) {
  const auto p = static_cast<int>(eigen.dim());
  Scalar tail = 0;
  for (int j = 1; j <= l; ++j) tail += eigen.values(p - j);
  return tail + static_cast<Scalar>(p - l) * omega;
}

/// Smallest minimizer of IC(l) over l in 1..p.
template <typename Scalar>
int rank_ic(const EigenSystem<Scalar>& eigen, Scalar omega) {
  if (!(omega > Scalar(0))) throw Error(Errc::InvalidArgument, "penalty must be positive");
  const auto p = static_cast<int>(eigen.dim());
  if (p < 1) throw Error(Errc::InvalidArgument, "empty spectrum");
  int best = 1;
  Scalar best_ic = information_criterion(eigen, 1, omega);
  Scalar tail = eigen.values(p - 1);
  for (int l = 2; l <= p; ++l) {
    tail += eigen.values(p - l);
    const Scalar ic = tail + static_cast<Scalar>(p - l) * omega;
    if (ic < best_ic) {
      best_ic = ic;
      best = l;
    }
  }
  return best;
}

template <typename Scalar>
Scalar penalty(const PenaltySpec& spec, Eigen::Index n, Scalar lambda_p) {
  if (n < 2) throw Error(Errc::InvalidArgument, "penalty needs n >= 2");
  if (spec.variant() == PenaltyVariant::Custom) return static_cast<Scalar>(*spec.custom_value());
  if (!(lambda_p > Scalar(0))) {
    throw Error(Errc::DegenerateSpectrum, "named penalty needs a positive smallest eigenvalue");
  }
  const Scalar nn = static_cast<Scalar>(n);
  switch (spec.variant()) {
    case PenaltyVariant::Omega1: return std::pow(nn, Scalar(1.25)) * lambda_p;
    case PenaltyVariant::Omega2: return std::pow(nn, Scalar(1.5)) * lambda_p;
    case PenaltyVariant::Omega3: return std::pow(nn, Scalar(2) / Scalar(3)) * lambda_p;
    case PenaltyVariant::Custom: break;
  }
  return static_cast<Scalar>(*spec.custom_value());
}

/// IC rank with a penalty resolved from the fitted spectrum.
template <typename Scalar>
int rank_ic(const EigenSystem<Scalar>& eigen, const PenaltySpec& spec, Eigen::Index n) {
  if (spec.variant() != PenaltyVariant::Custom) detail::require_positive_tail(eigen);
  return rank_ic(eigen, penalty(spec, n, eigen.values(eigen.dim() - 1)));
}

struct FractionalRank {
  int rank = 0;
  // Set when d_min + delta - 1 <= 0: the threshold n^(d_min+delta-1) * lambda_p
  // then shrinks toward or below lambda_p as n grows.
  std::optional<std::string> diagnostic;
};

/// Fractional ratio rule: largest j with
/// lambda_{p+1-j} <= n^(d_min + delta - 1) * lambda_p.
template <typename Scalar>
FractionalRank rank_ratio_fractional(const EigenSystem<Scalar>& eigen, Eigen::Index n,
                                     double d_min, double delta) {
  if (!(d_min > 0.5)) throw Error(Errc::InvalidArgument, "d_min must exceed 1/2");
  if (!(delta >= 0.0 && delta < 0.5)) throw Error(Errc::InvalidArgument, "delta must lie in [0, 1/2)");
  detail::require_positive_tail(eigen);
  const double exponent = d_min + delta - 1.0;
  const Scalar lp = eigen.values(eigen.dim() - 1);
  const Scalar threshold = static_cast<Scalar>(std::pow(static_cast<double>(n), exponent)) * lp;
  FractionalRank out;
  out.rank = detail::count_below(eigen, threshold);
  if (exponent <= 0.0) {
    out.diagnostic = "d_min + delta - 1 = " + std::to_string(exponent) +
                     " <= 0: ratio threshold does not grow with n";
  }
  return out;
}

/// (A1, A2): leading p - r and trailing r columns of a_hat.
template <typename Scalar>
std::pair<Matrix<Scalar>, Matrix<Scalar>> split(const CointFit<Scalar>& fit, int r) {
  const auto p = static_cast<int>(fit.p());
  if (r < 0 || r > p) {
    throw Error(Errc::InvalidRank, "rank " + std::to_string(r) + " outside [0, " +
                                       std::to_string(p) + "]");
  }
  return {fit.a_hat.leftCols(p - r), fit.a_hat.rightCols(r)};
}

}  // namespace eigcoint
