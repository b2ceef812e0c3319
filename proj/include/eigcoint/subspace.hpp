#pragma once

// Discrepancy between an estimated and a true cointegration space.

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "eigcoint/linalg.hpp"

namespace eigcoint {

/// p x r matrix whose columns span a subspace. Orthonormality or full column
/// rank is checked by each operation that needs it.
template <typename Scalar>
using Basis = Matrix<Scalar>;

inline constexpr double kOrthonormalTol = 1e-8;
inline constexpr double kBasisRankTol = 1e-10;
inline constexpr double kMixingConditionLimit = 1e12;

template <typename Scalar>
bool is_orthonormal(const Basis<Scalar>& b, Scalar tol = Scalar(kOrthonormalTol)) {
  if (b.cols() == 0) return true;
  const Matrix<Scalar> gram = b.transpose() * b;
  return max_abs(Matrix<Scalar>(gram - Matrix<Scalar>::Identity(b.cols(), b.cols()))) <= tol;
}

namespace detail {

template <typename Scalar>
Scalar distance_from_overlap(Scalar overlap, Eigen::Index denom) {
  const Scalar radicand = Scalar(1) - overlap / static_cast<Scalar>(denom);
  return std::clamp(std::sqrt(std::max(radicand, Scalar(0))), Scalar(0), Scalar(1));
}

}  // namespace detail

/// D = sqrt(1 - tr(Ah2 Ah2' A2 A2') / r) for orthonormal bases of equal width.
/// Two empty bases are at distance 0.
template <typename Scalar>
Scalar dist_d(const Basis<Scalar>& a_hat2, const Basis<Scalar>& a2) {
  if (a_hat2.rows() != a2.rows() || a_hat2.cols() != a2.cols()) {
    throw Error(Errc::DimensionMismatch, "bases must share shape");
  }
  if (a2.cols() == 0) return Scalar(0);
  if (!is_orthonormal(a_hat2) || !is_orthonormal(a2)) {
    throw Error(Errc::NotOrthonormal, "dist_d needs orthonormal columns");
  }
  // tr(Ah2 Ah2' A2 A2') = ||Ah2' A2||_F^2
  const Scalar overlap = (a_hat2.transpose() * a2).squaredNorm();
  return detail::distance_from_overlap(overlap, a2.cols());
}

/// D1 = sqrt(1 - tr(Ah2 Ah2' P_B2) / max(r, r*)) where P_B2 is the orthogonal
/// projector onto span(b2). b2 only needs full column rank. When exactly one
/// of the two bases is empty the distance is 1; when both are, 0.
template <typename Scalar>
Scalar dist_d1(const Basis<Scalar>& a_hat2, const Basis<Scalar>& b2) {
  if (a_hat2.rows() != b2.rows()) throw Error(Errc::DimensionMismatch, "bases must share p");
  const Eigen::Index r_star = a_hat2.cols();
  const Eigen::Index r = b2.cols();
  if (r == 0 && r_star == 0) return Scalar(0);
  if (r == 0 || r_star == 0) return Scalar(1);
  if (!is_orthonormal(a_hat2)) throw Error(Errc::NotOrthonormal, "estimated basis must be orthonormal");

  // B2 (B2'B2)^{-1} B2' = U U' with U the thin left singular vectors of B2.
  Eigen::JacobiSVD<Matrix<Scalar>> svd(b2, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (!(s(0) > Scalar(0)) || !(s(r - 1) > Scalar(kBasisRankTol) * s(0))) {
    throw Error(Errc::SingularBasis, "comparison basis is not of full column rank");
  }
  const Scalar overlap = (a_hat2.transpose() * svd.matrixU()).squaredNorm();
  return detail::distance_from_overlap(overlap, std::max(r, r_star));
}

/// Last r columns of (mixing^{-1})'.
template <typename Scalar>
Basis<Scalar> true_b2(const Matrix<Scalar>& mixing, int r) {
  if (mixing.rows() != mixing.cols()) throw Error(Errc::DimensionMismatch, "mixing must be square");
  if (r < 0 || r > mixing.cols()) throw Error(Errc::InvalidRank, "rank outside [0, p]");
  const Scalar inv_cond = inverse_condition(mixing);
  if (!(inv_cond * Scalar(kMixingConditionLimit) > Scalar(1))) {
    throw Error(Errc::SingularMatrix, "mixing matrix is singular",
                inv_cond > Scalar(0) ? static_cast<double>(Scalar(1) / inv_cond)
                                     : std::numeric_limits<double>::infinity());
  }
  const Matrix<Scalar> inv_t = mixing.partialPivLu().inverse().transpose();
  return inv_t.rightCols(r);
}

/// Orthonormal basis for span(b) via thin Householder QR.
template <typename Scalar>
Basis<Scalar> orthonormalize(const Basis<Scalar>& b) {
  if (b.cols() == 0) return b;
  Eigen::HouseholderQR<Matrix<Scalar>> qr(b);
  return qr.householderQ() * Matrix<Scalar>::Identity(b.rows(), b.cols());
}

}  // namespace eigcoint
