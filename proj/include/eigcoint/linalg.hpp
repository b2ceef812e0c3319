#pragma once

// Dense symmetric linear algebra shared by every other module.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include "eigcoint/errors.hpp"

namespace eigcoint {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& m) {
  return m.derived().array().isFinite().all();
}

template <typename Derived>
typename Derived::Scalar max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.size() == 0 ? typename Derived::Scalar(0)
                       : m.cwiseAbs().maxCoeff();
}

/// A real symmetric matrix. Construction symmetrizes via (M + M')/2 so the
/// stored entries are exactly symmetric.
template <typename Scalar>
class SymMatrix {
 public:
  SymMatrix() = default;

  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw Error(Errc::InvalidMatrix, "symmetric matrix must be square with dim >= 1");
    }
    if (!all_finite(m)) {
      throw Error(Errc::InvalidMatrix, "non-finite entry");
    }
    m_ = (m + m.transpose()) / Scalar(2);
  }

  static SymMatrix identity(Eigen::Index dim) {
    return SymMatrix(Matrix<Scalar>::Identity(dim, dim));
  }

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const Matrix<Scalar>& matrix() const noexcept { return m_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

 private:
  Matrix<Scalar> m_;
};

/// Eigenvalues in descending order with unit eigenvectors as columns.
template <typename Scalar>
struct EigenSystem {
  Vector<Scalar> values;
  Matrix<Scalar> vectors;

  Eigen::Index dim() const noexcept { return values.size(); }
};

namespace detail {

inline constexpr int kMaxJacobiSweeps = 100;

template <typename Scalar>
bool needs_rotation(const Matrix<Scalar>& a, Eigen::Index p, Eigen::Index q) {
  const Scalar apq = std::abs(a(p, q));
  if (apq == Scalar(0)) return false;
  // Relative test: rotations stop only once an off-diagonal entry cannot move
  // either diagonal entry, which keeps small eigenvalues accurate even when
  // the spectrum spans many orders of magnitude.
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  return apq > eps * std::sqrt(std::abs(a(p, p))) * std::sqrt(std::abs(a(q, q)));
}

}  // namespace detail

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps the strict upper triangle row by row. A sweep that performs no
/// rotation ends the iteration; the off-diagonal Frobenius norm is then far
/// below 1e-13 * ||M||_F. Each eigenvector is signed so that its
/// largest-magnitude entry is positive. Equal eigenvalues keep sweep order,
/// so only the span of an eigenvalue group is stable across inputs.
namespace detail {

// Stable descending order; each vector's largest-magnitude entry made positive.
template <typename Scalar>
EigenSystem<Scalar> sorted_system(const Vector<Scalar>& values, const Matrix<Scalar>& vectors) {
  const Eigen::Index dim = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(dim));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return values(i) > values(j); });
  EigenSystem<Scalar> out;
  out.values.resize(dim);
  out.vectors.resize(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = values(src);
    Vector<Scalar> col = vectors.col(src);
    Eigen::Index arg = 0;
    col.cwiseAbs().maxCoeff(&arg);
    if (col(arg) < Scalar(0)) col = -col;
    out.vectors.col(k) = col;
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
EigenSystem<Scalar> eigh_desc(const SymMatrix<Scalar>& m) {
  const Eigen::Index dim = m.dim();
  if (dim < 1) throw Error(Errc::InvalidMatrix, "empty matrix");
  Matrix<Scalar> a = m.matrix();
  Matrix<Scalar> v = Matrix<Scalar>::Identity(dim, dim);

  bool converged = false;
  for (int sweep = 0; sweep < detail::kMaxJacobiSweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < dim; ++p) {
      for (Eigen::Index q = p + 1; q < dim; ++q) {
        if (!detail::needs_rotation(a, p, q)) continue;
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        a(p, q) = Scalar(0);
        a(q, p) = Scalar(0);
        rotated = true;
      }
    }
    converged = !rotated;
  }
  if (!converged) {
    throw Error(Errc::ConvergenceFailure, "Jacobi iteration exceeded sweep cap");
  }

  return detail::sorted_system<Scalar>(a.diagonal(), v);
}

/// Eigensystem of G G' from the singular value decomposition of G, without
/// forming the product. Small eigenvalues keep an absolute accuracy of about
/// eps * sigma_1 * sigma_k instead of eps * sigma_1^2, and none is negative.
/// Same ordering and sign convention as eigh_desc.
template <typename Derived>
EigenSystem<typename Derived::Scalar> eigh_gram(const Eigen::MatrixBase<Derived>& g) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index dim = g.rows();
  if (dim < 1) throw Error(Errc::InvalidMatrix, "empty matrix");
  if (!all_finite(g)) throw Error(Errc::InvalidMatrix, "non-finite entry");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(g, Eigen::ComputeFullU);
  Vector<Scalar> values = Vector<Scalar>::Zero(dim);
  const auto& s = svd.singularValues();
  values.head(s.size()) = s.cwiseAbs2();
  return detail::sorted_system<Scalar>(values, svd.matrixU());
}

/// Ratio of largest to smallest eigenvalue; +inf when the smallest is <= 0.
template <typename Scalar>
Scalar spd_condition(const EigenSystem<Scalar>& es) {
  const Scalar lo = es.values(es.dim() - 1);
  const Scalar hi = es.values(0);
  if (lo <= Scalar(0)) return std::numeric_limits<Scalar>::infinity();
  return hi / lo;
}

/// Solves m * X = rhs for symmetric positive definite m.
/// Throws SingularMatrix (carrying the condition estimate) when the smallest
/// eigenvalue is not above 1e-12 times the largest.
template <typename Scalar, typename Derived>
Matrix<Scalar> solve_spd(const SymMatrix<Scalar>& m, const Eigen::MatrixBase<Derived>& rhs) {
  if (rhs.rows() != m.dim()) {
    throw Error(Errc::DimensionMismatch, "right-hand side row count differs from matrix dim");
  }
  const EigenSystem<Scalar> es = eigh_desc(m);
  const Scalar hi = es.values(0);
  const Scalar lo = es.values(m.dim() - 1);
  if (!(hi > Scalar(0)) || !(lo > Scalar(1e-12) * hi)) {
    throw Error(Errc::SingularMatrix, "matrix is not numerically positive definite",
                static_cast<double>(spd_condition(es)));
  }
  Eigen::LLT<Matrix<Scalar>> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::SingularMatrix, "Cholesky factorization failed",
                static_cast<double>(spd_condition(es)));
  }
  return llt.solve(rhs.template cast<Scalar>());
}

/// Inverse of the 2-norm condition number of a general matrix (0 when singular).
template <typename Derived>
typename Derived::Scalar inverse_condition(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(1);
  Eigen::JacobiSVD<Matrix<Scalar>> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(0) > Scalar(0))) return Scalar(0);
  return s(s.size() - 1) / s(0);
}

}  // namespace eigcoint
