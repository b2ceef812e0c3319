#pragma once

// Demeaned lag autocovariances and the quadratic lag-covariance form
//   W = sum_{j=0}^{j0} S_j S_j'.
//
// Every lag uses the divisor 1/n, never 1/(n - j). Many libraries use the
// latter; results differ from theirs for lags comparable to n.

#include <string>
#include <vector>

#include "eigcoint/linalg.hpp"

namespace eigcoint {

inline constexpr int kDefaultMaxLag = 5;
inline constexpr int kDefaultFractionalMaxLag = 20;

/// n x p observation panel, one row per time point.
template <typename Scalar>
class SeriesMatrix {
 public:
  SeriesMatrix() = default;

  template <typename Derived>
  explicit SeriesMatrix(const Eigen::MatrixBase<Derived>& data) : data_(data) {
    if (data_.rows() < 2 || data_.cols() < 1) {
      throw Error(Errc::InvalidSeries, "panel needs n >= 2 rows and p >= 1 columns, got " +
                                           std::to_string(data_.rows()) + "x" +
                                           std::to_string(data_.cols()));
    }
    if (!all_finite(data_)) throw Error(Errc::InvalidSeries, "non-finite observation");
  }

  Eigen::Index n() const noexcept { return data_.rows(); }
  Eigen::Index p() const noexcept { return data_.cols(); }
  const Matrix<Scalar>& data() const noexcept { return data_; }

 private:
  Matrix<Scalar> data_;
};

template <typename Scalar>
struct LagCovStack {
  int j0 = 0;
  std::vector<Matrix<Scalar>> sigmas;
  SymMatrix<Scalar> w;
  Vector<Scalar> mean;
};

namespace detail {

template <typename Scalar>
void check_lag(const SeriesMatrix<Scalar>& series, Eigen::Index j) {
  if (j < 0 || j > series.n() - 2) {
    throw Error(Errc::LagTooLarge, "lag " + std::to_string(j) + " outside [0, n-2] for n = " +
                                       std::to_string(series.n()));
  }
}

template <typename Scalar>
Matrix<Scalar> demeaned(const SeriesMatrix<Scalar>& series) {
  const Vector<Scalar> mean = series.data().colwise().mean().transpose();
  return series.data().rowwise() - mean.transpose();
}

template <typename Scalar>
Matrix<Scalar> lag_cov_demeaned(const Matrix<Scalar>& centered, Eigen::Index j) {
  const Eigen::Index n = centered.rows();
  const Eigen::Index m = n - j;
  return centered.bottomRows(m).transpose() * centered.topRows(m) / static_cast<Scalar>(n);
}

}  // namespace detail

/// (1/n) sum_{t=1}^{n-j} (y_{t+j} - ybar)(y_t - ybar)'.
template <typename Scalar>
Matrix<Scalar> lag_cov(const SeriesMatrix<Scalar>& series, Eigen::Index j) {
  detail::check_lag(series, j);
  return detail::lag_cov_demeaned<Scalar>(detail::demeaned(series), j);
}

template <typename Scalar>
LagCovStack<Scalar> build_stack(const SeriesMatrix<Scalar>& series, int j0 = kDefaultMaxLag) {
  detail::check_lag(series, j0);
  LagCovStack<Scalar> out;
  out.j0 = j0;
  out.mean = series.data().colwise().mean().transpose();
  const Matrix<Scalar> centered = series.data().rowwise() - out.mean.transpose();
  const Eigen::Index p = series.p();
  Matrix<Scalar> w = Matrix<Scalar>::Zero(p, p);
  out.sigmas.reserve(static_cast<std::size_t>(j0) + 1);
  for (int j = 0; j <= j0; ++j) {
    out.sigmas.push_back(detail::lag_cov_demeaned<Scalar>(centered, j));
    const Matrix<Scalar>& s = out.sigmas.back();
    w.noalias() += s * s.transpose();
  }
  out.w = SymMatrix<Scalar>(w);
  return out;
}

}  // namespace eigcoint
