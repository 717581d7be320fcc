#pragma once

// Scaled unscented transform: weights, sigma-point extraction, moment
// reconstruction and cross-covariance. Dimension is a template parameter so
// the filters run on fixed-size Eigen types; Eigen::Dynamic works too.

#include "ufslam/core_types.hpp"

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>

namespace ufslam {

struct UtParams {
  double alpha{1.0};
  double kappa{0.0};
  double beta{2.0};

  double lambda(int n) const { return alpha * alpha * (n + kappa) - n; }
};

struct UtWeights {
  Eigen::VectorXd mean;  // w_m
  Eigen::VectorXd cov;   // w_c
  double spread{0.0};    // n + lambda
};

/// Throws std::invalid_argument when n < 1 or n + lambda <= 0.
UtWeights ut_weights(int n, const UtParams& p);

/// Coordinates whose residuals are wrapped into (-pi, pi].
class AngleDims {
 public:
  AngleDims() = default;
  AngleDims(std::initializer_list<int> dims) {
    for (int d : dims) mask_ |= (std::uint32_t{1} << d);
  }
  bool contains(Eigen::Index d) const { return (mask_ >> d) & 1u; }
  bool empty() const { return mask_ == 0; }

 private:
  std::uint32_t mask_{0};
};

namespace detail {
constexpr int max_sigma_columns(int rows) {
  if (rows == Eigen::Dynamic) return Eigen::Dynamic;
  return 2 * rows + 1 > 15 ? 2 * rows + 1 : 15;
}
}  // namespace detail

/// One column per point. Fixed-row sets keep their columns inline (up to the
/// 15 points of a 7-dimensional set).
template <int Rows>
using Points = Eigen::Matrix<double, Rows, Eigen::Dynamic, (Rows == 1 ? Eigen::RowMajor : Eigen::ColMajor), Rows,
                             detail::max_sigma_columns(Rows)>;

template <int Dim>
struct SigmaPointSet {
  Points<Dim> points;  // one column per sigma point, 2n+1 columns
  Eigen::VectorXd w_m;
  Eigen::VectorXd w_c;
};

namespace detail {

// Cholesky that accepts exactly-singular PSD input: a pivot within tolerance
// of zero yields a zero column, provided the rest of that column vanishes too.
template <int Dim>
bool semidefinite_cholesky(const Eigen::Matrix<double, Dim, Dim>& a, double tol,
                           Eigen::Matrix<double, Dim, Dim>& l) {
  const Eigen::Index n = a.rows();
  l.setZero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = a(j, j) - l.row(j).head(j).squaredNorm();
    if (d > tol) {
      const double root = std::sqrt(d);
      l(j, j) = root;
      for (Eigen::Index i = j + 1; i < n; ++i) {
        l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / root;
      }
    } else if (d >= -tol) {
      for (Eigen::Index i = j + 1; i < n; ++i) {
        const double residual = a(i, j) - l.row(i).head(j).dot(l.row(j).head(j));
        if (std::abs(residual) > std::sqrt(tol * std::max(a(i, i), 0.0)) + tol) return false;
      }
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Lower-triangular L with L*L^T = cov. Falls back to diagonal jitter
/// (1e-12 * trace, doubling up to 1e-6 * trace) when the plain and the
/// semidefinite factorizations both fail.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> cholesky_root(const Eigen::Matrix<double, Dim, Dim>& cov) {
  using Matrix = Eigen::Matrix<double, Dim, Dim>;
  const Matrix sym = symmetrize_psd(cov);
  const Eigen::Index n = sym.rows();
  const double trace = sym.trace();
  if (trace <= 0.0) return Matrix::Zero(n, n);

  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) return llt.matrixL();

  Matrix l(n, n);
  if (detail::semidefinite_cholesky<Dim>(sym, 1e-14 * trace, l)) return l;

  for (double jitter = 1e-12 * trace; jitter <= 1e-6 * trace * (1.0 + 1e-9); jitter *= 2.0) {
    Matrix bumped = sym;
    bumped.diagonal().array() += jitter;
    Eigen::LLT<Matrix> retry(bumped);
    if (retry.info() == Eigen::Success) return retry.matrixL();
  }
  throw NumericalError("cholesky_root: covariance not factorizable after jitter");
}

/// Sigma points with precomputed weights (weights.mean.size() must be 2n+1).
template <int Dim>
SigmaPointSet<Dim> sigma_points(const Gaussian<Dim>& g, const UtWeights& weights) {
  const Eigen::Index n = g.mean.size();
  if (weights.mean.size() != 2 * n + 1) throw std::invalid_argument("sigma_points: weight count mismatch");
  const Eigen::Matrix<double, Dim, Dim> root = cholesky_root<Dim>(g.cov) * std::sqrt(weights.spread);
  SigmaPointSet<Dim> set;
  set.points.resize(n, 2 * n + 1);
  set.points.col(0) = g.mean;
  for (Eigen::Index i = 0; i < n; ++i) {
    set.points.col(1 + i) = g.mean + root.col(i);
    set.points.col(1 + n + i) = g.mean - root.col(i);
  }
  set.w_m = weights.mean;
  set.w_c = weights.cov;
  return set;
}

template <int Dim>
SigmaPointSet<Dim> sigma_points(const Gaussian<Dim>& g, const UtParams& p) {
  return sigma_points<Dim>(g, ut_weights(static_cast<int>(g.mean.size()), p));
}

/// Weighted mean of the columns; angle coordinates are averaged as wrapped
/// residuals about the first point.
template <int Rows>
Eigen::Matrix<double, Rows, 1> weighted_mean(const Points<Rows>& points, const Eigen::VectorXd& w_m,
                                             AngleDims angles = {}) {
  Eigen::Matrix<double, Rows, 1> mean = points * w_m;
  if (!angles.empty()) {
    for (Eigen::Index d = 0; d < points.rows(); ++d) {
      if (!angles.contains(d)) continue;
      const double ref = points(d, 0);
      double acc = 0.0;
      for (Eigen::Index i = 0; i < points.cols(); ++i) acc += w_m(i) * wrap_angle(points(d, i) - ref);
      mean(d) = wrap_angle(ref + acc);
    }
  }
  return mean;
}

/// Column-wise residuals points - mean, wrapping angle coordinates.
template <int Rows>
Points<Rows> residuals(const Points<Rows>& points, const Eigen::Matrix<double, Rows, 1>& mean,
                       AngleDims angles = {}) {
  Points<Rows> dev = points.colwise() - mean;
  if (!angles.empty()) {
    for (Eigen::Index d = 0; d < dev.rows(); ++d) {
      if (!angles.contains(d)) continue;
      for (Eigen::Index i = 0; i < dev.cols(); ++i) dev(d, i) = wrap_angle(dev(d, i));
    }
  }
  return dev;
}

/// sum_i w_c[i] (a_i - mean_a)(b_i - mean_b)^T, without symmetrization.
template <int RowsA, int RowsB>
Eigen::Matrix<double, RowsA, RowsB> cross_covariance(const Points<RowsA>& a,
                                                     const Eigen::Matrix<double, RowsA, 1>& mean_a,
                                                     const Points<RowsB>& b,
                                                     const Eigen::Matrix<double, RowsB, 1>& mean_b,
                                                     const Eigen::VectorXd& w_c, AngleDims angles_a = {},
                                                     AngleDims angles_b = {}) {
  if (a.cols() != b.cols() || a.cols() != w_c.size()) {
    throw std::invalid_argument("cross_covariance: point counts differ");
  }
  const Points<RowsA> da = residuals<RowsA>(a, mean_a, angles_a);
  const Points<RowsB> db = residuals<RowsB>(b, mean_b, angles_b);
  return da * w_c.asDiagonal() * db.transpose();
}

/// Mean and (repaired) covariance of a set of transformed sigma points.
template <int Rows>
Gaussian<Rows> reconstruct_gaussian(const Points<Rows>& points, const Eigen::VectorXd& w_m,
                                    const Eigen::VectorXd& w_c, AngleDims angles = {}) {
  if (!points.allFinite()) throw NumericalError("reconstruct_gaussian: non-finite sigma point");
  Gaussian<Rows> g;
  g.mean = weighted_mean<Rows>(points, w_m, angles);
  const Eigen::Matrix<double, Rows, Rows> raw =
      cross_covariance<Rows, Rows>(points, g.mean, points, g.mean, w_c, angles, angles);
  g.cov = symmetrize_psd(raw);
  return g;
}

template <int Rows>
Gaussian<Rows> reconstruct_gaussian(const SigmaPointSet<Rows>& set, AngleDims angles = {}) {
  return reconstruct_gaussian<Rows>(set.points, set.w_m, set.w_c, angles);
}

}  // namespace ufslam
