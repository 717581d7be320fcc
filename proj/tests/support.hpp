#pragma once

// Shared test helpers: random SPD matrices, central differences, matrix
// comparison with a readable failure message.

#include "ufslam/core_types.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <random>

namespace ufslam::test {

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n, double scale = 1.0, double floor = 1e-3) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::MatrixXd spd = scale * (a * a.transpose() / n + floor * Eigen::MatrixXd::Identity(n, n));
  return 0.5 * (spd + spd.transpose());
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Central differences of f: R^n -> R^m. `angle_rows` marks outputs whose
/// differences are wrapped.
inline Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-6,
                                        std::vector<int> angle_rows = {}) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    xp(c) += h;
    xm(c) -= h;
    Eigen::VectorXd d = f(xp) - f(xm);
    for (int r : angle_rows) d(r) = wrap_angle(d(r));
    j.col(c) = d / (2.0 * h);
  }
  return j;
}

/// |a - b| <= rel * max(1, |b|) entrywise.
inline ::testing::AssertionResult near_relative(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double rel) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return ::testing::AssertionFailure() << "shape mismatch";
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double tol = rel * std::max(1.0, std::abs(b(i, j)));
      if (!(std::abs(a(i, j) - b(i, j)) <= tol)) {
        return ::testing::AssertionFailure() << "entry (" << i << "," << j << "): " << a(i, j) << " vs " << b(i, j)
                                             << "\nactual:\n" << a << "\nexpected:\n" << b;
      }
    }
  }
  return ::testing::AssertionSuccess();
}

inline ::testing::AssertionResult near_abs(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return ::testing::AssertionFailure() << "shape mismatch";
  const double err = (a - b).cwiseAbs().maxCoeff();
  if (err <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max abs error " << err << " > " << tol << "\nactual:\n"
                                       << a << "\nexpected:\n" << b;
}

/// Distance between angles on the circle.
inline double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

}  // namespace ufslam::test
