#include "support.hpp"

#include <limits>

using namespace ufslam;

TEST(WrapAngle, Examples) {
  EXPECT_EQ(wrap_angle(0.0), 0.0);
  EXPECT_NEAR(test::angle_distance(wrap_angle(3.0 * kPi), kPi), 0.0, 1e-12);
  EXPECT_NEAR(wrap_angle(-3.5 * kPi), 0.5 * kPi, 1e-12);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(wrap_angle(-kPi), kPi);  // half-open interval
}

TEST(WrapAngle, RejectsNonFinite) {
  EXPECT_THROW(wrap_angle(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
  EXPECT_THROW(wrap_angle(std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(WrapAngle, RangeIdempotenceAndPeriodicity) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double a = test::uniform(rng, -50.0, 50.0);
    const double w = wrap_angle(a);
    EXPECT_GT(w, -kPi);
    EXPECT_LE(w, kPi);
    EXPECT_EQ(wrap_angle(w), w);
    // same residue: the difference is a multiple of 2 pi
    const double turns = (a - w) / (2.0 * kPi);
    EXPECT_NEAR(turns, std::round(turns), 1e-12);
    for (int k = -10; k <= 10; ++k) {
      EXPECT_NEAR(test::angle_distance(wrap_angle(w + 2.0 * kPi * k), w), 0.0, 1e-12);
    }
  }
}

TEST(Pose2D, NormalizesHeading) {
  const Pose2D p(1.0, 2.0, 2.5 * kPi);
  EXPECT_NEAR(p.theta, 0.5 * kPi, 1e-12);
  EXPECT_NEAR(Pose2D::from_vector({0, 0, -4.0}).theta, -4.0 + 2.0 * kPi, 1e-12);
}

TEST(SymmetrizePsd, Examples) {
  const Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
  EXPECT_EQ(symmetrize_psd<2>(identity), identity);

  Eigen::Matrix2d m;
  m << 1, 2, 0, 1;
  Eigen::Matrix2d expected;
  expected << 1, 1, 1, 1;
  EXPECT_TRUE(test::near_abs(symmetrize_psd<2>(m), expected, 1e-12));

  Eigen::Matrix2d tiny;
  tiny << 1e-18, 0, 0, 1;
  EXPECT_EQ(symmetrize_psd<2>(tiny), tiny);
}

TEST(SymmetrizePsd, ClampsTinyNegativeEigenvalues) {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, 0.0, -1e-12;
  const Eigen::Matrix2d out = symmetrize_psd<2>(m);
  EXPECT_TRUE(is_valid_covariance(out));
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(out).eigenvalues().minCoeff(), 0.0);
  EXPECT_NEAR(out(0, 0), 1.0, 1e-12);
}

TEST(SymmetrizePsd, RejectsIndefinite) {
  Eigen::Matrix2d m;
  m << 1.0, 0.0, 0.0, -0.1;
  EXPECT_THROW(symmetrize_psd<2>(m), NumericalError);
  Eigen::Matrix2d bad = Eigen::Matrix2d::Identity();
  bad(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(symmetrize_psd<2>(bad), NumericalError);
}

TEST(SymmetrizePsd, OutputAlwaysValidCovariance) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 7;
    Eigen::MatrixXd m = test::random_spd(rng, n, test::uniform(rng, 1e-6, 1e3), 0.0);
    // asymmetric rounding noise
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) += 1e-14 * test::uniform(rng, -1, 1) * m.trace();
    const Eigen::MatrixXd out = symmetrize_psd(m);
    EXPECT_TRUE(is_valid_covariance(out));
    EXPECT_EQ((out - out.transpose()).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(IsValidCovariance, DetectsViolations) {
  EXPECT_TRUE(is_valid_covariance(Eigen::Matrix3d::Identity()));
  Eigen::Matrix2d asym;
  asym << 1, 0.5, 0, 1;
  EXPECT_FALSE(is_valid_covariance(asym));
  Eigen::Matrix2d neg;
  neg << 1, 0, 0, -1;
  EXPECT_FALSE(is_valid_covariance(neg));
}
