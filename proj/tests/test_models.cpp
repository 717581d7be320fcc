#include "support.hpp"

#include "ufslam/models.hpp"

using namespace ufslam;

namespace {

Pose2D random_pose(std::mt19937_64& rng) {
  return {test::uniform(rng, -10, 10), test::uniform(rng, -10, 10), test::uniform(rng, -kPi, kPi)};
}

Eigen::Vector2d landmark_away_from(const Pose2D& p, std::mt19937_64& rng) {
  const double r = test::uniform(rng, 0.5, 20.0), a = test::uniform(rng, -kPi, kPi);
  return p.position() + r * Eigen::Vector2d(std::cos(a), std::sin(a));
}

}  // namespace

TEST(MotionMean, Examples) {
  const Pose2D quarter = motion_mean({0, 0, 0}, {1, 1}, kPi / 2);
  EXPECT_NEAR(quarter.x, 1.0, 1e-12);
  EXPECT_NEAR(quarter.y, 1.0, 1e-12);
  EXPECT_NEAR(quarter.theta, kPi / 2, 1e-12);

  const Pose2D straight = motion_mean({0, 0, 0}, {1, 0}, 2.0);
  EXPECT_DOUBLE_EQ(straight.x, 2.0);
  EXPECT_DOUBLE_EQ(straight.y, 0.0);
  EXPECT_DOUBLE_EQ(straight.theta, 0.0);

  const Pose2D still = motion_mean({3, -1, 2.0}, {0, 0}, 0.7);
  EXPECT_DOUBLE_EQ(still.x, 3.0);
  EXPECT_DOUBLE_EQ(still.y, -1.0);
  EXPECT_DOUBLE_EQ(still.theta, 2.0);
}

TEST(MotionMean, ContinuousAcrossStraightLineThreshold) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const Pose2D p = random_pose(rng);
    const double v = test::uniform(rng, -2, 2), dt = test::uniform(rng, 0.01, 1.0);
    const Pose2D curved = motion_mean(p, {v, 1e-7 * (i % 2 ? 1 : -1) * 10}, dt);  // 1e-6: curved branch
    const Pose2D straight = motion_mean(p, {v, 0.0}, dt);
    EXPECT_LT(std::hypot(curved.x - straight.x, curved.y - straight.y), 1e-6);
    const Pose2D tiny = motion_mean(p, {v, 1e-7}, dt);  // straight branch
    EXPECT_LT(std::hypot(tiny.x - straight.x, tiny.y - straight.y), 1e-6);
  }
}

TEST(MotionMean, RejectsNonPositiveDt) { EXPECT_THROW(motion_mean({}, {1, 0}, 0.0), std::invalid_argument); }

TEST(ControlNoiseCov, Examples) {
  const Eigen::Matrix2d a = control_noise_cov({1, 0}, {0.1, 0.05, 0.05, 0.1});
  EXPECT_NEAR(a(0, 0), 0.01, 1e-15);
  EXPECT_NEAR(a(1, 1), 0.0025, 1e-15);
  EXPECT_EQ(a(0, 1), 0.0);
  EXPECT_TRUE(control_noise_cov({0, 0}, {1, 1, 1, 1}).isZero(0.0));
  const Eigen::Matrix2d b = control_noise_cov({1, 1}, {1, 1, 1, 1});
  EXPECT_DOUBLE_EQ(b(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(b(1, 1), 4.0);
  // magnitudes, not signs
  EXPECT_EQ(control_noise_cov({-1, -1}, {1, 2, 3, 4}), control_noise_cov({1, 1}, {1, 2, 3, 4}));
}

TEST(SampleMotion, ZeroNoiseEqualsMean) {
  std::mt19937_64 rng(9);
  const Pose2D p(1, 2, 0.3);
  const Pose2D a = sample_motion(p, {1.0, 0.4}, 0.5, {}, rng);
  const Pose2D b = motion_mean(p, {1.0, 0.4}, 0.5);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.theta, b.theta);
}

TEST(SampleMotion, SeedDeterministic) {
  const MotionNoiseParams noise{0.1, 0.01, 0.01, 0.1};
  std::mt19937_64 r1(42), r2(42);
  for (int i = 0; i < 10; ++i) {
    const Pose2D a = sample_motion({0, 0, 0}, {1, 0.5}, 0.1, noise, r1);
    const Pose2D b = sample_motion({0, 0, 0}, {1, 0.5}, 0.1, noise, r2);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.theta, b.theta);
  }
}

TEST(SampleMotion, MonteCarloMeanMatchesModel) {
  std::mt19937_64 rng(2024);
  const MotionNoiseParams noise{0.02, 0.0, 0.02, 0.0};
  const int n = 100000;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero(), sum_sq = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d s = sample_motion({0, 0, 0}, {1, 0.5}, 0.1, noise, rng).vector();
    sum += s;
    sum_sq += s.cwiseProduct(s);
  }
  const Eigen::Vector3d mean = sum / n;
  const Eigen::Vector3d se = ((sum_sq / n - mean.cwiseProduct(mean)) / n).cwiseSqrt();
  const Eigen::Vector3d expected = motion_mean({0, 0, 0}, {1, 0.5}, 0.1).vector();
  for (int k = 0; k < 3; ++k) EXPECT_LT(std::abs(mean(k) - expected(k)), 3.0 * se(k) + 1e-9) << "coordinate " << k;
}

TEST(Measure, Examples) {
  const RangeBearing a = measure({0, 0, 0}, LandmarkId{4}, {1, 1});
  EXPECT_NEAR(a.r, std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(a.phi, kPi / 4, 1e-15);
  EXPECT_EQ(a.landmark_id.value, 4);
  const RangeBearing b = measure({1, 1, kPi / 2}, LandmarkId{0}, {1, 2});
  EXPECT_NEAR(b.r, 1.0, 1e-15);
  EXPECT_NEAR(b.phi, 0.0, 1e-15);
  EXPECT_THROW(measure({1, 1, 0}, LandmarkId{0}, {1, 1}), GeometryError);
}

TEST(Measure, RangeInvariantUnderRotation) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 500; ++i) {
    const Pose2D p = random_pose(rng);
    const Eigen::Vector2d lm = landmark_away_from(p, rng);
    const double dtheta = test::uniform(rng, -4, 4);
    const RangeBearing a = measure(p, LandmarkId{}, lm);
    const RangeBearing b = measure({p.x, p.y, p.theta + dtheta}, LandmarkId{}, lm);
    EXPECT_EQ(a.r, b.r);
    EXPECT_NEAR(test::angle_distance(b.phi, a.phi - dtheta), 0.0, 1e-12);
  }
}

TEST(InverseMeasure, ExamplesAndRoundTrip) {
  EXPECT_TRUE(test::near_abs(inverse_measure({0, 0, 0}, {LandmarkId{}, std::sqrt(2.0), kPi / 4}),
                             Eigen::Vector2d(1, 1), 1e-15));
  EXPECT_TRUE(test::near_abs(inverse_measure({0, 0, 0}, {LandmarkId{}, 1.0, 0.0}), Eigen::Vector2d(1, 0), 0.0));
  EXPECT_THROW(inverse_measure({0, 0, 0}, {LandmarkId{}, 0.0, 0.0}), GeometryError);

  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const Pose2D p = random_pose(rng);
    const RangeBearing z{LandmarkId{3}, test::uniform(rng, 0.1, 30), test::uniform(rng, -kPi, kPi)};
    const RangeBearing back = measure(p, LandmarkId{3}, inverse_measure(p, z));
    EXPECT_NEAR(back.r, z.r, 1e-10);
    EXPECT_NEAR(test::angle_distance(back.phi, z.phi), 0.0, 1e-10);
  }
}

TEST(MeasurementJacobians, Examples) {
  const MeasurementJacobians h = measurement_jacobians({0, 0, 0}, {1, 0});
  EXPECT_TRUE(test::near_abs(h.landmark, Eigen::Matrix2d::Identity(), 1e-15));
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    const Pose2D p = random_pose(rng);
    const MeasurementJacobians j = measurement_jacobians(p, landmark_away_from(p, rng));
    EXPECT_EQ(Eigen::Matrix2d(j.pose.leftCols<2>()), Eigen::Matrix2d(-j.landmark));
    EXPECT_EQ(j.pose(0, 2), 0.0);
    EXPECT_EQ(j.pose(1, 2), -1.0);
  }
  EXPECT_THROW(measurement_jacobians({1, 1, 0}, {1, 1}), GeometryError);
}

TEST(MeasurementJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 300; ++i) {
    const Pose2D p = random_pose(rng);
    const Eigen::Vector2d lm = landmark_away_from(p, rng);
    const MeasurementJacobians h = measurement_jacobians(p, lm);
    const auto by_pose = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return measure(Pose2D(x(0), x(1), x(2)), LandmarkId{}, lm).vector();
    };
    const auto by_lm = [&](const Eigen::VectorXd& m) -> Eigen::VectorXd {
      return measure(p, LandmarkId{}, m).vector();
    };
    EXPECT_TRUE(test::near_relative(h.pose, test::numeric_jacobian(by_pose, p.vector(), 1e-6, {1}), 1e-5));
    EXPECT_TRUE(test::near_relative(h.landmark, test::numeric_jacobian(by_lm, lm, 1e-6, {1}), 1e-5));
  }
}

TEST(MotionJacobians, Examples) {
  const MotionJacobians still = motion_jacobians({1, 2, 0.3}, {0, 0}, 0.5);
  EXPECT_TRUE(test::near_abs(still.pose, Eigen::Matrix3d::Identity(), 0.0));
  // either side of the straight-line threshold
  const Pose2D p(0.5, -0.2, 1.1);
  const MotionJacobians below = motion_jacobians(p, {1.2, 0.5 * kStraightLineTurnRate}, 0.8);
  const MotionJacobians above = motion_jacobians(p, {1.2, 2.0 * kStraightLineTurnRate}, 0.8);
  EXPECT_TRUE(test::near_abs(below.pose, above.pose, 1e-6));
  EXPECT_TRUE(test::near_abs(below.control, above.control, 1e-6));
}

TEST(MotionJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 300; ++i) {
    const Pose2D p = random_pose(rng);
    const ControlInput u{test::uniform(rng, -2, 2), i % 5 == 0 ? 0.0 : test::uniform(rng, -1, 1)};
    const double dt = test::uniform(rng, 0.05, 2.0);
    const MotionJacobians j = motion_jacobians(p, u, dt);
    const auto by_pose = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return motion_mean(Pose2D(x(0), x(1), x(2)), u, dt).vector();
    };
    EXPECT_TRUE(test::near_relative(j.pose, test::numeric_jacobian(by_pose, p.vector(), 1e-6, {2}), 1e-5));
    if (std::abs(u.w) > 1e-3) {  // differencing across the branch is not meaningful
      const auto by_control = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
        return motion_mean(p, {c(0), c(1)}, dt).vector();
      };
      EXPECT_TRUE(
          test::near_relative(j.control, test::numeric_jacobian(by_control, Eigen::Vector2d(u.v, u.w), 1e-6, {2}), 1e-5));
    }
  }
}

TEST(InverseMeasurementJacobians, MatchFiniteDifferences) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 300; ++i) {
    const Pose2D p = random_pose(rng);
    const RangeBearing z{LandmarkId{}, test::uniform(rng, 0.2, 20), test::uniform(rng, -kPi, kPi)};
    const InverseMeasurementJacobians j = inverse_measurement_jacobians(p, z);
    const auto by_pose = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      return inverse_measure(Pose2D(x(0), x(1), x(2)), z);
    };
    const auto by_z = [&](const Eigen::VectorXd& m) -> Eigen::VectorXd {
      return inverse_measure(p, {LandmarkId{}, m(0), m(1)});
    };
    EXPECT_TRUE(test::near_relative(j.pose, test::numeric_jacobian(by_pose, p.vector()), 1e-5));
    EXPECT_TRUE(test::near_relative(j.measurement, test::numeric_jacobian(by_z, z.vector()), 1e-5));
  }
}

TEST(SensorNoiseParams, CovarianceIsDiagonalVariances) {
  const SensorNoiseParams s{0.3, 0.05};
  const Eigen::Matrix2d r = s.covariance();
  EXPECT_DOUBLE_EQ(r(0, 0), 0.09);
  EXPECT_DOUBLE_EQ(r(1, 1), 0.0025);
  EXPECT_EQ(r(0, 1), 0.0);
}
