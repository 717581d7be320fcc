#include "support.hpp"

#include "ufslam/metrics.hpp"

using namespace ufslam;
using namespace ufslam::metrics;

namespace {

Particle particle(double x, double y, double theta, double weight) {
  Particle p;
  p.pose.mean = Eigen::Vector3d(x, y, theta);
  p.weight = weight;
  p.log_weight = std::log(weight);
  return p;
}

sim::SimLog log_along_x(int steps) {
  sim::SimLog log;
  log.dt = 1.0;
  for (int k = 0; k < steps; ++k) {
    sim::SimStep st;
    st.true_pose = Pose2D(k + 1.0, 0.0, 0.0);
    st.issued = st.applied = {1.0, 0.0};
    log.steps.push_back(st);
  }
  return log;
}

}  // namespace

TEST(PoseError, Examples) {
  EXPECT_EQ(pose_error({1, 2, 0.3}, {1, 2, 0.3}).position, 0.0);
  EXPECT_EQ(pose_error({1, 2, 0.3}, {1, 2, 0.3}).heading, 0.0);
  EXPECT_DOUBLE_EQ(pose_error({0, 0, 0}, {3, 4, 0}).position, 5.0);
  EXPECT_NEAR(pose_error({0, 0, 0}, {0, 0, 2.0 * kPi}).heading, 0.0, 1e-15);
  EXPECT_NEAR(pose_error({0, 0, kPi - 0.1}, {0, 0, -kPi + 0.1}).heading, 0.2, 1e-12);
}

TEST(EstimatedState, Examples) {
  FilterState one;
  one.particles = {particle(1, 2, 0.5, 1.0)};
  one.particles[0].landmarks[LandmarkId{3}] = {LandmarkId{3}, {4, 5}, Eigen::Matrix2d::Identity()};
  const EstimatedState single = estimated_state(one);
  EXPECT_EQ(single.pose.vector(), Eigen::Vector3d(1, 2, 0.5));
  EXPECT_EQ(single.landmarks.at(LandmarkId{3}), Eigen::Vector2d(4, 5));

  FilterState two;
  two.particles = {particle(0, 0, 0, 0.5), particle(2, 0, 0, 0.5)};
  EXPECT_TRUE(test::near_abs(estimated_state(two).pose.vector(), Eigen::Vector3d(1, 0, 0), 1e-15));

  FilterState skewed;
  skewed.particles = {particle(0, 0, 0, 0.75), particle(4, 0, 0, 0.25)};
  EXPECT_NEAR(estimated_state(skewed).pose.x, 1.0, 1e-15);
  EXPECT_NEAR(estimated_pose(skewed).x, 1.0, 1e-15);
}

TEST(EstimatedState, CircularHeadingAndPartialLandmarks) {
  FilterState s;
  s.particles = {particle(0, 0, kPi - 0.1, 0.5), particle(0, 0, -kPi + 0.1, 0.5)};
  s.particles[0].landmarks[LandmarkId{1}] = {LandmarkId{1}, {2, 0}, Eigen::Matrix2d::Identity()};
  s.particles[0].landmarks[LandmarkId{2}] = {LandmarkId{2}, {0, 2}, Eigen::Matrix2d::Identity()};
  s.particles[1].landmarks[LandmarkId{1}] = {LandmarkId{1}, {4, 0}, Eigen::Matrix2d::Identity()};
  const EstimatedState e = estimated_state(s);
  EXPECT_NEAR(test::angle_distance(e.pose.theta, kPi), 0.0, 1e-12);
  EXPECT_TRUE(test::near_abs(e.landmarks.at(LandmarkId{1}), Eigen::Vector2d(3, 0), 1e-15));
  // held by one particle only: its own mean, not diluted by the other weight
  EXPECT_TRUE(test::near_abs(e.landmarks.at(LandmarkId{2}), Eigen::Vector2d(0, 2), 1e-15));
  EXPECT_EQ(landmark_count(s), 2u);
}

TEST(LandmarkCount, UnionOverParticles) {
  FilterState s;
  s.particles = {particle(0, 0, 0, 0.5), particle(0, 0, 0, 0.5)};
  EXPECT_EQ(landmark_count(s), 0u);
  for (int id : {1, 4}) s.particles[0].landmarks[LandmarkId{id}] = {LandmarkId{id}, {}, {}};
  for (int id : {1, 2, 4}) s.particles[1].landmarks[LandmarkId{id}] = {LandmarkId{id}, {}, {}};
  EXPECT_EQ(landmark_count(s), 3u);
  s.particles[0].landmarks[LandmarkId{2}] = {LandmarkId{2}, {}, {}};
  EXPECT_EQ(landmark_count(s), 3u);
}

TEST(RunSummary, ZeroAndConstantErrors) {
  const sim::SimLog log = log_along_x(4);
  const std::vector<LandmarkTruth> truth{{LandmarkId{0}, {1, 1}}, {LandmarkId{1}, {2, 2}}};
  std::vector<StepEstimate> exact, offset;
  for (const auto& st : log.steps) {
    exact.push_back({st.true_pose, 10.0, false, 2});
    offset.push_back({Pose2D(st.true_pose.x, st.true_pose.y + 1.0, 0.0), 3.0, true, 2});
  }
  const std::map<LandmarkId, Eigen::Vector2d> map{{LandmarkId{0}, {1, 1}}, {LandmarkId{1}, {2, 2}}};
  const RunStats zero = run_summary(log, exact, truth, map);
  EXPECT_EQ(zero.max_position_error, 0.0);
  EXPECT_EQ(zero.mean_position_error, 0.0);
  EXPECT_EQ(zero.landmark_rmse, 0.0);
  EXPECT_EQ(zero.matched_landmarks, 2u);
  EXPECT_EQ(zero.resample_count, 0u);

  const RunStats one = run_summary(log, offset, truth, map);
  EXPECT_DOUBLE_EQ(one.max_position_error, 1.0);
  EXPECT_DOUBLE_EQ(one.mean_position_error, 1.0);
  EXPECT_DOUBLE_EQ(one.final_position_error, 1.0);
  EXPECT_EQ(one.resample_count, 4u);
  EXPECT_EQ(one.n_eff, std::vector<double>(4, 3.0));
}

TEST(RunSummary, ArithmeticExample) {
  const sim::SimLog log = log_along_x(3);
  std::vector<StepEstimate> est;
  const double errors[] = {0.2, 1.5, 0.7};
  for (std::size_t k = 0; k < 3; ++k) {
    est.push_back({Pose2D(log.steps[k].true_pose.x + errors[k], 0.0, 0.0), 1.0, false, 0});
  }
  const RunStats s = run_summary(log, est, {}, {});
  EXPECT_DOUBLE_EQ(s.max_position_error, 1.5);
  EXPECT_NEAR(s.mean_position_error, 0.8, 1e-12);
  EXPECT_EQ(s.matched_landmarks, 0u);
}

TEST(RunSummary, StepCountMismatchThrows) {
  const sim::SimLog log = log_along_x(3);
  const std::vector<StepEstimate> est(2);
  EXPECT_THROW(run_summary(log, est, {}, {}), std::invalid_argument);
}

TEST(RunSummary, MaxDominatesMeanRandomized) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const sim::SimLog log = log_along_x(20);
    std::vector<StepEstimate> est;
    for (const auto& st : log.steps) {
      est.push_back({Pose2D(st.true_pose.x + test::uniform(rng, -2, 2), test::uniform(rng, -2, 2),
                            test::uniform(rng, -kPi, kPi)),
                     1.0, false, 0});
    }
    const RunStats s = run_summary(log, est, {}, {});
    EXPECT_GE(s.max_position_error, s.mean_position_error);
    EXPECT_GE(s.mean_position_error, 0.0);
    EXPECT_LE(s.max_heading_error, kPi);
  }
}

TEST(LandmarkRmse, MatchedIdsOnlyAndRelabelInvariant) {
  const std::vector<LandmarkTruth> truth{{LandmarkId{0}, {0, 0}}, {LandmarkId{1}, {10, 0}}, {LandmarkId{2}, {0, 10}}};
  const std::map<LandmarkId, Eigen::Vector2d> est{{LandmarkId{0}, {3, 4}}, {LandmarkId{2}, {0, 10}},
                                                  {LandmarkId{9}, {100, 100}}};
  std::size_t matched = 0;
  EXPECT_NEAR(landmark_rmse(truth, est, &matched), std::sqrt(25.0 / 2.0), 1e-12);
  EXPECT_EQ(matched, 2u);

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<LandmarkTruth> t;
    std::map<LandmarkId, Eigen::Vector2d> e;
    for (int i = 0; i < 10; ++i) {
      const Eigen::Vector2d p(test::uniform(rng, -5, 5), test::uniform(rng, -5, 5));
      t.push_back({LandmarkId{i}, p});
      if (i % 3 != 0) e[LandmarkId{i}] = p + Eigen::Vector2d(test::uniform(rng, -1, 1), test::uniform(rng, -1, 1));
    }
    std::vector<int> perm(10);
    std::iota(perm.begin(), perm.end(), 100);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<LandmarkTruth> t2;
    std::map<LandmarkId, Eigen::Vector2d> e2;
    for (const auto& lm : t) t2.push_back({LandmarkId{perm[static_cast<std::size_t>(lm.id.value)]}, lm.position});
    std::sort(t2.begin(), t2.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& [id, p] : e) e2[LandmarkId{perm[static_cast<std::size_t>(id.value)]}] = p;
    EXPECT_NEAR(landmark_rmse(t, e), landmark_rmse(t2, e2), 1e-12);
  }
}

TEST(Aggregate, MeanAndSampleDeviation) {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Aggregate a = aggregate(v);
  EXPECT_DOUBLE_EQ(a.mean, 2.5);
  EXPECT_NEAR(a.stddev, std::sqrt(5.0 / 3.0), 1e-15);
  EXPECT_EQ(a.count, 4u);
  const std::vector<double> one{7.0};
  EXPECT_EQ(aggregate(one).stddev, 0.0);
  EXPECT_EQ(aggregate(std::vector<double>{}).count, 0u);
}
