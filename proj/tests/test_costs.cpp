#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mcft/costs.hpp"
#include "mcft/error.hpp"

using namespace mcft;
using mcft::testing::det_at;
using mcft::testing::vec;

namespace {

Trajectory traj_with(const Feature& appearance, Eigen::MatrixXd W) {
  Trajectory t = Trajectory::spawn(1, det_at(0, 1, 0, 0, 10, 10, appearance), 0.1);
  t.model.W = std::move(W);
  return t;
}

}  // namespace

TEST(Costs, ObservationExamples) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_DOUBLE_EQ(observation_cost(traj_with(vec({1, 0}), I), det_at(1, 2, 0, 0, 10, 10, vec({1, 0}))), -1.0);
  EXPECT_DOUBLE_EQ(observation_cost(traj_with(vec({1, 0}), I), det_at(1, 2, 0, 0, 10, 10, vec({0, 1}))), 0.0);
  Eigen::MatrixXd W(2, 2);
  W << 0, 1, 0, 1;
  EXPECT_DOUBLE_EQ(observation_cost(traj_with(vec({1, 0}), W), det_at(1, 2, 0, 0, 10, 10, vec({0, 1}))), -1.0);
}

TEST(Costs, ObservationLinearInW) {
  Eigen::MatrixXd W(2, 2);
  W << 0.3, -0.7, 1.1, 0.4;
  const auto d = det_at(1, 2, 0, 0, 10, 10, vec({0.6, 0.8}));
  const double base = observation_cost(traj_with(vec({0.8, 0.6}), W), d);
  EXPECT_DOUBLE_EQ(observation_cost(traj_with(vec({0.8, 0.6}), 3.0 * W), d), 3.0 * base);
}

TEST(Costs, DummyObservation) {
  EXPECT_DOUBLE_EQ(dummy_observation_cost(det_at(0, 1, 0, 0, 10, 10, vec({1, 0}), 0.8)), -0.8);
  EXPECT_DOUBLE_EQ(dummy_observation_cost(det_at(0, 1, 0, 0, 10, 10, vec({1, 0}), 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(dummy_observation_cost(det_at(0, 1, 0, 0, 10, 10, vec({1, 0}), -0.3)), 0.3);
}

TEST(Costs, TransitionExamples) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const auto t = traj_with(vec({1, 0}), I);
  const auto a = det_at(1, 2, 0, 0, 10, 10, vec({1, 0}));
  const auto b = det_at(2, 3, 0, 0, 10, 10, vec({0, 1}));
  EXPECT_DOUBLE_EQ(transition_cost(t, a, a), -1.0);
  EXPECT_DOUBLE_EQ(transition_cost(t, a, b), 0.0);
  EXPECT_DOUBLE_EQ(transition_cost(traj_with(vec({1, 0}), 2.0 * I), a, a), -2.0);
}

TEST(Costs, DummyTransitionIsNegativeCosine) {
  const auto a = det_at(1, 2, 0, 0, 10, 10, vec({0.6, 0.8}));
  const auto b = det_at(2, 3, 0, 0, 10, 10, vec({1, 0}));
  const auto c = det_at(3, 3, 0, 0, 10, 10, vec({0, 1}));
  EXPECT_DOUBLE_EQ(dummy_transition_cost(a, b), -0.6);
  EXPECT_DOUBLE_EQ(dummy_transition_cost(b, b), -1.0);
  EXPECT_DOUBLE_EQ(dummy_transition_cost(b, c), 0.0);
}

TEST(Costs, PredictConstantVelocity) {
  Trajectory t = Trajectory::spawn(1, det_at(0, 1, 0, 0), 0.1);
  EXPECT_DOUBLE_EQ(predict(t, 7).cx(), 0.0);
  t.associate(det_at(1, 2, 4, 0));
  EXPECT_DOUBLE_EQ(predict(t, 4).cx(), 12.0);
  EXPECT_THROW(predict(t, 2), ContractViolation);

  Trajectory u = Trajectory::spawn(2, det_at(0, 1, 10, 10), 0.1);
  u.associate(det_at(1, 2, 8, 11));
  const Box p = predict(u, 5);
  EXPECT_DOUBLE_EQ(p.cx(), 8.0 - 6.0);
  EXPECT_DOUBLE_EQ(p.cy(), 11.0 + 3.0);
}

TEST(Costs, StartCostExamples) {
  const Trajectory t = Trajectory::spawn(1, det_at(0, 1, 0, 0), 0.1);
  EXPECT_DOUBLE_EQ(start_cost(t, det_at(1, 2, 0, 0), 0.95), -0.95);
  // Half-overlap: a 10x10 box shifted so that IoU = 0.5 needs shift 10/3.
  const auto shifted = det_at(2, 3, 10.0 / 3.0, 0);
  EXPECT_NEAR(iou(predict(t, 3), shifted.box), 0.5, 1e-12);
  EXPECT_NEAR(start_cost(t, shifted, 0.95), -0.45125, 1e-12);
  EXPECT_DOUBLE_EQ(start_cost(t, det_at(3, 2, 100, 100), 0.95), 0.0);
}

TEST(Costs, IouProperties) {
  const Box a{0, 0, 10, 10}, b{5, 0, 10, 10};
  EXPECT_DOUBLE_EQ(iou(a, b), iou(b, a));
  EXPECT_DOUBLE_EQ(iou(a, a), 1.0);
  EXPECT_NEAR(iou(a, b), 50.0 / 150.0, 1e-15);
  EXPECT_DOUBLE_EQ(iou(a, Box{20, 20, 5, 5}), 0.0);
}

TEST(Costs, AssembleDummyOnlyNetwork) {
  std::vector<Detection> d{det_at(0, 1, 0, 0), det_at(1, 2, 0, 0)};
  const auto net = build_network(d, std::size_t{0}, 20, {});
  const CostConfig cfg;
  const auto c = assemble_cost_vector(net, 0, {}, cfg);
  ASSERT_EQ(c.size(), net.num_edges());
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(c[net.start_edge(0, i)], 10.0);
    EXPECT_EQ(c[net.termination_edge(0, i)], 10.0);
  }
  EXPECT_EQ(c[net.bypass_edge(0)], cfg.bypass_cost_dummy);
  CostConfig literal;
  literal.bypass_cost_dummy = 0.0;
  EXPECT_EQ(assemble_cost_vector(net, 0, {}, literal)[net.bypass_edge(0)], 0.0);
}

TEST(Costs, AssembleTrackedCommodity) {
  std::vector<Detection> d{det_at(0, 2, 0, 0), det_at(1, 3, 0, 0)};
  std::vector<Trajectory> trajs{Trajectory::spawn(1, det_at(9, 1, 0, 0), 0.1)};
  const auto net = build_network(d, trajs, 20, {});
  const auto all = assemble_all_costs(net, trajs, {}, 2);
  ASSERT_EQ(all.size(), 2u);
  const auto& c = all[1];
  EXPECT_EQ(c.commodity, 1u);
  EXPECT_DOUBLE_EQ(c[net.start_edge(1, 0)], -0.95);
  EXPECT_NEAR(c[net.start_edge(1, 1)], -0.95 * 0.95, 1e-15);
  EXPECT_EQ(c[net.termination_edge(1, 0)], 10.0);
  EXPECT_TRUE(std::isinf(c[net.start_edge(0, 0)]));
  EXPECT_TRUE(std::isinf(all[0][net.bypass_edge(1)]));
  EXPECT_DOUBLE_EQ(c[net.observation_edge(0)], -1.0);
}

TEST(Costs, DimensionMismatchIsContractViolation) {
  std::vector<Detection> d{det_at(0, 2, 0, 0, 10, 10, vec({0, 0, 1}))};
  std::vector<Trajectory> trajs{Trajectory::spawn(1, det_at(9, 1, 0, 0), 0.1)};
  const auto net = build_network(d, trajs, 20, {});
  EXPECT_THROW(assemble_cost_vector(net, 1, trajs, {}), ContractViolation);
}

TEST(Costs, ConfigValidation) {
  CostConfig c;
  c.eta = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c.eta = 1.0;
  EXPECT_NO_THROW(c.validate());
}
