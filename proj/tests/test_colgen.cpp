#include <gtest/gtest.h>

#include <cmath>

#include "instances.hpp"
#include "mcft/colgen.hpp"
#include "mcft/error.hpp"
#include "mcft/oracle.hpp"

using namespace mcft;
using mcft::testing::placeholder;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostVector blank(const FlowNetwork& net, std::size_t k) {
  return {k, std::vector<double>(net.num_edges(), kInf)};
}

// One detection, one commodity: start, observation, termination, bypass.
std::pair<FlowNetwork, CostVector> single(double bypass) {
  FlowNetwork net = FlowNetwork::from_transitions({placeholder(0, 1)}, {}, {1});
  CostVector c = blank(net, 0);
  c[net.start_edge(0, 0)] = -0.5;
  c[net.observation_edge(0)] = -1.0;
  c[net.termination_edge(0, 0)] = 10.0;
  c[net.bypass_edge(0)] = bypass;
  return {std::move(net), std::move(c)};
}

// Three tracked commodities, each wanting a different pair out of three
// detections: the LP splits every pair path in half.
io::NetworkInstance odd_cycle() {
  std::vector<Detection> d{placeholder(0, 1), placeholder(1, 2), placeholder(2, 3)};
  io::NetworkInstance inst;
  inst.network = FlowNetwork::from_transitions(d, {{0, 1}, {0, 2}, {1, 2}}, {1, 1, 1, 1});
  const auto& net = inst.network;
  const std::size_t wanted[] = {0, 2, 1};  // (0,1), (1,2), (0,2)
  for (std::size_t k = 0; k < 4; ++k) {
    CostVector c = blank(net, k);
    for (std::size_t i = 0; i < 3; ++i) {
      c[net.observation_edge(i)] = 1.0;
      c[net.start_edge(k, i)] = k == 0 ? 100.0 : 0.0;
      c[net.termination_edge(k, i)] = 0.0;
    }
    for (std::size_t t = 0; t < 3; ++t) c[net.transition_edge(t)] = (k > 0 && wanted[k - 1] == t) ? -2.0 : 10.0;
    c[net.bypass_edge(k)] = k == 0 ? 0.0 : 1.0;
    inst.costs.push_back(std::move(c));
  }
  return inst;
}

}  // namespace

TEST(Pricing, BypassVersusDetection) {
  auto [net, c] = single(5.0);
  std::vector<double> pi(net.num_shared_edges(), 0.0);
  auto r = price(net, c, pi);
  EXPECT_TRUE(r.path.is_bypass());
  EXPECT_DOUBLE_EQ(r.zeta, 5.0);

  c[net.bypass_edge(0)] = 20.0;
  r = price(net, c, pi);
  EXPECT_FALSE(r.path.is_bypass());
  EXPECT_DOUBLE_EQ(r.zeta, 8.5);
  EXPECT_DOUBLE_EQ(r.path.cost, 8.5);

  pi[net.observation_edge(0)] = 2.0;
  r = price(net, c, pi);
  EXPECT_DOUBLE_EQ(r.zeta, 10.5);
  EXPECT_DOUBLE_EQ(r.path.cost, 8.5);
}

TEST(Pricing, TieBreakIsLexicographic) {
  // Two single-detection paths of equal cost: the smaller edge sequence wins.
  FlowNetwork net = FlowNetwork::from_transitions({placeholder(0, 1), placeholder(1, 1)}, {}, {1});
  CostVector c = blank(net, 0);
  for (std::size_t i = 0; i < 2; ++i) {
    c[net.start_edge(0, i)] = 0.0;
    c[net.observation_edge(i)] = -1.0;
    c[net.termination_edge(0, i)] = 0.0;
  }
  c[net.bypass_edge(0)] = 0.0;
  std::vector<double> pi(net.num_shared_edges(), 0.0);
  const auto r = price(net, c, pi);
  EXPECT_EQ(r.path.edges, (std::vector<std::size_t>{net.start_edge(0, 0), net.observation_edge(0),
                                                    net.termination_edge(0, 0)}));
}

TEST(Pricing, MatchesEnumerationOnRandomInstances) {
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto inst = mcft::testing::random_instance(s);
    const auto& net = inst.network;
    std::mt19937_64 rng(s);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> pi(net.num_shared_edges());
    for (double& p : pi) p = u(rng) < 0.5 ? 0.0 : u(rng);
    for (std::size_t k = 0; k < net.num_commodities(); ++k) {
      double best = kInf;
      for (const auto& path : oracle::enumerate_paths(net, k)) {
        double v = 0.0;
        for (std::size_t e : path) v += inst.costs[k][e] + (net.is_shared(e) ? pi[e] : 0.0);
        best = std::min(best, v);
      }
      EXPECT_NEAR(price(net, inst.costs[k], pi).zeta, best, 1e-12);
    }
  }
}

TEST(Termination, OptimalityCheck) {
  const std::vector<double> z{1.0, 2.0}, s{1.0, 2.0};
  EXPECT_TRUE(optimality_check(z, s));
  const std::vector<double> bad{1.0, 1.0};
  EXPECT_FALSE(optimality_check(bad, s));
  const std::vector<double> one{3.0}, one_s{3.0 + 5e-8};
  EXPECT_TRUE(optimality_check(one, one_s));
}

TEST(Termination, LagrangianBound) {
  const std::vector<int> d{20, 1};
  const std::vector<double> s{1.0, 1.0};
  EXPECT_DOUBLE_EQ(lagrangian_lower_bound(7.0, std::vector<double>{2.0, 1.0}, s, d), 7.0);
  EXPECT_DOUBLE_EQ(lagrangian_lower_bound(7.0, std::vector<double>{1.0, 0.5}, s, d), 6.5);
  EXPECT_DOUBLE_EQ(lagrangian_lower_bound(7.0, std::vector<double>{0.8, 1.0}, s, d), 3.0);
}

TEST(Master, SharedEdgeExample) {
  std::vector<Detection> d{placeholder(0, 1)};
  auto net = FlowNetwork::from_transitions(d, {}, {1, 1});
  std::vector<CostVector> costs{blank(net, 0), blank(net, 1)};
  for (std::size_t k = 0; k < 2; ++k) {
    costs[k][net.start_edge(k, 0)] = 0.0;
    costs[k][net.observation_edge(0)] = 1.0;
    costs[k][net.termination_edge(k, 0)] = 0.0;
    costs[k][net.bypass_edge(k)] = 2.0;
  }
  std::vector<PathColumn> pool;
  for (std::size_t k = 0; k < 2; ++k) {
    pool.push_back(make_column(net, k, {net.start_edge(k, 0), 0, net.termination_edge(k, 0)}, costs[k]));
    pool.push_back(make_column(net, k, {net.bypass_edge(k)}, costs[k]));
  }
  const auto master = build_master(net, pool);
  EXPECT_EQ(master.coupling_edges, (std::vector<std::size_t>{0}));
  const auto lp = solve_lp(master.lp);
  EXPECT_NEAR(lp.objective, 3.0, 1e-12);
  const auto integer = extract_integer(net, pool);
  ASSERT_TRUE(integer.found);
  EXPECT_NEAR(integer.objective, 3.0, 1e-12);
  EXPECT_EQ(integer.multiplicity[0] + integer.multiplicity[2], 1);

  const auto r = column_generation(net, costs);
  EXPECT_NEAR(r.v_int, 3.0, 1e-12);
  EXPECT_EQ(r.status, CgStatus::kProvenOptimal);
}

TEST(Master, MakeColumnValidates) {
  auto [net, c] = single(5.0);
  EXPECT_THROW(make_column(net, 0, {net.start_edge(0, 0), net.termination_edge(0, 0)}, c), ContractViolation);
  EXPECT_THROW(make_column(net, 0, {}, c), ContractViolation);
  const auto col = make_column(net, 0, {net.bypass_edge(0)}, c);
  EXPECT_TRUE(col.is_bypass());
  EXPECT_EQ(col.cost, 5.0);
}

TEST(ColumnGeneration, SingleDetectionConvergesImmediately) {
  auto [net, c] = single(20.0);
  const std::vector<CostVector> costs{c};
  const auto r = column_generation(net, costs);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_EQ(r.epsilon, 0.0);
  EXPECT_DOUBLE_EQ(r.v_int, 8.5);
  EXPECT_EQ(r.status, CgStatus::kProvenOptimal);
}

TEST(ColumnGeneration, FractionalGapIsCertified) {
  const auto inst = odd_cycle();
  const auto lp_only = [&] {
    CgConfig c;
    c.close_gap = false;
    return column_generation(inst.network, inst.costs, c);
  }();
  EXPECT_NEAR(lp_only.v_lp, 1.5, 1e-9);
  EXPECT_NEAR(lp_only.v_int, 2.0, 1e-9);
  EXPECT_NEAR(lp_only.epsilon, 0.5, 1e-9);
  EXPECT_EQ(lp_only.status, CgStatus::kNearOptimal);
  EXPECT_TRUE(lp_only.from_branch_and_bound);
  EXPECT_NEAR(oracle::brute_force_ilp(inst.network, inst.costs).objective, 2.0, 1e-12);
  EXPECT_EQ(mcft::testing::check_flow(inst.network, lp_only), "");
}

TEST(ColumnGeneration, AgreesWithOracle) {
  for (std::uint64_t s = 0; s < 120; ++s) {
    const auto inst = mcft::testing::random_instance(s);
    const auto r = column_generation(inst.network, inst.costs);
    const auto o = oracle::brute_force_ilp(inst.network, inst.costs);
    EXPECT_NEAR(r.v_int, o.objective, 1e-6) << "seed " << s;
    EXPECT_LE(r.v_lp, o.objective + 1e-9) << "seed " << s;
    EXPECT_GE(r.epsilon, -1e-9);
    EXPECT_EQ(mcft::testing::check_flow(inst.network, r), "") << "seed " << s;
    if (r.status == CgStatus::kProvenOptimal) EXPECT_NEAR(r.v_int, o.objective, 1e-9);
  }
}

TEST(ColumnGeneration, SandwichAndMonotoneHistory) {
  for (std::uint64_t s = 200; s < 260; ++s) {
    const auto inst = mcft::testing::random_instance(s, {10, 4, 3, 3, 0.7});
    const auto r = column_generation(inst.network, inst.costs);
    ASSERT_FALSE(r.history.empty());
    for (std::size_t i = 0; i < r.history.size(); ++i) {
      EXPECT_LE(r.history[i].lower_bound, r.v_lp + 1e-9);
      EXPECT_LE(r.v_lp, r.history[i].v_rmlp + 1e-9);
      if (i > 0) EXPECT_LE(r.history[i].v_rmlp, r.history[i - 1].v_rmlp + 1e-9);
    }
    if (r.lp_converged) EXPECT_NEAR(r.history.back().lower_bound, r.history.back().v_rmlp, 1e-7);
  }
}

TEST(ColumnGeneration, PathsMatchDemandsAndCosts) {
  const auto inst = mcft::testing::random_instance(77);
  const auto r = column_generation(inst.network, inst.costs);
  double total = 0.0;
  for (std::size_t k = 0; k < inst.network.num_commodities(); ++k) {
    const auto paths = r.paths_of(k);
    EXPECT_EQ(static_cast<int>(paths.size()), inst.network.demand(k));
    for (const PathColumn* p : paths) {
      double c = 0.0;
      for (std::size_t e : p->edges) c += inst.costs[k][e];
      EXPECT_EQ(c, p->cost);
      total += p->cost;
    }
  }
  EXPECT_NEAR(total, r.v_int, 1e-9);
}

TEST(ColumnGeneration, Deterministic) {
  const auto inst = mcft::testing::random_instance(5, {10, 4, 3, 3, 0.7});
  const auto a = column_generation(inst.network, inst.costs);
  CgConfig threaded;
  threaded.threads = 3;
  const auto b = column_generation(inst.network, inst.costs, threaded);
  EXPECT_EQ(a.v_int, b.v_int);
  EXPECT_EQ(a.v_lp, b.v_lp);
  EXPECT_EQ(a.paths, b.paths);
  EXPECT_EQ(a.flow, b.flow);
}

TEST(ColumnGeneration, IterationLimitKeepsValidBound) {
  for (std::uint64_t s = 0; s < 40; ++s) {
    const auto inst = mcft::testing::random_instance(s, {10, 4, 3, 3, 0.8});
    CgConfig c;
    c.iter_max = 1;
    const auto r = column_generation(inst.network, inst.costs, c);
    const auto o = oracle::brute_force_ilp(inst.network, inst.costs);
    EXPECT_LE(r.v_lp, o.objective + 1e-9);
    EXPECT_GE(r.v_int, o.objective - 1e-9);
    EXPECT_EQ(mcft::testing::check_flow(inst.network, r), "");
    if (!r.lp_converged) EXPECT_EQ(r.status, CgStatus::kIterationLimit);
  }
}

TEST(Diagnostics, Format) {
  WindowDiagnostics d{3, 4, 1.5, 2.0, 0.5, 0.00125, CgStatus::kNearOptimal};
  EXPECT_EQ(format_diagnostics(d), "3,4,1.5,2,0.5,0.001250");
  EXPECT_STREQ(kDiagnosticsHeader, "window_t,iters,v_lp,v_int,epsilon,seconds");
}
