#include "mcft/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <string>
#include <unordered_set>

#include "mcft/error.hpp"
#include "mcft/trajectory.hpp"

namespace mcft {

std::vector<DetPair> permissible_transitions(std::span<const Detection> detections,
                                             const GatingConfig& gating) {
  if (gating.max_gap < 1 || !(gating.gamma > 0.0)) {
    throw ContractViolation("gating requires max_gap >= 1 and gamma > 0");
  }
  std::vector<DetPair> pairs;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const Detection& a = detections[i];
    for (std::size_t j = 0; j < detections.size(); ++j) {
      const Detection& b = detections[j];
      const int gap = b.frame - a.frame;
      if (gap < 1 || gap > gating.max_gap) continue;
      const double dist = std::hypot(b.box.cx() - a.box.cx(), b.box.cy() - a.box.cy());
      const double diag = 0.5 * (a.box.diagonal() + b.box.diagonal());
      if (dist <= gating.gamma * gap * diag) pairs.emplace_back(i, j);
    }
  }
  return pairs;
}

FlowNetwork FlowNetwork::from_transitions(std::vector<Detection> detections,
                                          std::vector<DetPair> transitions,
                                          std::vector<int> demands) {
  if (demands.empty()) throw MalformedInput("network needs at least the dummy commodity");
  for (int d : demands) {
    if (d < 0) throw MalformedInput("demands must be non-negative");
  }
  std::unordered_set<int> ids;
  for (std::size_t i = 0; i < detections.size(); ++i) {
    validate(detections[i]);
    if (!ids.insert(detections[i].det_id).second) {
      throw MalformedInput("duplicate det_id " + std::to_string(detections[i].det_id));
    }
    if (i > 0 && detections[i].frame < detections[i - 1].frame) {
      throw MalformedInput("detections must be sorted by frame");
    }
  }
  std::sort(transitions.begin(), transitions.end());
  transitions.erase(std::unique(transitions.begin(), transitions.end()), transitions.end());
  for (const auto& [i, j] : transitions) {
    if (i >= detections.size() || j >= detections.size()) {
      throw MalformedInput("transition references a missing detection");
    }
    if (detections[j].frame <= detections[i].frame) {
      throw MalformedInput("transition must strictly increase the frame index");
    }
  }

  FlowNetwork net;
  net.detections_ = std::move(detections);
  net.transitions_ = std::move(transitions);
  net.demands_ = std::move(demands);

  const std::size_t n = net.detections_.size();
  const std::size_t num_k = net.demands_.size();
  net.edges_.reserve(net.num_shared_edges() + num_k * (2 * n + 1));
  auto add = [&net](EdgeKind kind, std::size_t tail, std::size_t head, int commodity,
                    std::size_t from, std::size_t to) {
    net.edges_.push_back({net.edges_.size(), kind, tail, head, commodity, from, to});
  };
  for (std::size_t i = 0; i < n; ++i) {
    add(EdgeKind::kObservation, net.u_node(i), net.v_node(i), -1, i, i);
  }
  for (const auto& [i, j] : net.transitions_) {
    add(EdgeKind::kTransition, net.v_node(i), net.u_node(j), -1, i, j);
  }
  for (std::size_t k = 0; k < num_k; ++k) {
    const int c = static_cast<int>(k);
    for (std::size_t i = 0; i < n; ++i) add(EdgeKind::kStart, net.source(k), net.u_node(i), c, i, i);
    for (std::size_t i = 0; i < n; ++i) add(EdgeKind::kTermination, net.v_node(i), net.sink(k), c, i, i);
    add(EdgeKind::kBypass, net.source(k), net.sink(k), c, 0, 0);
  }

  net.out_.assign(net.num_nodes(), {});
  for (const Edge& e : net.edges_) net.out_[e.tail].push_back(e.id);
  return net;
}

FlowNetwork build_network(std::vector<Detection> detections, std::size_t num_tracked,
                          int dummy_demand, const GatingConfig& gating) {
  std::stable_sort(detections.begin(), detections.end(), [](const Detection& a, const Detection& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.det_id < b.det_id;
  });
  auto transitions = permissible_transitions(detections, gating);
  std::vector<int> demands(num_tracked + 1, 1);
  demands[0] = dummy_demand;
  return FlowNetwork::from_transitions(std::move(detections), std::move(transitions),
                                       std::move(demands));
}

FlowNetwork build_network(std::vector<Detection> detections,
                          std::span<const Trajectory> trajectories, int dummy_demand,
                          const GatingConfig& gating) {
  return build_network(std::move(detections), trajectories.size(), dummy_demand, gating);
}

std::vector<std::size_t> topological_order(const FlowNetwork& network) {
  const std::size_t num_nodes = network.num_nodes();
  std::vector<int> indegree(num_nodes, 0);
  for (const Edge& e : network.edges()) ++indegree[e.head];

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < num_nodes; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(num_nodes);
  while (!ready.empty()) {
    const std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t id : network.out_edges(v)) {
      if (--indegree[network.edge(id).head] == 0) ready.push(network.edge(id).head);
    }
  }
  if (order.size() != num_nodes) throw InternalError("flow network contains a cycle");
  return order;
}

}  // namespace mcft
