#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "mcft/types.hpp"

namespace mcft {

struct GatingConfig {
  int max_gap = 3;      // frames; transitions may skip up to max_gap - 1 frames
  double gamma = 2.0;   // radius factor, in units of gap * mean box diagonal
};

using DetPair = std::pair<std::size_t, std::size_t>;

// Ordered pairs (i, j) of indices into `detections` with
// 1 <= frame(j) - frame(i) <= max_gap and a center distance within
// gamma * gap * mean diagonal of the two boxes. Sorted by (i, j).
std::vector<DetPair> permissible_transitions(std::span<const Detection> detections,
                                             const GatingConfig& gating);

enum class EdgeKind { kObservation, kTransition, kStart, kTermination, kBypass };

struct Edge {
  std::size_t id = 0;
  EdgeKind kind = EdgeKind::kObservation;
  std::size_t tail = 0;
  std::size_t head = 0;
  int commodity = -1;  // -1 for shared (observation, transition) edges
  std::size_t det_from = 0;  // observation/start/termination: the detection
  std::size_t det_to = 0;    // transition: target detection
};

// Multi-source / multi-sink DAG over the detections of one window.
//
// Node layout: u_i = 2i, v_i = 2i + 1 for detection i, then s_k = 2N + 2k and
// n_k = 2N + 2k + 1 for commodity k (k = 0 is the dummy commodity).
//
// Edge-id layout: observation edges [0, N), transition edges [N, N + |E|),
// then one block of 2N + 1 edges per commodity: start edges (by detection),
// termination edges (by detection), bypass (s_k, n_k). Shared edges, the ones
// carrying the unit coupling capacity, are exactly the prefix [0, N + |E|).
class FlowNetwork {
 public:
  FlowNetwork() = default;

  std::size_t num_detections() const { return detections_.size(); }
  std::size_t num_commodities() const { return demands_.size(); }
  std::size_t num_nodes() const { return 2 * num_detections() + 2 * num_commodities(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_transitions() const { return transitions_.size(); }
  std::size_t num_shared_edges() const { return num_detections() + num_transitions(); }

  const std::vector<Detection>& detections() const { return detections_; }
  const std::vector<DetPair>& transitions() const { return transitions_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t id) const { return edges_[id]; }
  const std::vector<int>& demands() const { return demands_; }
  int demand(std::size_t k) const { return demands_[k]; }

  std::size_t u_node(std::size_t i) const { return 2 * i; }
  std::size_t v_node(std::size_t i) const { return 2 * i + 1; }
  std::size_t source(std::size_t k) const { return 2 * num_detections() + 2 * k; }
  std::size_t sink(std::size_t k) const { return 2 * num_detections() + 2 * k + 1; }

  bool is_shared(std::size_t edge_id) const { return edge_id < num_shared_edges(); }
  std::size_t observation_edge(std::size_t i) const { return i; }
  std::size_t transition_edge(std::size_t t) const { return num_detections() + t; }
  std::size_t commodity_base(std::size_t k) const {
    return num_shared_edges() + k * (2 * num_detections() + 1);
  }
  std::size_t start_edge(std::size_t k, std::size_t i) const { return commodity_base(k) + i; }
  std::size_t termination_edge(std::size_t k, std::size_t i) const {
    return commodity_base(k) + num_detections() + i;
  }
  std::size_t bypass_edge(std::size_t k) const {
    return commodity_base(k) + 2 * num_detections();
  }

  // Edge ids leaving `node` that commodity k may use, ascending.
  const std::vector<std::size_t>& out_edges(std::size_t node) const { return out_[node]; }

  // Is this edge usable by commodity k (shared, or owned by k)?
  bool usable_by(std::size_t edge_id, std::size_t k) const {
    const Edge& e = edges_[edge_id];
    return e.commodity < 0 || static_cast<std::size_t>(e.commodity) == k;
  }

  // Builds from an explicit transition set. `detections` must be sorted by
  // frame with unique det_ids; every transition must strictly increase the
  // frame. Throws MalformedInput otherwise.
  static FlowNetwork from_transitions(std::vector<Detection> detections,
                                      std::vector<DetPair> transitions,
                                      std::vector<int> demands);

 private:
  std::vector<Detection> detections_;
  std::vector<DetPair> transitions_;
  std::vector<Edge> edges_;
  std::vector<int> demands_;
  std::vector<std::vector<std::size_t>> out_;
};

struct Trajectory;

// Sorts detections by (frame, det_id), gates transitions and attaches demands
// {d0, 1, ..., 1} for the K = trajectories.size() tracked commodities.
FlowNetwork build_network(std::vector<Detection> detections,
                          std::span<const Trajectory> trajectories, int dummy_demand,
                          const GatingConfig& gating);

// Same, with the number of tracked commodities given directly.
FlowNetwork build_network(std::vector<Detection> detections, std::size_t num_tracked,
                          int dummy_demand, const GatingConfig& gating);

// Kahn's algorithm, ties resolved by the smallest node id. Throws
// InternalError if a cycle is found.
std::vector<std::size_t> topological_order(const FlowNetwork& network);

}  // namespace mcft
