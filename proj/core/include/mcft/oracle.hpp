#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcft/costs.hpp"
#include "mcft/graph.hpp"

namespace mcft::oracle {

// Test-only ground truth for tiny windows. Shares nothing with the column
// generation path beyond the network and cost vectors.

inline constexpr std::size_t kMaxPaths = 1'000'000;
inline constexpr std::size_t kMaxSearchNodes = 50'000'000;

// An s_k -> n_k path as its edge ids in path order.
using EdgePath = std::vector<std::size_t>;

// Every s_k -> n_k path, in depth-first order over ascending out-edge ids.
// Throws TooLargeError beyond kMaxPaths.
std::vector<EdgePath> enumerate_paths(const FlowNetwork& network, std::size_t commodity);

struct IlpSolution {
  double objective = 0.0;
  // chosen[k] lists indices into enumerate_paths(network, k), ascending,
  // with repetition only for the bypass path.
  std::vector<std::vector<std::size_t>> chosen;
  std::vector<std::vector<EdgePath>> paths;
};

// Exhaustive minimum over d_k paths per commodity with pairwise-disjoint
// shared edges. Ties go to the lexicographically smallest tuple of path
// indices. Throws TooLargeError past kMaxSearchNodes.
IlpSolution brute_force_ilp(const FlowNetwork& network, std::span<const CostVector> costs);

}  // namespace mcft::oracle
