#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mcft/costs.hpp"
#include "mcft/graph.hpp"
#include "mcft/lp.hpp"

namespace mcft {

// A source-to-sink path of one commodity, i.e. one column lambda_{k,g} of the
// path-flow master problem.
struct PathColumn {
  std::size_t commodity = 0;
  std::vector<std::size_t> edges;   // in path order, s_k first
  std::vector<std::size_t> shared;  // shared edge ids on the path, ascending
  double cost = 0.0;                // sum of the commodity's costs along edges

  bool is_bypass() const { return shared.empty(); }
  // Detection indices visited, in path order.
  std::vector<std::size_t> detections(const FlowNetwork& network) const;

  friend bool operator==(const PathColumn& a, const PathColumn& b) {
    return a.commodity == b.commodity && a.edges == b.edges;
  }
};

// Builds a column from an edge sequence; throws ContractViolation unless the
// edges form a connected s_k -> n_k path usable by commodity k.
PathColumn make_column(const FlowNetwork& network, std::size_t commodity,
                       std::vector<std::size_t> edges, const CostVector& costs);

struct PricingResult {
  PathColumn path;
  double zeta = 0.0;  // modified cost (c^k + pi)^T r of `path`
};

// Shortest s_k -> n_k path under c^k + pi, where `pi` is indexed by shared
// edge id (size num_shared_edges). Dynamic programming over `order`; among
// equal-cost paths the lexicographically smallest edge-id sequence wins.
PricingResult price(const FlowNetwork& network, std::span<const std::size_t> order,
                    const CostVector& costs, std::span<const double> pi);
PricingResult price(const FlowNetwork& network, const CostVector& costs,
                    std::span<const double> pi);

// True iff zeta_k >= sigma_k - tol for every commodity.
bool optimality_check(std::span<const double> zeta, std::span<const double> sigma,
                      double tol = 1e-7);

// v_rmlp + sum_k d_k * min(0, zeta_k - sigma_k).
double lagrangian_lower_bound(double v_rmlp, std::span<const double> zeta,
                              std::span<const double> sigma, std::span<const int> demands);

// Restricted master problem over a column pool: coupling rows for every
// shared edge used by some column (first-use order), then one convexity row
// per commodity.
struct MasterProblem {
  LpProblem lp;
  std::vector<std::size_t> coupling_edges;  // row r <-> shared edge id
};
MasterProblem build_master(const FlowNetwork& network, std::span<const PathColumn> pool);

struct IntegerSolution {
  std::vector<int> multiplicity;  // per pool column
  double objective = 0.0;
  bool found = false;
  int nodes = 0;
};

// Depth-first branch-and-bound over the pool: LP bound at every node,
// branching on the most fractional lambda. Returns the best integer
// combination of pooled columns; throws InternalError if none exists.
IntegerSolution extract_integer(const FlowNetwork& network, std::span<const PathColumn> pool,
                                const LpOptions& lp_options = {});

enum class CgStatus { kProvenOptimal, kNearOptimal, kIterationLimit };
const char* to_string(CgStatus status);

struct CgConfig {
  int iter_max = 200;
  double optimality_tol = 1e-7;
  // When the integer incumbent leaves a gap to the converged LP bound, add
  // every path whose reduced cost is below the gap before branch-and-bound.
  bool close_gap = true;
  std::size_t gap_enumeration_limit = 50000;
  int threads = 1;
  LpOptions lp;
};

struct CgIteration {
  double v_rmlp = 0.0;
  double lower_bound = 0.0;
  bool integral = false;
  std::size_t columns_added = 0;
};

struct CGResult {
  std::vector<PathColumn> paths;     // d_k paths per commodity, bypass repeated
  std::vector<std::vector<int>> flow;  // flow[k][edge_id]
  double v_int = 0.0;
  double v_lp = 0.0;
  double epsilon = 0.0;
  int iterations = 0;
  CgStatus status = CgStatus::kNearOptimal;
  bool lp_converged = false;
  bool from_branch_and_bound = false;
  std::size_t pool_size = 0;
  std::vector<CgIteration> history;

  // Paths of commodity k (d_k entries).
  std::vector<const PathColumn*> paths_of(std::size_t k) const;
};

// Column generation on the path-flow master problem: seed with the
// per-commodity shortest and bypass paths, then alternate RMLP solve,
// integral-incumbent retention, pricing and column augmentation until no
// column prices out or iter_max is hit.
CGResult column_generation(const FlowNetwork& network, std::span<const CostVector> costs,
                           const CgConfig& config = {});

struct WindowDiagnostics {
  int window_t = 0;
  int iterations = 0;
  double v_lp = 0.0;
  double v_int = 0.0;
  double epsilon = 0.0;
  double seconds = 0.0;
  CgStatus status = CgStatus::kProvenOptimal;
};

// `window_t,iters,v_lp,v_int,epsilon,seconds`
std::string format_diagnostics(const WindowDiagnostics& d);
inline constexpr const char* kDiagnosticsHeader = "window_t,iters,v_lp,v_int,epsilon,seconds";

}  // namespace mcft
