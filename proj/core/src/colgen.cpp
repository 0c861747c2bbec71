#include "mcft/colgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <set>
#include <utility>

#include "mcft/error.hpp"
#include "parallel.hpp"

namespace mcft {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntegralityTol = 1e-7;
constexpr int kMaxBranchNodes = 200000;

double modified_cost(const FlowNetwork& network, const CostVector& costs,
                     std::span<const double> pi, std::size_t edge_id) {
  return network.is_shared(edge_id) ? costs[edge_id] + pi[edge_id] : costs[edge_id];
}

// Cheapest modified cost from every node to n_k (infinity if unreachable).
std::vector<double> distances_to_sink(const FlowNetwork& network,
                                      std::span<const std::size_t> order,
                                      const CostVector& costs, std::span<const double> pi) {
  const std::size_t k = costs.commodity;
  std::vector<double> dist(network.num_nodes(), kInf);
  dist[network.sink(k)] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t node = *it;
    if (node == network.sink(k)) continue;
    double best = kInf;
    for (std::size_t e : network.out_edges(node)) {
      if (!network.usable_by(e, k)) continue;
      const double tail = dist[network.edge(e).head];
      if (tail == kInf) continue;
      best = std::min(best, modified_cost(network, costs, pi, e) + tail);
    }
    dist[node] = best;
  }
  return dist;
}

using ColumnKey = std::pair<std::size_t, std::vector<std::size_t>>;

}  // namespace

std::vector<std::size_t> PathColumn::detections(const FlowNetwork& network) const {
  std::vector<std::size_t> out;
  for (std::size_t e : edges) {
    if (network.edge(e).kind == EdgeKind::kObservation) out.push_back(network.edge(e).det_from);
  }
  return out;
}

PathColumn make_column(const FlowNetwork& network, std::size_t commodity,
                       std::vector<std::size_t> edges, const CostVector& costs) {
  if (edges.empty()) throw ContractViolation("empty path");
  std::size_t at = network.source(commodity);
  PathColumn col;
  col.commodity = commodity;
  for (std::size_t e : edges) {
    if (e >= network.num_edges() || !network.usable_by(e, commodity) ||
        network.edge(e).tail != at) {
      throw ContractViolation("edges do not form a path of the commodity");
    }
    at = network.edge(e).head;
    col.cost += costs[e];
    if (network.is_shared(e)) col.shared.push_back(e);
  }
  if (at != network.sink(commodity)) throw ContractViolation("path does not end at the sink");
  std::sort(col.shared.begin(), col.shared.end());
  col.edges = std::move(edges);
  return col;
}

PricingResult price(const FlowNetwork& network, std::span<const std::size_t> order,
                    const CostVector& costs, std::span<const double> pi) {
  if (pi.size() != network.num_shared_edges()) {
    throw ContractViolation("duals must cover every shared edge");
  }
  const std::size_t k = costs.commodity;
  const std::vector<double> dist = distances_to_sink(network, order, costs, pi);

  std::vector<std::size_t> edges;
  std::size_t at = network.source(k);
  while (at != network.sink(k)) {
    const double target = dist[at];
    const double slack = 1e-12 * (1.0 + std::abs(target));
    std::size_t chosen = network.num_edges();
    for (std::size_t e : network.out_edges(at)) {
      if (!network.usable_by(e, k)) continue;
      const double tail = dist[network.edge(e).head];
      if (tail == kInf) continue;
      if (modified_cost(network, costs, pi, e) + tail <= target + slack) {
        chosen = e;
        break;
      }
    }
    if (chosen == network.num_edges()) throw InternalError("pricing lost its shortest path");
    edges.push_back(chosen);
    at = network.edge(chosen).head;
  }

  PricingResult result;
  result.path = make_column(network, k, std::move(edges), costs);
  for (std::size_t e : result.path.edges) result.zeta += modified_cost(network, costs, pi, e);
  return result;
}

PricingResult price(const FlowNetwork& network, const CostVector& costs,
                    std::span<const double> pi) {
  const auto order = topological_order(network);
  return price(network, order, costs, pi);
}

bool optimality_check(std::span<const double> zeta, std::span<const double> sigma, double tol) {
  if (zeta.size() != sigma.size()) throw ContractViolation("zeta and sigma differ in length");
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    if (zeta[k] < sigma[k] - tol) return false;
  }
  return true;
}

double lagrangian_lower_bound(double v_rmlp, std::span<const double> zeta,
                              std::span<const double> sigma, std::span<const int> demands) {
  if (zeta.size() != sigma.size() || zeta.size() != demands.size()) {
    throw ContractViolation("zeta, sigma and demands differ in length");
  }
  double bound = v_rmlp;
  for (std::size_t k = 0; k < zeta.size(); ++k) {
    bound += demands[k] * std::min(0.0, zeta[k] - sigma[k]);
  }
  return bound;
}

MasterProblem build_master(const FlowNetwork& network, std::span<const PathColumn> pool) {
  MasterProblem mp;
  std::vector<long> row_of(network.num_shared_edges(), -1);
  for (const PathColumn& col : pool) {
    for (std::size_t e : col.shared) {
      if (row_of[e] < 0) {
        row_of[e] = static_cast<long>(mp.coupling_edges.size());
        mp.coupling_edges.push_back(e);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(pool.size());
  const auto rows = static_cast<Eigen::Index>(mp.coupling_edges.size());
  const auto num_k = static_cast<Eigen::Index>(network.num_commodities());
  LpProblem& lp = mp.lp;
  lp.cost.resize(n);
  lp.ineq = Eigen::MatrixXd::Zero(rows, n);
  lp.ineq_rhs = Eigen::VectorXd::Ones(rows);
  lp.eq = Eigen::MatrixXd::Zero(num_k, n);
  lp.eq_rhs.resize(num_k);
  for (Eigen::Index k = 0; k < num_k; ++k) lp.eq_rhs(k) = network.demand(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < n; ++j) {
    const PathColumn& col = pool[static_cast<std::size_t>(j)];
    lp.cost(j) = col.cost;
    for (std::size_t e : col.shared) lp.ineq(row_of[e], j) = 1.0;
    lp.eq(static_cast<Eigen::Index>(col.commodity), j) = 1.0;
  }
  return mp;
}

namespace {

struct BranchRow {
  Eigen::Index column;
  bool at_most;  // x_j <= bound, else x_j >= bound
  double bound;
};

class BranchAndBound {
 public:
  BranchAndBound(std::span<const PathColumn> pool, const MasterProblem& master,
                 const LpOptions& options, double upper_bound)
      : pool_(pool), master_(master), solver_(options), best_(upper_bound) {}

  IntegerSolution solve() {
    std::vector<BranchRow> rows;
    dfs(rows);
    result_.nodes = nodes_;
    return result_;
  }

 private:
  void dfs(std::vector<BranchRow>& rows) {
    if (++nodes_ > kMaxBranchNodes) return;
    LpProblem lp = master_.lp;
    const Eigen::Index base = lp.num_ineq();
    const Eigen::Index n = lp.num_columns();
    lp.ineq.conservativeResize(base + static_cast<Eigen::Index>(rows.size()), n);
    lp.ineq_rhs.conservativeResize(base + static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto r = base + static_cast<Eigen::Index>(i);
      lp.ineq.row(r).setZero();
      lp.ineq(r, rows[i].column) = rows[i].at_most ? 1.0 : -1.0;
      lp.ineq_rhs(r) = rows[i].at_most ? rows[i].bound : -rows[i].bound;
    }
    const LpSolution sol = solver_.solve(lp);
    if (sol.status != LpStatus::kOptimal) return;
    if (sol.objective >= best_ - 1e-9) return;

    Eigen::Index branch_col = -1;
    double most = kIntegralityTol;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double frac = sol.x(j) - std::floor(sol.x(j));
      const double dist = std::min(frac, 1.0 - frac);
      if (dist > most) {
        most = dist;
        branch_col = j;
      }
    }
    if (branch_col < 0) {
      std::vector<int> mult(static_cast<std::size_t>(n));
      double obj = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        mult[static_cast<std::size_t>(j)] = static_cast<int>(std::lround(sol.x(j)));
        obj += pool_[static_cast<std::size_t>(j)].cost * mult[static_cast<std::size_t>(j)];
      }
      if (obj < best_) {
        best_ = obj;
        result_.multiplicity = std::move(mult);
        result_.objective = obj;
        result_.found = true;
      }
      return;
    }
    const double value = sol.x(branch_col);
    const double lo = std::floor(value), hi = std::ceil(value);
    const bool down_first = value - lo <= 0.5;
    for (int pass = 0; pass < 2; ++pass) {
      const bool down = (pass == 0) == down_first;
      rows.push_back({branch_col, down, down ? lo : hi});
      dfs(rows);
      rows.pop_back();
    }
  }

  std::span<const PathColumn> pool_;
  const MasterProblem& master_;
  LpSolver solver_;
  double best_;
  int nodes_ = 0;
  IntegerSolution result_;
};

IntegerSolution branch_and_bound(const FlowNetwork& network, std::span<const PathColumn> pool,
                                 const LpOptions& options, double upper_bound) {
  const MasterProblem master = build_master(network, pool);
  BranchAndBound bnb(pool, master, options, upper_bound);
  return bnb.solve();
}

// All s_k -> n_k paths whose reduced cost (c + pi)^T r - sigma_k is at most
// `threshold`. Returns false if more than `limit` paths qualify.
bool enumerate_reduced_paths(const FlowNetwork& network, std::span<const std::size_t> order,
                             const CostVector& costs, std::span<const double> pi, double sigma,
                             double threshold, std::size_t limit,
                             std::vector<std::vector<std::size_t>>& out) {
  const std::size_t k = costs.commodity;
  const std::vector<double> dist = distances_to_sink(network, order, costs, pi);
  const double budget = sigma + threshold;
  std::vector<std::size_t> stack;
  bool ok = true;
  std::function<void(std::size_t, double)> walk = [&](std::size_t node, double prefix) {
    if (!ok) return;
    if (node == network.sink(k)) {
      if (out.size() >= limit) {
        ok = false;
        return;
      }
      out.push_back(stack);
      return;
    }
    for (std::size_t e : network.out_edges(node)) {
      if (!network.usable_by(e, k)) continue;
      const std::size_t head = network.edge(e).head;
      if (dist[head] == kInf) continue;
      const double next = prefix + modified_cost(network, costs, pi, e);
      if (next + dist[head] > budget) continue;
      stack.push_back(e);
      walk(head, next);
      stack.pop_back();
    }
  };
  walk(network.source(k), 0.0);
  return ok;
}

}  // namespace

IntegerSolution extract_integer(const FlowNetwork& network, std::span<const PathColumn> pool,
                                const LpOptions& lp_options) {
  if (pool.empty()) throw InternalError("integer extraction needs a non-empty pool");
  IntegerSolution sol = branch_and_bound(network, pool, lp_options, kInf);
  if (!sol.found) throw InternalError("column pool admits no integer solution");
  return sol;
}

const char* to_string(CgStatus status) {
  switch (status) {
    case CgStatus::kProvenOptimal: return "proven-optimal";
    case CgStatus::kNearOptimal: return "near-optimal";
    case CgStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

std::vector<const PathColumn*> CGResult::paths_of(std::size_t k) const {
  std::vector<const PathColumn*> out;
  for (const PathColumn& p : paths) {
    if (p.commodity == k) out.push_back(&p);
  }
  return out;
}

CGResult column_generation(const FlowNetwork& network, std::span<const CostVector> costs,
                           const CgConfig& config) {
  const std::size_t num_k = network.num_commodities();
  if (costs.size() != num_k) throw ContractViolation("one cost vector per commodity required");
  for (std::size_t k = 0; k < num_k; ++k) {
    if (costs[k].size() != network.num_edges() || costs[k].commodity != k) {
      throw ContractViolation("cost vector does not match the network");
    }
  }
  if (config.iter_max < 1) throw ContractViolation("iter_max must be at least 1");

  const std::vector<std::size_t> order = topological_order(network);
  std::vector<PathColumn> pool;
  std::set<ColumnKey> known;
  auto add_column = [&](PathColumn col) {
    if (known.emplace(col.commodity, col.edges).second) {
      pool.push_back(std::move(col));
      return true;
    }
    return false;
  };

  const std::vector<double> zero_pi(network.num_shared_edges(), 0.0);
  for (std::size_t k = 0; k < num_k; ++k) {
    add_column(price(network, order, costs[k], zero_pi).path);
    add_column(make_column(network, k, {network.bypass_edge(k)}, costs[k]));
  }

  CGResult result;
  LpSolver solver(config.lp);
  double incumbent = kInf;
  std::vector<int> incumbent_mult;
  double best_bound = -kInf;
  std::vector<double> pi(network.num_shared_edges(), 0.0);
  std::vector<double> sigma(num_k, 0.0), zeta(num_k, 0.0);
  std::vector<PricingResult> priced(num_k);
  std::vector<int> demands = network.demands();
  double v_rmlp = kInf;

  for (int iter = 1; iter <= config.iter_max; ++iter) {
    result.iterations = iter;
    const MasterProblem master = build_master(network, pool);
    const LpSolution sol = solver.solve(master.lp);
    if (sol.status == LpStatus::kInfeasible) throw InternalError("restricted master is infeasible");
    if (sol.status != LpStatus::kOptimal) throw InternalError("restricted master hit the LP iteration limit");
    v_rmlp = sol.objective;

    CgIteration record;
    record.v_rmlp = v_rmlp;
    record.integral = true;
    for (Eigen::Index j = 0; j < sol.x.size(); ++j) {
      if (std::abs(sol.x(j) - std::round(sol.x(j))) > 1e-9) {
        record.integral = false;
        break;
      }
    }
    if (record.integral) {
      std::vector<int> mult(pool.size());
      double obj = 0.0;
      for (std::size_t j = 0; j < pool.size(); ++j) {
        mult[j] = static_cast<int>(std::lround(sol.x(static_cast<Eigen::Index>(j))));
        obj += pool[j].cost * mult[j];
      }
      if (obj < incumbent) {
        incumbent = obj;
        incumbent_mult = std::move(mult);
      }
    }

    std::fill(pi.begin(), pi.end(), 0.0);
    for (std::size_t r = 0; r < master.coupling_edges.size(); ++r) {
      pi[master.coupling_edges[r]] = sol.pi(static_cast<Eigen::Index>(r));
    }
    for (std::size_t k = 0; k < num_k; ++k) sigma[k] = sol.sigma(static_cast<Eigen::Index>(k));
    detail::parallel_for(num_k, config.threads, [&](std::size_t k) {
      priced[k] = price(network, order, costs[k], pi);
    });
    for (std::size_t k = 0; k < num_k; ++k) zeta[k] = priced[k].zeta;

    record.lower_bound = lagrangian_lower_bound(v_rmlp, zeta, sigma, demands);
    best_bound = std::max(best_bound, record.lower_bound);

    if (optimality_check(zeta, sigma, config.optimality_tol)) {
      result.lp_converged = true;
      result.history.push_back(record);
      break;
    }
    for (std::size_t k = 0; k < num_k; ++k) {
      if (zeta[k] >= sigma[k] - config.optimality_tol) continue;
      if (!add_column(priced[k].path)) {
        throw InternalError("pricing returned a column already in the pool");
      }
      ++record.columns_added;
    }
    result.history.push_back(record);
  }

  result.v_lp = result.lp_converged ? v_rmlp : best_bound;
  const double proven_tol = 1e-9;

  // Integer recovery when no retained RMLP solution closes the gap.
  if (incumbent > result.v_lp + proven_tol) {
    IntegerSolution bnb = branch_and_bound(network, pool, config.lp, incumbent);
    if (bnb.found && bnb.objective < incumbent) {
      incumbent = bnb.objective;
      incumbent_mult = std::move(bnb.multiplicity);
      result.from_branch_and_bound = true;
    }
    if (incumbent == kInf) throw InternalError("column pool admits no integer solution");

    // Any column of a strictly better integer solution has reduced cost below
    // the gap under the converged duals; adding all of them makes the pool
    // branch-and-bound exact.
    const double gap = incumbent - result.v_lp;
    if (config.close_gap && result.lp_converged && gap > proven_tol) {
      std::vector<std::vector<std::vector<std::size_t>>> extra(num_k);
      bool complete = true;
      for (std::size_t k = 0; k < num_k && complete; ++k) {
        complete = enumerate_reduced_paths(network, order, costs[k], pi, sigma[k],
                                           gap + config.optimality_tol,
                                           config.gap_enumeration_limit, extra[k]);
      }
      if (complete) {
        const std::size_t before = pool.size();
        for (std::size_t k = 0; k < num_k; ++k) {
          for (auto& edges : extra[k]) add_column(make_column(network, k, std::move(edges), costs[k]));
        }
        if (pool.size() > before) {
          incumbent_mult.resize(pool.size(), 0);
          IntegerSolution exact = branch_and_bound(network, pool, config.lp, incumbent);
          if (exact.found && exact.objective < incumbent) {
            incumbent = exact.objective;
            incumbent_mult = std::move(exact.multiplicity);
            result.from_branch_and_bound = true;
          }
        }
      }
    }
  }
  incumbent_mult.resize(pool.size(), 0);

  result.pool_size = pool.size();
  result.flow.assign(num_k, std::vector<int>(network.num_edges(), 0));
  double v_int = 0.0;
  for (std::size_t j = 0; j < pool.size(); ++j) {
    for (int c = 0; c < incumbent_mult[j]; ++c) {
      result.paths.push_back(pool[j]);
      for (std::size_t e : pool[j].edges) ++result.flow[pool[j].commodity][e];
      v_int += pool[j].cost;
    }
  }
  result.v_int = v_int;
  result.epsilon = result.v_int - result.v_lp;
  if (result.epsilon < -1e-6 * (1.0 + std::abs(result.v_lp))) {
    throw InternalError("integer objective below the LP lower bound");
  }
  if (!result.lp_converged) {
    result.status = CgStatus::kIterationLimit;
  } else {
    result.status = result.epsilon <= proven_tol ? CgStatus::kProvenOptimal : CgStatus::kNearOptimal;
  }
  return result;
}

std::string format_diagnostics(const WindowDiagnostics& d) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g,%.9g,%.6f", d.window_t, d.iterations, d.v_lp,
                d.v_int, d.epsilon, d.seconds);
  return buf;
}

}  // namespace mcft
