#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace mcft {

// min cost^T x  s.t.  ineq x <= ineq_rhs,  eq x = eq_rhs,  x >= 0.
//
// For restricted master problems the inequality block holds the unit coupling
// rows and the equality block the per-commodity convexity rows. Right-hand
// sides of either sign are accepted (branching rows use negative ones).
struct LpProblem {
  Eigen::VectorXd cost;
  Eigen::MatrixXd ineq;
  Eigen::VectorXd ineq_rhs;
  Eigen::MatrixXd eq;
  Eigen::VectorXd eq_rhs;

  Eigen::Index num_columns() const { return cost.size(); }
  Eigen::Index num_ineq() const { return ineq_rhs.size(); }
  Eigen::Index num_eq() const { return eq_rhs.size(); }

  // Empty problem with n columns and no rows.
  static LpProblem with_columns(Eigen::Index n);
  void check_dimensions() const;  // throws ContractViolation
};

enum class LpStatus { kOptimal, kInfeasible, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Eigen::VectorXd x;
  // Duals under the convention -pi^T a_j + sigma^T e_j <= c_j, pi >= 0.
  Eigen::VectorXd pi;
  Eigen::VectorXd sigma;
  double objective = 0.0;
  // Dual objective -ineq_rhs^T pi + eq_rhs^T sigma.
  double dual_objective = 0.0;
  // On infeasibility: a row (ineq rows first, then eq rows) whose phase-one
  // artificial could not be driven to zero.
  int infeasible_row = -1;
  int iterations = 0;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-10;
  int bland_after_degenerate = 50;
  int refactor_every = 50;
  int max_iterations = 20000;
};

// Basic variable identity, stable while columns and rows are only appended.
struct BasisEntry {
  enum class Kind { kColumn, kSlack, kIneqArtificial, kEqArtificial };
  Kind kind = Kind::kSlack;
  // Column index for kColumn, inequality row for kSlack and kIneqArtificial,
  // equality row for kEqArtificial.
  Eigen::Index index = 0;

  friend bool operator==(const BasisEntry&, const BasisEntry&) = default;
};
using Basis = std::vector<BasisEntry>;

// Dense two-phase revised simplex with an explicit basis inverse, Dantzig
// pricing and a switch to Bland's rule after a run of degenerate pivots.
// Keeps the final basis so the next solve on an extended problem can start
// from it.
class LpSolver {
 public:
  explicit LpSolver(LpOptions options = {}) : options_(options) {}

  LpSolution solve(const LpProblem& problem);

  // Forget the stored basis; the next solve starts cold.
  void reset() { basis_.clear(); }
  const Basis& basis() const { return basis_; }
  bool last_solve_was_warm() const { return last_warm_; }

 private:
  LpOptions options_;
  Basis basis_;
  Eigen::Index basis_ineq_ = 0;  // row counts the stored basis was built for
  Eigen::Index basis_eq_ = 0;
  bool last_warm_ = false;
};

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace mcft
