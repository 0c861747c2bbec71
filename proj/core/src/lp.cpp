#include "mcft/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/LU>

#include "mcft/error.hpp"

namespace mcft {

LpProblem LpProblem::with_columns(Eigen::Index n) {
  LpProblem p;
  p.cost = Eigen::VectorXd::Zero(n);
  p.ineq.resize(0, n);
  p.ineq_rhs.resize(0);
  p.eq.resize(0, n);
  p.eq_rhs.resize(0);
  return p;
}

void LpProblem::check_dimensions() const {
  const Eigen::Index n = cost.size();
  if (ineq.cols() != n || eq.cols() != n || ineq.rows() != ineq_rhs.size() ||
      eq.rows() != eq_rhs.size()) {
    throw ContractViolation("LP dimensions are inconsistent");
  }
  if (!cost.allFinite() || !ineq.allFinite() || !eq.allFinite() || !ineq_rhs.allFinite() ||
      !eq_rhs.allFinite()) {
    throw ContractViolation("LP coefficients must be finite");
  }
}

namespace {

// Equality form [A_ineq S 0; A_eq 0 0 | artificials] z = rhs, rhs >= 0.
// Structural columns first, then one slack per inequality row, then the
// artificials of rows that need one.
struct StandardForm {
  Eigen::Index n = 0, mi = 0, me = 0, m = 0, total = 0;
  Eigen::MatrixXd M;
  Eigen::VectorXd rhs;
  Eigen::VectorXd sign;
  std::vector<Eigen::Index> art_col;  // per row (combined index), -1 if none
  std::vector<char> is_art;           // per column
  std::vector<int> art_row;           // per column, -1 unless artificial

  explicit StandardForm(const LpProblem& p) {
    n = p.num_columns();
    mi = p.num_ineq();
    me = p.num_eq();
    m = mi + me;
    sign.resize(m);
    rhs.resize(m);
    art_col.assign(static_cast<std::size_t>(m), -1);
    Eigen::Index num_art = 0;
    for (Eigen::Index r = 0; r < m; ++r) {
      const double b = r < mi ? p.ineq_rhs(r) : p.eq_rhs(r - mi);
      sign(r) = b < 0.0 ? -1.0 : 1.0;
      rhs(r) = std::abs(b);
      if (r >= mi || sign(r) < 0.0) art_col[static_cast<std::size_t>(r)] = n + mi + num_art++;
    }
    total = n + mi + num_art;
    M = Eigen::MatrixXd::Zero(m, total);
    if (mi > 0) M.topLeftCorner(mi, n) = p.ineq;
    if (me > 0) M.bottomLeftCorner(me, n) = p.eq;
    for (Eigen::Index r = 0; r < m; ++r) M.row(r).head(n) *= sign(r);
    for (Eigen::Index r = 0; r < mi; ++r) M(r, n + r) = sign(r);
    is_art.assign(static_cast<std::size_t>(total), 0);
    art_row.assign(static_cast<std::size_t>(total), -1);
    for (Eigen::Index r = 0; r < m; ++r) {
      const Eigen::Index a = art_col[static_cast<std::size_t>(r)];
      if (a >= 0) {
        M(r, a) = 1.0;
        is_art[static_cast<std::size_t>(a)] = 1;
        art_row[static_cast<std::size_t>(a)] = static_cast<int>(r);
      }
    }
  }

  // Cold-start basic column of row r.
  Eigen::Index cold_column(Eigen::Index r) const {
    const Eigen::Index a = art_col[static_cast<std::size_t>(r)];
    return a >= 0 ? a : n + r;
  }

  std::optional<Eigen::Index> column_of(const BasisEntry& e) const {
    switch (e.kind) {
      case BasisEntry::Kind::kColumn:
        if (e.index >= 0 && e.index < n) return e.index;
        break;
      case BasisEntry::Kind::kSlack:
        if (e.index >= 0 && e.index < mi) return n + e.index;
        break;
      case BasisEntry::Kind::kIneqArtificial:
        if (e.index >= 0 && e.index < mi && art_col[static_cast<std::size_t>(e.index)] >= 0) {
          return art_col[static_cast<std::size_t>(e.index)];
        }
        break;
      case BasisEntry::Kind::kEqArtificial:
        if (e.index >= 0 && e.index < me) return art_col[static_cast<std::size_t>(mi + e.index)];
        break;
    }
    return std::nullopt;
  }

  BasisEntry entry_of(Eigen::Index col) const {
    if (col < n) return {BasisEntry::Kind::kColumn, col};
    if (col < n + mi) return {BasisEntry::Kind::kSlack, col - n};
    const int r = art_row[static_cast<std::size_t>(col)];
    if (r < mi) return {BasisEntry::Kind::kIneqArtificial, r};
    return {BasisEntry::Kind::kEqArtificial, r - mi};
  }
};

enum class Outcome { kOptimal, kUnbounded, kLimit };

class Simplex {
 public:
  Simplex(const StandardForm& sf, const LpOptions& opt) : sf_(sf), opt_(opt) {}

  // Installs a basis; false if it is singular or primal infeasible.
  bool install(const std::vector<Eigen::Index>& columns) {
    if (static_cast<Eigen::Index>(columns.size()) != sf_.m) return false;
    basis_ = columns;
    in_basis_.assign(static_cast<std::size_t>(sf_.total), 0);
    for (Eigen::Index c : basis_) {
      if (in_basis_[static_cast<std::size_t>(c)]) return false;
      in_basis_[static_cast<std::size_t>(c)] = 1;
    }
    if (!refactor()) return false;
    return sf_.m == 0 || xb_.minCoeff() >= -opt_.feasibility_tol;
  }

  Outcome run(const Eigen::VectorXd& c) {
    int degenerate_run = 0;
    int since_refactor = 0;
    bool bland = false;
    const Eigen::Index m = sf_.m;
    Eigen::VectorXd cb(m);
    while (true) {
      if (iterations_ >= opt_.max_iterations) return Outcome::kLimit;
      for (Eigen::Index i = 0; i < m; ++i) cb(i) = c(basis_[static_cast<std::size_t>(i)]);
      const Eigen::VectorXd y = binv_.transpose() * cb;

      Eigen::Index q = -1;
      double best = -opt_.optimality_tol;
      for (Eigen::Index j = 0; j < sf_.total; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)] || sf_.is_art[static_cast<std::size_t>(j)]) continue;
        const double d = c(j) - y.dot(sf_.M.col(j));
        if (d < -opt_.optimality_tol) {
          if (bland) {
            q = j;
            break;
          }
          if (d < best) {
            best = d;
            q = j;
          }
        }
      }
      if (q < 0) return Outcome::kOptimal;

      const Eigen::VectorXd u = binv_ * sf_.M.col(q);
      Eigen::Index r = -1;
      double theta = std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m; ++i) {
        if (u(i) <= opt_.pivot_tol) continue;
        const double t = std::max(0.0, xb_(i)) / u(i);
        bool take = false;
        if (r < 0 || t < theta - 1e-12) {
          take = true;
        } else if (t <= theta + 1e-12) {
          take = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(r)]
                       : u(i) > u(r);
        }
        if (take) {
          r = i;
          theta = t;
        }
      }
      if (r < 0) return Outcome::kUnbounded;

      if (theta <= opt_.feasibility_tol) {
        if (++degenerate_run >= opt_.bland_after_degenerate) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(r, q, u, theta);
      ++iterations_;
      if (++since_refactor >= opt_.refactor_every) {
        since_refactor = 0;
        if (!refactor()) throw InternalError("simplex basis became singular");
      }
    }
  }

  // Pivots basic artificials out on any usable non-artificial column. Rows
  // where none exists are redundant and keep their artificial at zero.
  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < sf_.m; ++i) {
      if (!sf_.is_art[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])]) continue;
      Eigen::Index q = -1;
      double best = opt_.pivot_tol;
      for (Eigen::Index j = 0; j < sf_.total; ++j) {
        if (in_basis_[static_cast<std::size_t>(j)] || sf_.is_art[static_cast<std::size_t>(j)]) continue;
        const double alpha = std::abs(binv_.row(i).dot(sf_.M.col(j)));
        if (alpha > best) {
          best = alpha;
          q = j;
        }
      }
      if (q < 0) continue;
      const Eigen::VectorXd u = binv_ * sf_.M.col(q);
      xb_(i) = 0.0;
      pivot(i, q, u, 0.0);
    }
  }

  bool refactor() {
    const Eigen::Index m = sf_.m;
    if (m == 0) {
      binv_.resize(0, 0);
      xb_.resize(0);
      return true;
    }
    Eigen::MatrixXd B(m, m);
    for (Eigen::Index i = 0; i < m; ++i) B.col(i) = sf_.M.col(basis_[static_cast<std::size_t>(i)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    lu.setThreshold(1e-11);
    if (lu.rank() < m) return false;
    binv_ = lu.inverse();
    xb_ = binv_ * sf_.rhs;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (xb_(i) < 0.0 && xb_(i) > -opt_.feasibility_tol) xb_(i) = 0.0;
    }
    return true;
  }

  Eigen::VectorXd duals(const Eigen::VectorXd& c) const {
    Eigen::VectorXd cb(sf_.m);
    for (Eigen::Index i = 0; i < sf_.m; ++i) cb(i) = c(basis_[static_cast<std::size_t>(i)]);
    return binv_.transpose() * cb;
  }

  double artificial_sum(Eigen::Index* worst_row) const {
    double sum = 0.0, worst = 0.0;
    for (Eigen::Index i = 0; i < sf_.m; ++i) {
      const Eigen::Index col = basis_[static_cast<std::size_t>(i)];
      if (!sf_.is_art[static_cast<std::size_t>(col)]) continue;
      sum += std::max(0.0, xb_(i));
      if (xb_(i) > worst) {
        worst = xb_(i);
        *worst_row = sf_.art_row[static_cast<std::size_t>(col)];
      }
    }
    return sum;
  }

  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const Eigen::VectorXd& xb() const { return xb_; }
  int iterations() const { return iterations_; }

 private:
  void pivot(Eigen::Index r, Eigen::Index q, const Eigen::VectorXd& u, double theta) {
    xb_ -= theta * u;
    xb_(r) = theta;
    for (Eigen::Index i = 0; i < sf_.m; ++i) {
      if (xb_(i) < 0.0 && xb_(i) > -opt_.feasibility_tol) xb_(i) = 0.0;
    }
    const double piv = u(r);
    binv_.row(r) /= piv;
    for (Eigen::Index i = 0; i < sf_.m; ++i) {
      if (i != r && u(i) != 0.0) binv_.row(i) -= u(i) * binv_.row(r);
    }
    in_basis_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = 0;
    in_basis_[static_cast<std::size_t>(q)] = 1;
    basis_[static_cast<std::size_t>(r)] = q;
  }

  const StandardForm& sf_;
  const LpOptions& opt_;
  std::vector<Eigen::Index> basis_;
  std::vector<char> in_basis_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  int iterations_ = 0;
};

}  // namespace

LpSolution LpSolver::solve(const LpProblem& problem) {
  problem.check_dimensions();
  const StandardForm sf(problem);
  Simplex simplex(sf, options_);

  last_warm_ = false;
  if (!basis_.empty()) {
    std::vector<Eigen::Index> cols;
    std::vector<char> seen(static_cast<std::size_t>(sf.total), 0);
    for (const BasisEntry& e : basis_) {
      const auto c = sf.column_of(e);
      if (c && !seen[static_cast<std::size_t>(*c)]) {
        seen[static_cast<std::size_t>(*c)] = 1;
        cols.push_back(*c);
      }
    }
    for (Eigen::Index r = basis_ineq_; r < sf.mi; ++r) cols.push_back(sf.cold_column(r));
    for (Eigen::Index r = basis_eq_; r < sf.me; ++r) cols.push_back(sf.cold_column(sf.mi + r));
    last_warm_ = simplex.install(cols);
  }
  if (!last_warm_) {
    std::vector<Eigen::Index> cols(static_cast<std::size_t>(sf.m));
    for (Eigen::Index r = 0; r < sf.m; ++r) cols[static_cast<std::size_t>(r)] = sf.cold_column(r);
    if (!simplex.install(cols)) throw InternalError("slack/artificial basis rejected");
  }

  LpSolution sol;
  auto finish_basis = [&] {
    basis_.clear();
    for (Eigen::Index c : simplex.basis()) basis_.push_back(sf.entry_of(c));
    basis_ineq_ = sf.mi;
    basis_eq_ = sf.me;
  };

  // Phase one: drive the artificials to zero.
  Eigen::VectorXd c1 = Eigen::VectorXd::Zero(sf.total);
  for (Eigen::Index j = 0; j < sf.total; ++j) {
    if (sf.is_art[static_cast<std::size_t>(j)]) c1(j) = 1.0;
  }
  Outcome out = simplex.run(c1);
  if (out == Outcome::kUnbounded) throw InternalError("phase-one LP reported unbounded");
  if (out == Outcome::kLimit) {
    sol.status = LpStatus::kIterationLimit;
    sol.iterations = simplex.iterations();
    basis_.clear();
    return sol;
  }
  Eigen::Index worst = -1;
  const double infeas = simplex.artificial_sum(&worst);
  if (infeas > options_.feasibility_tol * (1.0 + sf.rhs.lpNorm<Eigen::Infinity>()) * 10.0) {
    sol.status = LpStatus::kInfeasible;
    sol.infeasible_row = static_cast<int>(worst);
    sol.iterations = simplex.iterations();
    basis_.clear();
    return sol;
  }
  simplex.drive_out_artificials();

  // Phase two on the original objective.
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(sf.total);
  c2.head(sf.n) = problem.cost;
  out = simplex.run(c2);
  if (out == Outcome::kUnbounded) throw InternalError("LP is unbounded");
  sol.iterations = simplex.iterations();
  if (out == Outcome::kLimit) {
    sol.status = LpStatus::kIterationLimit;
    basis_.clear();
    return sol;
  }
  if (!simplex.refactor()) throw InternalError("optimal basis is singular");

  sol.status = LpStatus::kOptimal;
  sol.x = Eigen::VectorXd::Zero(sf.n);
  for (Eigen::Index i = 0; i < sf.m; ++i) {
    const Eigen::Index col = simplex.basis()[static_cast<std::size_t>(i)];
    if (col < sf.n) sol.x(col) = std::max(0.0, simplex.xb()(i));
  }
  const Eigen::VectorXd y = simplex.duals(c2);
  sol.pi.resize(sf.mi);
  sol.sigma.resize(sf.me);
  for (Eigen::Index r = 0; r < sf.mi; ++r) {
    const double pi = -sf.sign(r) * y(r);
    // Dual feasibility of the slack column holds to the optimality tolerance.
    sol.pi(r) = pi < 0.0 && pi > -options_.optimality_tol ? 0.0 : pi;
  }
  for (Eigen::Index r = 0; r < sf.me; ++r) sol.sigma(r) = sf.sign(sf.mi + r) * y(sf.mi + r);
  sol.objective = problem.cost.dot(sol.x);
  sol.dual_objective = -problem.ineq_rhs.dot(sol.pi) + problem.eq_rhs.dot(sol.sigma);
  finish_basis();
  return sol;
}

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  LpSolver solver(options);
  return solver.solve(problem);
}

}  // namespace mcft
