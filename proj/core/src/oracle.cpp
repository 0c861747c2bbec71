#include "mcft/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>

#include "mcft/error.hpp"

namespace mcft::oracle {

std::vector<EdgePath> enumerate_paths(const FlowNetwork& network, std::size_t commodity) {
  if (commodity >= network.num_commodities()) throw ContractViolation("commodity out of range");
  std::vector<EdgePath> paths;
  EdgePath stack;
  const std::size_t sink = network.sink(commodity);

  auto walk = [&](auto&& self, std::size_t node) -> void {
    if (node == sink) {
      if (paths.size() >= kMaxPaths) throw TooLargeError("more than 10^6 paths; oracle refuses");
      paths.push_back(stack);
      return;
    }
    for (std::size_t e : network.out_edges(node)) {
      if (!network.usable_by(e, commodity)) continue;
      stack.push_back(e);
      self(self, network.edge(e).head);
      stack.pop_back();
    }
  };
  walk(walk, network.source(commodity));
  return paths;
}

namespace {

using Bits = std::vector<std::uint64_t>;

struct Candidate {
  double cost = 0.0;
  Bits shared;
  bool empty = true;
};

bool overlaps(const Bits& a, const Bits& b) {
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (a[w] & b[w]) return true;
  }
  return false;
}

void merge(Bits& into, const Bits& from, bool set) {
  for (std::size_t w = 0; w < into.size(); ++w) {
    if (set) {
      into[w] |= from[w];
    } else {
      into[w] &= ~from[w];
    }
  }
}

class Search {
 public:
  Search(std::vector<std::vector<Candidate>> candidates, std::vector<int> demands,
         std::size_t words)
      : cand_(std::move(candidates)), demands_(std::move(demands)), used_(words, 0) {
    min_cost_.resize(cand_.size());
    suffix_bound_.assign(cand_.size() + 1, 0.0);
    for (std::size_t k = 0; k < cand_.size(); ++k) {
      double m = std::numeric_limits<double>::infinity();
      for (const Candidate& c : cand_[k]) m = std::min(m, c.cost);
      min_cost_[k] = m;
    }
    for (std::size_t k = cand_.size(); k-- > 0;) {
      suffix_bound_[k] = suffix_bound_[k + 1] + (demands_[k] > 0 ? demands_[k] * min_cost_[k] : 0.0);
    }
    current_.resize(cand_.size());
  }

  void run() { choose(0, 0, 0, 0.0); }

  bool found() const { return found_; }
  double best() const { return best_; }
  const std::vector<std::vector<std::size_t>>& best_choice() const { return best_choice_; }

 private:
  void choose(std::size_t k, int slot, std::size_t from, double acc) {
    if (++nodes_ > kMaxSearchNodes) throw TooLargeError("oracle search exceeded its node budget");
    if (k == cand_.size()) {
      if (acc < best_ - 1e-12) {
        best_ = acc;
        best_choice_ = current_;
        found_ = true;
      }
      return;
    }
    if (slot == demands_[k]) {
      choose(k + 1, 0, 0, acc);
      return;
    }
    const int remaining = demands_[k] - slot;
    const double bound = acc + remaining * min_cost_[k] + suffix_bound_[k + 1];
    if (bound >= best_ - 1e-12) return;
    for (std::size_t g = from; g < cand_[k].size(); ++g) {
      const Candidate& c = cand_[k][g];
      if (!c.empty && overlaps(used_, c.shared)) continue;
      merge(used_, c.shared, true);
      current_[k].push_back(g);
      // Only shared-edge-free paths may repeat.
      choose(k, slot + 1, c.empty ? g : g + 1, acc + c.cost);
      current_[k].pop_back();
      merge(used_, c.shared, false);
    }
  }

  std::vector<std::vector<Candidate>> cand_;
  std::vector<int> demands_;
  Bits used_;
  std::vector<double> min_cost_;
  std::vector<double> suffix_bound_;
  std::vector<std::vector<std::size_t>> current_;
  std::vector<std::vector<std::size_t>> best_choice_;
  double best_ = std::numeric_limits<double>::infinity();
  bool found_ = false;
  std::size_t nodes_ = 0;
};

}  // namespace

IlpSolution brute_force_ilp(const FlowNetwork& network, std::span<const CostVector> costs) {
  const std::size_t num_k = network.num_commodities();
  if (costs.size() != num_k) throw ContractViolation("one cost vector per commodity required");
  const std::size_t words = (network.num_shared_edges() + 63) / 64;

  IlpSolution sol;
  sol.paths.resize(num_k);
  std::vector<std::vector<Candidate>> candidates(num_k);
  for (std::size_t k = 0; k < num_k; ++k) {
    sol.paths[k] = enumerate_paths(network, k);
    for (const EdgePath& p : sol.paths[k]) {
      Candidate c;
      c.shared.assign(words, 0);
      for (std::size_t e : p) {
        c.cost += costs[k][e];
        if (network.is_shared(e)) {
          c.shared[e / 64] |= std::uint64_t{1} << (e % 64);
          c.empty = false;
        }
      }
      candidates[k].push_back(std::move(c));
    }
  }

  Search search(std::move(candidates), network.demands(), words);
  search.run();
  if (!search.found()) throw InternalError("no feasible integer flow exists");
  sol.objective = search.best();
  sol.chosen = search.best_choice();
  return sol;
}

}  // namespace mcft::oracle
