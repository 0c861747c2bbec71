#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mcft/graph.hpp"
#include "mcft/trajectory.hpp"

namespace mcft {

struct CostConfig {
  double eta = 0.95;               // decay of start costs per frame of prediction
  double termination_cost = 10.0;
  double dummy_start_cost = 10.0;
  double bypass_cost_tracked = 9.5;
  double bypass_cost_dummy = 19.5;

  void validate() const;  // throws ConfigError
};

// Cost of every edge of the network for one commodity. Entries on edges the
// commodity cannot use (other commodities' start/termination/bypass edges)
// are +infinity.
struct CostVector {
  std::size_t commodity = 0;
  std::vector<double> values;

  double operator[](std::size_t edge_id) const { return values[edge_id]; }
  double& operator[](std::size_t edge_id) { return values[edge_id]; }
  std::size_t size() const { return values.size(); }
};

double observation_cost(const Trajectory& traj, const Detection& det);
double dummy_observation_cost(const Detection& det);
double transition_cost(const Trajectory& traj, const Detection& from, const Detection& to);
double dummy_transition_cost(const Detection& from, const Detection& to);

// -eta^(t_i - psi) * IoU(predict(traj, t_i), box_i); in [-1, 0].
double start_cost(const Trajectory& traj, const Detection& det, double eta);

// Commodity k >= 1 maps to trajectories[k - 1]; k = 0 is the dummy commodity.
CostVector assemble_cost_vector(const FlowNetwork& network, std::size_t commodity,
                                std::span<const Trajectory> trajectories,
                                const CostConfig& config);

std::vector<CostVector> assemble_all_costs(const FlowNetwork& network,
                                           std::span<const Trajectory> trajectories,
                                           const CostConfig& config, int threads = 1);

}  // namespace mcft
