#include "mcft/costs.hpp"

#include <cmath>
#include <limits>

#include "mcft/error.hpp"
#include "parallel.hpp"

namespace mcft {

void CostConfig::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  for (double v : {termination_cost, dummy_start_cost, bypass_cost_tracked, bypass_cost_dummy}) {
    if (!std::isfinite(v)) throw ConfigError("cost constants must be finite");
  }
}

double observation_cost(const Trajectory& traj, const Detection& det) {
  return -similarity(traj.model, traj.appearance, det.feature);
}

double dummy_observation_cost(const Detection& det) { return -det.score; }

double transition_cost(const Trajectory& traj, const Detection& from, const Detection& to) {
  return -similarity(traj.model, from.feature, to.feature);
}

double dummy_transition_cost(const Detection& from, const Detection& to) {
  if (from.feature.size() != to.feature.size()) {
    throw ContractViolation("feature dimension mismatch");
  }
  const double denom = from.feature.norm() * to.feature.norm();
  return denom > 0.0 ? -from.feature.dot(to.feature) / denom : 0.0;
}

double start_cost(const Trajectory& traj, const Detection& det, double eta) {
  const int gap = det.frame - traj.last_frame();
  const Box predicted = predict(traj, det.frame);
  return -std::pow(eta, gap) * iou(predicted, det.box);
}

CostVector assemble_cost_vector(const FlowNetwork& network, std::size_t commodity,
                                std::span<const Trajectory> trajectories,
                                const CostConfig& config) {
  if (commodity >= network.num_commodities()) {
    throw ContractViolation("commodity index out of range");
  }
  if (network.num_commodities() != trajectories.size() + 1) {
    throw ContractViolation("network commodities do not match the trajectory count");
  }
  const auto& dets = network.detections();
  const std::size_t n = dets.size();
  CostVector c{commodity,
               std::vector<double>(network.num_edges(), std::numeric_limits<double>::infinity())};

  if (commodity == 0) {
    for (std::size_t i = 0; i < n; ++i) c[network.observation_edge(i)] = dummy_observation_cost(dets[i]);
    for (std::size_t t = 0; t < network.num_transitions(); ++t) {
      const auto& [i, j] = network.transitions()[t];
      c[network.transition_edge(t)] = dummy_transition_cost(dets[i], dets[j]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      c[network.start_edge(0, i)] = config.dummy_start_cost;
      c[network.termination_edge(0, i)] = config.termination_cost;
    }
    c[network.bypass_edge(0)] = config.bypass_cost_dummy;
    return c;
  }

  const Trajectory& traj = trajectories[commodity - 1];
  if (traj.empty() || traj.model.dim() == 0 || traj.appearance.size() == 0) {
    throw ContractViolation("tracked commodity lacks a similarity model or template");
  }
  // W a_j for every detection, reused by observation and transition costs.
  Eigen::MatrixXd projected(traj.model.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (dets[i].feature.size() != traj.model.dim()) {
      throw ContractViolation("feature dimension mismatch");
    }
    projected.col(static_cast<Eigen::Index>(i)) = traj.model.W * dets[i].feature;
  }
  for (std::size_t i = 0; i < n; ++i) {
    c[network.observation_edge(i)] =
        -traj.appearance.dot(projected.col(static_cast<Eigen::Index>(i)));
  }
  for (std::size_t t = 0; t < network.num_transitions(); ++t) {
    const auto& [i, j] = network.transitions()[t];
    c[network.transition_edge(t)] =
        -dets[i].feature.dot(projected.col(static_cast<Eigen::Index>(j)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    c[network.start_edge(commodity, i)] = start_cost(traj, dets[i], config.eta);
    c[network.termination_edge(commodity, i)] = config.termination_cost;
  }
  c[network.bypass_edge(commodity)] = config.bypass_cost_tracked;
  return c;
}

std::vector<CostVector> assemble_all_costs(const FlowNetwork& network,
                                           std::span<const Trajectory> trajectories,
                                           const CostConfig& config, int threads) {
  std::vector<CostVector> out(network.num_commodities());
  detail::parallel_for(out.size(), threads, [&](std::size_t k) {
    out[k] = assemble_cost_vector(network, k, trajectories, config);
  });
  return out;
}

}  // namespace mcft
