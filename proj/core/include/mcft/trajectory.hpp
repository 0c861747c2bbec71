#pragma once

#include <cstddef>
#include <deque>
#include <vector>

#include "mcft/simlearn.hpp"
#include "mcft/types.hpp"

namespace mcft {

struct CommittedBox {
  int frame = 0;
  Box box;
};

enum class TrackState { kActive, kTerminated };

// An existing target. Committed boxes are append-only; only frames with an
// association are stored, so `history.back().frame` is the last associated
// frame.
struct Trajectory {
  static constexpr std::size_t kTemplateLength = 10;

  int track_id = 0;
  std::vector<CommittedBox> history;
  std::deque<Feature> recent_features;  // at most kTemplateLength, oldest first
  Feature appearance;                   // unit-norm mean of recent_features
  SimilarityModel model;
  int consecutive_misses = 0;
  TrackState state = TrackState::kActive;

  // Starts a trajectory from one detection, W = identity.
  static Trajectory spawn(int track_id, const Detection& det, double aggressiveness);

  bool empty() const { return history.empty(); }
  int last_frame() const { return history.back().frame; }
  const Box& last_box() const { return history.back().box; }

  // Per-frame center velocity from the last two associated states; zero with
  // a single state.
  Eigen::Vector2d velocity() const;

  // Appends an association at a frame later than last_frame() and refreshes
  // the appearance template.
  void associate(const Detection& det);
};

// Constant-velocity prediction at `frame`, which must be after last_frame().
Box predict(const Trajectory& traj, int frame);

// Unit-norm arithmetic mean of the given features.
Feature mean_template(const std::deque<Feature>& features);

}  // namespace mcft
