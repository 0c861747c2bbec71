#include "mcft/trajectory.hpp"

#include "mcft/error.hpp"

namespace mcft {

Trajectory Trajectory::spawn(int track_id, const Detection& det, double aggressiveness) {
  Trajectory t;
  t.track_id = track_id;
  t.model = SimilarityModel::identity(det.feature.size(), aggressiveness);
  t.associate(det);
  return t;
}

Eigen::Vector2d Trajectory::velocity() const {
  if (history.size() < 2) return Eigen::Vector2d::Zero();
  const CommittedBox& prev = history[history.size() - 2];
  const CommittedBox& last = history.back();
  const double dt = static_cast<double>(last.frame - prev.frame);
  return {(last.box.cx() - prev.box.cx()) / dt, (last.box.cy() - prev.box.cy()) / dt};
}

void Trajectory::associate(const Detection& det) {
  if (!history.empty() && det.frame <= last_frame()) {
    throw ContractViolation("associations must move forward in time");
  }
  history.push_back({det.frame, det.box});
  recent_features.push_back(det.feature);
  while (recent_features.size() > kTemplateLength) recent_features.pop_front();
  appearance = mean_template(recent_features);
  consecutive_misses = 0;
}

Box predict(const Trajectory& traj, int frame) {
  if (traj.empty()) throw ContractViolation("cannot predict an empty trajectory");
  if (frame <= traj.last_frame()) throw ContractViolation("predictions are forward-only");
  const Box& last = traj.last_box();
  const Eigen::Vector2d v = traj.velocity();
  const double gap = static_cast<double>(frame - traj.last_frame());
  return Box::from_center(last.cx() + v.x() * gap, last.cy() + v.y() * gap, last.w, last.h);
}

Feature mean_template(const std::deque<Feature>& features) {
  if (features.empty()) throw ContractViolation("template needs at least one feature");
  Feature sum = Feature::Zero(features.front().size());
  for (const Feature& f : features) sum += f;
  return normalized(sum);
}

}  // namespace mcft
