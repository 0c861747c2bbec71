#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcft/colgen.hpp"
#include "mcft/costs.hpp"
#include "mcft/graph.hpp"
#include "mcft/trajectory.hpp"

namespace mcft {

struct TrackerConfig {
  int window_length = 10;          // delta t
  int dummy_demand = 20;           // d_0
  int spawn_min_length = 2;        // capped at window_length
  int terminate_after_misses = 0;  // 0 means window_length
  double aggressiveness = 0.1;     // passive-aggressive C
  int iter_max = 200;
  int threads = 1;
  std::uint64_t seed = 0;
  CostConfig cost;
  GatingConfig gating;

  int effective_spawn_length() const;
  int effective_termination() const;
  void validate() const;  // throws ConfigError
};

// Parses `key = value` lines; keys are the field names above, with cost and
// gating fields flattened (eta, termination_cost, ..., max_gap, gamma).
// Blank lines and `#` comments are skipped. Throws ConfigError.
TrackerConfig parse_tracker_config(const std::string& text, TrackerConfig base = {});
void apply_config_entry(TrackerConfig& config, const std::string& key, const std::string& value);

struct TrackOutput {
  int frame = 0;
  int track_id = 0;
  Box box;
};

struct FrameOutput {
  int frame = 0;            // committed frame t+1
  int emitted_after = 0;    // frame whose arrival produced this output
  bool flushed = false;
  std::vector<TrackOutput> boxes;
};

// Online sliding-window tracker. Each pushed frame f >= window_length solves
// the window [f - window_length + 1, f] and commits its first frame.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  // Frames must increase strictly; skipped frames are treated as empty.
  // Returns the outputs committed by this call (possibly several when frames
  // were skipped, none while the first window fills).
  std::vector<FrameOutput> push_frame(int frame, std::vector<Detection> detections);

  // Emits the residual frames of the last solved window.
  std::vector<FrameOutput> flush();

  const std::vector<Trajectory>& active() const { return active_; }
  const std::vector<Trajectory>& terminated() const { return finished_; }
  const std::vector<WindowDiagnostics>& diagnostics() const { return diagnostics_; }
  const TrackerConfig& config() const { return config_; }
  int last_frame() const { return last_frame_; }

 private:
  FrameOutput step(int first_frame, int last_frame);
  void commit(int frame, const FlowNetwork& network, const CGResult& result, FrameOutput& out);

  TrackerConfig config_;
  std::map<int, std::vector<Detection>> buffer_;
  std::vector<Trajectory> active_;
  std::vector<Trajectory> finished_;
  std::vector<WindowDiagnostics> diagnostics_;
  int last_frame_ = 0;
  int last_committed_ = 0;
  int next_track_id_ = 1;
  int next_det_id_ = 0;
  bool flushed_ = false;

  // Last solved window, kept for the final flush.
  struct FrozenPath {
    int track_id = 0;  // 0 for a dummy path that spawned nothing yet
    std::vector<Detection> detections;
  };
  struct Frozen {
    int committed_frame = 0;
    int last_frame = 0;
    std::vector<FrozenPath> paths;
  };
  std::optional<Frozen> frozen_;
};

struct RunResult {
  std::vector<TrackOutput> tracks;  // sorted by (frame, track_id)
  std::vector<FrameOutput> frames;
  std::vector<WindowDiagnostics> diagnostics;
};

// Feeds every frame from 1 to the last frame with detections, then flushes.
RunResult run(const std::map<int, std::vector<Detection>>& stream, const TrackerConfig& config);

}  // namespace mcft
