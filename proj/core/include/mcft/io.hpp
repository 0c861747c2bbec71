#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mcft/colgen.hpp"
#include "mcft/costs.hpp"
#include "mcft/graph.hpp"
#include "mcft/metrics.hpp"
#include "mcft/tracker.hpp"
#include "mcft/types.hpp"

namespace mcft::io {

// One line of a MOTChallenge-style file:
//   frame,id,x,y,w,h,score,-1,-1,-1[,f_1,...,f_m]
// Trailing columns beyond the tenth carry an appearance feature.
struct MotRecord {
  int frame = 0;
  int id = -1;
  Box box;
  double score = 0.0;
  std::vector<double> feature;
};

std::vector<MotRecord> parse_mot(std::istream& in);
std::vector<MotRecord> read_mot_file(const std::string& path);

// Frame-indexed detections with sequential det_ids. Rows without feature
// columns get the uniform unit feature of dimension `default_dim`.
std::map<int, std::vector<Detection>> to_detections(const std::vector<MotRecord>& records,
                                                    int default_dim = 48);
std::map<int, std::vector<Detection>> read_detections(std::istream& in);
std::map<int, std::vector<Detection>> read_detections(const std::string& path);

std::vector<LabeledBox> to_labeled(const std::vector<MotRecord>& records);
std::vector<LabeledBox> read_tracks(const std::string& path);

// Geometry %.2f, score %.4f, features %.6f; rows sorted by (frame, id).
std::string format_mot(std::vector<MotRecord> records);
std::string write_tracks(std::span<const TrackOutput> tracks);
std::string write_detections(const std::map<int, std::vector<Detection>>& detections,
                             bool with_features);

// --- synthetic scenes -------------------------------------------------------

enum class Motion { kLinear, kCrossing };

struct Occlusion {
  int target = 0;  // 1-based
  int first = 0;
  int last = 0;
};

struct Scenario {
  int targets = 3;
  int frames = 50;
  Motion motion = Motion::kLinear;
  double miss_prob = 0.0;
  double clutter_rate = 0.0;       // expected clutter detections per frame
  double feature_noise = 0.03;     // std-dev of the Gaussian added to prototypes
  double position_noise = 0.0;     // std-dev in pixels of box jitter
  int feature_dim = 48;
  double width = 640.0;
  double height = 480.0;
  double box_w = 40.0;
  double box_h = 80.0;
  double speed = 3.0;              // pixels per frame
  double lane_spacing = 120.0;     // vertical spacing of linear lanes
  double score = 0.9;
  double clutter_score = 0.3;
  std::vector<Occlusion> occlusions;
};

// key=value lines, keys are the field names above; occlusion entries read
// `occlusion = target:first-last`. Throws ConfigError on an unknown key or bad
// value.
Scenario parse_scenario(const std::string& text);
Scenario read_scenario(const std::string& path);

struct SyntheticScene {
  std::map<int, std::vector<Detection>> detections;
  std::vector<LabeledBox> ground_truth;
};

// Deterministic in (scenario, seed).
SyntheticScene synth_generate(const Scenario& scenario, std::uint64_t seed);

// --- appearance features ----------------------------------------------------

// Pre-cropped interleaved 8-bit raster.
struct ImageRegion {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<std::uint8_t> pixels;
};

inline constexpr int kHistogramBins = 16;

// Per-channel 16-bin histograms, concatenated and L2-normalized.
Feature extract_feature(const ImageRegion& region);
// Synthetic mode: pass a provided feature through, normalized.
Feature extract_feature(const Feature& tag);

// --- single-window network instances ---------------------------------------

struct NetworkInstance {
  FlowNetwork network;
  std::vector<CostVector> costs;
};

// Line-oriented text, `#` comments allowed:
//   mcft-network 1
//   detections N
//   <frame of detection 0> ... (N integers on one line, may be empty)
//   transitions M
//   <i> <j>                          (M lines)
//   commodities C
//   commodity <k> demand <d_k>       then five cost lines:
//   obs <N values>
//   trans <M values>
//   start <N values>
//   term <N values>
//   bypass <value>
NetworkInstance parse_network_instance(std::istream& in);
NetworkInstance read_network_instance(const std::string& path);
std::string format_network_instance(const NetworkInstance& instance);

}  // namespace mcft::io
