#pragma once

#include <string>
#include <vector>

#include "mcft/types.hpp"

namespace mcft {

struct LabeledBox {
  int frame = 0;
  int id = 0;
  Box box;
};

struct FrameMatch {
  int frame = 0;
  int gt_id = 0;
  int hyp_id = 0;
  double iou = 0.0;
  bool switched = false;
};

struct MetricsReport {
  double mota = 0.0;
  double motp = 0.0;
  double faf = 0.0;
  int fp = 0;
  int fn = 0;
  int ids = 0;
  int matches = 0;
  int gt_boxes = 0;
  int hyp_boxes = 0;
  int frames = 0;
  int gt_tracks = 0;
  double mt = 0.0;  // percent of gt tracks covered > 80%
  double ml = 0.0;  // percent covered < 20%
  int fg = 0;
  std::vector<FrameMatch> matches_log;
};

// CLEAR MOT with sticky correspondences and a maximum-IoU assignment for the
// rest. `num_frames` <= 0 uses the largest frame index present. Throws
// MalformedInput on a duplicate id inside one frame.
MetricsReport clear_mot(const std::vector<LabeledBox>& gt, const std::vector<LabeledBox>& hyp,
                        double iou_threshold = 0.5, int num_frames = 0);

std::string format_report_text(const MetricsReport& report);
// Header row plus one value row.
std::string format_report_csv(const MetricsReport& report);

// Maximum-weight assignment on a dense weight matrix (rows x cols); entries
// that are not allowed carry a negative weight. Returns, per row, the matched
// column or -1.
std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight);

}  // namespace mcft
