#include "mcft/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

#include "mcft/error.hpp"

namespace mcft {

std::vector<int> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  const std::size_t rows = weight.size();
  if (rows == 0) return {};
  const std::size_t cols = weight.front().size();
  for (const auto& r : weight) {
    if (r.size() != cols) throw ContractViolation("ragged weight matrix");
  }
  // Hungarian method (shortest augmenting paths with potentials) on the square
  // padding. Forbidden and padded cells cost 0, i.e. "leave unmatched".
  const std::size_t n = std::max(rows, cols);
  auto cost = [&](std::size_t i, std::size_t j) {
    if (i < rows && j < cols && weight[i][j] >= 0.0) return -weight[i][j];
    return 0.0;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(rows, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = p[j] - 1;
    if (i < rows && j - 1 < cols && weight[i][j - 1] >= 0.0) match[i] = static_cast<int>(j - 1);
  }
  return match;
}

namespace {

using FrameBoxes = std::map<int, std::vector<LabeledBox>>;

FrameBoxes by_frame(const std::vector<LabeledBox>& boxes, const char* what) {
  FrameBoxes out;
  for (const LabeledBox& b : boxes) out[b.frame].push_back(b);
  for (auto& [frame, list] : out) {
    std::sort(list.begin(), list.end(),
              [](const LabeledBox& a, const LabeledBox& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < list.size(); ++i) {
      if (list[i].id == list[i - 1].id) {
        throw MalformedInput(std::string("duplicate ") + what + " id " + std::to_string(list[i].id) +
                             " in frame " + std::to_string(frame));
      }
    }
  }
  return out;
}

}  // namespace

MetricsReport clear_mot(const std::vector<LabeledBox>& gt, const std::vector<LabeledBox>& hyp,
                        double iou_threshold, int num_frames) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ContractViolation("iou_threshold must lie in (0, 1]");
  }
  const FrameBoxes gt_frames = by_frame(gt, "ground-truth");
  const FrameBoxes hyp_frames = by_frame(hyp, "hypothesis");

  std::set<int> frames;
  for (const auto& [f, _] : gt_frames) frames.insert(f);
  for (const auto& [f, _] : hyp_frames) frames.insert(f);

  MetricsReport r;
  std::map<int, int> last_match;         // gt id -> hyp id, last known
  std::map<int, int> previous;           // gt id -> hyp id, previous frame only
  std::map<int, int> gt_len, gt_hit, gt_frag;
  std::map<int, bool> gt_was_tracked;
  double iou_sum = 0.0;
  const std::vector<LabeledBox> none;

  for (int f : frames) {
    const auto git = gt_frames.find(f);
    const auto hit = hyp_frames.find(f);
    const auto& g = git == gt_frames.end() ? none : git->second;
    const auto& h = hit == hyp_frames.end() ? none : hit->second;

    std::vector<int> g_match(g.size(), -1);
    std::vector<char> h_taken(h.size(), 0);
    std::vector<double> g_iou(g.size(), 0.0);

    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto prev = previous.find(g[i].id);
      if (prev == previous.end()) continue;
      for (std::size_t j = 0; j < h.size(); ++j) {
        if (h[j].id != prev->second || h_taken[j]) continue;
        const double o = iou(g[i].box, h[j].box);
        if (o >= iou_threshold) {
          g_match[i] = static_cast<int>(j);
          g_iou[i] = o;
          h_taken[j] = 1;
        }
      }
    }

    std::vector<std::size_t> free_g, free_h;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g_match[i] < 0) free_g.push_back(i);
    }
    for (std::size_t j = 0; j < h.size(); ++j) {
      if (!h_taken[j]) free_h.push_back(j);
    }
    if (!free_g.empty() && !free_h.empty()) {
      std::vector<std::vector<double>> w(free_g.size(), std::vector<double>(free_h.size(), -1.0));
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        for (std::size_t b = 0; b < free_h.size(); ++b) {
          const double o = iou(g[free_g[a]].box, h[free_h[b]].box);
          if (o >= iou_threshold) w[a][b] = o;
        }
      }
      const auto m = max_weight_assignment(w);
      for (std::size_t a = 0; a < free_g.size(); ++a) {
        if (m[a] < 0) continue;
        const std::size_t i = free_g[a];
        const std::size_t j = free_h[static_cast<std::size_t>(m[a])];
        g_match[i] = static_cast<int>(j);
        g_iou[i] = w[a][static_cast<std::size_t>(m[a])];
        h_taken[j] = 1;
      }
    }

    previous.clear();
    int matched = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const int id = g[i].id;
      ++gt_len[id];
      if (g_match[i] < 0) {
        gt_was_tracked[id] = false;
        continue;
      }
      const LabeledBox& hb = h[static_cast<std::size_t>(g_match[i])];
      bool switched = false;
      const auto last = last_match.find(id);
      if (last != last_match.end() && last->second != hb.id) {
        switched = true;
        ++r.ids;
      }
      if (gt_hit[id] > 0 && !gt_was_tracked[id]) ++gt_frag[id];
      gt_was_tracked[id] = true;
      ++gt_hit[id];
      last_match[id] = hb.id;
      previous[id] = hb.id;
      ++matched;
      iou_sum += g_iou[i];
      r.matches_log.push_back({f, id, hb.id, g_iou[i], switched});
    }
    r.matches += matched;
    r.fn += static_cast<int>(g.size()) - matched;
    r.fp += static_cast<int>(h.size()) - matched;
    r.gt_boxes += static_cast<int>(g.size());
    r.hyp_boxes += static_cast<int>(h.size());
  }

  r.frames = num_frames > 0 ? num_frames : (frames.empty() ? 0 : *frames.rbegin());
  r.mota = r.gt_boxes > 0 ? 1.0 - static_cast<double>(r.fp + r.fn + r.ids) / r.gt_boxes
                          : (r.fp == 0 ? 1.0 : -static_cast<double>(r.fp));
  r.motp = r.matches > 0 ? iou_sum / r.matches : 0.0;
  r.faf = r.frames > 0 ? static_cast<double>(r.fp) / r.frames : 0.0;

  r.gt_tracks = static_cast<int>(gt_len.size());
  int mt = 0, ml = 0;
  for (const auto& [id, len] : gt_len) {
    const double coverage = static_cast<double>(gt_hit[id]) / len;
    if (coverage > 0.8) ++mt;
    if (coverage < 0.2) ++ml;
    r.fg += gt_frag[id];
  }
  if (r.gt_tracks > 0) {
    r.mt = 100.0 * mt / r.gt_tracks;
    r.ml = 100.0 * ml / r.gt_tracks;
  }
  return r;
}

std::string format_report_text(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "MOTA   %8.4f\nMOTP   %8.4f\nFAF    %8.4f\nFP     %8d\nFN     %8d\nIDS    %8d\n"
                "MT%%    %8.2f\nML%%    %8.2f\nFG     %8d\nGT     %8d\nHYP    %8d\nFrames %8d\n",
                r.mota, r.motp, r.faf, r.fp, r.fn, r.ids, r.mt, r.ml, r.fg, r.gt_boxes, r.hyp_boxes,
                r.frames);
  return buf;
}

std::string format_report_csv(const MetricsReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "mota,motp,faf,fp,fn,ids,mt,ml,fg,gt,hyp,frames\n"
                "%.6f,%.6f,%.6f,%d,%d,%d,%.4f,%.4f,%d,%d,%d,%d\n",
                r.mota, r.motp, r.faf, r.fp, r.fn, r.ids, r.mt, r.ml, r.fg, r.gt_boxes, r.hyp_boxes,
                r.frames);
  return buf;
}

}  // namespace mcft
