#include "mcft/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <sstream>
#include <string_view>

#include "mcft/error.hpp"
#include "parallel.hpp"
#include "text_util.hpp"

namespace mcft {

int TrackerConfig::effective_spawn_length() const {
  return std::max(1, std::min(spawn_min_length, window_length));
}

int TrackerConfig::effective_termination() const {
  return terminate_after_misses > 0 ? terminate_after_misses : window_length;
}

void TrackerConfig::validate() const {
  if (window_length < 1) throw ConfigError("window_length must be at least 1");
  if (dummy_demand < 0) throw ConfigError("dummy_demand must be non-negative");
  if (spawn_min_length < 1) throw ConfigError("spawn_min_length must be at least 1");
  if (terminate_after_misses < 0) throw ConfigError("terminate_after_misses must be non-negative");
  if (!(aggressiveness > 0.0)) throw ConfigError("aggressiveness must be positive");
  if (iter_max < 1) throw ConfigError("iter_max must be at least 1");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (gating.max_gap < 1) throw ConfigError("max_gap must be at least 1");
  if (!(gating.gamma > 0.0)) throw ConfigError("gamma must be positive");
  cost.validate();
}

void apply_config_entry(TrackerConfig& c, const std::string& key, const std::string& value) {
  auto as_int = [&](int& field) {
    const auto v = detail::parse_int(value);
    if (!v) throw ConfigError("invalid integer for " + key + ": '" + value + "'");
    field = static_cast<int>(*v);
  };
  auto as_double = [&](double& field) {
    const auto v = detail::parse_double(value);
    if (!v) throw ConfigError("invalid number for " + key + ": '" + value + "'");
    field = *v;
  };
  if (key == "window_length") return as_int(c.window_length);
  if (key == "dummy_demand") return as_int(c.dummy_demand);
  if (key == "spawn_min_length") return as_int(c.spawn_min_length);
  if (key == "terminate_after_misses") return as_int(c.terminate_after_misses);
  if (key == "aggressiveness") return as_double(c.aggressiveness);
  if (key == "iter_max") return as_int(c.iter_max);
  if (key == "threads") return as_int(c.threads);
  if (key == "seed") {
    const auto v = detail::parse_int(value);
    if (!v || *v < 0) throw ConfigError("invalid seed: '" + value + "'");
    c.seed = static_cast<std::uint64_t>(*v);
    return;
  }
  if (key == "eta") return as_double(c.cost.eta);
  if (key == "termination_cost") return as_double(c.cost.termination_cost);
  if (key == "dummy_start_cost") return as_double(c.cost.dummy_start_cost);
  if (key == "bypass_cost_tracked") return as_double(c.cost.bypass_cost_tracked);
  if (key == "bypass_cost_dummy") return as_double(c.cost.bypass_cost_dummy);
  if (key == "max_gap") return as_int(c.gating.max_gap);
  if (key == "gamma") return as_double(c.gating.gamma);
  throw ConfigError("unknown configuration key '" + key + "'");
}

TrackerConfig parse_tracker_config(const std::string& text, TrackerConfig base) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = detail::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key = value: '" + line + "'");
    apply_config_entry(base, std::string(detail::trim(body.substr(0, eq))),
                       std::string(detail::trim(body.substr(eq + 1))));
  }
  base.validate();
  return base;
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

std::vector<FrameOutput> Tracker::push_frame(int frame, std::vector<Detection> detections) {
  if (flushed_) throw ContractViolation("tracker already flushed");
  if (frame <= last_frame_) {
    throw MalformedInput("frame " + std::to_string(frame) + " arrived after frame " +
                         std::to_string(last_frame_));
  }
  for (Detection& d : detections) {
    if (d.frame != frame) throw MalformedInput("detection frame does not match the pushed frame");
    validate(d);
  }

  std::vector<FrameOutput> out;
  const int window = config_.window_length;
  for (int f = last_frame_ + 1; f <= frame; ++f) {
    auto& slot = buffer_[f];
    if (f == frame) slot = std::move(detections);
    for (Detection& d : slot) d.det_id = next_det_id_++;
    last_frame_ = f;
    if (f >= window) {
      out.push_back(step(f - window + 1, f));
      buffer_.erase(buffer_.begin(), buffer_.lower_bound(f - window + 2));
    }
  }
  return out;
}

FrameOutput Tracker::step(int first_frame, int last_frame) {
  std::vector<Detection> window;
  for (auto it = buffer_.lower_bound(first_frame); it != buffer_.end() && it->first <= last_frame; ++it) {
    window.insert(window.end(), it->second.begin(), it->second.end());
  }
  const FlowNetwork network =
      build_network(std::move(window), active_, config_.dummy_demand, config_.gating);

  const auto started = std::chrono::steady_clock::now();
  const std::vector<CostVector> costs =
      assemble_all_costs(network, active_, config_.cost, config_.threads);
  CgConfig cg;
  cg.iter_max = config_.iter_max;
  cg.threads = config_.threads;
  const CGResult result = column_generation(network, costs, cg);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  diagnostics_.push_back({first_frame - 1, result.iterations, result.v_lp, result.v_int,
                          result.epsilon, seconds, result.status});

  FrameOutput out;
  out.frame = first_frame;
  out.emitted_after = last_frame_;
  commit(first_frame, network, result, out);
  frozen_->last_frame = last_frame;
  last_committed_ = first_frame;
  return out;
}

void Tracker::commit(int frame, const FlowNetwork& network, const CGResult& result,
                     FrameOutput& out) {
  const auto& dets = network.detections();
  auto path_dets = [&](const PathColumn& p) {
    std::vector<Detection> v;
    for (std::size_t i : p.detections(network)) v.push_back(dets[i]);
    return v;
  };

  Frozen frozen;
  frozen.committed_frame = frame;

  // Tracked commodities: associate when the path starts at the committed frame.
  const std::size_t num_tracked = active_.size();
  std::vector<const Detection*> associated(num_tracked, nullptr);
  std::vector<std::vector<Detection>> tracked_paths(num_tracked);
  for (std::size_t k = 1; k <= num_tracked; ++k) {
    const auto paths = result.paths_of(k);
    if (paths.empty()) continue;
    tracked_paths[k - 1] = path_dets(*paths.front());
    if (!tracked_paths[k - 1].empty() && tracked_paths[k - 1].front().frame == frame) {
      associated[k - 1] = &tracked_paths[k - 1].front();
    }
  }

  std::vector<Feature> templates(num_tracked);
  std::vector<const Feature*> features(num_tracked, nullptr);
  for (std::size_t k = 0; k < num_tracked; ++k) {
    templates[k] = active_[k].appearance;
    if (associated[k] != nullptr) features[k] = &associated[k]->feature;
  }
  const auto triplets = build_triplets(templates, features);
  detail::parallel_for(num_tracked, config_.threads, [&](std::size_t k) {
    update_model(active_[k].model, triplets[k]);
  });

  for (std::size_t k = 0; k < num_tracked; ++k) {
    Trajectory& traj = active_[k];
    if (associated[k] != nullptr) {
      traj.associate(*associated[k]);
      out.boxes.push_back({frame, traj.track_id, associated[k]->box});
    } else {
      ++traj.consecutive_misses;
    }
    frozen.paths.push_back({traj.track_id, std::move(tracked_paths[k])});
  }

  std::vector<Trajectory> still_active;
  for (Trajectory& traj : active_) {
    if (traj.consecutive_misses >= config_.effective_termination()) {
      traj.state = TrackState::kTerminated;
      finished_.push_back(std::move(traj));
    } else {
      still_active.push_back(std::move(traj));
    }
  }
  active_ = std::move(still_active);

  // Dummy paths that begin at the committed frame and are long enough spawn.
  const auto spawn_length = static_cast<std::size_t>(config_.effective_spawn_length());
  for (const PathColumn* p : result.paths_of(0)) {
    if (p->is_bypass()) continue;
    std::vector<Detection> chain = path_dets(*p);
    int spawned = 0;
    if (chain.front().frame == frame && chain.size() >= spawn_length) {
      spawned = next_track_id_++;
      active_.push_back(Trajectory::spawn(spawned, chain.front(), config_.aggressiveness));
      out.boxes.push_back({frame, spawned, chain.front().box});
    }
    frozen.paths.push_back({spawned, std::move(chain)});
  }

  std::sort(out.boxes.begin(), out.boxes.end(),
            [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
  frozen_ = std::move(frozen);
}

std::vector<FrameOutput> Tracker::flush() {
  if (flushed_) return {};
  flushed_ = true;
  std::vector<FrameOutput> out;
  if (!frozen_ && last_frame_ >= 1) {
    // The stream never filled a window: solve what arrived as one short window.
    out.push_back(step(1, last_frame_));
  }
  if (!frozen_) return out;

  const Frozen frozen = *frozen_;
  const auto spawn_length = static_cast<std::size_t>(config_.effective_spawn_length());
  std::set<int> alive;
  for (const Trajectory& t : active_) alive.insert(t.track_id);

  struct Continuation {
    int track_id;
    const std::vector<Detection>* chain;
  };
  std::vector<Continuation> conts;
  for (const FrozenPath& p : frozen.paths) {
    if (p.detections.empty()) continue;
    if (p.track_id != 0) {
      if (alive.count(p.track_id)) conts.push_back({p.track_id, &p.detections});
    } else if (p.detections.size() >= spawn_length) {
      conts.push_back({-1, &p.detections});
    }
  }

  auto find_active = [&](int id) -> Trajectory* {
    for (Trajectory& t : active_) {
      if (t.track_id == id) return &t;
    }
    return nullptr;
  };

  for (int f = frozen.committed_frame + 1; f <= frozen.last_frame; ++f) {
    FrameOutput fo;
    fo.frame = f;
    fo.emitted_after = last_frame_;
    fo.flushed = true;
    for (Continuation& c : conts) {
      for (const Detection& d : *c.chain) {
        if (d.frame != f) continue;
        if (c.track_id == -1) {
          c.track_id = next_track_id_++;
          active_.push_back(Trajectory::spawn(c.track_id, d, config_.aggressiveness));
        } else if (Trajectory* t = find_active(c.track_id); t && t->last_frame() < f) {
          t->associate(d);
        }
        fo.boxes.push_back({f, c.track_id, d.box});
      }
    }
    std::sort(fo.boxes.begin(), fo.boxes.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.track_id < b.track_id; });
    out.push_back(std::move(fo));
  }
  frozen_.reset();
  return out;
}

RunResult run(const std::map<int, std::vector<Detection>>& stream, const TrackerConfig& config) {
  Tracker tracker(config);
  RunResult result;
  auto collect = [&](std::vector<FrameOutput> frames) {
    for (FrameOutput& f : frames) {
      result.tracks.insert(result.tracks.end(), f.boxes.begin(), f.boxes.end());
      result.frames.push_back(std::move(f));
    }
  };
  for (const auto& [frame, dets] : stream) {
    if (frame < 1) throw MalformedInput("frames are 1-based");
    collect(tracker.push_frame(frame, dets));
  }
  collect(tracker.flush());
  std::sort(result.tracks.begin(), result.tracks.end(), [](const TrackOutput& a, const TrackOutput& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.track_id < b.track_id;
  });
  result.diagnostics = tracker.diagnostics();
  return result;
}

}  // namespace mcft
