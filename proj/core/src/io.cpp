#include "mcft/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <random>
#include <sstream>

#include "mcft/error.hpp"
#include "text_util.hpp"

namespace mcft::io {

using detail::parse_double;
using detail::parse_int;
using detail::split;
using detail::split_ws;
using detail::trim;

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

// --- MOT text ---------------------------------------------------------------

std::vector<MotRecord> parse_mot(std::istream& in) {
  std::vector<MotRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto fields = split(body, ',');
    if (fields.size() < 10) throw ParseError("expected at least 10 fields", lineno);
    std::vector<double> v(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto d = parse_double(fields[i]);
      if (!d || !std::isfinite(*d)) {
        throw ParseError("non-numeric field " + std::to_string(i + 1) + ": '" +
                             std::string(fields[i]) + "'",
                         lineno);
      }
      v[i] = *d;
    }
    const auto frame = parse_int(fields[0]);
    const auto id = parse_int(fields[1]);
    if (!frame || !id) throw ParseError("frame and id must be integers", lineno);
    if (*frame < 1) throw ParseError("frames are 1-based", lineno);
    MotRecord r;
    r.frame = static_cast<int>(*frame);
    r.id = static_cast<int>(*id);
    r.box = {v[2], v[3], v[4], v[5]};
    r.score = v[6];
    if (!(r.box.w > 0.0) || !(r.box.h > 0.0)) throw ParseError("box width and height must be positive", lineno);
    r.feature.assign(v.begin() + 10, v.end());
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<MotRecord> read_mot_file(const std::string& path) {
  std::istringstream in(read_text(path));
  try {
    return parse_mot(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::map<int, std::vector<Detection>> to_detections(const std::vector<MotRecord>& records,
                                                    int default_dim) {
  if (default_dim < 1) throw ContractViolation("feature dimension must be positive");
  std::vector<const MotRecord*> sorted;
  for (const MotRecord& r : records) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const MotRecord* a, const MotRecord* b) { return a->frame < b->frame; });

  std::size_t dim = 0;
  for (const MotRecord* r : sorted) {
    if (r->feature.empty()) continue;
    if (dim != 0 && r->feature.size() != dim) throw MalformedInput("inconsistent feature dimensions");
    dim = r->feature.size();
  }
  const Feature uniform =
      Feature::Constant(dim ? static_cast<Eigen::Index>(dim) : default_dim, 1.0).normalized();

  std::map<int, std::vector<Detection>> out;
  int next_id = 0;
  for (const MotRecord* r : sorted) {
    Detection d;
    d.det_id = next_id++;
    d.frame = r->frame;
    d.box = r->box;
    d.score = r->score;
    if (r->feature.empty()) {
      d.feature = uniform;
    } else {
      d.feature = normalized(Eigen::Map<const Feature>(r->feature.data(),
                                                       static_cast<Eigen::Index>(r->feature.size())));
    }
    out[d.frame].push_back(std::move(d));
  }
  return out;
}

std::map<int, std::vector<Detection>> read_detections(std::istream& in) {
  return to_detections(parse_mot(in));
}

std::map<int, std::vector<Detection>> read_detections(const std::string& path) {
  return to_detections(read_mot_file(path));
}

std::vector<LabeledBox> to_labeled(const std::vector<MotRecord>& records) {
  std::vector<LabeledBox> out;
  out.reserve(records.size());
  for (const MotRecord& r : records) out.push_back({r.frame, r.id, r.box});
  return out;
}

std::vector<LabeledBox> read_tracks(const std::string& path) {
  return to_labeled(read_mot_file(path));
}

std::string format_mot(std::vector<MotRecord> records) {
  std::stable_sort(records.begin(), records.end(), [](const MotRecord& a, const MotRecord& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  std::string out;
  char buf[256];
  for (const MotRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.2f,%.2f,%.2f,%.2f,%.4f,-1,-1,-1", r.frame, r.id,
                  r.box.x, r.box.y, r.box.w, r.box.h, r.score);
    out += buf;
    for (double f : r.feature) {
      std::snprintf(buf, sizeof buf, ",%.6f", f);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

std::string write_tracks(std::span<const TrackOutput> tracks) {
  std::vector<MotRecord> records;
  records.reserve(tracks.size());
  for (const TrackOutput& t : tracks) records.push_back({t.frame, t.track_id, t.box, 1.0, {}});
  return format_mot(std::move(records));
}

std::string write_detections(const std::map<int, std::vector<Detection>>& detections,
                             bool with_features) {
  std::vector<MotRecord> records;
  for (const auto& [frame, list] : detections) {
    for (const Detection& d : list) {
      MotRecord r{d.frame, -1, d.box, d.score, {}};
      if (with_features) r.feature.assign(d.feature.data(), d.feature.data() + d.feature.size());
      records.push_back(std::move(r));
    }
  }
  return format_mot(std::move(records));
}

// --- scenarios --------------------------------------------------------------

Scenario parse_scenario(const std::string& text) {
  Scenario s;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = "scenario line " + std::to_string(lineno) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string key(trim(body.substr(0, eq)));
    const std::string_view value = trim(body.substr(eq + 1));

    auto num = [&](double& field) {
      const auto v = parse_double(value);
      if (!v) throw ConfigError(where + "invalid number for " + key);
      field = *v;
    };
    auto integer = [&](int& field) {
      const auto v = parse_int(value);
      if (!v) throw ConfigError(where + "invalid integer for " + key);
      field = static_cast<int>(*v);
    };

    if (key == "targets") integer(s.targets);
    else if (key == "frames") integer(s.frames);
    else if (key == "motion") {
      if (value == "linear") s.motion = Motion::kLinear;
      else if (value == "crossing") s.motion = Motion::kCrossing;
      else throw ConfigError(where + "motion must be linear or crossing");
    }
    else if (key == "miss_prob") num(s.miss_prob);
    else if (key == "clutter_rate") num(s.clutter_rate);
    else if (key == "feature_noise") num(s.feature_noise);
    else if (key == "position_noise") num(s.position_noise);
    else if (key == "feature_dim") integer(s.feature_dim);
    else if (key == "width") num(s.width);
    else if (key == "height") num(s.height);
    else if (key == "box_w") num(s.box_w);
    else if (key == "box_h") num(s.box_h);
    else if (key == "speed") num(s.speed);
    else if (key == "lane_spacing") num(s.lane_spacing);
    else if (key == "score") num(s.score);
    else if (key == "clutter_score") num(s.clutter_score);
    else if (key == "occlusion") {
      const auto colon = value.find(':');
      const auto dash = value.find('-', colon == std::string_view::npos ? 0 : colon);
      if (colon == std::string_view::npos || dash == std::string_view::npos) {
        throw ConfigError(where + "occlusion must read target:first-last");
      }
      const auto t = parse_int(value.substr(0, colon));
      const auto a = parse_int(value.substr(colon + 1, dash - colon - 1));
      const auto b = parse_int(value.substr(dash + 1));
      if (!t || !a || !b || *a > *b) throw ConfigError(where + "occlusion must read target:first-last");
      s.occlusions.push_back({static_cast<int>(*t), static_cast<int>(*a), static_cast<int>(*b)});
    } else {
      throw ConfigError(where + "unknown key '" + key + "'");
    }
  }

  if (s.targets < 0 || s.frames < 1 || s.feature_dim < 1) throw ConfigError("scenario sizes out of range");
  if (s.miss_prob < 0.0 || s.miss_prob > 1.0) throw ConfigError("miss_prob must lie in [0, 1]");
  if (s.clutter_rate < 0.0 || s.feature_noise < 0.0 || s.position_noise < 0.0) {
    throw ConfigError("rates and noise levels must be non-negative");
  }
  if (!(s.box_w > 0.0) || !(s.box_h > 0.0) || !(s.width > 0.0) || !(s.height > 0.0)) {
    throw ConfigError("image and box sizes must be positive");
  }
  for (const Occlusion& o : s.occlusions) {
    if (o.target < 1 || o.target > s.targets) throw ConfigError("occlusion target out of range");
  }
  return s;
}

Scenario read_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

namespace {

// Center of target i (0-based) at frame f.
std::pair<double, double> target_center(const Scenario& s, int i, int f) {
  if (s.motion == Motion::kCrossing) {
    // Pairs of targets cross each other at mid-sequence; pairs are stacked in
    // lanes. An odd last target moves alone.
    const int pair = i / 2;
    const int pairs = (s.targets + 1) / 2;
    const double lane = s.height / 2.0 + (pair - (pairs - 1) / 2.0) * s.lane_spacing;
    const double dir = (i % 2 == 0) ? 1.0 : -1.0;
    const double mid = (s.frames + 1) / 2.0;
    const double dt = f - mid;
    return {s.width / 2.0 + dir * s.speed * dt, lane + dir * 0.25 * s.speed * dt};
  }
  const double lane = s.height / 2.0 + (i - (s.targets - 1) / 2.0) * s.lane_spacing;
  const double dir = (i % 2 == 0) ? 1.0 : -1.0;
  const double start = dir > 0 ? s.box_w : s.width - s.box_w;
  return {start + dir * s.speed * (f - 1), lane};
}

bool occluded(const Scenario& s, int target, int frame) {
  for (const Occlusion& o : s.occlusions) {
    if (o.target == target && frame >= o.first && frame <= o.last) return true;
  }
  return false;
}

}  // namespace

SyntheticScene synth_generate(const Scenario& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index m = s.feature_dim;

  auto random_unit = [&]() {
    Feature v(m);
    for (Eigen::Index i = 0; i < m; ++i) v[i] = gauss(rng);
    return normalized(v);
  };

  std::vector<Feature> prototypes;
  for (int i = 0; i < s.targets; ++i) prototypes.push_back(random_unit());

  SyntheticScene scene;
  std::poisson_distribution<int> clutter(s.clutter_rate > 0.0 ? s.clutter_rate : 1.0);
  int det_id = 0;
  for (int f = 1; f <= s.frames; ++f) {
    auto& dets = scene.detections[f];
    for (int i = 0; i < s.targets; ++i) {
      const auto [cx, cy] = target_center(s, i, f);
      if (cx + 0.5 * s.box_w < 0.0 || cx - 0.5 * s.box_w > s.width ||
          cy + 0.5 * s.box_h < 0.0 || cy - 0.5 * s.box_h > s.height) {
        continue;
      }
      const Box truth = Box::from_center(cx, cy, s.box_w, s.box_h);
      scene.ground_truth.push_back({f, i + 1, truth});

      // Draws happen whether or not the detection survives so that the
      // random stream does not depend on the occlusion schedule.
      const bool missed = unit(rng) < s.miss_prob;
      Box box = truth;
      if (s.position_noise > 0.0) {
        box.x += s.position_noise * gauss(rng);
        box.y += s.position_noise * gauss(rng);
      }
      Feature noise = Feature::Zero(m);
      if (s.feature_noise > 0.0) {
        for (Eigen::Index k = 0; k < m; ++k) noise[k] = s.feature_noise * gauss(rng);
      }
      if (missed || occluded(s, i + 1, f)) continue;
      dets.push_back({det_id++, f, box, s.score, normalized(prototypes[static_cast<std::size_t>(i)] + noise)});
    }
    const int n_clutter = s.clutter_rate > 0.0 ? clutter(rng) : 0;
    for (int c = 0; c < n_clutter; ++c) {
      const double x = unit(rng) * std::max(1.0, s.width - s.box_w);
      const double y = unit(rng) * std::max(1.0, s.height - s.box_h);
      dets.push_back({det_id++, f, {x, y, s.box_w, s.box_h}, s.clutter_score, random_unit()});
    }
    std::shuffle(dets.begin(), dets.end(), rng);
  }
  // det_ids follow file order after the shuffle.
  det_id = 0;
  for (auto& [f, dets] : scene.detections) {
    for (Detection& d : dets) d.det_id = det_id++;
  }
  return scene;
}

// --- features ---------------------------------------------------------------

Feature extract_feature(const ImageRegion& region) {
  if (region.width < 1 || region.height < 1 || region.channels < 1) {
    throw MalformedInput("empty image region");
  }
  const std::size_t expected = static_cast<std::size_t>(region.width) *
                               static_cast<std::size_t>(region.height) *
                               static_cast<std::size_t>(region.channels);
  if (region.pixels.size() != expected) throw MalformedInput("pixel buffer size does not match region");
  Feature h = Feature::Zero(region.channels * kHistogramBins);
  for (std::size_t p = 0; p < region.pixels.size(); ++p) {
    const int c = static_cast<int>(p % static_cast<std::size_t>(region.channels));
    const int bin = region.pixels[p] * kHistogramBins / 256;
    h[c * kHistogramBins + bin] += 1.0;
  }
  return normalized(h);
}

Feature extract_feature(const Feature& tag) { return normalized(tag); }

// --- network instances ------------------------------------------------------

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line split on whitespace; empty at EOF.
  std::vector<std::string_view> next() {
    while (std::getline(in_, line_)) {
      ++lineno_;
      std::string_view body = line_;
      if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
      auto tokens = split_ws(body);
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  std::vector<std::string_view> expect(std::string_view keyword, std::size_t count) {
    auto t = next();
    if (t.empty()) fail("unexpected end of file, expected '" + std::string(keyword) + "'");
    if (t[0] != keyword) fail("expected '" + std::string(keyword) + "'");
    if (t.size() != count + 1) {
      fail("'" + std::string(keyword) + "' expects " + std::to_string(count) + " values");
    }
    return {t.begin() + 1, t.end()};
  }

  long long integer(std::string_view s) {
    const auto v = parse_int(s);
    if (!v) fail("expected an integer, got '" + std::string(s) + "'");
    return *v;
  }

  double number(std::string_view s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    const auto v = parse_double(s);
    if (!v) fail("expected a number, got '" + std::string(s) + "'");
    return *v;
  }

  [[noreturn]] void fail(const std::string& what) { throw ParseError(what, lineno_); }

 private:
  std::istream& in_;
  std::string line_;
  std::size_t lineno_ = 0;
};

}  // namespace

NetworkInstance parse_network_instance(std::istream& in) {
  LineReader r(in);
  const auto header = r.expect("mcft-network", 1);
  if (header[0] != "1") r.fail("unsupported instance version");

  const auto n = static_cast<std::size_t>(r.integer(r.expect("detections", 1)[0]));
  std::vector<Detection> dets;
  if (n > 0) {
    const auto frames = r.next();
    if (frames.size() != n) r.fail("expected " + std::to_string(n) + " detection frames");
    for (std::size_t i = 0; i < n; ++i) {
      Detection d;
      d.det_id = static_cast<int>(i);
      d.frame = static_cast<int>(r.integer(frames[i]));
      d.box = {0.0, 0.0, 1.0, 1.0};
      d.feature = Feature::Ones(1);
      dets.push_back(std::move(d));
    }
  }

  const auto m = static_cast<std::size_t>(r.integer(r.expect("transitions", 1)[0]));
  std::vector<DetPair> transitions;
  for (std::size_t t = 0; t < m; ++t) {
    const auto pair = r.next();
    if (pair.size() != 2) r.fail("expected a transition 'i j'");
    const auto i = r.integer(pair[0]);
    const auto j = r.integer(pair[1]);
    if (i < 0 || j < 0) r.fail("negative detection index");
    transitions.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  for (std::size_t t = 1; t < transitions.size(); ++t) {
    if (!(transitions[t - 1] < transitions[t])) r.fail("transitions must be sorted and unique");
  }

  const auto c = static_cast<std::size_t>(r.integer(r.expect("commodities", 1)[0]));
  if (c < 1) r.fail("at least one commodity is required");
  std::vector<int> demands;
  std::vector<std::vector<double>> raw(c);
  for (std::size_t k = 0; k < c; ++k) {
    const auto head = r.next();
    if (head.size() != 4 || head[0] != "commodity" || head[2] != "demand") {
      r.fail("expected 'commodity <k> demand <d>'");
    }
    if (static_cast<std::size_t>(r.integer(head[1])) != k) r.fail("commodities must be listed in order");
    demands.push_back(static_cast<int>(r.integer(head[3])));
    auto& v = raw[k];
    for (auto [kw, count] : {std::pair<const char*, std::size_t>{"obs", n}, {"trans", m}, {"start", n},
                             {"term", n}, {"bypass", 1}}) {
      for (std::string_view s : r.expect(kw, count)) v.push_back(r.number(s));
    }
  }

  NetworkInstance inst;
  try {
    inst.network = FlowNetwork::from_transitions(std::move(dets), transitions, demands);
  } catch (const MalformedInput& e) {
    throw ParseError(std::string("invalid network: ") + e.what());
  }
  const FlowNetwork& net = inst.network;
  if (net.num_transitions() != m) throw ParseError("invalid network: duplicate transitions");
  for (std::size_t k = 0; k < c; ++k) {
    CostVector cv{k, std::vector<double>(net.num_edges(), std::numeric_limits<double>::infinity())};
    const auto& v = raw[k];
    for (std::size_t i = 0; i < n; ++i) {
      cv[net.observation_edge(i)] = v[i];
      cv[net.start_edge(k, i)] = v[n + m + i];
      cv[net.termination_edge(k, i)] = v[2 * n + m + i];
    }
    for (std::size_t t = 0; t < m; ++t) cv[net.transition_edge(t)] = v[n + t];
    cv[net.bypass_edge(k)] = v[3 * n + m];
    for (std::size_t e = 0; e < net.num_edges(); ++e) {
      if (net.usable_by(e, k) && !std::isfinite(cv[e])) {
        throw ParseError("commodity " + std::to_string(k) + " has a non-finite cost on a usable edge");
      }
    }
    inst.costs.push_back(std::move(cv));
  }
  return inst;
}

NetworkInstance read_network_instance(const std::string& path) {
  std::istringstream in(read_text(path));
  try {
    return parse_network_instance(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string format_network_instance(const NetworkInstance& inst) {
  const FlowNetwork& net = inst.network;
  const std::size_t n = net.num_detections();
  std::ostringstream out;
  out.precision(17);
  out << "mcft-network 1\n";
  out << "detections " << n << "\n";
  for (std::size_t i = 0; i < n; ++i) out << (i ? " " : "") << net.detections()[i].frame;
  out << "\n";
  out << "transitions " << net.num_transitions() << "\n";
  for (const auto& [i, j] : net.transitions()) out << i << " " << j << "\n";
  out << "commodities " << net.num_commodities() << "\n";
  for (std::size_t k = 0; k < net.num_commodities(); ++k) {
    const CostVector& cv = inst.costs.at(k);
    out << "commodity " << k << " demand " << net.demand(k) << "\n";
    out << "obs";
    for (std::size_t i = 0; i < n; ++i) out << " " << cv[net.observation_edge(i)];
    out << "\ntrans";
    for (std::size_t t = 0; t < net.num_transitions(); ++t) out << " " << cv[net.transition_edge(t)];
    out << "\nstart";
    for (std::size_t i = 0; i < n; ++i) out << " " << cv[net.start_edge(k, i)];
    out << "\nterm";
    for (std::size_t i = 0; i < n; ++i) out << " " << cv[net.termination_edge(k, i)];
    out << "\nbypass " << cv[net.bypass_edge(k)] << "\n";
  }
  return out.str();
}

}  // namespace mcft::io
