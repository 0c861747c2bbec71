#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mcft/error.hpp"
#include "mcft/io.hpp"
#include "mcft/metrics.hpp"
#include "mcft/oracle.hpp"
#include "mcft/tracker.hpp"

namespace {

constexpr int kExitParse = 2;
constexpr int kExitConfig = 3;
constexpr int kExitRefused = 4;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mcft::ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw mcft::ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw mcft::ConfigError("failed writing '" + path + "'");
}

struct TrackArgs {
  std::string det, out, config, log;
  int window = 0;
  long long seed = -1;
  int threads = 0;
};

int cmd_track(const TrackArgs& a) {
  mcft::TrackerConfig config;
  if (!a.config.empty()) config = mcft::parse_tracker_config(slurp(a.config));
  if (a.window > 0) config.window_length = a.window;
  if (a.seed >= 0) config.seed = static_cast<std::uint64_t>(a.seed);
  if (a.threads > 0) config.threads = a.threads;
  config.validate();

  const auto stream = mcft::io::read_detections(a.det);
  const mcft::RunResult result = mcft::run(stream, config);
  spit(a.out, mcft::io::write_tracks(result.tracks));

  const std::string log_path = a.log.empty() ? a.out + ".log" : a.log;
  std::string log = std::string(mcft::kDiagnosticsHeader) + "\n";
  for (const auto& d : result.diagnostics) log += mcft::format_diagnostics(d) + "\n";
  spit(log_path, log);

  int proven = 0;
  for (const auto& d : result.diagnostics) proven += d.status == mcft::CgStatus::kProvenOptimal;
  std::fprintf(stderr, "%zu windows (%d proven optimal), %zu track boxes\n",
               result.diagnostics.size(), proven, result.tracks.size());
  return 0;
}

int cmd_eval(const std::string& gt, const std::string& hyp, double iou_threshold, bool csv) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw mcft::ConfigError("--iou must lie in (0, 1]");
  }
  const auto report =
      mcft::clear_mot(mcft::io::read_tracks(gt), mcft::io::read_tracks(hyp), iou_threshold);
  std::cout << (csv ? mcft::format_report_csv(report) : mcft::format_report_text(report));
  return 0;
}

int cmd_synth(const std::string& scenario, std::uint64_t seed, const std::string& out_det,
              const std::string& out_gt) {
  const auto s = mcft::io::read_scenario(scenario);
  const auto scene = mcft::io::synth_generate(s, seed);
  spit(out_det, mcft::io::write_detections(scene.detections, true));
  std::vector<mcft::io::MotRecord> gt;
  for (const auto& b : scene.ground_truth) gt.push_back({b.frame, b.id, b.box, 1.0, {}});
  spit(out_gt, mcft::io::format_mot(std::move(gt)));
  return 0;
}

void print_paths(const mcft::FlowNetwork& net, const mcft::CGResult& r) {
  for (std::size_t k = 0; k < net.num_commodities(); ++k) {
    for (const mcft::PathColumn* p : r.paths_of(k)) {
      std::printf("commodity %zu:", k);
      if (p->is_bypass()) {
        std::printf(" bypass");
      } else {
        for (std::size_t i : p->detections(net)) std::printf(" %zu", i);
      }
      std::printf("  (cost %.9g)\n", p->cost);
    }
  }
}

int cmd_solve(const std::string& path, bool use_oracle, int threads) {
  const auto inst = mcft::io::read_network_instance(path);
  mcft::CgConfig cg;
  if (threads > 0) cg.threads = threads;
  const auto r = mcft::column_generation(inst.network, inst.costs, cg);
  std::printf("status %s\niterations %d\nv_lp %.9g\nv_int %.9g\nepsilon %.9g\n", mcft::to_string(r.status),
              r.iterations, r.v_lp, r.v_int, r.epsilon);
  print_paths(inst.network, r);
  if (use_oracle) {
    const auto sol = mcft::oracle::brute_force_ilp(inst.network, inst.costs);
    const bool agree = std::abs(sol.objective - r.v_int) <= 1e-6;
    std::printf("oracle %.9g\nagreement %s\n", sol.objective, agree ? "yes" : "no");
    if (!agree) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-commodity network flow tracker"};
  app.require_subcommand(1);

  TrackArgs track;
  auto* t = app.add_subcommand("track", "Track detections with a sliding window");
  t->add_option("--det", track.det, "Detection file")->required();
  t->add_option("--out", track.out, "Output track file")->required();
  t->add_option("--config", track.config, "Tracker configuration file");
  t->add_option("--window", track.window, "Window length");
  t->add_option("--seed", track.seed, "Random seed");
  t->add_option("--threads", track.threads, "Worker threads");
  t->add_option("--log", track.log, "Diagnostics log (default: <out>.log)");

  std::string gt, hyp;
  double iou_threshold = 0.5;
  bool csv = false;
  auto* e = app.add_subcommand("eval", "CLEAR MOT evaluation");
  e->add_option("--gt", gt, "Ground-truth track file")->required();
  e->add_option("--hyp", hyp, "Hypothesis track file")->required();
  e->add_option("--iou", iou_threshold, "IoU threshold");
  e->add_flag("--csv", csv, "Comma-separated output");

  std::string scenario, out_det, out_gt;
  std::uint64_t seed = 0;
  auto* s = app.add_subcommand("synth", "Generate a synthetic scene");
  s->add_option("--scenario", scenario, "Scenario file")->required();
  s->add_option("--seed", seed, "Random seed");
  s->add_option("--out-det", out_det, "Detection output")->required();
  s->add_option("--out-gt", out_gt, "Ground-truth output")->required();

  std::string network;
  bool use_oracle = false;
  int solve_threads = 0;
  auto* v = app.add_subcommand("solve", "Solve one serialized window instance");
  v->add_option("--network", network, "Instance file")->required();
  v->add_flag("--oracle", use_oracle, "Cross-check with the brute-force solver");
  v->add_option("--threads", solve_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? 0 : kExitParse;
  }

  try {
    if (*t) return cmd_track(track);
    if (*e) return cmd_eval(gt, hyp, iou_threshold, csv);
    if (*s) return cmd_synth(scenario, seed, out_det, out_gt);
    if (*v) return cmd_solve(network, use_oracle, solve_threads);
  } catch (const mcft::ConfigError& err) {
    std::fprintf(stderr, "config error: %s\n", err.what());
    return kExitConfig;
  } catch (const mcft::TooLargeError& err) {
    std::fprintf(stderr, "refused: %s\n", err.what());
    return kExitRefused;
  } catch (const mcft::ParseError& err) {
    std::fprintf(stderr, "parse error: %s\n", err.what());
    return kExitParse;
  } catch (const mcft::MalformedInput& err) {
    std::fprintf(stderr, "malformed input: %s\n", err.what());
    return kExitParse;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
  return 1;
}
