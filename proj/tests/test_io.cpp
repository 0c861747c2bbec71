#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "instances.hpp"
#include "mcft/error.hpp"
#include "mcft/io.hpp"

using namespace mcft;
using mcft::testing::data_path;

TEST(MotIo, ParsesDetectionLine) {
  std::istringstream in("1,-1,10.0,20.0,30.0,60.0,0.8,-1,-1,-1\n");
  const auto d = io::read_detections(in);
  ASSERT_EQ(d.size(), 1u);
  const Detection& x = d.at(1).at(0);
  EXPECT_EQ(x.frame, 1);
  EXPECT_EQ(x.box, (Box{10, 20, 30, 60}));
  EXPECT_EQ(x.score, 0.8);
  EXPECT_EQ(x.feature.size(), 48);
  EXPECT_NEAR(x.feature.norm(), 1.0, 1e-12);
}

TEST(MotIo, EmptyInput) {
  std::istringstream in("");
  EXPECT_TRUE(io::read_detections(in).empty());
  EXPECT_EQ(io::write_tracks({}), "");
}

TEST(MotIo, RejectsBadLinesWithLineNumber) {
  try {
    io::read_detections(data_path("bad_width.txt"));
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream nonnum("1,-1,ten,20,30,60,0.8,-1,-1,-1\n");
  EXPECT_THROW(io::parse_mot(nonnum), ParseError);
  std::istringstream few("1,-1,10,20,30,60\n");
  EXPECT_THROW(io::parse_mot(few), ParseError);
  std::istringstream frame0("0,-1,10,20,30,60,0.8,-1,-1,-1\n");
  EXPECT_THROW(io::parse_mot(frame0), ParseError);
  EXPECT_THROW(io::read_mot_file(data_path("missing.txt")), ParseError);
}

TEST(MotIo, CanonicalRoundTrip) {
  std::ifstream in(data_path("canonical.txt"));
  std::stringstream text;
  text << in.rdbuf();
  std::istringstream again(text.str());
  EXPECT_EQ(io::format_mot(io::parse_mot(again)), text.str());
}

TEST(MotIo, WriteTracksSortedWithUnitScore) {
  std::vector<TrackOutput> t{{2, 1, {1, 2, 3, 4}}, {1, 5, {5, 6, 7, 8}}, {1, 2, {0, 0, 1, 1}}};
  EXPECT_EQ(io::write_tracks(t),
            "1,2,0.00,0.00,1.00,1.00,1.0000,-1,-1,-1\n"
            "1,5,5.00,6.00,7.00,8.00,1.0000,-1,-1,-1\n"
            "2,1,1.00,2.00,3.00,4.00,1.0000,-1,-1,-1\n");
  std::istringstream back(io::write_tracks(t));
  const auto labeled = io::to_labeled(io::parse_mot(back));
  ASSERT_EQ(labeled.size(), 3u);
  EXPECT_EQ(labeled[1].id, 5);
  EXPECT_EQ(labeled[1].box, (Box{5, 6, 7, 8}));
}

TEST(MotIo, FeaturesRoundTrip) {
  io::Scenario s;
  s.targets = 2;
  s.frames = 4;
  s.feature_dim = 6;
  const auto scene = io::synth_generate(s, 2);
  std::istringstream in(io::write_detections(scene.detections, true));
  const auto back = io::read_detections(in);
  ASSERT_EQ(back.size(), scene.detections.size());
  for (const auto& [f, dets] : scene.detections) {
    for (std::size_t i = 0; i < dets.size(); ++i) {
      EXPECT_LE((back.at(f)[i].feature - dets[i].feature).cwiseAbs().maxCoeff(), 1e-5);
      EXPECT_NEAR(back.at(f)[i].feature.norm(), 1.0, 1e-12);
    }
  }
}

TEST(Synth, NoiselessEqualsGroundTruth) {
  io::Scenario s;
  s.targets = 3;
  s.frames = 20;
  s.feature_noise = 0.0;
  const auto scene = io::synth_generate(s, 4);
  std::size_t n = 0;
  for (const auto& [f, dets] : scene.detections) {
    for (const auto& d : dets) {
      const bool found = std::any_of(scene.ground_truth.begin(), scene.ground_truth.end(),
                                     [&](const LabeledBox& b) { return b.frame == f && b.box == d.box; });
      EXPECT_TRUE(found);
      ++n;
    }
  }
  EXPECT_EQ(n, scene.ground_truth.size());
}

TEST(Synth, DeterministicPerSeed) {
  io::Scenario s;
  s.clutter_rate = 0.5;
  s.miss_prob = 0.2;
  s.position_noise = 1.0;
  const auto a = io::synth_generate(s, 9);
  const auto b = io::synth_generate(s, 9);
  EXPECT_EQ(io::write_detections(a.detections, true), io::write_detections(b.detections, true));
  const auto c = io::synth_generate(s, 10);
  EXPECT_NE(io::write_detections(a.detections, true), io::write_detections(c.detections, true));
}

TEST(Synth, MissProbabilityOneLeavesClutterOnly) {
  io::Scenario s;
  s.miss_prob = 1.0;
  s.clutter_rate = 1.0;
  const auto scene = io::synth_generate(s, 3);
  std::size_t n = 0;
  for (const auto& [f, dets] : scene.detections) {
    for (const auto& d : dets) {
      EXPECT_EQ(d.score, s.clutter_score);
      ++n;
    }
  }
  EXPECT_GT(n, 0u);
  EXPECT_FALSE(scene.ground_truth.empty());
}

TEST(Synth, OcclusionRemovesDetections) {
  const auto s = io::read_scenario(data_path("crossing.scenario"));
  const auto scene = io::synth_generate(s, 1);
  for (int f : {30, 31}) {
    for (const auto& d : scene.detections.at(f)) EXPECT_EQ(d.score, s.clutter_score);
  }
}

TEST(Scenario, ParseErrors) {
  EXPECT_THROW(io::read_scenario(data_path("bad.scenario")), ConfigError);
  EXPECT_THROW(io::parse_scenario("motion = zigzag\n"), ConfigError);
  EXPECT_THROW(io::parse_scenario("occlusion = 1:5\n"), ConfigError);
  EXPECT_THROW(io::parse_scenario("targets = 1\nocclusion = 2:1-3\n"), ConfigError);
  const auto s = io::parse_scenario("targets = 4\nmotion = crossing\nocclusion = 2:3-5\n");
  EXPECT_EQ(s.targets, 4);
  EXPECT_EQ(s.motion, io::Motion::kCrossing);
  ASSERT_EQ(s.occlusions.size(), 1u);
  EXPECT_EQ(s.occlusions[0].last, 5);
}

TEST(Features, HistogramExtractor) {
  io::ImageRegion gray{4, 3, 3, std::vector<std::uint8_t>(36, 128)};
  const Feature f = io::extract_feature(gray);
  EXPECT_EQ(f.size(), 48);
  EXPECT_NEAR(f.norm(), 1.0, 1e-9);
  EXPECT_NEAR(f[8], f[16 + 8], 1e-15);
  EXPECT_NEAR(f[8], f[32 + 8], 1e-15);
  EXPECT_EQ(io::extract_feature(gray), f);
  io::ImageRegion bad{4, 3, 3, std::vector<std::uint8_t>(10, 0)};
  EXPECT_THROW(io::extract_feature(bad), MalformedInput);
  const Feature tag = mcft::testing::vec({3, 4});
  EXPECT_EQ(io::extract_feature(tag), mcft::testing::vec({0.6, 0.8}));
}

TEST(NetworkInstance, ShippedFixturesParse) {
  const auto inst = io::read_network_instance(data_path("odd_cycle.net"));
  EXPECT_EQ(inst.network.num_detections(), 3u);
  EXPECT_EQ(inst.network.num_commodities(), 4u);
  EXPECT_EQ(inst.costs[1][inst.network.transition_edge(0)], -2.0);
  const auto t = io::read_network_instance(data_path("trivial.net"));
  EXPECT_EQ(t.costs[0][t.network.bypass_edge(0)], 20.0);
}

TEST(NetworkInstance, FormatRoundTrip) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto inst = mcft::testing::random_instance(s);
    std::istringstream in(io::format_network_instance(inst));
    const auto back = io::parse_network_instance(in);
    EXPECT_EQ(back.network.transitions(), inst.network.transitions());
    EXPECT_EQ(back.network.demands(), inst.network.demands());
    ASSERT_EQ(back.costs.size(), inst.costs.size());
    for (std::size_t k = 0; k < inst.costs.size(); ++k) EXPECT_EQ(back.costs[k].values, inst.costs[k].values);
  }
}

TEST(NetworkInstance, Rejections) {
  std::istringstream wrong("mcft-network 2\n");
  EXPECT_THROW(io::parse_network_instance(wrong), ParseError);
  std::istringstream backward("mcft-network 1\ndetections 2\n1 1\ntransitions 1\n0 1\ncommodities 1\n"
                              "commodity 0 demand 1\nobs 0 0\ntrans 0\nstart 0 0\nterm 0 0\nbypass 0\n");
  EXPECT_THROW(io::parse_network_instance(backward), ParseError);
  std::istringstream short_line("mcft-network 1\ndetections 1\n1\ntransitions 0\ncommodities 1\n"
                                "commodity 0 demand 1\nobs\n");
  EXPECT_THROW(io::parse_network_instance(short_line), ParseError);
}
