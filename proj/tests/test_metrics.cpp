#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mcft/error.hpp"
#include "mcft/metrics.hpp"

using namespace mcft;

namespace {

std::vector<LabeledBox> two_tracks(int frames) {
  std::vector<LabeledBox> v;
  for (int f = 1; f <= frames; ++f) {
    v.push_back({f, 1, {10.0 * f, 0, 20, 40}});
    v.push_back({f, 2, {10.0 * f, 200, 20, 40}});
  }
  return v;
}

double brute_best(const std::vector<std::vector<double>>& w) {
  const std::size_t r = w.size(), c = w[0].size();
  std::vector<int> perm(std::max(r, c));
  std::iota(perm.begin(), perm.end(), 0);
  double best = 0.0;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < r; ++i) {
      const auto j = static_cast<std::size_t>(perm[i]);
      if (j < c && w[i][j] >= 0.0) s += w[i][j];
    }
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST(ClearMot, IdenticalIsPerfect) {
  const auto gt = two_tracks(5);
  const auto r = clear_mot(gt, gt);
  EXPECT_EQ(r.mota, 1.0);
  EXPECT_EQ(r.motp, 1.0);
  EXPECT_EQ(r.ids, 0);
  EXPECT_EQ(r.fp, 0);
  EXPECT_EQ(r.fn, 0);
  EXPECT_EQ(r.mt, 100.0);
  EXPECT_EQ(r.ml, 0.0);
}

TEST(ClearMot, OneExtraFalsePositiveInTen) {
  const auto gt = two_tracks(5);
  auto hyp = gt;
  hyp.push_back({3, 9, {500, 500, 20, 40}});
  const auto r = clear_mot(gt, hyp);
  EXPECT_EQ(r.gt_boxes, 10);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.mota, 0.9);
  EXPECT_DOUBLE_EQ(r.faf, 1.0 / 5.0);
}

TEST(ClearMot, IdSwapCountsTwoSwitches) {
  const auto gt = two_tracks(6);
  auto hyp = gt;
  for (auto& b : hyp) {
    if (b.frame >= 4) b.id = b.id == 1 ? 2 : 1;
  }
  const auto r = clear_mot(gt, hyp);
  EXPECT_EQ(r.ids, 2);
  EXPECT_EQ(r.fg, 0);
  EXPECT_NEAR(r.mota, 1.0 - 2.0 / 12.0, 1e-15);
}

TEST(ClearMot, StickyCorrespondence) {
  // gt 1 matched to hyp 7; a closer hyp 8 appears later but 7 stays above
  // threshold, so no switch is counted.
  std::vector<LabeledBox> gt{{1, 1, {0, 0, 10, 10}}, {2, 1, {0, 0, 10, 10}}};
  std::vector<LabeledBox> hyp{{1, 7, {1, 0, 10, 10}}, {2, 7, {2, 0, 10, 10}}, {2, 8, {0, 0, 10, 10}}};
  const auto r = clear_mot(gt, hyp);
  EXPECT_EQ(r.ids, 0);
  EXPECT_EQ(r.fp, 1);
  EXPECT_EQ(r.matches_log.back().hyp_id, 7);
}

TEST(ClearMot, FragmentationAndCoverage) {
  std::vector<LabeledBox> gt, hyp;
  for (int f = 1; f <= 10; ++f) {
    gt.push_back({f, 1, {0, 0, 10, 10}});
    gt.push_back({f, 2, {100, 0, 10, 10}});
    if (f != 5) hyp.push_back({f, 1, {0, 0, 10, 10}});
    if (f == 1) hyp.push_back({f, 2, {100, 0, 10, 10}});
  }
  const auto r = clear_mot(gt, hyp);
  EXPECT_EQ(r.fg, 1);
  EXPECT_EQ(r.mt, 50.0);
  EXPECT_EQ(r.ml, 50.0);
  EXPECT_EQ(r.fn, 10);
}

TEST(ClearMot, CountIdentitiesAndPermutationInvariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 30.0);
  std::vector<LabeledBox> gt, hyp;
  for (int f = 1; f <= 20; ++f) {
    for (int id = 1; id <= 4; ++id) {
      gt.push_back({f, id, {id * 25.0, 0, 20, 20}});
      if (u(rng) < 25) hyp.push_back({f, (id + f / 7) % 5 + 1, {id * 25.0 + u(rng) / 10, u(rng) / 10, 20, 20}});
    }
  }
  const auto r = clear_mot(gt, hyp);
  EXPECT_EQ(r.fp + r.matches, r.hyp_boxes);
  EXPECT_EQ(r.fn + r.matches, r.gt_boxes);
  auto relabeled = hyp;
  for (auto& b : relabeled) b.id = 100 - b.id;
  const auto s = clear_mot(gt, relabeled);
  EXPECT_EQ(r.mota, s.mota);
  EXPECT_EQ(r.motp, s.motp);
  EXPECT_EQ(r.ids, s.ids);
}

TEST(ClearMot, ThresholdOneOnlyExactBoxes) {
  std::vector<LabeledBox> gt{{1, 1, {0, 0, 10, 10}}, {1, 2, {50, 0, 10, 10}}};
  std::vector<LabeledBox> hyp{{1, 1, {0, 0, 10, 10}}, {1, 2, {50.5, 0, 10, 10}}};
  const auto r = clear_mot(gt, hyp, 1.0);
  EXPECT_EQ(r.matches, 1);
  EXPECT_THROW(clear_mot(gt, hyp, 0.0), ContractViolation);
}

TEST(ClearMot, DisjointIsNonPositive) {
  std::vector<LabeledBox> gt{{1, 1, {0, 0, 10, 10}}};
  std::vector<LabeledBox> hyp{{1, 1, {100, 0, 10, 10}}};
  EXPECT_LE(clear_mot(gt, hyp).mota, 0.0);
}

TEST(ClearMot, DuplicateIdsRejected) {
  std::vector<LabeledBox> gt{{1, 1, {0, 0, 10, 10}}, {1, 1, {5, 0, 10, 10}}};
  EXPECT_THROW(clear_mot(gt, {}), MalformedInput);
}

TEST(Assignment, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t r = 1 + trial % 5, c = 1 + (trial / 5) % 5;
    std::vector<std::vector<double>> w(r, std::vector<double>(c));
    for (auto& row : w)
      for (double& x : row) x = u(rng);
    const auto m = max_weight_assignment(w);
    double s = 0.0;
    std::vector<int> used(c, 0);
    for (std::size_t i = 0; i < r; ++i) {
      if (m[i] < 0) continue;
      const auto j = static_cast<std::size_t>(m[i]);
      EXPECT_GE(w[i][j], 0.0);
      EXPECT_EQ(used[j]++, 0);
      s += w[i][j];
    }
    EXPECT_NEAR(s, brute_best(w), 1e-12);
  }
}

TEST(Report, Formats) {
  const auto gt = two_tracks(2);
  const auto r = clear_mot(gt, gt);
  const auto csv = format_report_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "mota,motp,faf,fp,fn,ids,mt,ml,fg,gt,hyp,frames");
  EXPECT_NE(format_report_text(r).find("MOTA     1.0000"), std::string::npos);
}
