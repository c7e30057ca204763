// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "asad/detection_eval.hpp"
#include "oracles.hpp"

namespace asad {
namespace {

const BoundingBox kGtA{0.10, 0.10, 0.30, 0.50};
const BoundingBox kGtB{0.60, 0.20, 0.80, 0.70};
const BoundingBox kFar{0.40, 0.80, 0.50, 0.95};

ActorObservation gt_obs(std::int64_t kf, std::int64_t actor, BoundingBox box) {
  return {"v", kf, box, actor, {1}, 1.0, {}};
}
ActorObservation pred_obs(std::int64_t kf, std::int64_t actor, BoundingBox box, double score) {
  return {"v", kf, box, actor, {}, score, {}};
}

TEST(TallyFrameTest, SingleHit) {
  BoundingBox near = kGtA;
  near.x2 = 0.29;  // IoU 0.95
  std::vector<BoundingBox> gt{kGtA};
  std::vector<ScoredBox> pred{{near, 0.8}};
  const auto t = tally_frame(gt, pred);
  EXPECT_EQ(t.tally, (DetectionTally{1, 0, 0}));
}

TEST(TallyFrameTest, DoubleDetectionIsPenalized) {
  // Brute force over who may absorb the single GT: either prediction, never both.
  std::vector<BoundingBox> gt{kGtA};
  std::vector<ScoredBox> pred{{kGtA, 0.7}, {{0.10, 0.10, 0.28, 0.50}, 0.9}};
  const auto t = tally_frame(gt, pred);
  EXPECT_EQ(t.tally, (DetectionTally{1, 1, 0}));
  // Higher score claims the GT first.
  EXPECT_EQ(t.is_tp, (std::vector<bool>{false, true}));
}

TEST(TallyFrameTest, NoPredictions) {
  std::vector<BoundingBox> gt{kGtA, kGtB};
  const auto t = tally_frame(gt, std::vector<ScoredBox>{});
  EXPECT_EQ(t.tally, (DetectionTally{0, 0, 2}));
}

TEST(TallyFrameTest, BelowThresholdIsFalsePositive) {
  std::vector<BoundingBox> gt{{0.0, 0.0, 0.5, 1.0}};
  std::vector<ScoredBox> pred{{{0.0, 0.0, 0.3, 1.0}, 0.9}};  // IoU 0.6
  EXPECT_EQ(tally_frame(gt, pred, 0.5).tally.tp, 1u);
  EXPECT_EQ(tally_frame(gt, pred, 0.75).tally.fp, 1u);
}

TEST(PrecisionRecallTest, Arithmetic) {
  const auto a = precision_recall({8, 2, 2});
  EXPECT_DOUBLE_EQ(a.precision, 0.8);
  EXPECT_DOUBLE_EQ(a.recall, 0.8);
  const auto b = precision_recall({5, 0, 0});
  EXPECT_EQ(b.precision, 1.0);
  EXPECT_EQ(b.recall, 1.0);
}

TEST(PrecisionRecallTest, ZeroDenominatorsAreFlagged) {
  const auto a = precision_recall({0, 0, 3});
  EXPECT_EQ(a.precision, 0.0);
  EXPECT_TRUE(a.no_predictions);
  EXPECT_FALSE(a.no_ground_truth);
  const auto b = precision_recall({0, 4, 0});
  EXPECT_EQ(b.recall, 0.0);
  EXPECT_TRUE(b.no_ground_truth);
}

TEST(AveragePrecisionTest, PerfectDetector) {
  VideoRecord gt{"v", 25, {gt_obs(0, 0, kGtA), gt_obs(0, 1, kGtB), gt_obs(1, 0, kGtA)}};
  VideoRecord pred{"v", 25, {pred_obs(0, 0, kGtA, 0.9), pred_obs(0, 1, kGtB, 0.8),
                             pred_obs(1, 0, kGtA, 0.7)}};
  const auto r = average_precision(std::span(&gt, 1), std::span(&pred, 1));
  ASSERT_TRUE(r.ap.has_value());
  EXPECT_EQ(*r.ap, 1.0);
}

TEST(AveragePrecisionTest, FalsePositiveRankedFirst) {
  VideoRecord gt{"v", 25, {gt_obs(0, 0, kGtA)}};
  VideoRecord pred{"v", 25, {pred_obs(0, 5, kFar, 0.95), pred_obs(0, 6, kGtA, 0.90)}};
  const auto r = average_precision(std::span(&gt, 1), std::span(&pred, 1));
  ASSERT_EQ(r.curve.points.size(), 2u);
  EXPECT_EQ(r.curve.points[0].recall, 0.0);
  EXPECT_EQ(r.curve.points[0].precision, 0.0);
  EXPECT_EQ(r.curve.points[1].recall, 1.0);
  EXPECT_EQ(r.curve.points[1].precision, 0.5);
  const double sweep = oracle::ap_threshold_sweep({false, true}, 1);
  EXPECT_NEAR(sweep, 0.5, 1e-15);
  EXPECT_NEAR(*r.ap, sweep, 1e-9);
}

TEST(AveragePrecisionTest, TwoGroundTruthsWithInterleavedFalsePositive) {
  VideoRecord gt{"v", 25, {gt_obs(0, 0, kGtA), gt_obs(0, 1, kGtB)}};
  VideoRecord pred{"v", 25, {pred_obs(0, 0, kGtA, 0.9), pred_obs(0, 9, kFar, 0.8),
                             pred_obs(0, 1, kGtB, 0.7)}};
  const auto r = average_precision(std::span(&gt, 1), std::span(&pred, 1));
  const auto& pts = r.curve.points;
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_EQ(pts[0].recall, 0.5);
  EXPECT_EQ(pts[0].precision, 1.0);
  EXPECT_EQ(pts[1].recall, 0.5);
  EXPECT_EQ(pts[1].precision, 0.5);
  EXPECT_EQ(pts[2].recall, 1.0);
  EXPECT_NEAR(pts[2].precision, 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(pts[2].p_interp, 2.0 / 3.0, 1e-15);
  const double sweep = oracle::ap_threshold_sweep({true, false, true}, 2);
  EXPECT_NEAR(sweep, 5.0 / 6.0, 1e-15);
  EXPECT_NEAR(*r.ap, sweep, 1e-9);
}

TEST(AveragePrecisionTest, NoGroundTruthIsNull) {
  VideoRecord gt{"v", 25, {}};
  VideoRecord pred{"v", 25, {pred_obs(0, 0, kGtA, 0.5)}};
  const auto r = average_precision(std::span(&gt, 1), std::span(&pred, 1));
  EXPECT_FALSE(r.ap.has_value());
  EXPECT_FALSE(r.reason.empty());
}

TEST(AveragePrecisionTest, UnpairedPredictedVideoCountsAsFalsePositives) {
  std::vector<VideoRecord> gt{{"a", 25, {gt_obs(0, 0, kGtA)}}};
  gt[0].observations[0].video_id = "a";
  std::vector<VideoRecord> pred{{"a", 25, {pred_obs(0, 0, kGtA, 0.5)}},
                                {"b", 25, {pred_obs(0, 0, kGtA, 0.9)}}};
  pred[0].observations[0].video_id = "a";
  pred[1].observations[0].video_id = "b";
  const auto r = average_precision(gt, pred);
  EXPECT_EQ(r.tally, (DetectionTally{1, 1, 0}));
  EXPECT_EQ(*r.ap, 0.5);
}

TEST(AveragePrecisionTest, ScoreTiesAreCountedAndStable) {
  VideoRecord gt{"v", 25, {gt_obs(0, 0, kGtA)}};
  VideoRecord pred{"v", 25, {pred_obs(0, 1, kGtA, 0.5), pred_obs(0, 2, kFar, 0.5)}};
  const auto r = average_precision(std::span(&gt, 1), std::span(&pred, 1));
  EXPECT_EQ(r.score_ties, 1u);
  EXPECT_EQ(*r.ap, 1.0);  // input order puts the TP first
}

// Random ranked lists: the integration must equal the independent sweep, and
// the curve must satisfy its shape invariants.
TEST(AveragePrecisionTest, MatchesThresholdSweepOnRandomRankings) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> len(1, 30);
  for (int t = 0; t < 200; ++t) {
    const int n = len(rng);
    std::vector<bool> flags;
    std::vector<RankedDetection> ranked;
    std::size_t tps = 0;
    for (int k = 0; k < n; ++k) {
      const bool tp = coin(rng);
      tps += tp;
      flags.push_back(tp);
      ranked.push_back({1.0 - k * 0.01, tp});
    }
    const std::size_t n_gt = tps + std::uniform_int_distribution<std::size_t>(0, 3)(rng);
    if (n_gt == 0) continue;
    const auto r = average_precision_from_ranking(ranked, n_gt);
    EXPECT_NEAR(*r.ap, oracle::ap_threshold_sweep(flags, n_gt), 1e-12);
    EXPECT_GE(*r.ap, 0.0);
    EXPECT_LE(*r.ap, 1.0);
    for (std::size_t k = 1; k < r.curve.points.size(); ++k) {
      EXPECT_GE(r.curve.points[k].recall, r.curve.points[k - 1].recall);
      EXPECT_LE(r.curve.points[k].p_interp, r.curve.points[k - 1].p_interp);
    }

    // Low-scored FP never changes AP; top-scored FP never raises it.
    auto low = ranked;
    low.push_back({-1.0, false});
    EXPECT_EQ(*average_precision_from_ranking(low, n_gt).ap, *r.ap);
    auto high = ranked;
    high.insert(high.begin(), {2.0, false});
    EXPECT_LE(*average_precision_from_ranking(high, n_gt).ap, *r.ap + 1e-15);

    // Dropping a TP never raises AP.
    for (std::size_t k = 0; k < ranked.size(); ++k) {
      if (!ranked[k].tp) continue;
      auto fewer = ranked;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(k));
      EXPECT_LE(*average_precision_from_ranking(fewer, n_gt).ap, *r.ap + 1e-15);
      break;
    }
  }
}

}  // namespace
}  // namespace asad
