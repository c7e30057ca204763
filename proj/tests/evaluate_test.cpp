// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0

#include <vector>

#include <gtest/gtest.h>

#include "asad/evaluate.hpp"
#include "asad/synthetic_bench.hpp"

namespace asad {
namespace {

std::vector<VideoRecord> scenario_set(std::size_t n, std::uint64_t seed0) {
  std::vector<VideoRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    ScenarioSpec s;
    s.seed = seed0 + i;
    s.n_keyframes = 30;
    s.video_id = "vid" + std::to_string(i);
    out.push_back(generate(s).gt);
  }
  return out;
}

std::vector<VideoRecord> degrade(const std::vector<VideoRecord>& gt) {
  std::vector<VideoRecord> out;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    auto p = perturb(gt[i], {JitterBoxes{0.03}, i});
    p = perturb(p, {DropDetections{0.1}, i + 100});
    p = perturb(p, {InjectFalsePositives{0.3}, i + 200});
    p = perturb(p, {SplitTrack{0, 15}, 0});
    p = perturb(p, {FlipLabels{10, 80}, i});
    for (auto& o : p.observations) o.score = 0.5 + 0.4 * std::fmod(o.box.x1 * 1000.0, 1.0);
    out.push_back(std::move(p));
  }
  return out;
}

TEST(EvaluateTest, AggregateTalliesAreSumsOfVideoTallies) {
  const auto gt = scenario_set(4, 1);
  const auto pred = degrade(gt);
  const auto r = evaluate(gt, pred);
  ASSERT_EQ(r.videos.size(), 4u);
  MetricBlock sum;
  for (const auto& v : r.videos) {
    sum.detection += v.detection;
    sum.idtp += v.idtp;
    sum.idfp += v.idfp;
    sum.idfn += v.idfn;
    sum.n_pairs += v.n_pairs;
    sum.wrong_bits += v.wrong_bits;
    sum.id_switches += v.id_switches;
    sum.mt += v.mt;
  }
  EXPECT_EQ(r.aggregate.detection, sum.detection);
  EXPECT_EQ(r.aggregate.idtp, sum.idtp);
  EXPECT_EQ(r.aggregate.idfp, sum.idfp);
  EXPECT_EQ(r.aggregate.idfn, sum.idfn);
  EXPECT_EQ(r.aggregate.n_pairs, sum.n_pairs);
  EXPECT_EQ(r.aggregate.wrong_bits, sum.wrong_bits);
  EXPECT_EQ(r.aggregate.id_switches, sum.id_switches);
  EXPECT_EQ(r.aggregate.mt, sum.mt);
  EXPECT_EQ(r.aggregate.idf1, idf1_from_counts(sum.idtp, sum.idfp, sum.idfn).idf1);
  EXPECT_EQ(*r.aggregate.hl, static_cast<double>(sum.wrong_bits) / (sum.n_pairs * 80.0));
  EXPECT_GE(r.aggregate.id_switches, 4u);
  EXPECT_LT(*r.aggregate.ap, 1.0);
}

TEST(EvaluateTest, WorkerCountDoesNotChangeResults) {
  const auto gt = scenario_set(6, 10);
  const auto pred = degrade(gt);
  const auto one = evaluate(gt, pred, {}, 1);
  EXPECT_EQ(evaluate(gt, pred, {}, 3), one);
  EXPECT_EQ(evaluate(gt, pred, {}, 16), one);
  // Input order of videos is irrelevant too.
  std::vector<VideoRecord> rgt(gt.rbegin(), gt.rend()), rpred(pred.rbegin(), pred.rend());
  const auto rev = evaluate(rgt, rpred, {}, 2);
  EXPECT_EQ(rev.videos, one.videos);
  EXPECT_EQ(rev.aggregate.detection, one.aggregate.detection);
}

TEST(EvaluateTest, UnpairedVideosScoreAgainstEmpty) {
  const auto gt = scenario_set(2, 3);
  std::vector<VideoRecord> pred{gt[0]};
  pred.push_back(gt[1]);
  pred[1].video_id = "ghost";
  for (auto& o : pred[1].observations) o.video_id = "ghost";
  const auto r = evaluate(gt, pred);
  ASSERT_EQ(r.videos.size(), 3u);
  EXPECT_EQ(r.videos[0].video_id, "ghost");
  EXPECT_EQ(r.videos[0].detection.fp, pred[1].observations.size());
  EXPECT_FALSE(r.videos[0].ap.has_value());
  EXPECT_FALSE(r.videos[0].hl.has_value());
  EXPECT_EQ(r.videos[2].video_id, "vid1");
  EXPECT_EQ(r.videos[2].detection.fn, gt[1].observations.size());
  EXPECT_EQ(*r.videos[2].ap, 0.0);
}

TEST(EvaluateTest, ThresholdPlumbsIntoNames) {
  EvalConfig cfg;
  cfg.iou_threshold = 0.75;
  EvalReport r;
  r.config = cfg;
  EXPECT_EQ(r.ap_name(), "AP@0.75");
  EXPECT_EQ(r.hl_name(), "HL@0.75");
  EXPECT_EQ(EvalReport{}.ap_name(), "AP@0.5");
  const auto gt = scenario_set(1, 0);
  auto pred = perturb(gt[0], {JitterBoxes{0.03}, 1});
  const std::vector<VideoRecord> p{pred};
  const auto lo = evaluate(gt, p).aggregate;
  const auto hi = evaluate(gt, p, cfg).aggregate;
  EXPECT_GE(lo.detection.tp, hi.detection.tp);
  EXPECT_GE(lo.n_pairs, hi.n_pairs);
  EXPECT_GE(lo.idtp, hi.idtp);
}

TEST(EvaluateTest, DuplicateVideoIdsRejected) {
  const auto gt = scenario_set(1, 0);
  const std::vector<VideoRecord> twice{gt[0], gt[0]};
  EXPECT_THROW(evaluate(twice, gt), ValidationError);
  EXPECT_THROW(evaluate(gt, twice), ValidationError);
}

TEST(EvaluateTest, PerVideoOff) {
  const auto gt = scenario_set(2, 0);
  EvalConfig cfg;
  cfg.per_video = false;
  const auto r = evaluate(gt, gt, cfg);
  EXPECT_TRUE(r.videos.empty());
  EXPECT_EQ(r.aggregate.idf1, 1.0);
}

TEST(ParallelForTest, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(50, 4,
                            [](std::size_t i) {
                              if (i == 17) throw ValidationError("boom");
                            }),
               ValidationError);
  std::vector<int> hit(100, 0);
  parallel_for(100, 7, [&](std::size_t i) { hit[i] = 1; });
  EXPECT_EQ(std::count(hit.begin(), hit.end(), 1), 100);
}

}  // namespace
}  // namespace asad
