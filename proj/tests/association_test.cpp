// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "asad/association.hpp"
#include "asad/identity_eval.hpp"
#include "asad/synthetic_bench.hpp"

namespace asad {
namespace {

const std::vector<double> kAppA{1.0, 0.0, 0.0};
const std::vector<double> kAppB{0.0, 1.0, 0.0};

BoundingBox box_at(double cx, double cy, double w = 0.1, double h = 0.2) {
  return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

// One actor drifting right, then teleported to the far side at keyframe `cut`.
DetectionStream shot_cut_stream(int n, int cut) {
  DetectionStream s{"v", 3, {}};
  for (int kf = 0; kf < n; ++kf) {
    const double cx = kf < cut ? 0.2 + 0.01 * kf : 0.8 + 0.01 * (kf - cut);
    s.frames.push_back({kf, {{box_at(cx, 0.5), 0.9, kAppA}}});
  }
  return s;
}

std::set<std::int64_t> ids(const VideoRecord& r) {
  std::set<std::int64_t> out;
  for (const auto& o : r.observations) out.insert(o.actor_id);
  return out;
}

VideoRecord gt_for_single_actor(const DetectionStream& s) {
  VideoRecord gt{s.video_id, 25, {}};
  for (const auto& f : s.frames) gt.observations.push_back({s.video_id, f.keyframe, f.detections[0].box, 0, {1}, 1.0, {}});
  return gt;
}

void expect_valid_prediction(const VideoRecord& r) {
  EXPECT_TRUE(validate_record(r, {Role::kPrediction, 80}).empty());
  std::set<std::pair<std::int64_t, std::int64_t>> seen;
  for (const auto& o : r.observations) EXPECT_TRUE(seen.insert({o.keyframe, o.actor_id}).second);
}

TEST(CosineDistanceTest, Basics) {
  EXPECT_NEAR(cosine_distance(kAppA, kAppA), 0.0, 1e-15);
  EXPECT_NEAR(cosine_distance(kAppA, kAppB), 1.0, 1e-15);
  const std::vector<double> neg{-1.0, 0.0, 0.0}, zero{0.0, 0.0, 0.0};
  EXPECT_NEAR(cosine_distance(kAppA, neg), 2.0, 1e-15);
  EXPECT_EQ(cosine_distance(kAppA, zero), 1.0);
  EXPECT_EQ(cosine_distance(std::vector<double>{}, std::vector<double>{}), 0.0);
}

TEST(MotionDecayTest, LinearFromOneToZero) {
  EXPECT_EQ(motion_decay(1, 10), 1.0);
  EXPECT_EQ(motion_decay(10, 10), 0.0);
  EXPECT_NEAR(motion_decay(4, 10), 6.0 / 9.0, 1e-15);
  EXPECT_EQ(motion_decay(1, 1), 1.0);
}

TEST(AssociationConfigTest, RangesChecked) {
  auto c = AssociationConfig::online_defaults();
  EXPECT_NO_THROW(c.check());
  c.iou_weight = 1.5;
  EXPECT_THROW(c.check(), ValidationError);
  c = AssociationConfig::offline_defaults();
  c.offline_threshold = 0.0;
  EXPECT_THROW(c.check(), ValidationError);
  c = AssociationConfig::offline_defaults();
  c.max_gap = 0;
  EXPECT_THROW(c.check(), ValidationError);
  EXPECT_EQ(AssociationConfig::defaults_for(AssociationMode::kOffline).iou_weight, 0.3);
  EXPECT_EQ(AssociationConfig::defaults_for(AssociationMode::kOnline).iou_weight, 0.7);
}

TEST(TrackOnlineTest, SmoothSingleActorKeepsOneId) {
  const auto s = shot_cut_stream(30, 1000);
  const auto r = track_online(s);
  EXPECT_EQ(ids(r), (std::set<std::int64_t>{0}));
  EXPECT_EQ(r.observations.size(), 30u);
  for (const auto& o : r.observations) EXPECT_TRUE(o.actions.empty());
  expect_valid_prediction(r);
}

TEST(TrackOnlineTest, ShotCutWithMotionOnlyStartsNewId) {
  const auto s = shot_cut_stream(20, 10);
  auto cfg = AssociationConfig::online_defaults();
  cfg.iou_weight = 1.0;
  const auto r = track_online(s, cfg);
  EXPECT_EQ(ids(r), (std::set<std::int64_t>{0, 1}));
  for (const auto& o : r.observations) EXPECT_EQ(o.actor_id, o.keyframe < 10 ? 0 : 1);
  EXPECT_GE(id_switches(gt_for_single_actor(s), r), 1u);
}

TEST(TrackOnlineTest, OrthogonalAppearanceCrossingWithAppearanceOnly) {
  // A moves right, B moves left; they pass through each other around kf 5.
  DetectionStream s{"v", 3, {}};
  for (int kf = 0; kf <= 10; ++kf) {
    const double xa = 0.2 + 0.06 * kf, xb = 0.8 - 0.06 * kf;
    // Emit B first at every other frame so detection order carries no hint.
    if (kf % 2) {
      s.frames.push_back({kf, {{box_at(xb, 0.5), 0.9, kAppB}, {box_at(xa, 0.52), 0.9, kAppA}}});
    } else {
      s.frames.push_back({kf, {{box_at(xa, 0.52), 0.9, kAppA}, {box_at(xb, 0.5), 0.9, kAppB}}});
    }
  }
  auto cfg = AssociationConfig::online_defaults();
  cfg.iou_weight = 0.0;
  const auto r = track_online(s, cfg);
  EXPECT_EQ(ids(r).size(), 2u);
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    for (std::size_t d = 0; d < 2; ++d) {
      const auto& det = s.frames[f].detections[d];
      const auto& obs = r.observations[2 * f + d];
      EXPECT_EQ(obs.box, det.box);
      EXPECT_EQ(obs.actor_id, det.appearance == kAppA ? 0 : 1) << "keyframe " << f;
    }
  }
}

TEST(TrackOnlineTest, RetiresTracksAfterGap) {
  DetectionStream s{"v", 3, {}};
  s.frames.push_back({0, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  s.frames.push_back({6, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  s.frames.push_back({11, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  const auto r = track_online(s);  // gap 5
  EXPECT_EQ(r.observations[0].actor_id, 0);
  EXPECT_EQ(r.observations[1].actor_id, 1);
  EXPECT_EQ(r.observations[2].actor_id, 1);
}

TEST(TrackOfflineTest, KeepsOneIdAcrossShotCut) {
  const auto s = shot_cut_stream(20, 10);
  const auto r = track_offline(s);
  EXPECT_EQ(ids(r), (std::set<std::int64_t>{0}));
  EXPECT_EQ(id_switches(gt_for_single_actor(s), r), 0u);
}

TEST(TrackOfflineTest, ShotCutWithOrthogonalDistractor) {
  // Actor A plus a distractor B with an orthogonal embedding; both jump at
  // the cut, A lands where B used to be.
  DetectionStream s{"v", 3, {}};
  for (int kf = 0; kf < 16; ++kf) {
    const bool after = kf >= 8;
    s.frames.push_back({kf,
                        {{box_at(after ? 0.8 : 0.2, 0.5), 0.9, kAppA},
                         {box_at(after ? 0.2 : 0.8, 0.5), 0.9, kAppB}}});
  }
  const auto r = track_offline(s);
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    EXPECT_EQ(r.observations[2 * f].actor_id, 0);
    EXPECT_EQ(r.observations[2 * f + 1].actor_id, 1);
  }
  // The motion-heavy online tracker follows the box and swaps identities.
  auto online = AssociationConfig::online_defaults();
  online.iou_weight = 1.0;
  const auto o = track_online(s, online);
  EXPECT_NE(o.observations[16].actor_id, o.observations[0].actor_id);
}

TEST(TrackOfflineTest, CoOccurringDetectionsNeverShareId) {
  // Identical boxes and embeddings at the same keyframe: maximal affinity
  // with the neighbours, still two IDs.
  DetectionStream s{"v", 3, {}};
  for (int kf = 0; kf < 6; ++kf) {
    s.frames.push_back({kf, {{box_at(0.5, 0.5), 0.9, kAppA}, {box_at(0.5, 0.5), 0.8, kAppA}}});
  }
  const auto r = track_offline(s);
  expect_valid_prediction(r);
  EXPECT_EQ(ids(r).size(), 2u);
}

TEST(TrackOfflineTest, CannotLinkHoldsOnSyntheticScenarios) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScenarioSpec spec;
    spec.seed = seed;
    spec.n_keyframes = 40;
    spec.p_fp = 0.3;
    const auto sc = generate(spec);
    for (auto mode : {AssociationMode::kOnline, AssociationMode::kOffline}) {
      const auto r = track(sc.stream, AssociationConfig::defaults_for(mode));
      expect_valid_prediction(r);
      EXPECT_EQ(r.observations.size(), sc.stream.detection_count());
    }
  }
}

TEST(TrackTest, EmptyStreamGivesEmptyRecord) {
  const DetectionStream s{"empty", 4, {}};
  for (auto mode : {AssociationMode::kOnline, AssociationMode::kOffline}) {
    const auto r = track(s, AssociationConfig::defaults_for(mode));
    EXPECT_EQ(r.video_id, "empty");
    EXPECT_TRUE(r.observations.empty());
  }
}

TEST(TrackTest, AppearanceDimensionMismatchIsError) {
  DetectionStream s{"v", 3, {}};
  s.frames.push_back({0, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  s.frames.push_back({1, {{box_at(0.5, 0.5), 0.9, {1.0, 0.0}}}});
  EXPECT_THROW(track_online(s), ValidationError);
  EXPECT_THROW(track_offline(s), ValidationError);
}

TEST(TrackTest, UnsortedFramesAreError) {
  DetectionStream s{"v", 3, {}};
  s.frames.push_back({1, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  s.frames.push_back({0, {{box_at(0.5, 0.5), 0.9, kAppA}}});
  EXPECT_THROW(track_online(s), ValidationError);
}

TEST(TrackTest, DeterministicAndIdsInFirstAppearanceOrder) {
  ScenarioSpec spec;
  spec.seed = 11;
  spec.n_keyframes = 50;
  const auto sc = generate(spec);
  for (auto mode : {AssociationMode::kOnline, AssociationMode::kOffline}) {
    const auto cfg = AssociationConfig::defaults_for(mode);
    const auto a = track(sc.stream, cfg), b = track(sc.stream, cfg);
    ASSERT_EQ(a.observations.size(), b.observations.size());
    std::int64_t next = 0;
    for (std::size_t i = 0; i < a.observations.size(); ++i) {
      EXPECT_EQ(a.observations[i].actor_id, b.observations[i].actor_id);
      EXPECT_EQ(a.observations[i].box, b.observations[i].box);
      EXPECT_LE(a.observations[i].actor_id, next);
      if (a.observations[i].actor_id == next) ++next;
    }
  }
}

}  // namespace
}  // namespace asad
