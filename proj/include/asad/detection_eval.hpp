// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Single-class ("actor") detection quality: TP/FP/FN tallies and all-point
// interpolated average precision over one pooled confidence ranking.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "asad/core_model.hpp"
#include "asad/geometry_matching.hpp"

namespace asad {

struct ScoredBox {
  BoundingBox box;
  double score = 0.0;
};

struct DetectionTally {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  DetectionTally& operator+=(const DetectionTally& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const DetectionTally&, const DetectionTally&) = default;
};

struct FrameTally {
  DetectionTally tally;
  /// One flag per prediction, in input order.
  std::vector<bool> is_tp;
};

/// Greedy matching in descending score (stable on ties). Each prediction
/// takes the unmatched ground-truth box of highest IoU, provided that IoU
/// reaches the threshold; otherwise it is a false positive.
inline FrameTally tally_frame(std::span<const BoundingBox> gt, std::span<const ScoredBox> pred,
                              double iou_threshold = kDefaultIouThreshold) {
  FrameTally out;
  out.is_tp.assign(pred.size(), false);
  std::vector<std::size_t> order(pred.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pred[a].score > pred[b].score; });
  std::vector<char> taken(gt.size(), 0);
  for (std::size_t j : order) {
    double best = -1.0;
    std::size_t best_i = gt.size();
    for (std::size_t i = 0; i < gt.size(); ++i) {
      if (taken[i]) continue;
      const double v = iou(gt[i], pred[j].box);
      if (v >= iou_threshold && v > best) {
        best = v;
        best_i = i;
      }
    }
    if (best_i < gt.size()) {
      taken[best_i] = 1;
      out.is_tp[j] = true;
      ++out.tally.tp;
    } else {
      ++out.tally.fp;
    }
  }
  out.tally.fn = gt.size() - out.tally.tp;
  return out;
}

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  bool no_predictions = false;
  bool no_ground_truth = false;
};

/// Zero denominators give 0 and raise the matching flag.
inline PrecisionRecall precision_recall(const DetectionTally& t) {
  PrecisionRecall pr;
  if (t.tp + t.fp == 0) {
    pr.no_predictions = true;
  } else {
    pr.precision = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fp);
  }
  if (t.tp + t.fn == 0) {
    pr.no_ground_truth = true;
  } else {
    pr.recall = static_cast<double>(t.tp) / static_cast<double>(t.tp + t.fn);
  }
  return pr;
}

struct PRPoint {
  std::size_t rank = 0;  // 1-based
  double score = 0.0;
  std::size_t tp = 0;  // cumulative
  std::size_t fp = 0;  // cumulative
  double recall = 0.0;
  double precision = 0.0;
  double p_interp = 0.0;
};

/// One point per ranked prediction. Recall is non-decreasing along the list
/// and p_interp is the running maximum of precision taken from the right.
struct PRCurve {
  std::vector<PRPoint> points;
};

struct ApResult {
  std::optional<double> ap;  // empty when there is no ground truth
  std::string reason;
  PRCurve curve;
  DetectionTally tally;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;
  /// Adjacent predictions in the ranking with equal scores; their order
  /// came from input order.
  std::size_t score_ties = 0;
};

struct RankedDetection {
  double score = 0.0;
  bool tp = false;
};

/// Integrates an already ranked TP/FP sequence.
inline ApResult average_precision_from_ranking(std::span<const RankedDetection> ranked,
                                               std::size_t n_gt) {
  ApResult out;
  out.n_gt = n_gt;
  out.n_pred = ranked.size();
  auto& pts = out.curve.points;
  pts.reserve(ranked.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    ranked[k].tp ? ++tp : ++fp;
    PRPoint p;
    p.rank = k + 1;
    p.score = ranked[k].score;
    p.tp = tp;
    p.fp = fp;
    p.recall = n_gt ? static_cast<double>(tp) / static_cast<double>(n_gt) : 0.0;
    p.precision = static_cast<double>(tp) / static_cast<double>(k + 1);
    pts.push_back(p);
    if (k > 0 && ranked[k].score == ranked[k - 1].score) ++out.score_ties;
  }
  double running = 0.0;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    running = std::max(running, it->precision);
    it->p_interp = running;
  }
  out.tally = {tp, fp, n_gt - std::min(tp, n_gt)};
  if (n_gt == 0) {
    out.reason = "no ground-truth boxes";
    return out;
  }
  double ap = 0.0, prev_recall = 0.0;
  for (const auto& p : pts) {
    if (p.recall > prev_recall) {
      ap += (p.recall - prev_recall) * p.p_interp;
      prev_recall = p.recall;
    }
  }
  out.ap = ap;
  return out;
}

/// Pools every video into one ranking. Videos are paired by video_id; a
/// predicted video with no ground-truth counterpart contributes only false
/// positives. Ties in score keep input order (videos by id, then keyframe,
/// then row order).
inline ApResult average_precision(std::span<const VideoRecord> gt, std::span<const VideoRecord> pred,
                                  double iou_threshold = kDefaultIouThreshold) {
  std::map<std::string, const VideoRecord*> gt_by_id, pred_by_id;
  for (const auto& r : gt) gt_by_id[r.video_id] = &r;
  for (const auto& r : pred) pred_by_id[r.video_id] = &r;
  std::map<std::string, int> ids;
  for (const auto& [k, _] : gt_by_id) ids[k];
  for (const auto& [k, _] : pred_by_id) ids[k];

  std::vector<RankedDetection> all;
  std::size_t n_gt = 0;
  for (const auto& [id, _] : ids) {
    const VideoRecord empty;
    const VideoRecord& g = gt_by_id.count(id) ? *gt_by_id[id] : empty;
    const VideoRecord& p = pred_by_id.count(id) ? *pred_by_id[id] : empty;
    n_gt += g.observations.size();
    auto g_groups = group_by_keyframe(g);
    auto p_groups = group_by_keyframe(p);
    for (const auto& [kf, p_idx] : p_groups) {
      std::vector<BoundingBox> gboxes;
      if (auto it = g_groups.find(kf); it != g_groups.end()) {
        for (std::size_t i : it->second) gboxes.push_back(g.observations[i].box);
      }
      std::vector<ScoredBox> pboxes;
      for (std::size_t j : p_idx) pboxes.push_back({p.observations[j].box, p.observations[j].score});
      const auto ft = tally_frame(gboxes, pboxes, iou_threshold);
      for (std::size_t j = 0; j < pboxes.size(); ++j) all.push_back({pboxes[j].score, ft.is_tp[j]});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const RankedDetection& a, const RankedDetection& b) {
    return a.score > b.score;
  });
  return average_precision_from_ranking(all, n_gt);
}

}  // namespace asad
