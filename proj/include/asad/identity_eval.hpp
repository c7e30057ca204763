// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Actor identification: IDF1 under the best one-to-one identity pairing,
// mostly-tracked / mostly-lost coverage, and identity switches.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "asad/core_model.hpp"
#include "asad/geometry_matching.hpp"

namespace asad {

// ---------------------------------------------------------------------------
// IDF1

/// Per-identity observation counts and the number of keyframes where a GT
/// identity and a predicted identity overlap at IoU >= threshold.
struct IdentityOverlap {
  std::vector<std::int64_t> gt_ids;    // ascending
  std::vector<std::int64_t> pred_ids;  // ascending
  std::vector<std::size_t> gt_length;
  std::vector<std::size_t> pred_length;
  std::vector<std::vector<std::size_t>> count;  // [gt][pred]
};

inline IdentityOverlap identity_overlap(const VideoRecord& gt, const VideoRecord& pred,
                                        double iou_threshold = kDefaultIouThreshold) {
  IdentityOverlap out;
  std::map<std::int64_t, std::size_t> g_index, p_index;
  for (const auto& o : gt.observations) g_index[o.actor_id];
  for (const auto& o : pred.observations) p_index[o.actor_id];
  for (auto& [id, idx] : g_index) {
    idx = out.gt_ids.size();
    out.gt_ids.push_back(id);
  }
  for (auto& [id, idx] : p_index) {
    idx = out.pred_ids.size();
    out.pred_ids.push_back(id);
  }
  out.gt_length.assign(out.gt_ids.size(), 0);
  out.pred_length.assign(out.pred_ids.size(), 0);
  out.count.assign(out.gt_ids.size(), std::vector<std::size_t>(out.pred_ids.size(), 0));
  for (const auto& o : gt.observations) ++out.gt_length[g_index[o.actor_id]];
  for (const auto& o : pred.observations) ++out.pred_length[p_index[o.actor_id]];

  auto p_groups = group_by_keyframe(pred);
  for (const auto& [kf, g_idx] : group_by_keyframe(gt)) {
    auto it = p_groups.find(kf);
    if (it == p_groups.end()) continue;
    for (std::size_t i : g_idx) {
      const auto& g = gt.observations[i];
      for (std::size_t j : it->second) {
        const auto& p = pred.observations[j];
        if (iou(g.box, p.box) >= iou_threshold) ++out.count[g_index[g.actor_id]][p_index[p.actor_id]];
      }
    }
  }
  return out;
}

struct IdMatchResult {
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;
  /// (gt actor_id, predicted actor_id) pairs that share at least one
  /// identity-true-positive observation.
  std::vector<std::pair<std::int64_t, std::int64_t>> pairing;

  friend bool operator==(const IdMatchResult&, const IdMatchResult&) = default;
};

struct Idf1Result {
  double idf1 = 0.0;
  /// Both sides empty; idf1 is reported as 1.
  bool vacuous = false;
  IdMatchResult match;
};

inline Idf1Result idf1_from_counts(std::size_t idtp, std::size_t idfp, std::size_t idfn) {
  Idf1Result r;
  r.match.idtp = idtp;
  r.match.idfp = idfp;
  r.match.idfn = idfn;
  const std::size_t denom = 2 * idtp + idfp + idfn;
  if (denom == 0) {
    r.idf1 = 1.0;
    r.vacuous = true;
  } else {
    r.idf1 = static_cast<double>(2 * idtp) / static_cast<double>(denom);
  }
  return r;
}

/// Pairs identities to maximize IDTP, solved as a min-cost assignment on the
/// negated overlap counts. Minimizing misses plus false positives over a
/// pairing is the same problem, since both totals are fixed.
inline Idf1Result idf1(const VideoRecord& gt, const VideoRecord& pred,
                       double iou_threshold = kDefaultIouThreshold) {
  const auto ov = identity_overlap(gt, pred, iou_threshold);
  std::size_t idtp = 0;
  std::vector<std::pair<std::int64_t, std::int64_t>> pairing;
  if (!ov.gt_ids.empty() && !ov.pred_ids.empty()) {
    CostMatrix cost(ov.gt_ids.size(), ov.pred_ids.size());
    for (std::size_t g = 0; g < ov.gt_ids.size(); ++g)
      for (std::size_t p = 0; p < ov.pred_ids.size(); ++p)
        cost(g, p) = -static_cast<double>(ov.count[g][p]);
    for (const auto& m : solve_assignment(cost).pairs) {
      if (ov.count[m.row][m.col] == 0) continue;
      idtp += ov.count[m.row][m.col];
      pairing.emplace_back(ov.gt_ids[m.row], ov.pred_ids[m.col]);
    }
  }
  const std::size_t n_gt = gt.observations.size();
  const std::size_t n_pred = pred.observations.size();
  auto r = idf1_from_counts(idtp, n_pred - idtp, n_gt - idtp);
  r.match.pairing = std::move(pairing);
  return r;
}

// ---------------------------------------------------------------------------
// MT / ML

enum class CoverageClass { kMostlyTracked, kPartiallyTracked, kMostlyLost };

inline constexpr double kMostlyTrackedRatio = 0.8;
inline constexpr double kMostlyLostRatio = 0.2;

/// Both bounds inclusive.
inline CoverageClass classify_ratio(double ratio) {
  if (ratio >= kMostlyTrackedRatio) return CoverageClass::kMostlyTracked;
  if (ratio <= kMostlyLostRatio) return CoverageClass::kMostlyLost;
  return CoverageClass::kPartiallyTracked;
}

/// Integer form of classify_ratio: covered/total >= 4/5 or <= 1/5, exactly.
inline CoverageClass classify_coverage(std::size_t covered, std::size_t total) {
  if (5 * covered >= 4 * total) return CoverageClass::kMostlyTracked;
  if (5 * covered <= total) return CoverageClass::kMostlyLost;
  return CoverageClass::kPartiallyTracked;
}

struct TrackCoverage {
  std::int64_t actor_id = 0;
  std::size_t covered = 0;  // GT keyframes matched by any prediction
  std::size_t total = 0;
  double ratio = 0.0;
  CoverageClass cls = CoverageClass::kMostlyLost;
};

struct MtMlResult {
  std::size_t mt = 0;
  std::size_t ml = 0;
  std::size_t n_tracks = 0;
  double mt_pct = 0.0;
  double ml_pct = 0.0;
  std::vector<TrackCoverage> coverage;
};

inline double percent(std::size_t part, std::size_t whole) {
  return whole ? 100.0 * static_cast<double>(part) / static_cast<double>(whole) : 0.0;
}

/// Coverage counts a GT keyframe when the gated per-keyframe matching pairs
/// that observation with any prediction, whatever its predicted ID.
inline MtMlResult mt_ml(const VideoRecord& gt, const VideoRecord& pred,
                        double iou_threshold = kDefaultIouThreshold) {
  std::map<std::int64_t, TrackCoverage> per_actor;
  for (const auto& o : gt.observations) {
    auto& c = per_actor[o.actor_id];
    c.actor_id = o.actor_id;
    ++c.total;
  }
  for (const auto& km : match_keyframes(gt, pred, iou_threshold)) {
    for (const auto& p : km.pairs) ++per_actor[gt.observations[p.gt].actor_id].covered;
  }
  MtMlResult out;
  for (auto& [id, c] : per_actor) {
    c.ratio = static_cast<double>(c.covered) / static_cast<double>(c.total);
    c.cls = classify_coverage(c.covered, c.total);
    out.mt += c.cls == CoverageClass::kMostlyTracked;
    out.ml += c.cls == CoverageClass::kMostlyLost;
    out.coverage.push_back(c);
  }
  out.n_tracks = out.coverage.size();
  out.mt_pct = percent(out.mt, out.n_tracks);
  out.ml_pct = percent(out.ml, out.n_tracks);
  return out;
}

// ---------------------------------------------------------------------------
// ID switches

struct IdSwitchOptions {
  double iou_threshold = kDefaultIouThreshold;
  /// Keep a GT actor's previous predicted ID when it is still present at
  /// IoU >= threshold, before assigning the rest.
  bool persistence = true;
};

/// Counts changes of the matched predicted ID between consecutive matched
/// keyframes of each GT actor.
inline std::size_t id_switches(const VideoRecord& gt, const VideoRecord& pred,
                               const IdSwitchOptions& options = {}) {
  auto g_groups = group_by_keyframe(gt);
  auto p_groups = group_by_keyframe(pred);
  std::map<std::int64_t, std::int64_t> last_match;
  std::size_t switches = 0;

  for (auto& [kf, g_idx] : g_groups) {
    auto pit = p_groups.find(kf);
    if (pit == p_groups.end()) continue;
    auto& p_idx = pit->second;
    std::stable_sort(g_idx.begin(), g_idx.end(), [&](std::size_t a, std::size_t b) {
      return gt.observations[a].actor_id < gt.observations[b].actor_id;
    });

    std::vector<ObservationPair> pairs;
    std::vector<char> g_used(g_idx.size(), 0), p_used(p_idx.size(), 0);
    if (options.persistence) {
      for (std::size_t a = 0; a < g_idx.size(); ++a) {
        const auto& g = gt.observations[g_idx[a]];
        auto lm = last_match.find(g.actor_id);
        if (lm == last_match.end()) continue;
        for (std::size_t b = 0; b < p_idx.size(); ++b) {
          const auto& p = pred.observations[p_idx[b]];
          if (p_used[b] || p.actor_id != lm->second) continue;
          if (iou(g.box, p.box) >= options.iou_threshold) {
            g_used[a] = p_used[b] = 1;
            pairs.push_back({g_idx[a], p_idx[b]});
          }
          break;
        }
      }
    }
    std::vector<std::size_t> g_rest, p_rest;
    std::vector<BoundingBox> g_boxes, p_boxes;
    for (std::size_t a = 0; a < g_idx.size(); ++a) {
      if (g_used[a]) continue;
      g_rest.push_back(g_idx[a]);
      g_boxes.push_back(gt.observations[g_idx[a]].box);
    }
    for (std::size_t b = 0; b < p_idx.size(); ++b) {
      if (p_used[b]) continue;
      p_rest.push_back(p_idx[b]);
      p_boxes.push_back(pred.observations[p_idx[b]].box);
    }
    for (const auto& m : match_boxes(g_boxes, p_boxes, options.iou_threshold)) {
      pairs.push_back({g_rest[m.row], p_rest[m.col]});
    }

    for (const auto& pr : pairs) {
      const auto g_id = gt.observations[pr.gt].actor_id;
      const auto p_id = pred.observations[pr.pred].actor_id;
      auto [it, inserted] = last_match.try_emplace(g_id, p_id);
      if (!inserted && it->second != p_id) {
        ++switches;
        it->second = p_id;
      }
    }
  }
  return switches;
}

}  // namespace asad
