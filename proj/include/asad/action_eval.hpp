// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Multi-label action quality over actor pairs matched by gated optimal
// assignment: Hamming loss restricted to pairs with IoU at or above the gate.

#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "asad/core_model.hpp"
#include "asad/geometry_matching.hpp"

namespace asad {

struct MatchedPair {
  std::string video_id;
  std::int64_t keyframe = 0;
  ActorObservation gt;
  ActorObservation pred;
};

/// Every pair has IoU >= the gate; no observation appears twice within a
/// keyframe.
struct MatchedPairSet {
  std::vector<MatchedPair> pairs;

  std::size_t size() const { return pairs.size(); }
  void append(const MatchedPairSet& other) {
    pairs.insert(pairs.end(), other.pairs.begin(), other.pairs.end());
  }
};

struct PairMatchOptions {
  double iou_threshold = kDefaultIouThreshold;
  /// Predictions below this score sit out of matching. Off by default.
  std::optional<double> min_score;
};

inline MatchedPairSet match_pairs(const VideoRecord& gt, const VideoRecord& pred,
                                  const PairMatchOptions& options = {}) {
  MatchedPairSet out;
  const double min_score = options.min_score.value_or(-std::numeric_limits<double>::infinity());
  for (const auto& km : match_keyframes(gt, pred, options.iou_threshold, min_score)) {
    for (const auto& p : km.pairs) {
      out.pairs.push_back({gt.video_id, km.keyframe, gt.observations[p.gt], pred.observations[p.pred]});
    }
  }
  return out;
}

/// Number of label positions in 1..n_labels where the two sets disagree.
inline std::size_t label_xor_count(const ActionLabelSet& a, const ActionLabelSet& b, int n_labels) {
  std::size_t count = 0;
  auto ia = a.begin(), ib = b.begin();
  auto in_range = [&](int l) { return l >= 1 && l <= n_labels; };
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && *ia < *ib)) {
      count += in_range(*ia++);
    } else if (ia == a.end() || *ib < *ia) {
      count += in_range(*ib++);
    } else {
      ++ia;
      ++ib;
    }
  }
  return count;
}

struct HammingResult {
  std::optional<double> hl;  // empty when no pair passed the gate
  std::string reason;
  std::size_t n_pairs = 0;
  std::size_t wrong_bits = 0;
  int n_labels = kDefaultNumLabels;
};

inline HammingResult hamming_from_counts(std::size_t wrong_bits, std::size_t n_pairs, int n_labels,
                                         double iou_threshold = kDefaultIouThreshold) {
  HammingResult r;
  r.n_pairs = n_pairs;
  r.wrong_bits = wrong_bits;
  r.n_labels = n_labels;
  if (n_pairs == 0) {
    r.reason = "no pairs at IoU >= " + format_threshold(iou_threshold);
    return r;
  }
  r.hl = static_cast<double>(wrong_bits) /
         (static_cast<double>(n_pairs) * static_cast<double>(n_labels));
  return r;
}

/// Mean per-label XOR over matched pairs, divided by n_labels.
inline HammingResult hamming_loss_at_iou(const MatchedPairSet& pairs, int n_labels,
                                         double iou_threshold = kDefaultIouThreshold) {
  if (n_labels < 1) throw ValidationError("n_labels must be positive");
  std::size_t wrong = 0;
  for (const auto& p : pairs.pairs) wrong += label_xor_count(p.gt.actions, p.pred.actions, n_labels);
  return hamming_from_counts(wrong, pairs.size(), n_labels, iou_threshold);
}

}  // namespace asad
