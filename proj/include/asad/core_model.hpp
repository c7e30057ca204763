// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared domain types: boxes, label sets, per-keyframe actor observations,
// tracklets and per-video records, plus record validation.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace asad {

inline constexpr int kDefaultNumLabels = 80;
inline constexpr int kDefaultKeyframeStride = 25;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when input data breaks a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Axis-aligned box in normalized frame coordinates.
struct BoundingBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double area() const { return width() * height(); }

  bool has_positive_area() const { return x1 < x2 && y1 < y2; }
  bool in_unit_square() const {
    return x1 >= 0.0 && y1 >= 0.0 && x2 <= 1.0 && y2 <= 1.0 && x1 <= 1.0 &&
           y1 <= 1.0 && x2 >= 0.0 && y2 >= 0.0;
  }
  bool is_valid() const { return has_positive_area() && in_unit_square(); }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

/// Set of action-category IDs, kept sorted and free of duplicates.
class ActionLabelSet {
 public:
  ActionLabelSet() = default;
  ActionLabelSet(std::initializer_list<int> labels) {
    for (int l : labels) insert(l);
  }
  explicit ActionLabelSet(std::vector<int> labels) : labels_(std::move(labels)) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
  }

  void insert(int label) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) labels_.insert(it, label);
  }
  void erase(int label) {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it != labels_.end() && *it == label) labels_.erase(it);
  }
  void toggle(int label) {
    if (contains(label)) {
      erase(label);
    } else {
      insert(label);
    }
  }
  bool contains(int label) const {
    return std::binary_search(labels_.begin(), labels_.end(), label);
  }

  bool empty() const { return labels_.empty(); }
  std::size_t size() const { return labels_.size(); }
  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }
  const std::vector<int>& values() const { return labels_; }

  friend bool operator==(const ActionLabelSet&, const ActionLabelSet&) = default;

 private:
  std::vector<int> labels_;
};

/// One actor at one keyframe. Ground truth carries score 1.0.
struct ActorObservation {
  std::string video_id;
  std::int64_t keyframe = 0;
  BoundingBox box;
  std::int64_t actor_id = 0;
  ActionLabelSet actions;
  double score = 1.0;
  std::vector<double> appearance;

  friend bool operator==(const ActorObservation&, const ActorObservation&) = default;
};

/// Keyframe-ordered observations of one actor within one video.
struct Tracklet {
  std::int64_t actor_id = 0;
  std::vector<ActorObservation> observations;

  std::size_t length() const { return observations.size(); }
};

/// All observations of one video, for either ground truth or predictions.
/// Keyframes index the annotated-frame sequence; the stride is metadata.
struct VideoRecord {
  std::string video_id;
  int keyframe_stride = kDefaultKeyframeStride;
  std::vector<ActorObservation> observations;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

enum class Role { kGroundTruth, kPrediction };

/// Observation indices grouped by keyframe, ascending, each group in input order.
inline std::map<std::int64_t, std::vector<std::size_t>> group_by_keyframe(
    const VideoRecord& record) {
  std::map<std::int64_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < record.observations.size(); ++i) {
    groups[record.observations[i].keyframe].push_back(i);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
  kVideoIdMismatch,
  kNegativeIndex,
  kDegenerateBox,
  kCoordinateOutOfRange,
  kDuplicateIdentity,
  kEmptyGroundTruthLabels,
  kLabelOutOfRange,
  kScoreOutOfRange,
  kGroundTruthScore,
  kAppearanceDimension,
  kBadStride,
};

inline const char* to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kVideoIdMismatch: return "video id mismatch";
    case ViolationKind::kNegativeIndex: return "negative index";
    case ViolationKind::kDegenerateBox: return "degenerate box";
    case ViolationKind::kCoordinateOutOfRange: return "coordinate out of range";
    case ViolationKind::kDuplicateIdentity: return "duplicate identity at keyframe";
    case ViolationKind::kEmptyGroundTruthLabels: return "empty ground-truth label set";
    case ViolationKind::kLabelOutOfRange: return "action label out of range";
    case ViolationKind::kScoreOutOfRange: return "score out of range";
    case ViolationKind::kGroundTruthScore: return "ground-truth score is not 1";
    case ViolationKind::kAppearanceDimension: return "appearance dimension mismatch";
    case ViolationKind::kBadStride: return "keyframe stride not positive";
  }
  return "unknown";
}

struct Violation {
  ViolationKind kind;
  std::int64_t keyframe = 0;
  std::int64_t actor_id = 0;

  std::string describe() const {
    return std::string(to_string(kind)) + " (keyframe " + std::to_string(keyframe) +
           ", actor " + std::to_string(actor_id) + ")";
  }

  friend bool operator==(const Violation&, const Violation&) = default;
  friend auto operator<=>(const Violation& a, const Violation& b) {
    return std::tie(a.keyframe, a.actor_id, a.kind) <=>
           std::tie(b.keyframe, b.actor_id, b.kind);
  }
};

struct ValidationOptions {
  Role role = Role::kGroundTruth;
  int n_labels = kDefaultNumLabels;
};

/// Checks every record invariant. The result is sorted by (keyframe,
/// actor_id, kind), so it does not depend on observation order.
inline std::vector<Violation> validate_record(const VideoRecord& record,
                                              const ValidationOptions& options = {}) {
  std::vector<Violation> out;
  if (record.keyframe_stride <= 0) out.push_back({ViolationKind::kBadStride, 0, 0});

  std::map<std::pair<std::int64_t, std::int64_t>, int> seen;
  bool have_dim = false;
  std::size_t dim = 0;
  for (const auto& obs : record.observations) {
    auto add = [&](ViolationKind kind) { out.push_back({kind, obs.keyframe, obs.actor_id}); };
    if (obs.video_id != record.video_id) add(ViolationKind::kVideoIdMismatch);
    if (obs.keyframe < 0 || obs.actor_id < 0) add(ViolationKind::kNegativeIndex);
    if (!obs.box.has_positive_area()) add(ViolationKind::kDegenerateBox);
    if (!obs.box.in_unit_square()) add(ViolationKind::kCoordinateOutOfRange);
    if (++seen[{obs.keyframe, obs.actor_id}] == 2) add(ViolationKind::kDuplicateIdentity);
    if (options.role == Role::kGroundTruth && obs.actions.empty()) {
      add(ViolationKind::kEmptyGroundTruthLabels);
    }
    for (int label : obs.actions) {
      if (label < 1 || label > options.n_labels) {
        add(ViolationKind::kLabelOutOfRange);
        break;
      }
    }
    if (!(obs.score >= 0.0 && obs.score <= 1.0)) add(ViolationKind::kScoreOutOfRange);
    if (options.role == Role::kGroundTruth && obs.score != 1.0) {
      add(ViolationKind::kGroundTruthScore);
    }
    if (!obs.appearance.empty()) {
      if (!have_dim) {
        have_dim = true;
        dim = obs.appearance.size();
      } else if (obs.appearance.size() != dim) {
        add(ViolationKind::kAppearanceDimension);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Throws ValidationError listing every violation, if any.
inline void require_valid(const VideoRecord& record, const ValidationOptions& options = {}) {
  auto violations = validate_record(record, options);
  if (violations.empty()) return;
  std::string msg = "video '" + record.video_id + "' is invalid:";
  for (const auto& v : violations) msg += "\n  " + v.describe();
  throw ValidationError(msg);
}

/// Partitions a record by actor_id. Tracklets come out in ascending actor_id
/// order with keyframe-sorted observations.
inline std::vector<Tracklet> build_tracklets(const VideoRecord& record) {
  std::map<std::int64_t, Tracklet> by_actor;
  for (const auto& obs : record.observations) {
    auto& t = by_actor[obs.actor_id];
    t.actor_id = obs.actor_id;
    t.observations.push_back(obs);
  }
  std::vector<Tracklet> out;
  out.reserve(by_actor.size());
  for (auto& [id, t] : by_actor) {
    std::stable_sort(t.observations.begin(), t.observations.end(),
                     [](const auto& a, const auto& b) { return a.keyframe < b.keyframe; });
    for (std::size_t i = 1; i < t.observations.size(); ++i) {
      if (t.observations[i].keyframe == t.observations[i - 1].keyframe) {
        throw ValidationError("actor " + std::to_string(id) + " appears twice at keyframe " +
                              std::to_string(t.observations[i].keyframe) + " in video '" +
                              record.video_id + "'");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace asad
