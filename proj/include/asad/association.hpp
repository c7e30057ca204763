// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Two ways of turning per-keyframe detections into actor tubes:
//  - track_online: frame-by-frame assignment against live tracks, cost mixes
//    box overlap with the last position and appearance distance.
//  - track_offline: greedy agglomerative clustering over the whole stream,
//    linking detections by appearance with a motion term that fades with
//    the temporal gap, under a one-detection-per-keyframe constraint.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "asad/core_model.hpp"
#include "asad/geometry_matching.hpp"

namespace asad {

struct Detection {
  BoundingBox box;
  double score = 0.0;
  std::vector<double> appearance;

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct DetectionFrame {
  std::int64_t keyframe = 0;
  std::vector<Detection> detections;

  friend bool operator==(const DetectionFrame&, const DetectionFrame&) = default;
};

/// Identity-free detections of one video, frames in ascending keyframe order.
struct DetectionStream {
  std::string video_id;
  std::size_t appearance_dim = 0;
  std::vector<DetectionFrame> frames;

  std::size_t detection_count() const {
    std::size_t n = 0;
    for (const auto& f : frames) n += f.detections.size();
    return n;
  }
  friend bool operator==(const DetectionStream&, const DetectionStream&) = default;
};

/// Throws ValidationError on unsorted frames, bad boxes, or an appearance
/// vector whose length differs from appearance_dim.
inline void check_stream(const DetectionStream& stream) {
  for (std::size_t f = 0; f < stream.frames.size(); ++f) {
    const auto& frame = stream.frames[f];
    if (f > 0 && frame.keyframe <= stream.frames[f - 1].keyframe) {
      throw ValidationError("detection frames of '" + stream.video_id + "' are not strictly ascending");
    }
    for (const auto& d : frame.detections) {
      if (d.appearance.size() != stream.appearance_dim) {
        throw ValidationError("appearance dimension " + std::to_string(d.appearance.size()) +
                              " differs from declared " + std::to_string(stream.appearance_dim) +
                              " at keyframe " + std::to_string(frame.keyframe));
      }
      if (!d.box.is_valid()) {
        throw ValidationError("invalid detection box at keyframe " + std::to_string(frame.keyframe));
      }
    }
  }
}

enum class AssociationMode { kOnline, kOffline };

inline const char* to_string(AssociationMode m) {
  return m == AssociationMode::kOnline ? "online" : "offline";
}

struct AssociationConfig {
  AssociationMode mode = AssociationMode::kOnline;
  /// Weight of the box-overlap term; 1 - iou_weight goes to appearance.
  double iou_weight = 0.7;
  /// Online: reject a track/detection pair whose cost exceeds this.
  double online_threshold = 0.5;
  /// Offline: merge two clusters only at affinity >= this.
  double offline_threshold = 0.6;
  /// Online: tracks unseen for more than this many keyframes retire.
  /// Offline: longest keyframe gap a link may span.
  int max_gap = 5;

  static AssociationConfig online_defaults() { return {}; }
  static AssociationConfig offline_defaults() {
    AssociationConfig c;
    c.mode = AssociationMode::kOffline;
    c.iou_weight = 0.3;
    c.max_gap = 10;
    return c;
  }
  static AssociationConfig defaults_for(AssociationMode mode) {
    return mode == AssociationMode::kOnline ? online_defaults() : offline_defaults();
  }

  void check() const {
    if (!(iou_weight >= 0.0 && iou_weight <= 1.0)) throw ValidationError("iou weight must lie in [0,1]");
    if (!(online_threshold > 0.0 && online_threshold <= 1.0) ||
        !(offline_threshold > 0.0 && offline_threshold <= 1.0)) {
      throw ValidationError("association thresholds must lie in (0,1]");
    }
    if (max_gap < 1) throw ValidationError("max gap must be at least 1");
  }
};

/// 1 - cosine similarity; vectors of zero norm are treated as uninformative
/// (distance 1). Empty vectors (no appearance in the stream) give 0.
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() && b.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 1.0;
  return 1.0 - dot / std::sqrt(na * nb);
}

namespace detail {

inline void accumulate(std::vector<double>& sum, std::span<const double> v) {
  if (sum.empty()) sum.assign(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) sum[i] += v[i];
}

inline ActorObservation tracked_observation(const std::string& video_id, std::int64_t keyframe,
                                            const Detection& d, std::int64_t id) {
  return {video_id, keyframe, d.box, id, {}, d.score, {}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Online

inline VideoRecord track_online(const DetectionStream& stream,
                                const AssociationConfig& cfg = AssociationConfig::online_defaults()) {
  cfg.check();
  check_stream(stream);
  struct Track {
    std::int64_t id;
    BoundingBox last_box;
    std::vector<double> appearance_sum;  // direction of the running mean
    std::int64_t last_seen;
  };

  VideoRecord out{stream.video_id, kDefaultKeyframeStride, {}};
  std::vector<Track> active;
  std::int64_t next_id = 0;
  for (const auto& frame : stream.frames) {
    std::erase_if(active, [&](const Track& t) { return frame.keyframe - t.last_seen > cfg.max_gap; });
    const auto& dets = frame.detections;
    std::vector<std::int64_t> det_track(dets.size(), -1);
    if (!active.empty() && !dets.empty()) {
      // Above any sum of feasible costs, so feasible pairs are filled first.
      const double infeasible = static_cast<double>(active.size() + dets.size() + 1);
      CostMatrix cost(active.size(), dets.size());
      for (std::size_t t = 0; t < active.size(); ++t) {
        for (std::size_t d = 0; d < dets.size(); ++d) {
          const double c = cfg.iou_weight * (1.0 - iou(active[t].last_box, dets[d].box)) +
                           (1.0 - cfg.iou_weight) *
                               cosine_distance(active[t].appearance_sum, dets[d].appearance);
          cost(t, d) = c > cfg.online_threshold ? infeasible : c;
        }
      }
      for (const auto& m : solve_assignment(cost).pairs) {
        if (cost(m.row, m.col) >= infeasible) continue;
        auto& t = active[m.row];
        t.last_box = dets[m.col].box;
        t.last_seen = frame.keyframe;
        detail::accumulate(t.appearance_sum, dets[m.col].appearance);
        det_track[m.col] = t.id;
      }
    }
    for (std::size_t d = 0; d < dets.size(); ++d) {
      if (det_track[d] < 0) {
        det_track[d] = next_id++;
        Track t{det_track[d], dets[d].box, {}, frame.keyframe};
        detail::accumulate(t.appearance_sum, dets[d].appearance);
        active.push_back(std::move(t));
      }
      out.observations.push_back(
          detail::tracked_observation(stream.video_id, frame.keyframe, dets[d], det_track[d]));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Offline

/// Motion weight multiplier for a link spanning `gap` keyframes: 1 at gap 1,
/// falling linearly to 0 at max_gap.
inline double motion_decay(std::int64_t gap, int max_gap) {
  if (max_gap <= 1) return gap <= 1 ? 1.0 : 0.0;
  return std::clamp(static_cast<double>(max_gap - gap) / static_cast<double>(max_gap - 1), 0.0, 1.0);
}

inline VideoRecord track_offline(const DetectionStream& stream,
                                 const AssociationConfig& cfg = AssociationConfig::offline_defaults()) {
  cfg.check();
  check_stream(stream);

  struct Node {
    std::size_t frame;
    std::size_t index;
    std::int64_t keyframe;
  };
  std::vector<Node> nodes;
  for (std::size_t f = 0; f < stream.frames.size(); ++f) {
    for (std::size_t i = 0; i < stream.frames[f].detections.size(); ++i) {
      nodes.push_back({f, i, stream.frames[f].keyframe});
    }
  }
  auto det = [&](std::size_t n) -> const Detection& {
    return stream.frames[nodes[n].frame].detections[nodes[n].index];
  };

  struct Cluster {
    std::vector<std::size_t> members;
    std::vector<std::int64_t> keyframes;  // sorted
    std::vector<double> appearance_sum;
    std::size_t version = 0;
  };
  std::vector<std::size_t> owner(nodes.size());
  std::vector<Cluster> clusters(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    owner[n] = n;
    clusters[n].members = {n};
    clusters[n].keyframes = {nodes[n].keyframe};
    detail::accumulate(clusters[n].appearance_sum, det(n).appearance);
  }

  auto affinity = [&](std::size_t a, std::size_t b) {
    const double motion = cfg.iou_weight * motion_decay(nodes[b].keyframe - nodes[a].keyframe, cfg.max_gap);
    const double similarity =
        1.0 - cosine_distance(clusters[owner[a]].appearance_sum, clusters[owner[b]].appearance_sum);
    return (1.0 - motion) * similarity + motion * iou(det(a).box, det(b).box);
  };

  struct Edge {
    double affinity;
    std::size_t a, b;  // node indices, a < b
    std::size_t version_a, version_b;
  };
  // Highest affinity first; ties go to the earliest node pair.
  auto lower_priority = [](const Edge& x, const Edge& y) {
    if (x.affinity != y.affinity) return x.affinity < y.affinity;
    return std::tie(x.a, x.b) > std::tie(y.a, y.b);
  };
  std::priority_queue<Edge, std::vector<Edge>, decltype(lower_priority)> queue(lower_priority);
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const auto gap = nodes[b].keyframe - nodes[a].keyframe;
      if (gap <= 0) continue;
      if (gap > cfg.max_gap) break;
      queue.push({affinity(a, b), a, b, 0, 0});
    }
  }

  auto disjoint = [](const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) {
    std::size_t i = 0, j = 0;
    while (i < x.size() && j < y.size()) {
      if (x[i] == y[j]) return false;
      x[i] < y[j] ? ++i : ++j;
    }
    return true;
  };

  while (!queue.empty()) {
    Edge e = queue.top();
    queue.pop();
    const std::size_t ca = owner[e.a], cb = owner[e.b];
    if (ca == cb) continue;
    if (clusters[ca].version != e.version_a || clusters[cb].version != e.version_b) {
      // A cluster changed since this edge was scored; rescore lazily.
      queue.push({affinity(e.a, e.b), e.a, e.b, clusters[ca].version, clusters[cb].version});
      continue;
    }
    if (e.affinity < cfg.offline_threshold) continue;
    // Co-occurring detections never share an identity, and merging only adds
    // keyframes, so a conflicting edge can be dropped for good.
    if (!disjoint(clusters[ca].keyframes, clusters[cb].keyframes)) continue;

    std::size_t keep = ca, gone = cb;
    if (clusters[keep].members.size() < clusters[gone].members.size()) std::swap(keep, gone);
    auto& k = clusters[keep];
    auto& g = clusters[gone];
    for (std::size_t n : g.members) owner[n] = keep;
    k.members.insert(k.members.end(), g.members.begin(), g.members.end());
    std::vector<std::int64_t> merged;
    std::merge(k.keyframes.begin(), k.keyframes.end(), g.keyframes.begin(), g.keyframes.end(),
               std::back_inserter(merged));
    k.keyframes = std::move(merged);
    detail::accumulate(k.appearance_sum, g.appearance_sum);
    ++k.version;
    g = Cluster{};
    g.version = std::numeric_limits<std::size_t>::max();
  }

  // IDs in order of each cluster's earliest detection.
  std::map<std::size_t, std::int64_t> id_of_cluster;
  std::vector<std::int64_t> node_id(nodes.size());
  std::int64_t next_id = 0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    auto [it, inserted] = id_of_cluster.try_emplace(owner[n], next_id);
    if (inserted) ++next_id;
    node_id[n] = it->second;
  }

  VideoRecord out{stream.video_id, kDefaultKeyframeStride, {}};
  out.observations.reserve(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    out.observations.push_back(
        detail::tracked_observation(stream.video_id, nodes[n].keyframe, det(n), node_id[n]));
  }
  return out;
}

inline VideoRecord track(const DetectionStream& stream, const AssociationConfig& cfg) {
  return cfg.mode == AssociationMode::kOnline ? track_online(stream, cfg) : track_offline(stream, cfg);
}

}  // namespace asad
