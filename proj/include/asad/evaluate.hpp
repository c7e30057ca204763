// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs every metric family over a set of videos and collects the results,
// with the raw tallies needed to recompute each ratio, into one report.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "asad/action_eval.hpp"
#include "asad/core_model.hpp"
#include "asad/detection_eval.hpp"
#include "asad/identity_eval.hpp"

#ifndef ASAD_VERSION
#define ASAD_VERSION "0.1.0"
#endif

namespace asad {

inline constexpr const char* kToolVersion = ASAD_VERSION;

struct EvalConfig {
  double iou_threshold = kDefaultIouThreshold;
  int n_labels = kDefaultNumLabels;
  /// Predictions below this score are ignored for HL pairing only.
  std::optional<double> min_score;
  bool id_switch_persistence = true;
  bool per_video = true;

  void check() const {
    if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) throw ValidationError("iou threshold must lie in (0,1]");
    if (n_labels < 1) throw ValidationError("n_labels must be positive");
  }
  friend bool operator==(const EvalConfig&, const EvalConfig&) = default;
};

/// Scores for one video, or for the whole set when video_id is empty.
struct MetricBlock {
  std::string video_id;

  std::optional<double> ap;
  std::string ap_reason;
  DetectionTally detection;
  std::size_t n_gt = 0;
  std::size_t n_pred = 0;

  std::optional<double> hl;
  std::string hl_reason;
  std::size_t n_pairs = 0;
  std::size_t wrong_bits = 0;

  double idf1 = 0.0;
  std::size_t idtp = 0;
  std::size_t idfp = 0;
  std::size_t idfn = 0;

  std::size_t mt = 0;
  std::size_t ml = 0;
  std::size_t n_tracks = 0;
  double mt_pct = 0.0;
  double ml_pct = 0.0;

  std::size_t id_switches = 0;

  friend bool operator==(const MetricBlock&, const MetricBlock&) = default;
};

struct EvalReport {
  std::string tool_version = kToolVersion;
  EvalConfig config;
  MetricBlock aggregate;
  /// Sorted by video_id; empty unless config.per_video.
  std::vector<MetricBlock> videos;

  std::string ap_name() const { return metric_name("AP", config.iou_threshold); }
  std::string hl_name() const { return metric_name("HL", config.iou_threshold); }

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Worker count: ASAD_BENCH_THREADS when set to a positive integer, else the
/// available hardware parallelism.
inline std::size_t worker_limit() {
  if (const char* env = std::getenv("ASAD_BENCH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
/// thrown is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline MetricBlock evaluate_video(const VideoRecord& gt, const VideoRecord& pred, const EvalConfig& cfg) {
  MetricBlock b;
  b.video_id = gt.video_id.empty() ? pred.video_id : gt.video_id;
  const double thr = cfg.iou_threshold;

  const auto ap = average_precision(std::span(&gt, 1), std::span(&pred, 1), thr);
  b.ap = ap.ap;
  b.ap_reason = ap.reason;
  b.detection = ap.tally;
  b.n_gt = ap.n_gt;
  b.n_pred = ap.n_pred;

  const auto hl = hamming_loss_at_iou(match_pairs(gt, pred, {thr, cfg.min_score}), cfg.n_labels, thr);
  b.hl = hl.hl;
  b.hl_reason = hl.reason;
  b.n_pairs = hl.n_pairs;
  b.wrong_bits = hl.wrong_bits;

  const auto id = idf1(gt, pred, thr);
  b.idf1 = id.idf1;
  b.idtp = id.match.idtp;
  b.idfp = id.match.idfp;
  b.idfn = id.match.idfn;

  const auto cov = mt_ml(gt, pred, thr);
  b.mt = cov.mt;
  b.ml = cov.ml;
  b.n_tracks = cov.n_tracks;
  b.mt_pct = cov.mt_pct;
  b.ml_pct = cov.ml_pct;

  b.id_switches = id_switches(gt, pred, {thr, cfg.id_switch_persistence});
  return b;
}

/// Sums tallies; ratios are recomputed from the sums. AP comes from one
/// ranking pooled over all videos and is passed in.
inline MetricBlock aggregate_blocks(std::span<const MetricBlock> blocks, const ApResult& pooled_ap,
                                    const EvalConfig& cfg) {
  MetricBlock a;
  for (const auto& b : blocks) {
    a.detection += b.detection;
    a.n_gt += b.n_gt;
    a.n_pred += b.n_pred;
    a.n_pairs += b.n_pairs;
    a.wrong_bits += b.wrong_bits;
    a.idtp += b.idtp;
    a.idfp += b.idfp;
    a.idfn += b.idfn;
    a.mt += b.mt;
    a.ml += b.ml;
    a.n_tracks += b.n_tracks;
    a.id_switches += b.id_switches;
  }
  a.ap = pooled_ap.ap;
  a.ap_reason = pooled_ap.reason;
  const auto hl = hamming_from_counts(a.wrong_bits, a.n_pairs, cfg.n_labels, cfg.iou_threshold);
  a.hl = hl.hl;
  a.hl_reason = hl.reason;
  a.idf1 = idf1_from_counts(a.idtp, a.idfp, a.idfn).idf1;
  a.mt_pct = percent(a.mt, a.n_tracks);
  a.ml_pct = percent(a.ml, a.n_tracks);
  return a;
}

/// Videos are paired by id; a video present on one side only is scored
/// against an empty record. Results do not depend on the worker count.
inline EvalReport evaluate(std::span<const VideoRecord> gt, std::span<const VideoRecord> pred,
                           const EvalConfig& cfg = {}, std::size_t workers = worker_limit()) {
  cfg.check();
  std::map<std::string, std::pair<const VideoRecord*, const VideoRecord*>> by_id;
  for (const auto& r : gt) {
    if (!by_id.try_emplace(r.video_id, &r, nullptr).second) {
      throw ValidationError("duplicate ground-truth video '" + r.video_id + "'");
    }
  }
  for (const auto& r : pred) {
    auto& slot = by_id[r.video_id];
    if (slot.second) throw ValidationError("duplicate predicted video '" + r.video_id + "'");
    slot.second = &r;
  }

  std::vector<std::pair<const VideoRecord*, const VideoRecord*>> jobs;
  for (const auto& [_, p] : by_id) jobs.push_back(p);
  std::vector<MetricBlock> blocks(jobs.size());
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    const VideoRecord empty_gt{jobs[i].second ? jobs[i].second->video_id : "", kDefaultKeyframeStride, {}};
    const VideoRecord empty_pred{jobs[i].first ? jobs[i].first->video_id : "", kDefaultKeyframeStride, {}};
    blocks[i] = evaluate_video(jobs[i].first ? *jobs[i].first : empty_gt,
                               jobs[i].second ? *jobs[i].second : empty_pred, cfg);
  });

  EvalReport report;
  report.config = cfg;
  report.aggregate = aggregate_blocks(blocks, average_precision(gt, pred, cfg.iou_threshold), cfg);
  if (cfg.per_video) report.videos = std::move(blocks);
  return report;
}

}  // namespace asad
