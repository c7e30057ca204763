// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// File formats. All CSVs are comma separated with a fixed header row, no
// quoting, LF or CRLF line endings, and '.' as the decimal point whatever the
// process locale. Numbers are written in the shortest form that parses back
// to the same double.
//
//   annotations   video_id,keyframe,x1,y1,x2,y2,action_id,actor_id[,score]
//                 one row per (observation, action); predictions may leave
//                 action_id empty for an observation without actions
//   detections    video_id,keyframe,x1,y1,x2,y2,score,e0,...,e{D-1}
//   pr curve      rank,score,tp,fp,recall,precision,p_interp
//
// Reports and scenario manifests are JSON.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "json.hpp"

#include "asad/association.hpp"
#include "asad/core_model.hpp"
#include "asad/detection_eval.hpp"
#include "asad/evaluate.hpp"
#include "asad/synthetic_bench.hpp"

namespace asad {

/// Thrown when a file cannot be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path + "'");
  return ss.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Scalars

inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

namespace detail {

/// Splits one CSV line; a trailing '\r' is dropped first.
inline std::vector<std::string_view> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

/// Non-empty lines with their 1-based line numbers. A UTF-8 byte order mark
/// is skipped.
inline std::vector<std::pair<std::size_t, std::string_view>> lines_of(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::pair<std::size_t, std::string_view>> out;
  std::size_t start = 0, number = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++number;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.emplace_back(number, line);
    start = end + 1;
  }
  return out;
}

class LineError {
 public:
  LineError(std::string source, std::size_t line) : source_(std::move(source)), line_(line) {}
  [[noreturn]] void fail(const std::string& what) const {
    throw ValidationError(source_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::string source_;
  std::size_t line_;
};

inline double parse_double(std::string_view cell, const char* column, const LineError& err) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    err.fail(std::string("malformed number '") + std::string(cell) + "' in column " + column);
  }
  return v;
}

inline std::int64_t parse_int(std::string_view cell, const char* column, const LineError& err) {
  std::int64_t v = 0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
    err.fail(std::string("malformed integer '") + std::string(cell) + "' in column " + column);
  }
  return v;
}

inline void check_video_id(std::string_view id) {
  if (id.empty() || id.find_first_of(",\r\n") != std::string_view::npos) {
    throw ValidationError("video_id '" + std::string(id) + "' is empty or contains a comma or line break");
  }
}

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Annotations

inline std::string annotation_header(Role role) {
  return role == Role::kGroundTruth ? "video_id,keyframe,x1,y1,x2,y2,action_id,actor_id"
                                    : "video_id,keyframe,x1,y1,x2,y2,action_id,actor_id,score";
}

/// Groups rows into observations by (video_id, keyframe, actor_id) and
/// validates the result. Records come back sorted by video_id, observations
/// by (keyframe, actor_id). `source` prefixes error messages.
inline std::vector<VideoRecord> parse_annotations(std::string_view text, Role role,
                                                  int n_labels = kDefaultNumLabels,
                                                  const std::string& source = "<input>") {
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw ValidationError(source + ": missing header row");
  const std::string expected = annotation_header(role);
  if (lines[0].second != expected) {
    const std::string other = annotation_header(role == Role::kGroundTruth ? Role::kPrediction : Role::kGroundTruth);
    throw ValidationError(source + ":" + std::to_string(lines[0].first) + ": header must be '" + expected + "'" +
                          (lines[0].second == other ? (role == Role::kGroundTruth ? " (score column is not allowed in ground truth)"
                                                                                  : " (predictions need a score column)")
                                                    : ""));
  }
  const std::size_t n_cols = role == Role::kGroundTruth ? 8 : 9;

  struct Pending {
    ActorObservation obs;
    std::size_t line = 0;
    bool unlabeled = false;
  };
  using Key = std::tuple<std::string, std::int64_t, std::int64_t>;
  std::map<Key, Pending> grouped;

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    const detail::LineError err(source, number);
    const auto cells = detail::split_csv(line);
    if (cells.size() != n_cols) {
      err.fail("expected " + std::to_string(n_cols) + " columns, found " + std::to_string(cells.size()));
    }
    ActorObservation o;
    o.video_id = std::string(cells[0]);
    if (o.video_id.empty()) err.fail("empty video_id");
    o.keyframe = detail::parse_int(cells[1], "keyframe", err);
    if (o.keyframe < 0) err.fail("negative keyframe");
    o.box = {detail::parse_double(cells[2], "x1", err), detail::parse_double(cells[3], "y1", err),
             detail::parse_double(cells[4], "x2", err), detail::parse_double(cells[5], "y2", err)};
    if (!o.box.in_unit_square()) err.fail("coordinate outside [0,1]");
    if (!o.box.has_positive_area()) err.fail("box needs x1 < x2 and y1 < y2");
    std::optional<int> action;
    if (!cells[6].empty() || role == Role::kGroundTruth) {
      const auto a = detail::parse_int(cells[6], "action_id", err);
      if (a < 1 || a > n_labels) err.fail("action_id " + std::to_string(a) + " outside [1," + std::to_string(n_labels) + "]");
      action = static_cast<int>(a);
    }
    o.actor_id = detail::parse_int(cells[7], "actor_id", err);
    if (o.actor_id < 0) err.fail("negative actor_id");
    if (role == Role::kPrediction) {
      o.score = detail::parse_double(cells[8], "score", err);
      if (o.score < 0.0 || o.score > 1.0) err.fail("score outside [0,1]");
    }

    auto [it, inserted] = grouped.try_emplace({o.video_id, o.keyframe, o.actor_id});
    auto& p = it->second;
    if (inserted) {
      p.obs = std::move(o);
      p.line = number;
      p.unlabeled = !action;
      if (action) p.obs.actions.insert(*action);
      continue;
    }
    const std::string first = " (first row at line " + std::to_string(p.line) + ")";
    if (!(p.obs.box == o.box)) err.fail("box disagrees with earlier row of the same observation" + first);
    if (p.obs.score != o.score) err.fail("score disagrees with earlier row of the same observation" + first);
    if (!action || p.unlabeled) err.fail("unlabeled row mixed with labeled rows of one observation" + first);
    if (p.obs.actions.contains(*action)) err.fail("repeated action_id " + std::to_string(*action) + first);
    p.obs.actions.insert(*action);
  }

  std::vector<VideoRecord> out;
  std::map<std::string, std::map<std::pair<std::int64_t, std::int64_t>, std::size_t>> line_of;
  for (auto& [key, p] : grouped) {
    const auto& vid = std::get<0>(key);
    if (out.empty() || out.back().video_id != vid) out.push_back({vid, kDefaultKeyframeStride, {}});
    line_of[vid][{p.obs.keyframe, p.obs.actor_id}] = p.line;
    out.back().observations.push_back(std::move(p.obs));
  }
  for (const auto& r : out) {
    const auto violations = validate_record(r, {role, n_labels});
    if (!violations.empty()) {
      const auto& v = violations.front();
      const auto it = line_of[r.video_id].find({v.keyframe, v.actor_id});
      const std::string where = it == line_of[r.video_id].end() ? "" : ":" + std::to_string(it->second);
      throw ValidationError(source + where + ": video '" + r.video_id + "': " + v.describe());
    }
  }
  return out;
}

inline std::vector<VideoRecord> read_annotations(const std::string& path, Role role,
                                                 int n_labels = kDefaultNumLabels) {
  return parse_annotations(read_file(path), role, n_labels, path);
}

/// Canonical form: rows ordered by video_id, keyframe, actor_id, action_id.
inline std::string write_annotations(std::span<const VideoRecord> records, Role role) {
  struct Row {
    const ActorObservation* obs;
    std::optional<int> action;
  };
  std::vector<Row> rows;
  for (const auto& r : records) {
    for (const auto& o : r.observations) {
      detail::check_video_id(o.video_id);
      if (o.actions.empty()) {
        if (role == Role::kGroundTruth) {
          throw ValidationError("ground-truth observation without actions cannot be written");
        }
        rows.push_back({&o, std::nullopt});
      }
      for (int a : o.actions) rows.push_back({&o, a});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.obs->video_id, a.obs->keyframe, a.obs->actor_id, a.action) <
           std::tie(b.obs->video_id, b.obs->keyframe, b.obs->actor_id, b.action);
  });
  std::string out = annotation_header(role) + "\n";
  for (const auto& row : rows) {
    const auto& o = *row.obs;
    std::vector<std::string> cells{o.video_id,
                                   std::to_string(o.keyframe),
                                   format_double(o.box.x1),
                                   format_double(o.box.y1),
                                   format_double(o.box.x2),
                                   format_double(o.box.y2),
                                   row.action ? std::to_string(*row.action) : "",
                                   std::to_string(o.actor_id)};
    if (role == Role::kPrediction) cells.push_back(format_double(o.score));
    out += detail::join(cells);
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Detection streams

/// One stream per video_id, sorted by id. Frames ascend by keyframe; rows of
/// one keyframe keep file order, also when the file itself is unsorted.
inline std::vector<DetectionStream> parse_detection_streams(std::string_view text,
                                                            const std::string& source = "<input>") {
  const auto lines = detail::lines_of(text);
  if (lines.empty()) throw ValidationError(source + ": missing header row");
  const auto header = detail::split_csv(lines[0].second);
  const std::vector<std::string_view> fixed{"video_id", "keyframe", "x1", "y1", "x2", "y2", "score"};
  if (header.size() < fixed.size() || !std::equal(fixed.begin(), fixed.end(), header.begin())) {
    throw ValidationError(source + ":" + std::to_string(lines[0].first) +
                          ": header must start with 'video_id,keyframe,x1,y1,x2,y2,score'");
  }
  const std::size_t dim = header.size() - fixed.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (header[fixed.size() + i] != "e" + std::to_string(i)) {
      throw ValidationError(source + ":" + std::to_string(lines[0].first) + ": embedding column " +
                            std::to_string(i) + " must be named e" + std::to_string(i));
    }
  }

  std::map<std::string, std::map<std::int64_t, std::vector<Detection>>> grouped;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    const detail::LineError err(source, number);
    const auto cells = detail::split_csv(line);
    if (cells.size() != header.size()) {
      err.fail("expected " + std::to_string(dim) + " embedding values, found " +
               std::to_string(cells.size() < fixed.size() ? 0 : cells.size() - fixed.size()));
    }
    const std::string vid(cells[0]);
    if (vid.empty()) err.fail("empty video_id");
    const auto kf = detail::parse_int(cells[1], "keyframe", err);
    if (kf < 0) err.fail("negative keyframe");
    Detection d;
    d.box = {detail::parse_double(cells[2], "x1", err), detail::parse_double(cells[3], "y1", err),
             detail::parse_double(cells[4], "x2", err), detail::parse_double(cells[5], "y2", err)};
    if (!d.box.in_unit_square()) err.fail("coordinate outside [0,1]");
    if (!d.box.has_positive_area()) err.fail("box needs x1 < x2 and y1 < y2");
    d.score = detail::parse_double(cells[6], "score", err);
    if (d.score < 0.0 || d.score > 1.0) err.fail("score outside [0,1]");
    d.appearance.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      const std::string col = "e" + std::to_string(i);
      d.appearance.push_back(detail::parse_double(cells[fixed.size() + i], col.c_str(), err));
    }
    grouped[vid][kf].push_back(std::move(d));
  }

  std::vector<DetectionStream> out;
  for (auto& [vid, frames] : grouped) {
    DetectionStream s{vid, dim, {}};
    for (auto& [kf, dets] : frames) s.frames.push_back({kf, std::move(dets)});
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<DetectionStream> read_detection_streams(const std::string& path) {
  return parse_detection_streams(read_file(path), path);
}

/// All streams must share one appearance dimension.
inline std::string write_detection_streams(std::span<const DetectionStream> streams) {
  const std::size_t dim = streams.empty() ? 0 : streams.front().appearance_dim;
  std::string out = "video_id,keyframe,x1,y1,x2,y2,score";
  for (std::size_t i = 0; i < dim; ++i) out += ",e" + std::to_string(i);
  out += '\n';
  for (const auto& s : streams) {
    detail::check_video_id(s.video_id);
    if (s.appearance_dim != dim) throw ValidationError("streams disagree on appearance dimension");
    check_stream(s);
    for (const auto& f : s.frames) {
      for (const auto& d : f.detections) {
        std::vector<std::string> cells{s.video_id,
                                       std::to_string(f.keyframe),
                                       format_double(d.box.x1),
                                       format_double(d.box.y1),
                                       format_double(d.box.x2),
                                       format_double(d.box.y2),
                                       format_double(d.score)};
        for (double e : d.appearance) cells.push_back(format_double(e));
        out += detail::join(cells);
        out += '\n';
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// PR curve

inline std::string write_pr_curve(const PRCurve& curve) {
  std::string out = "rank,score,tp,fp,recall,precision,p_interp\n";
  for (const auto& p : curve.points) {
    out += detail::join({std::to_string(p.rank), format_double(p.score), std::to_string(p.tp),
                         std::to_string(p.fp), format_double(p.recall), format_double(p.precision),
                         format_double(p.p_interp)});
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports
//
// JSON layout:
//   { "tool": "asad-eval", "tool_version": "...",
//     "config": { "iou_threshold", "n_labels", "min_score" (number|null),
//                 "id_switch_persistence", "per_video" },
//     "metric_names": { "ap": "AP@0.5", "hl": "HL@0.5" },
//     "aggregate": <block>, "videos": [<block>, ...] }
// A block holds every MetricBlock field under its own name. "ap" and "hl"
// are null when undefined, and "ap_reason" / "hl_reason" then say why.

inline constexpr const char* kToolName = "asad-eval";

namespace detail {

using nlohmann::ordered_json;

inline ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

inline ordered_json block_to_json(const MetricBlock& b) {
  ordered_json j;
  j["video_id"] = b.video_id;
  j["ap"] = optional_number(b.ap);
  if (!b.ap) j["ap_reason"] = b.ap_reason;
  j["tp"] = b.detection.tp;
  j["fp"] = b.detection.fp;
  j["fn"] = b.detection.fn;
  j["n_gt"] = b.n_gt;
  j["n_pred"] = b.n_pred;
  j["hl"] = optional_number(b.hl);
  if (!b.hl) j["hl_reason"] = b.hl_reason;
  j["n_pairs"] = b.n_pairs;
  j["wrong_bits"] = b.wrong_bits;
  j["idf1"] = b.idf1;
  j["idtp"] = b.idtp;
  j["idfp"] = b.idfp;
  j["idfn"] = b.idfn;
  j["mt"] = b.mt;
  j["mt_pct"] = b.mt_pct;
  j["ml"] = b.ml;
  j["ml_pct"] = b.ml_pct;
  j["n_tracks"] = b.n_tracks;
  j["id_switches"] = b.id_switches;
  return j;
}

inline MetricBlock block_from_json(const ordered_json& j) {
  MetricBlock b;
  b.video_id = j.at("video_id").get<std::string>();
  if (!j.at("ap").is_null()) {
    b.ap = j.at("ap").get<double>();
  } else {
    b.ap_reason = j.value("ap_reason", "");
  }
  b.detection = {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(), j.at("fn").get<std::size_t>()};
  b.n_gt = j.at("n_gt").get<std::size_t>();
  b.n_pred = j.at("n_pred").get<std::size_t>();
  if (!j.at("hl").is_null()) {
    b.hl = j.at("hl").get<double>();
  } else {
    b.hl_reason = j.value("hl_reason", "");
  }
  b.n_pairs = j.at("n_pairs").get<std::size_t>();
  b.wrong_bits = j.at("wrong_bits").get<std::size_t>();
  b.idf1 = j.at("idf1").get<double>();
  b.idtp = j.at("idtp").get<std::size_t>();
  b.idfp = j.at("idfp").get<std::size_t>();
  b.idfn = j.at("idfn").get<std::size_t>();
  b.mt = j.at("mt").get<std::size_t>();
  b.mt_pct = j.at("mt_pct").get<double>();
  b.ml = j.at("ml").get<std::size_t>();
  b.ml_pct = j.at("ml_pct").get<double>();
  b.n_tracks = j.at("n_tracks").get<std::size_t>();
  b.id_switches = j.at("id_switches").get<std::size_t>();
  return b;
}

}  // namespace detail

inline nlohmann::ordered_json eval_config_to_json(const EvalConfig& c) {
  nlohmann::ordered_json j;
  j["iou_threshold"] = c.iou_threshold;
  j["n_labels"] = c.n_labels;
  j["min_score"] = detail::optional_number(c.min_score);
  j["id_switch_persistence"] = c.id_switch_persistence;
  j["per_video"] = c.per_video;
  return j;
}

inline std::string report_to_json(const EvalReport& r) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["tool_version"] = r.tool_version;
  j["config"] = eval_config_to_json(r.config);
  j["metric_names"] = {{"ap", r.ap_name()}, {"hl", r.hl_name()}};
  j["aggregate"] = detail::block_to_json(r.aggregate);
  j["videos"] = nlohmann::ordered_json::array();
  for (const auto& v : r.videos) j["videos"].push_back(detail::block_to_json(v));
  return j.dump(2) + "\n";
}

inline EvalReport report_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    EvalReport r;
    r.tool_version = j.at("tool_version").get<std::string>();
    const auto& c = j.at("config");
    r.config.iou_threshold = c.at("iou_threshold").get<double>();
    r.config.n_labels = c.at("n_labels").get<int>();
    if (!c.at("min_score").is_null()) r.config.min_score = c.at("min_score").get<double>();
    r.config.id_switch_persistence = c.at("id_switch_persistence").get<bool>();
    r.config.per_video = c.at("per_video").get<bool>();
    r.aggregate = detail::block_from_json(j.at("aggregate"));
    for (const auto& v : j.at("videos")) r.videos.push_back(detail::block_from_json(v));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed report JSON: ") + e.what());
  }
}

/// One aggregate row (scope "aggregate", empty video_id) then one row per
/// video. Undefined AP/HL cells are empty and the reason column says why.
inline std::string report_to_csv(const EvalReport& r) {
  std::string out = detail::join({"scope", "video_id", r.ap_name(), "ap_reason", r.hl_name(), "hl_reason", "idf1",
                                  "mt", "mt_pct", "ml", "ml_pct", "id_switches", "tp", "fp", "fn", "n_gt", "n_pred",
                                  "n_pairs", "wrong_bits", "idtp", "idfp", "idfn", "n_tracks"}) +
                    "\n";
  auto row = [&](const char* scope, const MetricBlock& b) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out += detail::join({scope, b.video_id, opt(b.ap), b.ap ? "" : b.ap_reason, opt(b.hl), b.hl ? "" : b.hl_reason,
                         format_double(b.idf1), std::to_string(b.mt), format_double(b.mt_pct), std::to_string(b.ml),
                         format_double(b.ml_pct), std::to_string(b.id_switches), std::to_string(b.detection.tp),
                         std::to_string(b.detection.fp), std::to_string(b.detection.fn), std::to_string(b.n_gt),
                         std::to_string(b.n_pred), std::to_string(b.n_pairs), std::to_string(b.wrong_bits),
                         std::to_string(b.idtp), std::to_string(b.idfp), std::to_string(b.idfn),
                         std::to_string(b.n_tracks)});
    out += '\n';
  };
  row("aggregate", r.aggregate);
  for (const auto& v : r.videos) row("video", v);
  return out;
}

// ---------------------------------------------------------------------------
// Scenario manifest and label sidecar

inline std::string manifest_to_json(const ScenarioSpec& s, const std::string& scenario_name,
                                    const std::vector<std::int64_t>& cut_keyframes) {
  nlohmann::ordered_json spec;
  spec["video_id"] = s.video_id;
  spec["n_actors"] = s.n_actors;
  spec["n_keyframes"] = s.n_keyframes;
  spec["n_cuts"] = s.n_cuts;
  spec["keyframe_stride"] = s.keyframe_stride;
  spec["max_speed"] = s.max_speed;
  spec["appearance_dim"] = s.appearance_dim;
  spec["min_appearance_angle_deg"] = s.min_appearance_angle_deg;
  spec["sigma_app"] = s.sigma_app;
  spec["sigma_box"] = s.sigma_box;
  spec["p_miss"] = s.p_miss;
  spec["p_fp"] = s.p_fp;
  spec["p_act"] = s.p_act;
  spec["n_labels"] = s.n_labels;
  spec["seed"] = s.seed;

  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["tool_version"] = kToolVersion;
  j["generator"] = Rng::kAlgorithm;
  j["scenario"] = scenario_name;
  j["n_labels"] = s.n_labels;
  j["spec"] = spec;
  j["cut_keyframes"] = cut_keyframes;
  return j.dump(2) + "\n";
}

inline ScenarioSpec manifest_spec_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text).at("spec");
    ScenarioSpec s;
    s.video_id = j.at("video_id").get<std::string>();
    s.n_actors = j.at("n_actors").get<int>();
    s.n_keyframes = j.at("n_keyframes").get<int>();
    s.n_cuts = j.at("n_cuts").get<int>();
    s.keyframe_stride = j.at("keyframe_stride").get<int>();
    s.max_speed = j.at("max_speed").get<double>();
    s.appearance_dim = j.at("appearance_dim").get<int>();
    s.min_appearance_angle_deg = j.at("min_appearance_angle_deg").get<double>();
    s.sigma_app = j.at("sigma_app").get<double>();
    s.sigma_box = j.at("sigma_box").get<double>();
    s.p_miss = j.at("p_miss").get<double>();
    s.p_fp = j.at("p_fp").get<double>();
    s.p_act = j.at("p_act").get<double>();
    s.n_labels = j.at("n_labels").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed scenario manifest: ") + e.what());
  }
}

/// Label count from a sidecar JSON with a top-level "n_labels" (a scenario
/// manifest qualifies).
inline int label_count_from_json(std::string_view text) {
  try {
    const int n = nlohmann::json::parse(text).at("n_labels").get<int>();
    if (n < 1) throw ValidationError("n_labels must be positive");
    return n;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed label sidecar: ") + e.what());
  }
}

}  // namespace asad
