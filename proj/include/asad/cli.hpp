// Copyright 2026 The asad-eval Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: evaluate, track, synth, bench.
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid input data, 64 usage error.
// Every subcommand accepts --config FILE, a flat JSON object whose keys are
// long flag names without dashes ({"iou": 0.75, "per-video": true}); flags on
// the command line win over the file and unknown keys are rejected.

#pragma once

#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "asad/association.hpp"
#include "asad/evaluate.hpp"
#include "asad/io_formats.hpp"
#include "asad/synthetic_bench.hpp"

namespace asad::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitUsage = 64;

/// Reads a flat JSON object as CLI11 config items addressed to the
/// subcommand that was parsed.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(const CLI::App* root) : root_(root) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return {}; }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(input);
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    std::vector<std::string> parents;
    if (const auto subs = root_->get_subcommands(); !subs.empty()) parents.push_back(subs.front()->get_name());
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      if (key == "config") throw CLI::ConversionError("config files cannot include other config files");
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_object()) throw CLI::ConversionError("config key '" + key + "' must not be an object");
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConversionError("config values must be strings, numbers or booleans");
  }

  const CLI::App* root_;
};

inline void write_or_print(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_file(path, text);
  }
}

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory '" + dir + "'");
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateArgs {
  std::string gt, pred, report, format = "json", labels_file, pr_curve;
  double iou = kDefaultIouThreshold;
  int labels = kDefaultNumLabels;
  std::optional<double> min_score;
  bool per_video = false;
  bool no_persistence = false;
};

inline int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  EvalConfig cfg;
  cfg.iou_threshold = a.iou;
  cfg.n_labels = a.labels_file.empty() ? a.labels : label_count_from_json(read_file(a.labels_file));
  cfg.min_score = a.min_score;
  cfg.per_video = a.per_video;
  cfg.id_switch_persistence = !a.no_persistence;
  cfg.check();
  const auto gt = read_annotations(a.gt, Role::kGroundTruth, cfg.n_labels);
  const auto pred = read_annotations(a.pred, Role::kPrediction, cfg.n_labels);
  const auto report = evaluate(gt, pred, cfg);
  write_or_print(a.report, a.format == "csv" ? report_to_csv(report) : report_to_json(report), out);
  if (!a.pr_curve.empty()) write_file(a.pr_curve, write_pr_curve(average_precision(gt, pred, cfg.iou_threshold).curve));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// track

struct TrackArgs {
  std::string detections, mode, out;
  std::optional<double> lambda, tau;
  std::optional<int> gap;
};

inline AssociationConfig resolve_association(const TrackArgs& a) {
  auto cfg = AssociationConfig::defaults_for(a.mode == "online" ? AssociationMode::kOnline : AssociationMode::kOffline);
  if (a.lambda) cfg.iou_weight = *a.lambda;
  if (a.tau) (cfg.mode == AssociationMode::kOnline ? cfg.online_threshold : cfg.offline_threshold) = *a.tau;
  if (a.gap) cfg.max_gap = *a.gap;
  cfg.check();
  return cfg;
}

inline int cmd_track(const TrackArgs& a) {
  const auto cfg = resolve_association(a);
  const auto streams = read_detection_streams(a.detections);
  std::vector<VideoRecord> tracked;
  for (const auto& s : streams) tracked.push_back(track(s, cfg));
  write_file(a.out, write_annotations(tracked, Role::kPrediction));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  std::string scenario = "default", out, video_id;
  std::uint64_t seed = 0;
  std::optional<int> actors, keyframes, cuts, dim, labels;
  std::optional<double> sigma_app, sigma_box, p_miss, p_fp, p_act, speed;
};

inline ScenarioSpec resolve_scenario(const std::string& scenario) {
  return scenario == "static" ? ScenarioSpec::static_camera() : ScenarioSpec::camera_cut();
}

inline ScenarioSpec resolve_spec(const SynthArgs& a) {
  ScenarioSpec s = resolve_scenario(a.scenario);
  s.seed = a.seed;
  if (!a.video_id.empty()) s.video_id = a.video_id;
  if (a.actors) s.n_actors = *a.actors;
  if (a.keyframes) s.n_keyframes = *a.keyframes;
  if (a.cuts) s.n_cuts = *a.cuts;
  if (a.dim) s.appearance_dim = *a.dim;
  if (a.labels) s.n_labels = *a.labels;
  if (a.sigma_app) s.sigma_app = *a.sigma_app;
  if (a.sigma_box) s.sigma_box = *a.sigma_box;
  if (a.p_miss) s.p_miss = *a.p_miss;
  if (a.p_fp) s.p_fp = *a.p_fp;
  if (a.p_act) s.p_act = *a.p_act;
  if (a.speed) s.max_speed = *a.speed;
  s.check();
  return s;
}

inline int cmd_synth(const SynthArgs& a) {
  const auto spec = resolve_spec(a);
  const auto sc = generate(spec);
  ensure_dir(a.out);
  const std::filesystem::path dir(a.out);
  write_file((dir / "gt.csv").string(), write_annotations(std::span(&sc.gt, 1), Role::kGroundTruth));
  write_file((dir / "detections.csv").string(), write_detection_streams(std::span(&sc.stream, 1)));
  write_file((dir / "manifest.json").string(), manifest_to_json(spec, a.scenario, sc.cut_keyframes));
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchArgs {
  int seeds = 10;
  std::uint64_t first_seed = 0;
  std::string scenario = "camera-cut", out;
};

struct BenchRow {
  std::uint64_t seed = 0;
  AssociationMode mode = AssociationMode::kOnline;
  MetricBlock metrics;
};

inline std::vector<BenchRow> run_bench(const ScenarioSpec& base, std::uint64_t first_seed, int n_seeds) {
  std::vector<BenchRow> rows(static_cast<std::size_t>(n_seeds) * 2);
  parallel_for(static_cast<std::size_t>(n_seeds), worker_limit(), [&](std::size_t i) {
    ScenarioSpec s = base;
    s.seed = first_seed + i;
    s.video_id = "synth_" + std::to_string(s.seed);
    const auto sc = generate(s);
    std::size_t slot = 2 * i;
    for (auto mode : {AssociationMode::kOnline, AssociationMode::kOffline}) {
      const auto pred = track(sc.stream, AssociationConfig::defaults_for(mode));
      EvalConfig cfg;
      cfg.n_labels = s.n_labels;
      cfg.per_video = false;
      rows[slot++] = {s.seed, mode, evaluate(std::span(&sc.gt, 1), std::span(&pred, 1), cfg, 1).aggregate};
    }
  });
  return rows;
}

inline std::string bench_table(const std::vector<BenchRow>& rows) {
  std::string out = "seed,mode,ap50,hl50,idf1,mt_pct,ml_pct,id_switches\n";
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += detail::join({std::to_string(r.seed), to_string(r.mode), m.ap ? format_double(*m.ap) : "",
                         m.hl ? format_double(*m.hl) : "", format_double(m.idf1), format_double(m.mt_pct),
                         format_double(m.ml_pct), std::to_string(m.id_switches)});
    out += '\n';
  }
  return out;
}

inline nlohmann::ordered_json bench_summary(const std::vector<BenchRow>& rows, const ScenarioSpec& base,
                                            const BenchArgs& a) {
  nlohmann::ordered_json j;
  j["tool"] = kToolName;
  j["tool_version"] = kToolVersion;
  j["generator"] = Rng::kAlgorithm;
  j["scenario"] = a.scenario;
  j["seeds"] = a.seeds;
  j["first_seed"] = a.first_seed;
  j["base_spec"] = nlohmann::ordered_json::parse(manifest_to_json(base, a.scenario, {}))["spec"];
  for (auto mode : {AssociationMode::kOnline, AssociationMode::kOffline}) {
    const auto cfg = AssociationConfig::defaults_for(mode);
    double idf1 = 0.0, ap = 0.0;
    std::size_t switches = 0, n = 0;
    for (const auto& r : rows) {
      if (r.mode != mode) continue;
      idf1 += r.metrics.idf1;
      ap += r.metrics.ap.value_or(0.0);
      switches += r.metrics.id_switches;
      ++n;
    }
    auto& m = j["modes"][to_string(mode)];
    m["iou_weight"] = cfg.iou_weight;
    m["threshold"] = mode == AssociationMode::kOnline ? cfg.online_threshold : cfg.offline_threshold;
    m["max_gap"] = cfg.max_gap;
    m["mean_idf1"] = n ? idf1 / static_cast<double>(n) : 0.0;
    m["mean_ap50"] = n ? ap / static_cast<double>(n) : 0.0;
    m["total_id_switches"] = switches;
  }
  return j;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out) {
  const auto base = resolve_scenario(a.scenario);
  const auto rows = run_bench(base, a.first_seed, a.seeds);
  ensure_dir(a.out);
  const std::filesystem::path dir(a.out);
  write_file((dir / "bench.csv").string(), bench_table(rows));
  const auto summary = bench_summary(rows, base, a);
  write_file((dir / "summary.json").string(), summary.dump(2) + "\n");
  const auto& on = summary["modes"]["online"];
  const auto& off = summary["modes"]["offline"];
  out << "mode     mean IDF1  mean AP@0.5  ID switches\n";
  char line[128];
  for (const auto* m : {&on, &off}) {
    std::snprintf(line, sizeof line, "%-8s %9.4f  %11.4f  %11zu\n", m == &on ? "online" : "offline",
                  (*m)["mean_idf1"].get<double>(), (*m)["mean_ap50"].get<double>(),
                  (*m)["total_id_switches"].get<std::size_t>());
    out << line;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

/// Parses argv and runs one subcommand. Diagnostics go to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Evaluation and association harness for actor-identified action detection", "asad"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  // Subcommands hand unknown flags up, so --config works after the command name.
  app.fallthrough();
  app.set_config("--config", "", "JSON file with defaults for the flags of the chosen command");
  app.config_formatter(std::make_shared<JsonConfig>(&app));
  app.allow_config_extras(false);

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  evaluate_cmd->add_option("--gt", ev.gt, "Ground-truth annotation CSV")->required();
  evaluate_cmd->add_option("--pred", ev.pred, "Prediction annotation CSV")->required();
  evaluate_cmd->add_option("--iou", ev.iou, "IoU gate for every metric family")->capture_default_str();
  auto* labels_opt =
      evaluate_cmd->add_option("--labels", ev.labels, "Number of action labels")->check(CLI::PositiveNumber);
  evaluate_cmd->add_option("--labels-file", ev.labels_file, "JSON sidecar with an n_labels key")->excludes(labels_opt);
  evaluate_cmd->add_option("--report", ev.report, "Report path; stdout when omitted");
  evaluate_cmd->add_option("--format", ev.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  evaluate_cmd->add_flag("--per-video", ev.per_video, "Include one block per video");
  evaluate_cmd->add_option("--min-score", ev.min_score, "Ignore predictions below this score when pairing for HL");
  evaluate_cmd->add_flag("--no-persistence", ev.no_persistence, "Count ID switches from per-keyframe matching alone");
  evaluate_cmd->add_option("--pr-curve", ev.pr_curve, "Also write the pooled precision-recall curve CSV");

  TrackArgs tr;
  auto* track_cmd = app.add_subcommand("track", "Assign actor IDs to a detection stream");
  track_cmd->add_option("--detections", tr.detections, "Detection stream CSV")->required();
  track_cmd->add_option("--mode", tr.mode, "Association mode")->required()->check(CLI::IsMember({"online", "offline"}));
  track_cmd->add_option("--lambda", tr.lambda, "Weight of the box-overlap term");
  track_cmd->add_option("--tau", tr.tau, "Online cost threshold or offline merge threshold");
  track_cmd->add_option("--gap", tr.gap, "Maximum keyframe gap");
  track_cmd->add_option("--out", tr.out, "Prediction CSV to write")->required();

  SynthArgs sy;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scenario");
  synth_cmd->add_option("--scenario", sy.scenario, "Scenario preset")
      ->check(CLI::IsMember({"default", "camera-cut", "static"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", sy.seed, "Random seed")->required();
  synth_cmd->add_option("--out", sy.out, "Output directory")->required();
  synth_cmd->add_option("--video-id", sy.video_id, "Video id of the generated records");
  synth_cmd->add_option("--actors", sy.actors, "Number of actors");
  synth_cmd->add_option("--keyframes", sy.keyframes, "Number of keyframes");
  synth_cmd->add_option("--cuts", sy.cuts, "Number of shot cuts");
  synth_cmd->add_option("--dim", sy.dim, "Appearance dimension");
  synth_cmd->add_option("--labels", sy.labels, "Number of action labels");
  synth_cmd->add_option("--sigma-app", sy.sigma_app, "Appearance noise");
  synth_cmd->add_option("--sigma-box", sy.sigma_box, "Box corner jitter");
  synth_cmd->add_option("--p-miss", sy.p_miss, "Detection miss probability");
  synth_cmd->add_option("--p-fp", sy.p_fp, "Spurious detections per actor per keyframe");
  synth_cmd->add_option("--p-act", sy.p_act, "Per-keyframe label switch probability");
  synth_cmd->add_option("--speed", sy.speed, "Maximum per-keyframe box displacement");

  BenchArgs be;
  auto* bench_cmd = app.add_subcommand("bench", "Compare online and offline association over seeds");
  bench_cmd->add_option("--seeds", be.seeds, "Number of seeds")->check(CLI::PositiveNumber)->capture_default_str();
  bench_cmd->add_option("--first-seed", be.first_seed, "First seed")->capture_default_str();
  bench_cmd->add_option("--scenario", be.scenario, "Scenario preset")
      ->check(CLI::IsMember({"default", "camera-cut", "static"}))
      ->capture_default_str();
  bench_cmd->add_option("--out", be.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::FileError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (*evaluate_cmd) return cmd_evaluate(ev, out);
    if (*track_cmd) return cmd_track(tr);
    if (*synth_cmd) return cmd_synth(sy);
    if (*bench_cmd) return cmd_bench(be, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitUsage;
}

}  // namespace asad::cli
