// Copyright 2026 The sedpost Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "sedpost/config.hpp"
#include "sedpost/dataio.hpp"
#include "sedpost/metrics.hpp"
#include "sedpost/optimizer.hpp"
#include "sedpost/segmentation.hpp"
#include "sedpost/synthgen.hpp"
#include "sedpost/tuning.hpp"

namespace sedpost::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

// Raised for flag combinations CLI11 cannot express; maps to kUsage.
class UsageError : public Error {
 public:
  using Error::Error;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

// JSON has no infinities; an infeasible objective is written as null.
ordered_json number_or_null(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json point_json(const std::vector<std::string>& names, const std::vector<double>& point) {
  ordered_json j = ordered_json::object();
  for (std::size_t d = 0; d < names.size() && d < point.size(); ++d) j[names[d]] = point[d];
  return j;
}

ordered_json score_json(const ScoreReport& report, const Collars& collars) {
  ordered_json j;
  j["macro_f1"] = report.macro_f1;
  j["error_rate"] = report.error_rate;
  j["onset_collar"] = collars.onset;
  j["offset_ratio"] = collars.offset_ratio;
  j["totals"] = {{"tp", report.total.tp}, {"fp", report.total.fp}, {"fn", report.total.fn}};
  j["classes"] = ordered_json::array();
  for (const auto& c : report.classes) {
    j["classes"].push_back({{"name", c.class_name},
                            {"tp", c.counts.tp},
                            {"fp", c.counts.fp},
                            {"fn", c.counts.fn},
                            {"f1", c.f1},
                            {"included", c.included}});
  }
  return j;
}

void print_score(std::ostream& out, const ScoreReport& report) {
  std::size_t width = 8;
  for (const auto& c : report.classes) width = std::max(width, c.class_name.size());
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %6s %6s %6s %7s\n", static_cast<int>(width), "class",
                "tp", "fp", "fn", "f1");
  out << buf;
  for (const auto& c : report.classes) {
    std::snprintf(buf, sizeof(buf), "%-*s %6ld %6ld %6ld %7s%s\n", static_cast<int>(width),
                  c.class_name.c_str(), c.counts.tp, c.counts.fp, c.counts.fn,
                  fixed3(c.f1).c_str(), c.included ? "" : "  (excluded)");
    out << buf;
  }
  out << "macro-F1 " << fixed3(report.macro_f1) << '\n';
  out << "ER " << fixed3(report.error_rate) << '\n';
}

std::string write_json_string(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- segment

struct SegmentArgs {
  std::string pred_dir;
  std::string method;
  std::string config;
  double frame_duration = kDefaultFrameDuration;
  std::string tags;
  std::string out;
};

int cmd_segment(const SegmentArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  const auto dataset = read_prediction_dir(a.pred_dir, a.frame_duration);
  if (dataset.empty()) throw ParseError(a.pred_dir, 0, "no prediction CSV files found");
  const auto& classes = dataset.front().class_names();

  SegmenterConfig config;
  if (!a.config.empty()) {
    auto in = open_input(a.config);
    config = read_config(in, classes, method, a.config);
  } else if (is_statistic_based(method)) {
    config.method = method;
  } else {
    throw UsageError(std::string(method_name(method)) + " requires --config");
  }

  std::optional<WeakTags> tags;
  if (!a.tags.empty()) {
    auto in = open_input(a.tags);
    tags = read_weak_tags_tsv(in, a.tags);
  }
  const EventList events = segment_dataset(dataset, config, nullptr, tags ? &*tags : nullptr);
  std::ostringstream tsv;
  write_events_tsv(tsv, events);
  write_file_atomically(a.out, tsv.str());
  out << "wrote " << events.size() << " events for " << dataset.size() << " clips to " << a.out
      << '\n';
  return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string ref;
  std::string est;
  double onset_collar = kChallengeCollarSeconds;
  double offset_ratio = kChallengeOffsetRatio;
  std::string report;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.onset_collar < 0.0) throw UsageError("--onset-collar must be >= 0");
  if (a.offset_ratio < 0.0 || a.offset_ratio > 1.0) {
    throw UsageError("--offset-ratio must lie in [0,1]");
  }
  auto ref_in = open_input(a.ref);
  const AnnotationSet ref = read_annotations_tsv(ref_in, a.ref);
  auto est_in = open_input(a.est);
  const AnnotationSet est = read_annotations_tsv(est_in, a.est);
  for (const auto& [clip, length] : est.clips()) {
    if (!ref.has_clip(clip)) throw ParseError(a.est, 0, "clip '" + clip + "' is not in " + a.ref);
  }
  const Collars collars{a.onset_collar, a.offset_ratio};
  const ScoreReport report = score(ref, est.events(), collars);
  print_score(out, report);
  if (!a.report.empty()) write_file_atomically(a.report, write_json_string(score_json(report, collars)));
  return kOk;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
  std::string pred_dir;
  std::string ref;
  std::string method;
  std::string space;
  std::optional<int> points;
  std::optional<int> steps;
  std::string mode = "dicho";
  std::string out_config;
  std::string report;
  double frame_duration = kDefaultFrameDuration;
  double onset_collar = kChallengeCollarSeconds;
  double offset_ratio = kChallengeOffsetRatio;
  std::optional<int> min_gap;
  std::optional<int> min_len;
  bool no_oracle = false;
  unsigned threads = 1;
};

ordered_json search_json(const SearchResult& s) {
  ordered_json j;
  j["best"] = point_json(s.names, s.best);
  j["best_value"] = number_or_null(s.best_value);
  j["evaluations"] = s.evaluations;
  j["trace"] = ordered_json::array();
  for (const auto& step : s.trace) {
    ordered_json t;
    ordered_json bounds = ordered_json::object();
    ordered_json sizes = ordered_json::array();
    for (std::size_t d = 0; d < step.bounds.size(); ++d) {
      const std::string name = d < s.names.size() ? s.names[d] : std::to_string(d);
      bounds[name] = {step.bounds[d].first, step.bounds[d].second};
      sizes.push_back(step.grid[d].size());
    }
    t["bounds"] = bounds;
    t["grid_sizes"] = sizes;
    t["best"] = point_json(s.names, step.best);
    t["best_value"] = number_or_null(step.best_value);
    t["evaluations"] = step.evaluations;
    j["trace"].push_back(t);
  }
  return j;
}

int cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  const Method method = parse_method(a.method);
  if (is_statistic_based(method)) {
    throw UsageError(std::string(method_name(method)) + " has no parameters to optimize");
  }
  TuningOptions options;
  if (a.mode == "dicho") {
    options.mode = SearchMode::kDichotomic;
  } else if (a.mode == "grid") {
    options.mode = SearchMode::kGrid;
  } else {
    throw UsageError("--mode must be grid or dicho");
  }
  options.search.threads = a.threads;

  ParameterSpace space = default_space(method_family(method));
  if (!a.space.empty()) {
    auto in = open_input(a.space);
    space = read_space(in, a.space);
  }
  if (a.points) space.points_per_dim = *a.points;
  if (a.steps) space.steps = *a.steps;
  if (options.mode == SearchMode::kGrid) space.steps = 1;
  try {
    check_space_for(space, method_family(method));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  auto dataset = read_prediction_dir(a.pred_dir, a.frame_duration);
  if (dataset.empty()) throw ParseError(a.pred_dir, 0, "no prediction CSV files found");
  auto ref_in = open_input(a.ref);
  const AnnotationSet ref = read_annotations_tsv(ref_in, a.ref);

  EvaluatorOptions eval_options;
  eval_options.collars = {a.onset_collar, a.offset_ratio};
  eval_options.min_gap_frames = a.min_gap;
  eval_options.min_len_frames = a.min_len;
  eval_options.use_oracle = !a.no_oracle;
  const PipelineEvaluator evaluator(std::move(dataset), ref, eval_options);

  const TuningResult result = optimize(method, space, evaluator, options);

  std::ostringstream cfg;
  write_config(cfg, result.config);
  write_file_atomically(a.out_config, cfg.str());

  ordered_json report;
  report["method"] = std::string(method_name(method));
  report["mode"] = a.mode;
  report["points_per_dim"] = space.points_per_dim;
  report["steps"] = space.steps;
  report["oracle"] = !a.no_oracle;
  report["min_gap_frames"] = evaluator.min_gap_frames();
  report["min_len_frames"] = evaluator.min_len_frames();
  report["evaluations"] = result.evaluations;
  report["macro_f1"] = result.macro_f1;
  report["searches"] = ordered_json::array();
  for (std::size_t i = 0; i < result.searches.size(); ++i) {
    ordered_json s = search_json(result.searches[i]);
    s["class"] = is_class_dependent(method) ? ordered_json(evaluator.class_names()[i])
                                            : ordered_json(nullptr);
    report["searches"].push_back(s);
  }
  report["classes"] = ordered_json::array();
  for (std::size_t c = 0; c < evaluator.num_classes(); ++c) {
    report["classes"].push_back({{"name", evaluator.class_names()[c]},
                                 {"f1", result.class_f1[c]},
                                 {"included", static_cast<bool>(result.class_included[c])}});
  }
  const std::string report_path = a.report.empty() ? a.out_config + ".report.json" : a.report;
  write_file_atomically(report_path, write_json_string(report));

  out << "method " << method_name(method) << " (" << a.mode << ", " << space.points_per_dim
      << " points, " << space.steps << " steps)\n";
  for (std::size_t i = 0; i < result.searches.size(); ++i) {
    const auto& s = result.searches[i];
    out << (is_class_dependent(method) ? evaluator.class_names()[i] : std::string("all classes"))
        << ":";
    for (std::size_t d = 0; d < s.names.size(); ++d) out << ' ' << s.names[d] << '=' << s.best[d];
    out << "  objective " << fixed3(s.best_value) << '\n';
  }
  out << "evaluations " << result.evaluations << '\n';
  out << "macro-F1 " << fixed3(result.macro_f1) << '\n';
  out << "wrote " << a.out_config << " and " << report_path << '\n';
  return kOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 0;
  int clips = 100;
  std::string out_dir;
  SynthSpec spec;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  a.spec.seed = a.seed;
  a.spec.n_clips = a.clips;
  try {
    validate_spec(a.spec);
  } catch (const ParameterError& e) {
    throw UsageError(e.what());
  }
  const SynthCorpus corpus = generate(a.spec);

  const fs::path root(a.out_dir);
  const fs::path pred_dir = root / "predictions";
  std::error_code ec;
  fs::create_directories(pred_dir, ec);
  if (ec) throw Error("cannot create " + pred_dir.string() + ": " + ec.message());

  for (const auto& clip : corpus.predictions) {
    std::ostringstream csv;
    write_probability_csv(csv, clip);
    write_file_atomically(pred_dir / (clip.clip_id() + ".csv"), csv.str());
  }
  std::ostringstream ann;
  write_annotations_tsv(ann, corpus.annotations);
  write_file_atomically(root / "annotations.tsv", ann.str());
  std::ostringstream tags;
  write_weak_tags_tsv(tags, derive_weak_tags(corpus.annotations));
  write_file_atomically(root / "tags.tsv", tags.str());

  out << "wrote " << corpus.predictions.size() << " clips, " << corpus.annotations.events().size()
      << " events to " << root.string() << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Post-processing for weakly-supervised sound event detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "sedpost 0.1.0");

  SegmentArgs seg;
  auto* segment = app.add_subcommand("segment", "Turn probability CSVs into a submission TSV");
  segment->add_option("--pred-dir", seg.pred_dir, "Directory of <clip_id>.csv files")->required();
  segment->add_option("--method", seg.method, "CIDWA|CDDWA|CIA|CDA|CIH|CDH|CIS|CDS")->required();
  segment->add_option("--config", seg.config, "Parameter file (required for parametric methods)");
  segment->add_option("--frame-duration", seg.frame_duration, "Seconds per frame")
      ->capture_default_str();
  segment->add_option("--tags", seg.tags, "Weak-tag TSV restricting classes per clip");
  segment->add_option("--out", seg.out, "Output TSV")->required();

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Event-based F1 / error rate of a submission");
  evaluate->add_option("--ref", ev.ref, "Reference annotation TSV")->required();
  evaluate->add_option("--est", ev.est, "Estimated event TSV")->required();
  evaluate->add_option("--onset-collar", ev.onset_collar, "Onset collar in seconds")
      ->capture_default_str();
  evaluate->add_option("--offset-ratio", ev.offset_ratio, "Offset collar as a fraction of length")
      ->capture_default_str();
  evaluate->add_option("--report", ev.report, "Write a JSON report here");

  OptimizeArgs op;
  auto* optimize_cmd = app.add_subcommand("optimize", "Tune a parametric segmenter");
  optimize_cmd->add_option("--pred-dir", op.pred_dir, "Directory of <clip_id>.csv files")
      ->required();
  optimize_cmd->add_option("--ref", op.ref, "Reference annotation TSV")->required();
  optimize_cmd->add_option("--method", op.method, "CIA|CDA|CIH|CDH|CIS|CDS")->required();
  optimize_cmd->add_option("--space", op.space, "Search-space file (default: built-in bounds)");
  optimize_cmd->add_option("--points", op.points, "Grid points per dimension and step");
  optimize_cmd->add_option("--steps", op.steps, "Refinement steps");
  optimize_cmd->add_option("--mode", op.mode, "grid|dicho")->capture_default_str();
  optimize_cmd->add_option("--out-config", op.out_config, "Where to write the best config")
      ->required();
  optimize_cmd->add_option("--report", op.report, "JSON report (default: <out-config>.report.json)");
  optimize_cmd->add_option("--frame-duration", op.frame_duration, "Seconds per frame")
      ->capture_default_str();
  optimize_cmd->add_option("--onset-collar", op.onset_collar, "Onset collar in seconds")
      ->capture_default_str();
  optimize_cmd->add_option("--offset-ratio", op.offset_ratio, "Offset collar ratio")
      ->capture_default_str();
  optimize_cmd->add_option("--min-gap", op.min_gap, "Merge gap in frames (default: 200 ms)");
  optimize_cmd->add_option("--min-len", op.min_len, "Minimum length in frames (default: 200 ms)");
  optimize_cmd->add_flag("--no-oracle", op.no_oracle, "Segment every class of every clip");
  optimize_cmd->add_option("--threads", op.threads, "Worker threads, 0 = all cores")
      ->capture_default_str();

  SynthArgs sy;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--seed", sy.seed, "Random seed")->required();
  synth->add_option("--clips", sy.clips, "Number of clips")->required();
  synth->add_option("--out-dir", sy.out_dir, "Output directory")->required();
  synth->add_option("--noise-sigma", sy.spec.noise_sigma, "Gaussian noise sigma")
      ->capture_default_str();
  synth->add_option("--inside-prob", sy.spec.inside_prob, "Probability inside events")
      ->capture_default_str();
  synth->add_option("--outside-prob", sy.spec.outside_prob, "Probability outside events")
      ->capture_default_str();
  synth->add_option("--render-window", sy.spec.render_window, "Smoothing window when rendering")
      ->capture_default_str();
  synth->add_option("--max-events", sy.spec.max_events, "Maximum events per clip")
      ->capture_default_str();

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (*segment) return cmd_segment(seg, out);
    if (*evaluate) return cmd_evaluate(ev, out);
    if (*optimize_cmd) return cmd_optimize(op, out);
    if (*synth) return cmd_synth(sy, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const ParameterError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}

}  // namespace sedpost::cli
