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

// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when everything passes).

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sedpost/metrics.hpp"
#include "sedpost/optimizer.hpp"
#include "sedpost/segmentation.hpp"
#include "sedpost/synthgen.hpp"
#include "sedpost/tuning.hpp"
#include "support/oracles.hpp"

namespace {

using namespace sedpost;
namespace fs = std::filesystem;

constexpr std::uint64_t kCorpusSeed = 2018;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks; the first few messages end up in the detail line.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  void near(double a, double b, double tol, const std::string& what) {
    expect(std::abs(a - b) <= tol, what + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
  Outcome outcome(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    return {false, std::to_string(failures_) + "/" + std::to_string(checks_) +
                       " checks failed: " + messages_};
  }

 private:
  long checks_ = 0;
  long failures_ = 0;
  std::string messages_;
};

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

const SynthCorpus& corpus() {
  static const SynthCorpus c = [] {
    SynthSpec spec;
    spec.seed = kCorpusSeed;
    spec.n_clips = 100;
    return generate(spec);
  }();
  return c;
}

Event ev(const std::string& clip, const std::string& cls, double on, double off) {
  return {clip, cls, on, off};
}

// ------------------------------------------------------------------ 1

Outcome metric_correctness() {
  Checker ck;
  const Collars collars{0.2, 0.2};
  {
    const std::vector<Event> ref{ev("a.wav", "A", 1.0, 3.0)};
    const std::vector<Event> pred{ev("a.wav", "A", 1.15, 2.7)};
    ck.expect(match_group(ref, pred, collars) == MatchCounts{1, 0, 0}, "TP fixture");
    const std::vector<Event> late{ev("a.wav", "A", 1.25, 3.0)};
    ck.expect(match_group(ref, late, collars) == MatchCounts{0, 1, 1}, "FP+FN fixture");
  }
  // Two-class fixture: A is the TP case, B the onset-miss case.
  AnnotationSet two;
  two.add_event(ev("a.wav", "A", 1.0, 3.0));
  two.add_event(ev("a.wav", "B", 1.0, 3.0));
  const std::vector<Event> two_pred{ev("a.wav", "A", 1.15, 2.7), ev("a.wav", "B", 1.25, 3.0)};
  const auto r = score(two, two_pred, collars);
  ck.expect(r.classes.size() == 2, "two classes");
  if (r.classes.size() == 2) {
    ck.expect(r.classes[0].counts == MatchCounts{1, 0, 0}, "class A counts");
    ck.expect(r.classes[1].counts == MatchCounts{0, 1, 1}, "class B counts");
    ck.near(r.classes[0].f1, 1.0, 1e-12, "F1 A");
    ck.near(r.classes[1].f1, 0.0, 1e-12, "F1 B");
  }
  ck.near(r.macro_f1, 0.5, 1e-12, "macro-F1 two-class");
  ck.near(r.error_rate, 1.0, 1e-12, "ER two-class");

  // 2 refs, 1 TP + 1 FP + 1 FN.
  AnnotationSet er;
  er.add_event(ev("a.wav", "A", 1.0, 2.0));
  er.add_event(ev("a.wav", "A", 5.0, 6.0));
  const std::vector<Event> er_pred{ev("a.wav", "A", 1.0, 2.0), ev("a.wav", "A", 8.0, 9.0)};
  const auto er_report = score(er, er_pred, collars);
  ck.expect(er_report.total == MatchCounts{1, 1, 1}, "ER fixture counts");
  ck.near(er_report.error_rate, 1.0, 1e-12, "ER fixture");
  ck.near(er_report.macro_f1, 0.5, 1e-12, "ER fixture F1");

  const auto perfect = score(corpus().annotations, corpus().annotations.events(), collars);
  ck.near(perfect.macro_f1, 1.0, 1e-12, "perfect macro-F1");
  ck.near(perfect.error_rate, 0.0, 1e-12, "perfect ER");
  const auto empty = score(corpus().annotations, {}, collars);
  ck.near(empty.error_rate, 1.0, 1e-12, "empty ER");
  ck.near(empty.macro_f1, 0.0, 1e-12, "empty macro-F1");
  return ck.outcome("fixtures exact; perfect 1.0/0.0; empty ER 1.0");
}

// ------------------------------------------------------------------ 2

Outcome hysteresis_collapse() {
  Checker ck;
  oracle::Rng rng(2);
  constexpr int kCurves = 10000;
  for (int n = 0; n < kCurves; ++n) {
    const auto x = rng.curve(static_cast<std::size_t>(rng.integer(1, 200)));
    // Half of the thresholds hit curve values exactly to exercise ties.
    const double t = rng.coin() ? x[static_cast<std::size_t>(rng.integer(0, static_cast<long>(x.size()) - 1))]
                                : rng.uniform();
    const auto abs = binarize_absolute(x, t);
    ck.expect(binarize_hysteresis(x, t, t) == abs, "collapse at curve " + std::to_string(n));

    const double high = rng.uniform(t, 1.0);
    const double low = rng.uniform(0.0, t);
    const auto hyst = binarize_hysteresis(x, high, t);
    const auto wider = binarize_hysteresis(x, high, low);
    const auto at_high = binarize_absolute(x, high);
    const auto at_low = binarize_absolute(x, low);
    bool contained = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
      contained = contained && (!at_high[i] || hyst[i]) && (!hyst[i] || wider[i]) &&
                  (!wider[i] || at_low[i]);
    }
    ck.expect(contained, "containment at curve " + std::to_string(n));
  }
  return ck.outcome(std::to_string(kCurves) + " random curves; abs(high) <= hyst(high,low) <= abs(low)");
}

// ------------------------------------------------------------------ 3

Outcome merge_prune_contract() {
  Checker ck;
  oracle::Rng rng(3);
  constexpr int kCases = 20000;
  for (int n = 0; n < kCases; ++n) {
    std::vector<Segment> segs;
    long pos = rng.integer(0, 5);
    for (long i = rng.integer(0, 30); i > 0; --i) {
      const long len = rng.integer(1, 25);
      segs.push_back({0, pos, pos + len});
      pos += len + rng.integer(1, 20);
    }
    const int gap = static_cast<int>(rng.integer(0, 15));
    const int min_len = static_cast<int>(rng.integer(0, 30));
    const auto out = merge_and_prune(segs, gap, min_len);
    bool ok = true;
    for (std::size_t i = 0; i < out.size(); ++i) {
      ok = ok && out[i].length() >= min_len && out[i].length() > 0;
      if (i > 0) ok = ok && out[i].start_frame - out[i - 1].end_frame >= gap;
    }
    ck.expect(ok, "gap/length contract at case " + std::to_string(n));
    ck.expect(merge_and_prune(out, gap, min_len) == out, "idempotence at case " + std::to_string(n));
  }
  return ck.outcome(std::to_string(kCases) + " random segment lists; no short gap/segment; idempotent");
}

// ------------------------------------------------------------------ 4

Outcome statistic_thresholds() {
  Checker ck;
  const auto& preds = corpus().predictions;
  const auto th = compute_datawise_thresholds(preds);
  long double mean_of_means = 0;
  double worst = 0;
  for (std::size_t c = 0; c < preds.front().num_classes(); ++c) {
    const double brute = oracle::concatenated_mean(preds, c);
    worst = std::max(worst, std::abs(brute - th.per_class[c]));
    ck.near(th.per_class[c], brute, 1e-9, "CDDWA " + preds.front().class_names()[c]);
    mean_of_means += th.per_class[c];
  }
  mean_of_means /= static_cast<long double>(th.per_class.size());
  ck.near(th.global, static_cast<double>(mean_of_means), 1e-9, "CIDWA");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.1e", worst);
  return ck.outcome("max |CDDWA - brute force| = " + std::string(buf) + "; CIDWA = " +
                    fmt(th.global, 6));
}

// ------------------------------------------------------------------ 5

SegmenterConfig cia(double window, double threshold) {
  SegmenterConfig config;
  config.method = Method::kCIA;
  config.params = {ClassParams{}};
  set_parameter(config.params[0], "window", window);
  set_parameter(config.params[0], "threshold", threshold);
  return config;
}

Outcome optimizer_oracle() {
  Checker ck;
  const ParameterSpace toy{{{"t", 0.0, 1.0}}, 5, 3};
  const auto toy_result =
      dichotomic_search([](std::span<const double> p) { return -(p[0] - 0.37) * (p[0] - 0.37); }, toy);
  ck.expect(toy_result.best.size() == 1 && toy_result.best[0] == 0.375, "toy optimum 0.375");
  ck.expect(toy_result.trace.size() == 3 && toy_result.trace[0].best[0] == 0.25 &&
                toy_result.trace[1].bounds[0] == std::make_pair(0.0, 0.5) &&
                toy_result.trace[2].bounds[0] == std::make_pair(0.25, 0.5),
            "toy trace");

  const PipelineEvaluator evaluator(corpus().predictions, corpus().annotations);
  auto space = default_space(Family::kAbsolute);
  space.points_per_dim = 9;
  space.steps = 4;
  const auto dicho = optimize(Method::kCIA, space, evaluator);

  std::vector<double> windows, thresholds;
  for (int w = 1; w <= 31; w += 2) windows.push_back(w);
  for (int i = 0; i <= 100; ++i) thresholds.push_back(i / 100.0);
  const Objective objective = [&](std::span<const double> p) {
    return evaluator.evaluate(cia(p[0], p[1])).macro_f1;
  };
  const auto fine = coarse_grid_search(objective, {windows, thresholds}, {"window", "threshold"});
  const double ratio = dicho.macro_f1 / fine.best_value;
  ck.expect(ratio >= 0.99, "dichotomic/fine ratio " + fmt(ratio));
  return ck.outcome("toy 0.375 exact; dichotomic " + fmt(dicho.macro_f1) + " (" +
                    std::to_string(dicho.evaluations) + " evals) vs fine grid " +
                    fmt(fine.best_value) + " (" + std::to_string(fine.evaluations) +
                    " evals), ratio " + fmt(ratio));
}

// ------------------------------------------------------------------ 6

Outcome class_dependent_dominance() {
  Checker ck;
  const PipelineEvaluator evaluator(corpus().predictions, corpus().annotations);
  TuningOptions options;
  options.mode = SearchMode::kGrid;
  std::string summary;
  for (Method ci : {Method::kCIA, Method::kCIH}) {
    const auto space = default_space(method_family(ci));
    const auto a = optimize(ci, space, evaluator, options);
    const auto b = optimize(class_dependent_variant(ci), space, evaluator, options);
    ck.expect(b.macro_f1 >= a.macro_f1, std::string(method_name(class_dependent_variant(ci))) +
                                            " below " + std::string(method_name(ci)));
    summary += std::string(summary.empty() ? "" : "; ") +
               std::string(method_name(class_dependent_variant(ci))) + " " + fmt(b.macro_f1) +
               " >= " + std::string(method_name(ci)) + " " + fmt(a.macro_f1);
  }
  return ck.outcome(summary);
}

// ------------------------------------------------------------------ 7

long trace_count(const SearchResult& r) {
  long total = 0;
  for (const auto& step : r.trace) {
    long n = 1;
    for (const auto& g : step.grid) n *= static_cast<long>(g.size());
    total += n;
  }
  return total;
}

Outcome evaluation_accounting() {
  Checker ck;
  const PipelineEvaluator evaluator(corpus().predictions, corpus().annotations);
  const long classes = static_cast<long>(evaluator.num_classes());

  // Default CIA space: odd-window snapping may merge grid values.
  const auto snapped = optimize(Method::kCIA, default_space(Family::kAbsolute), evaluator);
  ck.expect(snapped.evaluations == trace_count(snapped.searches[0]), "CIA count matches trace");

  // Real-valued spaces: exact steps x points^dims, and C x for class-dependent runs.
  const ParameterSpace abs_space{{{"window", 5, 5, ValueKind::kOddInteger}, {"threshold", 0, 1}}, 9, 4};
  const ParameterSpace hyst_space{{{"high", 0, 1}, {"low", 0, 1}}, 9, 4};
  const auto cia = optimize(Method::kCIA, abs_space, evaluator);
  const auto cda = optimize(Method::kCDA, abs_space, evaluator);
  const auto cih = optimize(Method::kCIH, hyst_space, evaluator);
  const auto cdh = optimize(Method::kCDH, hyst_space, evaluator);
  ck.expect(cia.evaluations == 4 * 9, "CIA 4x9");
  ck.expect(cih.evaluations == 4 * 81, "CIH 4x9^2");
  ck.expect(cda.evaluations == classes * cia.evaluations, "CDA = C x CIA");
  ck.expect(cdh.evaluations == classes * cih.evaluations, "CDH = C x CIH");
  long per_class_sum = 0;
  for (const auto& s : cdh.searches) per_class_sum += trace_count(s);
  ck.expect(per_class_sum == cdh.evaluations, "CDH count matches traces");

  return ck.outcome("default CIA " + std::to_string(snapped.evaluations) + " (nominal " +
                    std::to_string(4 * 81) + ", odd-window dedup); CIA " +
                    std::to_string(cia.evaluations) + ", CDA " + std::to_string(cda.evaluations) +
                    ", CIH " + std::to_string(cih.evaluations) + ", CDH " +
                    std::to_string(cdh.evaluations));
}

// ------------------------------------------------------------------ 8

Outcome end_to_end_recovery() {
  Checker ck;
  const auto& all = corpus().predictions;
  std::vector<ClipPrediction> train(all.begin(), all.begin() + 50);
  std::vector<ClipPrediction> test(all.begin() + 50, all.end());
  std::set<std::string> train_ids, test_ids;
  for (const auto& p : train) train_ids.insert(p.clip_id());
  for (const auto& p : test) test_ids.insert(p.clip_id());

  const PipelineEvaluator tune(std::move(train), restrict_to_clips(corpus().annotations, train_ids));
  const auto result = optimize(Method::kCDA, default_space(Family::kAbsolute), tune);

  const auto test_ann = restrict_to_clips(corpus().annotations, test_ids);
  const auto tags = derive_weak_tags(test_ann);
  const auto events = segment_dataset(test, result.config, nullptr, &tags);
  const auto report = score(test_ann, events, {kChallengeCollarSeconds, kChallengeOffsetRatio},
                            test.front().class_names());
  ck.expect(report.macro_f1 >= 0.90, "held-out macro-F1 " + fmt(report.macro_f1));
  return ck.outcome("train macro-F1 " + fmt(result.macro_f1) + ", held-out macro-F1 " +
                    fmt(report.macro_f1) + ", ER " + fmt(report.error_rate));
}

// ------------------------------------------------------------------ 9

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string snapshot(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string out;
  for (const auto& f : files) out += fs::relative(f, dir).string() + "\n" + slurp(f) + "\n";
  return out;
}

int cli_run(std::vector<std::string> args) {
  args.insert(args.begin(), "sedpost");
  std::ostringstream out, err;
  return cli::run(args, out, err);
}

std::string pipeline(const fs::path& dir, const std::string& threads) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string d = dir.string();
  int rc = 0;
  rc |= cli_run({"synth", "--seed", "9", "--clips", "20", "--out-dir", d + "/corpus"});
  rc |= cli_run({"optimize", "--pred-dir", d + "/corpus/predictions", "--ref",
                 d + "/corpus/annotations.tsv", "--method", "CDH", "--points", "5", "--steps", "3",
                 "--threads", threads, "--out-config", d + "/cdh.cfg"});
  rc |= cli_run({"optimize", "--pred-dir", d + "/corpus/predictions", "--ref",
                 d + "/corpus/annotations.tsv", "--method", "CIS", "--points", "3", "--steps", "2",
                 "--threads", threads, "--out-config", d + "/cis.cfg"});
  rc |= cli_run({"segment", "--pred-dir", d + "/corpus/predictions", "--method", "CDH",
                 "--config", d + "/cdh.cfg", "--tags", d + "/corpus/tags.tsv", "--out",
                 d + "/cdh.tsv"});
  rc |= cli_run({"segment", "--pred-dir", d + "/corpus/predictions", "--method", "CDDWA",
                 "--out", d + "/cddwa.tsv"});
  rc |= cli_run({"evaluate", "--ref", d + "/corpus/annotations.tsv", "--est", d + "/cdh.tsv",
                 "--report", d + "/eval.json"});
  if (rc != 0) return "command failed";
  return snapshot(dir);
}

Outcome determinism() {
  Checker ck;
  const fs::path root = fs::temp_directory_path() / ("sedpost_acceptance_" + std::to_string(::getpid()));
  const auto a = pipeline(root / "a", "1");
  const auto b = pipeline(root / "b", "1");
  const auto c = pipeline(root / "c", "4");
  ck.expect(a != "command failed", "CLI pipeline ran");
  ck.expect(a == b, "repeat run identical");
  ck.expect(a == c, "1 vs 4 threads identical");

  const PipelineEvaluator evaluator(corpus().predictions, corpus().annotations);
  TuningOptions one, many;
  many.search.threads = 4;
  const auto x = optimize(Method::kCDA, default_space(Family::kAbsolute), evaluator, one);
  const auto y = optimize(Method::kCDA, default_space(Family::kAbsolute), evaluator, many);
  ck.expect(x.config.params == y.config.params && x.macro_f1 == y.macro_f1,
            "library search thread-invariant");
  fs::remove_all(root);
  return ck.outcome("synth/optimize/segment/evaluate byte-identical across runs and 1/4 threads (" +
                    std::to_string(a.size()) + " bytes compared)");
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: no limit
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "metric correctness", 1.0, metric_correctness},
      {2, "hysteresis collapse", 10.0, hysteresis_collapse},
      {3, "merge/prune contract", 5.0, merge_prune_contract},
      {4, "statistic-threshold oracle", 0.0, statistic_thresholds},
      {5, "optimizer oracle equivalence", 300.0, optimizer_oracle},
      {6, "class-dependent dominance", 0.0, class_dependent_dominance},
      {7, "evaluation-count accounting", 0.0, evaluation_accounting},
      {8, "end-to-end synthetic recovery", 300.0, end_to_end_recovery},
      {9, "determinism", 0.0, determinism},
  };
  (void)corpus();

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds > 0 && secs > c.limit_seconds) {
      outcome.pass = false;
      outcome.detail += "; runtime limit " + fmt(c.limit_seconds, 0) + " s exceeded";
    }
    if (!outcome.pass) ++failed;
    std::printf("%s  criterion %d  %-30s %8.3f s  %s\n", outcome.pass ? "PASS" : "FAIL", c.id,
                c.name, secs, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
