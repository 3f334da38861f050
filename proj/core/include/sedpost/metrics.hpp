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

// Event-based scoring with onset/offset collars.
//
// A prediction p is eligible for reference r (same clip, same class) when
//   |p.onset  - r.onset|  <= onset_collar and
//   |p.offset - r.offset| <= max(onset_collar, offset_ratio * r.duration()).
// References are visited in onset order; each takes the eligible unmatched
// prediction closest in onset (ties: earlier onset, then earlier offset).
// Cross-class substitutions are not counted: ER = (FN + FP) / N_ref.

#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sedpost/core.hpp"

namespace sedpost {

struct MatchCounts {
  long tp = 0;
  long fp = 0;
  long fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  long n_ref() const { return tp + fn; }
  long n_pred() const { return tp + fp; }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct Collars {
  double onset = kChallengeCollarSeconds;
  double offset_ratio = kChallengeOffsetRatio;
};

/// (clip_id, class_name)
using ClipClassKey = std::pair<std::string, std::string>;

bool is_match_eligible(const Event& ref, const Event& pred, const Collars& collars);

/// Greedy matching of one clip/class group; every event is assumed to share
/// the same clip and class.
MatchCounts match_group(std::span<const Event> refs, std::span<const Event> preds,
                        const Collars& collars);

/// Counts per (clip, class) over arbitrary event lists.
std::map<ClipClassKey, MatchCounts> match_events(std::span<const Event> refs,
                                                 std::span<const Event> preds,
                                                 const Collars& collars);

struct ClassScore {
  std::string class_name;
  MatchCounts counts;
  double f1 = 0.0;
  /// False when the class has neither references nor predictions; such
  /// classes do not enter the macro average.
  bool included = false;
};

struct ScoreReport {
  std::vector<ClassScore> classes;
  double macro_f1 = 0.0;
  double error_rate = 0.0;
  MatchCounts total;
};

double f1_from_counts(const MatchCounts& counts);

/// Builds a report from per-class counts. Macro-F1 over no included classes is
/// 1 (nothing to find, nothing found). With no references the error rate is
/// the insertion count.
ScoreReport make_report(const std::vector<std::string>& class_names,
                        const std::vector<MatchCounts>& counts);

/// Scores predictions against annotations. Classes are the union of
/// `extra_classes`, annotated classes and predicted classes, sorted. Throws
/// ConfigError when a prediction names a clip absent from the annotations.
ScoreReport score(const AnnotationSet& annotations, std::span<const Event> predictions,
                  const Collars& collars = {},
                  const std::vector<std::string>& extra_classes = {});

}  // namespace sedpost
