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

#include "sedpost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace sedpost {

namespace {

// Absorbs representation error when times sit exactly on a collar boundary.
constexpr double kTimeSlack = 1e-9;

std::vector<std::size_t> onset_order(std::span<const Event> events) {
  std::vector<std::size_t> idx(events.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (events[a].onset != events[b].onset) return events[a].onset < events[b].onset;
    return events[a].offset < events[b].offset;
  });
  return idx;
}

}  // namespace

bool is_match_eligible(const Event& ref, const Event& pred, const Collars& collars) {
  const double offset_collar = std::max(collars.onset, collars.offset_ratio * ref.duration());
  return std::abs(pred.onset - ref.onset) <= collars.onset + kTimeSlack &&
         std::abs(pred.offset - ref.offset) <= offset_collar + kTimeSlack;
}

MatchCounts match_group(std::span<const Event> refs, std::span<const Event> preds,
                        const Collars& collars) {
  const auto ref_order = onset_order(refs);
  const auto pred_order = onset_order(preds);
  std::vector<bool> used(preds.size(), false);
  MatchCounts counts;
  for (std::size_t r : ref_order) {
    std::size_t best = preds.size();
    double best_dist = 0.0;
    // pred_order is onset-sorted, so the first strict improvement wins ties.
    for (std::size_t p : pred_order) {
      if (used[p] || !is_match_eligible(refs[r], preds[p], collars)) continue;
      const double dist = std::abs(preds[p].onset - refs[r].onset);
      if (best == preds.size() || dist < best_dist) {
        best = p;
        best_dist = dist;
      }
    }
    if (best < preds.size()) {
      used[best] = true;
      ++counts.tp;
    } else {
      ++counts.fn;
    }
  }
  counts.fp = static_cast<long>(preds.size()) - counts.tp;
  return counts;
}

std::map<ClipClassKey, MatchCounts> match_events(std::span<const Event> refs,
                                                 std::span<const Event> preds,
                                                 const Collars& collars) {
  std::map<ClipClassKey, std::pair<std::vector<Event>, std::vector<Event>>> groups;
  for (const auto& e : refs) groups[{e.clip_id, e.class_name}].first.push_back(e);
  for (const auto& e : preds) groups[{e.clip_id, e.class_name}].second.push_back(e);
  std::map<ClipClassKey, MatchCounts> out;
  for (const auto& [key, group] : groups) {
    out[key] = match_group(group.first, group.second, collars);
  }
  return out;
}

double f1_from_counts(const MatchCounts& c) {
  const long denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

ScoreReport make_report(const std::vector<std::string>& class_names,
                        const std::vector<MatchCounts>& counts) {
  ScoreReport report;
  double f1_sum = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < class_names.size(); ++c) {
    ClassScore cs;
    cs.class_name = class_names[c];
    cs.counts = counts[c];
    cs.included = cs.counts.n_ref() > 0 || cs.counts.n_pred() > 0;
    cs.f1 = f1_from_counts(cs.counts);
    if (cs.included) {
      f1_sum += cs.f1;
      ++included;
    }
    report.total += cs.counts;
    report.classes.push_back(std::move(cs));
  }
  report.macro_f1 = included == 0 ? 1.0 : f1_sum / static_cast<double>(included);
  const long n_ref = report.total.n_ref();
  const auto errors = static_cast<double>(report.total.fn + report.total.fp);
  report.error_rate = n_ref > 0 ? errors / static_cast<double>(n_ref) : errors;
  return report;
}

ScoreReport score(const AnnotationSet& annotations, std::span<const Event> predictions,
                  const Collars& collars, const std::vector<std::string>& extra_classes) {
  std::set<std::string> classes(extra_classes.begin(), extra_classes.end());
  for (const auto& e : annotations.events()) classes.insert(e.class_name);
  for (const auto& e : predictions) {
    if (!annotations.has_clip(e.clip_id)) {
      throw ConfigError("prediction for unknown clip '" + e.clip_id + "'");
    }
    classes.insert(e.class_name);
  }
  const std::vector<std::string> names(classes.begin(), classes.end());
  std::vector<MatchCounts> per_class(names.size());
  const auto matches = match_events(annotations.events(), predictions, collars);
  for (const auto& [key, counts] : matches) {
    const auto pos = std::lower_bound(names.begin(), names.end(), key.second) - names.begin();
    per_class[static_cast<std::size_t>(pos)] += counts;
  }
  return make_report(names, per_class);
}

}  // namespace sedpost
