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

// Parameter tuning of the parametric segmenters against strong annotations.
// The objective is the event-based macro-F1 of the full chain
// (smooth -> binarize -> merge/prune -> score) with the AT oracle restricting
// each clip to its annotated classes.

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <vector>

#include "sedpost/config.hpp"
#include "sedpost/core.hpp"
#include "sedpost/dataio.hpp"
#include "sedpost/metrics.hpp"
#include "sedpost/optimizer.hpp"
#include "sedpost/segmentation.hpp"

namespace sedpost {

/// Copy of `annotations` restricted to `clip_ids`.
AnnotationSet restrict_to_clips(const AnnotationSet& annotations,
                                const std::set<std::string>& clip_ids);

struct EvaluatorOptions {
  Collars collars;
  /// Unset margins default to the 200 ms challenge margin in frames.
  std::optional<int> min_gap_frames;
  std::optional<int> min_len_frames;
  /// Restrict each clip to the classes of its strong annotations.
  bool use_oracle = true;
};

/// Scores segmenter parameters on a fixed dataset. Per-class counts are
/// independent of the other classes' parameters, which the class-dependent
/// search relies on. Smoothed curves are cached per (class, window).
/// All const member functions are safe to call concurrently.
class PipelineEvaluator {
 public:
  /// References of clips outside `dataset` are ignored. Throws ConfigError if
  /// a dataset clip is not annotated or the clips disagree on classes.
  PipelineEvaluator(std::vector<ClipPrediction> dataset, const AnnotationSet& annotations,
                    EvaluatorOptions options = {});

  const std::vector<std::string>& class_names() const { return classes_; }
  std::size_t num_classes() const { return classes_.size(); }
  const std::vector<ClipPrediction>& dataset() const { return dataset_; }
  const WeakTags& oracle() const { return oracle_; }
  const EvaluatorOptions& options() const { return options_; }
  int min_gap_frames() const { return min_gap_; }
  int min_len_frames() const { return min_len_; }
  const DatasetThresholds& datawise_thresholds() const { return thresholds_; }
  /// Annotated classes the predictions do not cover, with their reference
  /// counts; they always score F1 = 0.
  const std::vector<std::pair<std::string, long>>& orphan_classes() const {
    return orphan_classes_;
  }

  /// Counts of class `class_index` over all clips. For the data-wise family,
  /// `params.threshold` is the threshold and no smoothing is applied.
  MatchCounts class_counts(std::size_t class_index, Family family,
                           const ClassParams& params) const;

  /// Scores a complete configuration (data-wise methods use the dataset's own
  /// thresholds). Annotated classes absent from the predictions count as misses.
  ScoreReport evaluate(const SegmenterConfig& config) const;

 private:
  std::shared_ptr<const std::vector<std::vector<double>>> smoothed(std::size_t class_index,
                                                                   int window) const;

  std::vector<ClipPrediction> dataset_;
  std::vector<std::string> classes_;
  std::vector<std::pair<std::string, long>> orphan_classes_;
  // refs_[clip][class]
  std::vector<std::vector<std::vector<Event>>> refs_;
  // active_[clip][class]: class is segmented for the clip.
  std::vector<std::vector<bool>> active_;
  WeakTags oracle_;
  EvaluatorOptions options_;
  int min_gap_ = 0;
  int min_len_ = 0;
  DatasetThresholds thresholds_;

  mutable std::mutex cache_mutex_;
  mutable std::map<std::pair<std::size_t, int>,
                   std::shared_ptr<const std::vector<std::vector<double>>>>
      cache_;
};

enum class SearchMode { kDichotomic, kGrid };

struct TuningOptions {
  SearchMode mode = SearchMode::kDichotomic;
  SearchOptions search;
  /// Starting values for parameters the space does not list.
  ClassParams base;
};

struct TuningResult {
  SegmenterConfig config;
  /// One search for class-independent methods, one per class otherwise.
  std::vector<SearchResult> searches;
  /// Per-class F1 and macro-average inclusion at the returned parameters.
  std::vector<double> class_f1;
  std::vector<bool> class_included;
  double macro_f1 = 0.0;
  long evaluations = 0;
};

/// Search space covering the parameters a family reads; plateau settings of
/// the slope family are left at their defaults.
ParameterSpace default_space(Family family);

/// Throws ConfigError when a dimension names a parameter the family does not read.
void check_space_for(const ParameterSpace& space, Family family);

/// Reads a search-space file:
///
///   window    = 1 31 odd
///   threshold = 0 1            # kind defaults to real
///   k         = 1 5 int
///   points    = 9              # optional, defaults 9
///   steps     = 4              # optional, defaults 4
///
/// Dimensions keep file order, which is also the tie-break order.
ParameterSpace read_space(std::istream& in, const std::string& source = "");
void write_space(std::ostream& out, const ParameterSpace& space);

/// Applies a search point to a parameter set.
ClassParams apply_point(ClassParams base, const ParameterSpace& space,
                        std::span<const double> point);

/// One parameter set for all classes maximizing macro-F1. Method must be
/// CIA, CIH or CIS. Infeasible hysteresis points (low > high) score -inf.
TuningResult optimize_class_independent(Method method, const ParameterSpace& space,
                                        const PipelineEvaluator& evaluator,
                                        const TuningOptions& options = {});

/// One independent search per class maximizing that class's F1 (a class with
/// neither references nor predictions scores 1). Method must be CDA, CDH or CDS.
TuningResult optimize_class_dependent(Method method, const ParameterSpace& space,
                                      const PipelineEvaluator& evaluator,
                                      const TuningOptions& options = {});

/// Dispatches on is_class_dependent(method).
TuningResult optimize(Method method, const ParameterSpace& space,
                      const PipelineEvaluator& evaluator, const TuningOptions& options = {});

}  // namespace sedpost
