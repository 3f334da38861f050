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

// Frame-domain segmentation of class probability curves.
//
// Comparison conventions: a frame enters (or stays in) an active region on
// value >= threshold and leaves it on value < threshold. With these
// conventions two-threshold hysteresis at (t, t) is exactly single-threshold
// binarization at t.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "sedpost/config.hpp"
#include "sedpost/core.hpp"
#include "sedpost/dataio.hpp"

namespace sedpost {

using Mask = std::vector<bool>;

/// Dataset-wise average probabilities: one threshold per class and their mean.
struct DatasetThresholds {
  std::vector<double> per_class;
  double global = 0.0;
};

/// Flat average over every frame of every clip (clips weighted by frame
/// count), accumulated in clip order. Throws ConfigError on an empty dataset
/// or mismatched class lists.
DatasetThresholds compute_datawise_thresholds(std::span<const ClipPrediction> dataset);

Mask binarize_absolute(std::span<const double> curve, double threshold);

/// Enters on curve >= high, leaves on curve < low; starts inactive.
/// Throws ParameterError unless 0 <= low <= high <= 1.
Mask binarize_hysteresis(std::span<const double> curve, double high, double low);

/// Slope-triggered segmentation. With s[i] = (curve[i] - curve[i-k]) / k for
/// i >= k, a region opens at the first frame where s >= rise and closes at the
/// first later frame where s <= -fall or where |s| < plateau_eps has held for
/// plateau_len consecutive frames. The closing frame is not part of the region
/// and cannot reopen one. Frames i < k have no slope and never trigger.
Mask binarize_slope(std::span<const double> curve, const SlopeParams& params);

/// Maximal runs of true frames as ascending half-open segments.
std::vector<Segment> mask_to_segments(const Mask& mask, int class_index);

/// Merges neighbours separated by fewer than `min_gap_frames` frames, then
/// drops segments shorter than `min_len_frames`. Input must be sorted and
/// non-overlapping.
std::vector<Segment> merge_and_prune(std::vector<Segment> segments, int min_gap_frames,
                                     int min_len_frames);

/// Binarizes one (already smoothed) curve according to the method family.
/// `datawise_threshold` is used by the data-wise average family only.
Mask binarize(std::span<const double> curve, Family family, const ClassParams& params,
              double datawise_threshold = 0.0);

/// Merge/prune margins of a config, defaulting to the 200 ms challenge margin.
int effective_min_gap(const SegmenterConfig& config, double frame_duration);
int effective_min_len(const SegmenterConfig& config, double frame_duration);

/// Full per-clip chain: smooth, binarize, segment, merge/prune, convert to
/// seconds. Statistic-based methods need `thresholds` and use no smoothing.
/// When `oracle` is given only the classes tagged for this clip are
/// segmented (a clip missing from the oracle has no tags).
EventList segment_clip(const ClipPrediction& pred, const SegmenterConfig& config,
                       const DatasetThresholds* thresholds = nullptr,
                       const WeakTags* oracle = nullptr);

/// segment_clip over a dataset, concatenated in input order.
EventList segment_dataset(std::span<const ClipPrediction> dataset, const SegmenterConfig& config,
                          const DatasetThresholds* thresholds = nullptr,
                          const WeakTags* oracle = nullptr);

}  // namespace sedpost
