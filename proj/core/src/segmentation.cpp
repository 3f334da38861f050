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

#include "sedpost/segmentation.hpp"

#include <cmath>

#include "sedpost/smoothing.hpp"

namespace sedpost {

DatasetThresholds compute_datawise_thresholds(std::span<const ClipPrediction> dataset) {
  if (dataset.empty()) throw ConfigError("cannot compute data-wise thresholds of an empty dataset");
  const auto& classes = dataset.front().class_names();
  std::vector<double> sums(classes.size(), 0.0);
  std::size_t frames = 0;
  for (const auto& clip : dataset) {
    if (clip.class_names() != classes) {
      throw ConfigError("clip '" + clip.clip_id() + "' has a different class list");
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (double v : clip.curve(c)) sums[c] += v;
    }
    frames += clip.num_frames();
  }
  DatasetThresholds out;
  out.per_class.reserve(classes.size());
  double total = 0.0;
  for (double s : sums) {
    out.per_class.push_back(s / static_cast<double>(frames));
    total += out.per_class.back();
  }
  out.global = total / static_cast<double>(classes.size());
  return out;
}

Mask binarize_absolute(std::span<const double> curve, double threshold) {
  Mask mask(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) mask[i] = curve[i] >= threshold;
  return mask;
}

Mask binarize_hysteresis(std::span<const double> curve, double high, double low) {
  if (!(low >= 0.0 && high <= 1.0 && low <= high)) {
    throw ParameterError("hysteresis thresholds must satisfy 0 <= low <= high <= 1");
  }
  Mask mask(curve.size());
  bool active = false;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!active && curve[i] >= high) {
      active = true;
    } else if (active && curve[i] < low) {
      active = false;
    }
    mask[i] = active;
  }
  return mask;
}

Mask binarize_slope(std::span<const double> curve, const SlopeParams& p) {
  ClassParams check;
  check.slope = p;
  validate_params(check, Family::kSlope);

  const std::size_t n = curve.size();
  const auto k = static_cast<std::size_t>(p.k);
  Mask mask(n);
  bool active = false;
  int flat_run = 0;
  for (std::size_t i = k; i < n; ++i) {
    const double s = (curve[i] - curve[i - k]) / static_cast<double>(p.k);
    if (!active) {
      if (s >= p.rise) {
        active = true;
        flat_run = 0;
        mask[i] = true;
      }
      continue;
    }
    flat_run = std::abs(s) < p.plateau_eps ? flat_run + 1 : 0;
    if (s <= -p.fall || flat_run >= p.plateau_len) {
      active = false;
      continue;
    }
    mask[i] = true;
  }
  return mask;
}

std::vector<Segment> mask_to_segments(const Mask& mask, int class_index) {
  std::vector<Segment> segments;
  const auto n = static_cast<long>(mask.size());
  long start = -1;
  for (long i = 0; i < n; ++i) {
    if (mask[static_cast<std::size_t>(i)]) {
      if (start < 0) start = i;
    } else if (start >= 0) {
      segments.push_back({class_index, start, i});
      start = -1;
    }
  }
  if (start >= 0) segments.push_back({class_index, start, n});
  return segments;
}

std::vector<Segment> merge_and_prune(std::vector<Segment> segments, int min_gap_frames,
                                     int min_len_frames) {
  std::vector<Segment> merged;
  merged.reserve(segments.size());
  for (const auto& seg : segments) {
    if (!merged.empty() && seg.start_frame - merged.back().end_frame < min_gap_frames) {
      merged.back().end_frame = std::max(merged.back().end_frame, seg.end_frame);
    } else {
      merged.push_back(seg);
    }
  }
  std::erase_if(merged, [&](const Segment& s) { return s.length() < min_len_frames; });
  return merged;
}

Mask binarize(std::span<const double> curve, Family family, const ClassParams& params,
              double datawise_threshold) {
  switch (family) {
    case Family::kDatawiseAverage:
      return binarize_absolute(curve, datawise_threshold);
    case Family::kAbsolute:
      return binarize_absolute(curve, params.threshold);
    case Family::kHysteresis:
      return binarize_hysteresis(curve, params.high, params.low);
    case Family::kSlope:
      return binarize_slope(curve, params.slope);
  }
  return {};
}

int effective_min_gap(const SegmenterConfig& config, double frame_duration) {
  return config.min_gap_frames.value_or(
      default_margin_frames(frame_duration, kChallengeCollarSeconds));
}

int effective_min_len(const SegmenterConfig& config, double frame_duration) {
  return config.min_len_frames.value_or(
      default_margin_frames(frame_duration, kChallengeCollarSeconds));
}

EventList segment_clip(const ClipPrediction& pred, const SegmenterConfig& config,
                       const DatasetThresholds* thresholds, const WeakTags* oracle) {
  validate_config(config, pred.num_classes());
  const Family family = method_family(config.method);
  const bool dependent = is_class_dependent(config.method);
  if (family == Family::kDatawiseAverage) {
    if (!thresholds) {
      throw ConfigError(std::string(method_name(config.method)) +
                        " requires data-wise thresholds");
    }
    if (thresholds->per_class.size() != pred.num_classes()) {
      throw ConfigError("data-wise thresholds do not match the class count");
    }
  }

  const std::set<std::string>* tags = nullptr;
  static const std::set<std::string> kNoTags;
  if (oracle) {
    auto it = oracle->find(pred.clip_id());
    tags = it == oracle->end() ? &kNoTags : &it->second;
  }

  const int min_gap = effective_min_gap(config, pred.frame_duration());
  const int min_len = effective_min_len(config, pred.frame_duration());
  EventList events;
  for (std::size_t c = 0; c < pred.num_classes(); ++c) {
    const std::string& name = pred.class_names()[c];
    if (tags && !tags->contains(name)) continue;

    Mask mask;
    if (family == Family::kDatawiseAverage) {
      const double t = dependent ? thresholds->per_class[c] : thresholds->global;
      mask = binarize_absolute(pred.curve(c), t);
    } else {
      const ClassParams& params = config.params_for(c);
      const auto smoothed = smooth_moving_average(pred.curve(c), params.window);
      mask = binarize(smoothed, family, params);
    }
    const auto segments =
        merge_and_prune(mask_to_segments(mask, static_cast<int>(c)), min_gap, min_len);
    for (const auto& seg : segments) {
      events.push_back({pred.clip_id(), name, frames_to_seconds(seg.start_frame, pred.frame_duration()),
                        frames_to_seconds(seg.end_frame, pred.frame_duration())});
    }
  }
  return events;
}

EventList segment_dataset(std::span<const ClipPrediction> dataset, const SegmenterConfig& config,
                          const DatasetThresholds* thresholds, const WeakTags* oracle) {
  std::optional<DatasetThresholds> computed;
  if (!thresholds && is_statistic_based(config.method) && !dataset.empty()) {
    computed = compute_datawise_thresholds(dataset);
    thresholds = &*computed;
  }
  EventList events;
  for (const auto& clip : dataset) {
    auto clip_events = segment_clip(clip, config, thresholds, oracle);
    events.insert(events.end(), std::make_move_iterator(clip_events.begin()),
                  std::make_move_iterator(clip_events.end()));
  }
  return events;
}

}  // namespace sedpost
