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

#include "sedpost/core.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

namespace sedpost {

namespace {

// Slack for frame quantization: k * dt maps back to k.
constexpr double kQuantizationSlack = 1e-9;

std::string format_parse_message(const std::string& source, std::size_t line,
                                 const std::string& what) {
  std::string msg = source.empty() ? std::string("<input>") : source;
  if (line > 0) msg += ":" + std::to_string(line);
  return msg + ": " + what;
}

}  // namespace

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : Error(format_parse_message(source, line, what)), source_(source), line_(line) {}

double frames_to_seconds(long frame, double frame_duration) {
  return static_cast<double>(frame) * frame_duration;
}

long seconds_to_frames(double seconds, double frame_duration) {
  return static_cast<long>(std::floor(seconds / frame_duration + kQuantizationSlack));
}

int default_margin_frames(double frame_duration, double margin) {
  if (!(frame_duration > 0.0)) throw ParameterError("frame duration must be positive");
  if (!(margin >= 0.0)) throw ParameterError("margin must be non-negative");
  return static_cast<int>(std::ceil(margin / frame_duration - kQuantizationSlack));
}

ClipPrediction::ClipPrediction(std::string clip_id, std::vector<std::string> class_names,
                               std::vector<std::vector<double>> curves,
                               double frame_duration)
    : clip_id_(std::move(clip_id)),
      class_names_(std::move(class_names)),
      frame_duration_(frame_duration) {
  if (!(frame_duration_ > 0.0) || !std::isfinite(frame_duration_)) {
    throw ParameterError("frame duration must be positive and finite");
  }
  if (class_names_.empty()) throw ParameterError("prediction needs at least one class");
  if (std::set<std::string>(class_names_.begin(), class_names_.end()).size() !=
      class_names_.size()) {
    throw ParameterError("duplicate class name in prediction '" + clip_id_ + "'");
  }
  if (curves.size() != class_names_.size()) {
    throw ParameterError("prediction '" + clip_id_ + "' has " + std::to_string(curves.size()) +
                         " curves for " + std::to_string(class_names_.size()) + " classes");
  }
  num_frames_ = curves.front().size();
  if (num_frames_ == 0) throw ParameterError("prediction needs at least one frame");
  values_.reserve(num_frames_ * class_names_.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    if (curves[c].size() != num_frames_) {
      throw ParameterError("ragged curves in prediction '" + clip_id_ + "'");
    }
    for (std::size_t t = 0; t < num_frames_; ++t) {
      const double v = curves[c][t];
      // Written as a negated range test so NaN is rejected as well.
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ParameterError("probability out of [0,1] in '" + clip_id_ + "' at frame " +
                             std::to_string(t) + ", class " + class_names_[c]);
      }
      values_.push_back(v);
    }
  }
}

std::span<const double> ClipPrediction::curve(std::size_t class_index) const {
  if (class_index >= class_names_.size()) throw std::out_of_range("class index out of range");
  return {values_.data() + class_index * num_frames_, num_frames_};
}

double ClipPrediction::at(std::size_t frame, std::size_t class_index) const {
  if (frame >= num_frames_) throw std::out_of_range("frame index out of range");
  return curve(class_index)[frame];
}

std::optional<std::size_t> ClipPrediction::class_index(const std::string& name) const {
  auto it = std::find(class_names_.begin(), class_names_.end(), name);
  if (it == class_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - class_names_.begin());
}

ClipPrediction ClipPrediction::with_curves(std::vector<std::vector<double>> curves) const {
  return ClipPrediction(clip_id_, class_names_, std::move(curves), frame_duration_);
}

void validate_event(const Event& event, std::optional<double> clip_length) {
  if (!std::isfinite(event.onset) || !std::isfinite(event.offset)) {
    throw ParameterError("event times must be finite");
  }
  if (event.onset < 0.0) throw ParameterError("event onset is negative");
  if (!(event.onset < event.offset)) throw ParameterError("event onset must precede its offset");
  if (clip_length && event.offset > *clip_length + kQuantizationSlack) {
    throw ParameterError("event ends after the clip");
  }
}

void sort_events(EventList& events) {
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.clip_id, a.onset, a.class_name, a.offset) <
           std::tie(b.clip_id, b.onset, b.class_name, b.offset);
  });
}

void AnnotationSet::add_clip(const std::string& clip_id, std::optional<double> length) {
  auto [it, inserted] = clips_.try_emplace(clip_id, length);
  if (!inserted && length) it->second = length;
}

void AnnotationSet::add_event(Event event) {
  auto it = clips_.find(event.clip_id);
  validate_event(event, it == clips_.end() ? std::nullopt : it->second);
  add_clip(event.clip_id);
  events_.push_back(std::move(event));
}

std::vector<std::string> AnnotationSet::class_names() const {
  std::set<std::string> names;
  for (const auto& e : events_) names.insert(e.class_name);
  return {names.begin(), names.end()};
}

const std::vector<std::string>& dcase2018_classes() {
  static const std::vector<std::string> classes = {
      "Speech",  "Dog",     "Cat",           "Alarm_bell_ringing", "Dishes",
      "Frying",  "Blender", "Running_water", "Vacuum_cleaner",     "Electric_shaver_toothbrush",
  };
  return classes;
}

}  // namespace sedpost
