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

// Domain types shared by every stage of the post-processing chain: the
// frame-level probability matrix produced by a localizer, timed events,
// annotation sets and frame-domain segments.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sedpost {

/// Frames per clip of the reference localizers (10 s clips).
inline constexpr int kDefaultNumFrames = 431;
inline constexpr double kDefaultClipSeconds = 10.0;
inline constexpr double kDefaultFrameDuration = kDefaultClipSeconds / kDefaultNumFrames;
/// Challenge onset collar, also used as the merge/prune margin.
inline constexpr double kChallengeCollarSeconds = 0.2;
inline constexpr double kChallengeOffsetRatio = 0.2;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  std::size_t line_;
};

/// A parameter value outside its admissible domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An inconsistent or incomplete configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

double frames_to_seconds(long frame, double frame_duration);
/// Inverse of frames_to_seconds, rounding down.
long seconds_to_frames(double seconds, double frame_duration);
/// Number of frames covering `margin` seconds, rounded up.
int default_margin_frames(double frame_duration, double margin);

/// Per-frame class probabilities of one clip. Stored class-major so each class
/// curve is contiguous.
class ClipPrediction {
 public:
  /// `curves[c][t]` is the probability of class c at frame t.
  ClipPrediction(std::string clip_id, std::vector<std::string> class_names,
                 std::vector<std::vector<double>> curves,
                 double frame_duration = kDefaultFrameDuration);

  const std::string& clip_id() const { return clip_id_; }
  const std::vector<std::string>& class_names() const { return class_names_; }
  std::size_t num_frames() const { return num_frames_; }
  std::size_t num_classes() const { return class_names_.size(); }
  double frame_duration() const { return frame_duration_; }
  double clip_length() const { return static_cast<double>(num_frames_) * frame_duration_; }

  std::span<const double> curve(std::size_t class_index) const;
  double at(std::size_t frame, std::size_t class_index) const;
  std::optional<std::size_t> class_index(const std::string& name) const;

  /// Same clip with replaced curves; re-validated.
  ClipPrediction with_curves(std::vector<std::vector<double>> curves) const;

 private:
  std::string clip_id_;
  std::vector<std::string> class_names_;
  std::size_t num_frames_ = 0;
  double frame_duration_ = kDefaultFrameDuration;
  std::vector<double> values_;
};

struct Event {
  std::string clip_id;
  std::string class_name;
  double onset = 0.0;
  double offset = 0.0;

  double duration() const { return offset - onset; }
  friend bool operator==(const Event&, const Event&) = default;
};

using EventList = std::vector<Event>;

/// Throws ParameterError when the event violates onset < offset, onset >= 0
/// or, when given, offset <= clip_length.
void validate_event(const Event& event, std::optional<double> clip_length = std::nullopt);

/// Orders by (clip_id, onset, class_name, offset).
void sort_events(EventList& events);

/// Strong labels plus the set of clips they cover. A clip can be present with
/// no events. Clip lengths are optional since the TSV format does not carry them.
class AnnotationSet {
 public:
  AnnotationSet() = default;

  void add_clip(const std::string& clip_id, std::optional<double> length = std::nullopt);
  /// Validates the event and registers its clip.
  void add_event(Event event);

  const EventList& events() const { return events_; }
  const std::map<std::string, std::optional<double>>& clips() const { return clips_; }
  bool has_clip(const std::string& clip_id) const { return clips_.contains(clip_id); }
  /// Distinct class names over all events, sorted.
  std::vector<std::string> class_names() const;

 private:
  EventList events_;
  std::map<std::string, std::optional<double>> clips_;
};

/// Half-open frame interval [start_frame, end_frame) of one class.
struct Segment {
  int class_index = 0;
  long start_frame = 0;
  long end_frame = 0;

  long length() const { return end_frame - start_frame; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// The ten domestic sound classes of the DCASE 2018 task 4 corpus.
const std::vector<std::string>& dcase2018_classes();

}  // namespace sedpost
