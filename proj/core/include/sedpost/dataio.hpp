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

// Readers and writers for the on-disk formats:
//
//  * probability CSV, one file per clip named <clip_id>.csv: a header line of
//    comma-separated class names, then one line per frame with one decimal
//    per class;
//  * annotation / submission TSV, no header:
//      filename <TAB> onset <TAB> offset <TAB> event_label
//    A line holding only a filename declares a clip without events;
//  * weak-tag TSV, no header:
//      filename <TAB> label[,label...]
//    with an empty second field for untagged clips.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sedpost/core.hpp"

namespace sedpost {

/// Clip id -> set of class names present in the clip.
using WeakTags = std::map<std::string, std::set<std::string>>;

/// `source_name` is the file name the data came from; the clip id is that name
/// with its last extension removed ("a.wav.csv" -> "a.wav").
ClipPrediction read_probability_csv(std::istream& in, const std::string& source_name,
                                    double frame_duration = kDefaultFrameDuration);
void write_probability_csv(std::ostream& out, const ClipPrediction& pred);

/// Reads every *.csv file under `dir` in lexicographic file-name order. All
/// clips must share one class list.
std::vector<ClipPrediction> read_prediction_dir(const std::filesystem::path& dir,
                                                double frame_duration = kDefaultFrameDuration);

AnnotationSet read_annotations_tsv(std::istream& in, const std::string& source_name = "");
/// Events only, sorted by (clip_id, onset, class_name).
void write_events_tsv(std::ostream& out, EventList events);
/// Events plus filename-only lines for clips without events.
void write_annotations_tsv(std::ostream& out, const AnnotationSet& annotations);

WeakTags derive_weak_tags(const AnnotationSet& annotations);
WeakTags read_weak_tags_tsv(std::istream& in, const std::string& source_name = "");
void write_weak_tags_tsv(std::ostream& out, const WeakTags& tags);

/// Event times are written with this many decimals.
inline constexpr int kTimeDecimals = 6;

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

}  // namespace sedpost
