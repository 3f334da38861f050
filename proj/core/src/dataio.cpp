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

#include "sedpost/dataio.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "text_util.hpp"

namespace sedpost {

namespace fs = std::filesystem;

namespace {

std::string strip_extension(const std::string& name) {
  const std::string base = fs::path(name).filename().string();
  const auto dot = base.rfind('.');
  if (dot == std::string::npos || dot == 0) return base;
  return base.substr(0, dot);
}

}  // namespace

ClipPrediction read_probability_csv(std::istream& in, const std::string& source_name,
                                    double frame_duration) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(source_name, 1, "missing class-name header");
  ++line_no;
  detail::chomp(line);

  std::vector<std::string> classes;
  for (auto field : detail::split(line, ',')) {
    field = detail::trim(field);
    if (field.empty()) throw ParseError(source_name, line_no, "empty class name in header");
    classes.emplace_back(field);
  }

  std::vector<std::vector<double>> curves(classes.size());
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    const auto cells = detail::split(line, ',');
    if (cells.size() != classes.size()) {
      throw ParseError(source_name, line_no,
                       "expected " + std::to_string(classes.size()) + " values, got " +
                           std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      try {
        v = detail::parse_double(cells[c]);
      } catch (const ParameterError& e) {
        throw ParseError(source_name, line_no, e.what());
      }
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ParseError(source_name, line_no,
                         "value " + std::string(detail::trim(cells[c])) + " outside [0,1]");
      }
      curves[c].push_back(v);
    }
  }
  if (line_no < 2) throw ParseError(source_name, line_no, "no frames after the header");

  try {
    return ClipPrediction(strip_extension(source_name), std::move(classes), std::move(curves),
                          frame_duration);
  } catch (const ParameterError& e) {
    throw ParseError(source_name, 0, e.what());
  }
}

void write_probability_csv(std::ostream& out, const ClipPrediction& pred) {
  const auto& names = pred.class_names();
  for (std::size_t c = 0; c < names.size(); ++c) out << (c ? "," : "") << names[c];
  out << '\n';
  for (std::size_t t = 0; t < pred.num_frames(); ++t) {
    for (std::size_t c = 0; c < names.size(); ++c) {
      out << (c ? "," : "") << detail::format_double(pred.at(t, c));
    }
    out << '\n';
  }
}

std::vector<ClipPrediction> read_prediction_dir(const fs::path& dir, double frame_duration) {
  if (!fs::is_directory(dir)) {
    throw ParseError(dir.string(), 0, "not a readable directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<ClipPrediction> preds;
  preds.reserve(files.size());
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw ParseError(file.string(), 0, "cannot open file");
    preds.push_back(read_probability_csv(in, file.filename().string(), frame_duration));
    if (preds.back().class_names() != preds.front().class_names()) {
      throw ParseError(file.string(), 1, "class list differs from " + files.front().string());
    }
  }
  return preds;
}

AnnotationSet read_annotations_tsv(std::istream& in, const std::string& source_name) {
  AnnotationSet annotations;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    const std::string filename(detail::trim(fields[0]));
    if (filename.empty()) throw ParseError(source_name, line_no, "missing filename");

    const bool declaration =
        fields.size() == 1 ||
        std::all_of(fields.begin() + 1, fields.end(),
                    [](std::string_view f) { return detail::trim(f).empty(); });
    if (declaration && fields.size() <= 4) {
      annotations.add_clip(filename);
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(source_name, line_no,
                       "expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    }
    Event event;
    event.clip_id = filename;
    event.class_name = std::string(detail::trim(fields[3]));
    if (event.class_name.empty()) throw ParseError(source_name, line_no, "missing event label");
    try {
      event.onset = detail::parse_double(fields[1]);
      event.offset = detail::parse_double(fields[2]);
      annotations.add_event(std::move(event));
    } catch (const ParameterError& e) {
      throw ParseError(source_name, line_no, e.what());
    }
  }
  return annotations;
}

void write_events_tsv(std::ostream& out, EventList events) {
  sort_events(events);
  for (const auto& e : events) {
    out << e.clip_id << '\t' << detail::format_fixed(e.onset, kTimeDecimals) << '\t'
        << detail::format_fixed(e.offset, kTimeDecimals) << '\t' << e.class_name << '\n';
  }
}

void write_annotations_tsv(std::ostream& out, const AnnotationSet& annotations) {
  EventList events = annotations.events();
  sort_events(events);
  auto next = events.begin();
  for (const auto& [clip, length] : annotations.clips()) {
    auto end = std::find_if(next, events.end(), [&](const Event& e) { return e.clip_id != clip; });
    if (next == end) {
      out << clip << '\n';
    } else {
      write_events_tsv(out, EventList(next, end));
    }
    next = end;
  }
}

WeakTags derive_weak_tags(const AnnotationSet& annotations) {
  WeakTags tags;
  for (const auto& [clip, length] : annotations.clips()) tags[clip];
  for (const auto& e : annotations.events()) tags[e.clip_id].insert(e.class_name);
  return tags;
}

WeakTags read_weak_tags_tsv(std::istream& in, const std::string& source_name) {
  WeakTags tags;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    detail::chomp(line);
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, '\t');
    if (fields.size() > 2) {
      throw ParseError(source_name, line_no,
                       "expected 'filename<TAB>labels', got " + std::to_string(fields.size()) +
                           " fields");
    }
    const std::string filename(detail::trim(fields[0]));
    if (filename.empty()) throw ParseError(source_name, line_no, "missing filename");
    auto& set = tags[filename];
    if (fields.size() == 2 && !detail::trim(fields[1]).empty()) {
      for (auto label : detail::split(fields[1], ',')) {
        label = detail::trim(label);
        if (label.empty()) throw ParseError(source_name, line_no, "empty label");
        set.emplace(label);
      }
    }
  }
  return tags;
}

void write_weak_tags_tsv(std::ostream& out, const WeakTags& tags) {
  for (const auto& [clip, labels] : tags) {
    out << clip << '\t';
    bool first = true;
    for (const auto& label : labels) {
      out << (first ? "" : ",") << label;
      first = false;
    }
    out << '\n';
  }
}

void write_file_atomically(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace sedpost
