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

// Segmenter configuration and its flat key-value file format:
//
//   method = CDA
//   min_gap_frames = 9
//   min_len_frames = 9
//   window = 5                     # global (class-independent) value
//   threshold = 0.5
//   class.Speech.window = 9        # class-dependent value
//   class.Speech.threshold = 0.42
//
// Blank lines and text after '#' are ignored.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sedpost {

enum class Method { kCIDWA, kCDDWA, kCIA, kCDA, kCIH, kCDH, kCIS, kCDS };

enum class Family { kDatawiseAverage, kAbsolute, kHysteresis, kSlope };

std::string_view method_name(Method method);
/// Accepts the upper-case acronyms (case-insensitive). Throws ConfigError.
Method parse_method(std::string_view name);
Family method_family(Method method);
bool is_class_dependent(Method method);
bool is_statistic_based(Method method);
/// Class-independent counterpart of a class-dependent method and vice versa.
Method class_independent_variant(Method method);
Method class_dependent_variant(Method method);

struct SlopeParams {
  int k = 1;
  double rise = 0.1;
  double fall = 0.1;
  double plateau_eps = 0.01;
  int plateau_len = 10;

  friend bool operator==(const SlopeParams&, const SlopeParams&) = default;
};

/// Parameters applied to one class curve. Only the fields relevant to the
/// method's family are read.
struct ClassParams {
  int window = 1;
  double threshold = 0.5;
  double high = 0.6;
  double low = 0.4;
  SlopeParams slope;

  friend bool operator==(const ClassParams&, const ClassParams&) = default;
};

/// Names accepted in config and search-space files, in canonical order.
const std::vector<std::string>& parameter_names();
/// Parameter names a method family actually reads.
std::vector<std::string> parameters_for(Family family);
double get_parameter(const ClassParams& params, std::string_view name);
/// Integer-valued parameters are rounded to the nearest integer.
void set_parameter(ClassParams& params, std::string_view name, double value);

struct SegmenterConfig {
  Method method = Method::kCIA;
  /// One entry for class-independent methods, one per class (in the
  /// prediction's class order) for class-dependent ones, empty for the
  /// statistic-based methods.
  std::vector<ClassParams> params;
  /// Per-class names matching `params` for class-dependent methods.
  std::vector<std::string> class_names;
  /// Unset means "derive from the 200 ms challenge margin".
  std::optional<int> min_gap_frames;
  std::optional<int> min_len_frames;

  /// Parameters used for class `class_index`.
  const ClassParams& params_for(std::size_t class_index) const;
};

/// Throws ParameterError on out-of-domain values and ConfigError when the
/// parameter sets do not match the method or the class count.
void validate_params(const ClassParams& params, Family family);
void validate_config(const SegmenterConfig& config, std::size_t num_classes);

/// `class_names` lists the prediction classes; class-dependent entries are
/// stored in that order. `method_override`, when given, must agree with any
/// `method` key in the file.
SegmenterConfig read_config(std::istream& in, const std::vector<std::string>& class_names,
                            std::optional<Method> method_override = std::nullopt,
                            const std::string& source = "");
void write_config(std::ostream& out, const SegmenterConfig& config);

}  // namespace sedpost
