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

#include "sedpost/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "sedpost/core.hpp"
#include "text_util.hpp"

namespace sedpost {

namespace {

struct MethodInfo {
  Method method;
  std::string_view name;
  Family family;
  bool class_dependent;
};

constexpr std::array<MethodInfo, 8> kMethods = {{
    {Method::kCIDWA, "CIDWA", Family::kDatawiseAverage, false},
    {Method::kCDDWA, "CDDWA", Family::kDatawiseAverage, true},
    {Method::kCIA, "CIA", Family::kAbsolute, false},
    {Method::kCDA, "CDA", Family::kAbsolute, true},
    {Method::kCIH, "CIH", Family::kHysteresis, false},
    {Method::kCDH, "CDH", Family::kHysteresis, true},
    {Method::kCIS, "CIS", Family::kSlope, false},
    {Method::kCDS, "CDS", Family::kSlope, true},
}};

const MethodInfo& info(Method method) {
  return kMethods[static_cast<std::size_t>(method)];
}

}  // namespace

std::string_view method_name(Method method) { return info(method).name; }

Method parse_method(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::toupper(ch)); });
  for (const auto& m : kMethods) {
    if (m.name == upper) return m.method;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected one of CIDWA, CDDWA, CIA, CDA, CIH, CDH, CIS, CDS)");
}

Family method_family(Method method) { return info(method).family; }
bool is_class_dependent(Method method) { return info(method).class_dependent; }
bool is_statistic_based(Method method) { return info(method).family == Family::kDatawiseAverage; }

Method class_independent_variant(Method method) {
  auto i = static_cast<std::size_t>(method);
  return kMethods[i - i % 2].method;
}

Method class_dependent_variant(Method method) {
  auto i = static_cast<std::size_t>(method);
  return kMethods[i - i % 2 + 1].method;
}

const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = {
      "window", "threshold", "high", "low", "k", "rise", "fall", "plateau_eps", "plateau_len"};
  return names;
}

std::vector<std::string> parameters_for(Family family) {
  switch (family) {
    case Family::kDatawiseAverage:
      return {};
    case Family::kAbsolute:
      return {"window", "threshold"};
    case Family::kHysteresis:
      return {"window", "high", "low"};
    case Family::kSlope:
      return {"window", "k", "rise", "fall", "plateau_eps", "plateau_len"};
  }
  return {};
}

double get_parameter(const ClassParams& p, std::string_view name) {
  if (name == "window") return p.window;
  if (name == "threshold") return p.threshold;
  if (name == "high") return p.high;
  if (name == "low") return p.low;
  if (name == "k") return p.slope.k;
  if (name == "rise") return p.slope.rise;
  if (name == "fall") return p.slope.fall;
  if (name == "plateau_eps") return p.slope.plateau_eps;
  if (name == "plateau_len") return p.slope.plateau_len;
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

void set_parameter(ClassParams& p, std::string_view name, double value) {
  if (!std::isfinite(value)) {
    throw ParameterError("parameter '" + std::string(name) + "' must be finite");
  }
  const int as_int = static_cast<int>(std::lround(value));
  if (name == "window") {
    p.window = as_int;
  } else if (name == "threshold") {
    p.threshold = value;
  } else if (name == "high") {
    p.high = value;
  } else if (name == "low") {
    p.low = value;
  } else if (name == "k") {
    p.slope.k = as_int;
  } else if (name == "rise") {
    p.slope.rise = value;
  } else if (name == "fall") {
    p.slope.fall = value;
  } else if (name == "plateau_eps") {
    p.slope.plateau_eps = value;
  } else if (name == "plateau_len") {
    p.slope.plateau_len = as_int;
  } else {
    throw ConfigError("unknown parameter '" + std::string(name) + "'");
  }
}

const ClassParams& SegmenterConfig::params_for(std::size_t class_index) const {
  if (params.empty()) throw ConfigError("configuration carries no parameters");
  if (!is_class_dependent(method)) return params.front();
  if (class_index >= params.size()) throw ConfigError("no parameters for class index");
  return params[class_index];
}

void validate_params(const ClassParams& p, Family family) {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (p.window < 1 || p.window % 2 == 0) {
    throw ParameterError("smoothing window must be an odd integer >= 1, got " +
                         std::to_string(p.window));
  }
  switch (family) {
    case Family::kDatawiseAverage:
      break;
    case Family::kAbsolute:
      if (!in_unit(p.threshold)) throw ParameterError("threshold must lie in [0,1]");
      break;
    case Family::kHysteresis:
      if (!in_unit(p.high) || !in_unit(p.low)) {
        throw ParameterError("hysteresis thresholds must lie in [0,1]");
      }
      if (p.low > p.high) throw ParameterError("hysteresis low threshold exceeds high threshold");
      break;
    case Family::kSlope:
      if (p.slope.k < 1) throw ParameterError("slope lag k must be >= 1");
      if (!(p.slope.rise >= 0.0) || !(p.slope.fall >= 0.0) || !(p.slope.plateau_eps >= 0.0)) {
        throw ParameterError("slope rise, fall and plateau_eps must be >= 0");
      }
      if (p.slope.plateau_len < 1) throw ParameterError("plateau_len must be >= 1");
      break;
  }
}

void validate_config(const SegmenterConfig& config, std::size_t num_classes) {
  const Family family = method_family(config.method);
  if (config.min_gap_frames && *config.min_gap_frames < 0) {
    throw ParameterError("min_gap_frames must be >= 0");
  }
  if (config.min_len_frames && *config.min_len_frames < 0) {
    throw ParameterError("min_len_frames must be >= 0");
  }
  if (family == Family::kDatawiseAverage) return;
  const std::size_t expected = is_class_dependent(config.method) ? num_classes : 1;
  if (config.params.size() != expected) {
    throw ConfigError(std::string(method_name(config.method)) + " needs " +
                      std::to_string(expected) + " parameter set(s), got " +
                      std::to_string(config.params.size()));
  }
  for (const auto& p : config.params) validate_params(p, family);
}

SegmenterConfig read_config(std::istream& in, const std::vector<std::string>& class_names,
                            std::optional<Method> method_override, const std::string& source) {
  std::map<std::string, double> global;
  std::map<std::string, std::map<std::string, double>> per_class;
  std::optional<Method> file_method;
  SegmenterConfig config;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(detail::trim(body.substr(0, eq)));
    const std::string value(detail::trim(body.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ParseError(source, line_no, "empty key or value");

    try {
      if (key == "method") {
        file_method = parse_method(value);
        continue;
      }
      const double number = detail::parse_double(value);
      if (key == "min_gap_frames" || key == "min_len_frames") {
        if (number != std::floor(number) || number < 0) {
          throw ParameterError(key + " must be a non-negative integer");
        }
        (key == "min_gap_frames" ? config.min_gap_frames : config.min_len_frames) =
            static_cast<int>(number);
        continue;
      }
      if (key.starts_with("class.")) {
        const auto dot = key.rfind('.');
        if (dot <= 6) throw ConfigError("expected class.<name>.<parameter>");
        const std::string name = key.substr(6, dot - 6);
        const std::string param = key.substr(dot + 1);
        if (std::find(class_names.begin(), class_names.end(), name) == class_names.end()) {
          throw ConfigError("unknown class '" + name + "'");
        }
        (void)get_parameter(ClassParams{}, param);
        per_class[name][param] = number;
        continue;
      }
      (void)get_parameter(ClassParams{}, key);
      global[key] = number;
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }

  if (file_method && method_override && *file_method != *method_override) {
    throw ConfigError("method in config (" + std::string(method_name(*file_method)) +
                      ") disagrees with requested method (" +
                      std::string(method_name(*method_override)) + ")");
  }
  if (!file_method && !method_override) throw ConfigError("configuration does not name a method");
  config.method = method_override ? *method_override : *file_method;

  const Family family = method_family(config.method);
  auto fill = [&](ClassParams& p, const std::map<std::string, double>* local,
                  const std::string& who) {
    for (const auto& name : parameters_for(family)) {
      std::optional<double> v;
      if (local) {
        if (auto it = local->find(name); it != local->end()) v = it->second;
      }
      if (!v) {
        if (auto it = global.find(name); it != global.end()) v = it->second;
      }
      if (!v && name == "window") v = 1.0;
      if (!v) throw ConfigError("missing parameter '" + name + "'" + who);
      set_parameter(p, name, *v);
    }
  };

  if (family != Family::kDatawiseAverage) {
    if (is_class_dependent(config.method)) {
      config.class_names = class_names;
      for (const auto& name : class_names) {
        ClassParams p;
        auto it = per_class.find(name);
        fill(p, it == per_class.end() ? nullptr : &it->second, " for class '" + name + "'");
        config.params.push_back(p);
      }
    } else {
      if (!per_class.empty()) {
        throw ConfigError("class-independent method " +
                          std::string(method_name(config.method)) +
                          " does not take class.* entries");
      }
      ClassParams p;
      fill(p, nullptr, "");
      config.params.push_back(p);
    }
  }
  validate_config(config, class_names.size());
  return config;
}

void write_config(std::ostream& out, const SegmenterConfig& config) {
  out << "method = " << method_name(config.method) << '\n';
  if (config.min_gap_frames) out << "min_gap_frames = " << *config.min_gap_frames << '\n';
  if (config.min_len_frames) out << "min_len_frames = " << *config.min_len_frames << '\n';
  const auto names = parameters_for(method_family(config.method));
  if (is_class_dependent(config.method)) {
    for (std::size_t c = 0; c < config.params.size(); ++c) {
      const std::string& cls =
          c < config.class_names.size() ? config.class_names[c] : std::to_string(c);
      for (const auto& name : names) {
        out << "class." << cls << '.' << name << " = "
            << detail::format_double(get_parameter(config.params[c], name)) << '\n';
      }
    }
  } else if (!config.params.empty()) {
    for (const auto& name : names) {
      out << name << " = " << detail::format_double(get_parameter(config.params.front(), name))
          << '\n';
    }
  }
}

}  // namespace sedpost
