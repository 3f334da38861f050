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

#include "sedpost/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "sedpost/smoothing.hpp"
#include "text_util.hpp"

namespace sedpost {

namespace {

constexpr double kInfeasible = -std::numeric_limits<double>::infinity();

}  // namespace

AnnotationSet restrict_to_clips(const AnnotationSet& annotations,
                                const std::set<std::string>& clip_ids) {
  AnnotationSet out;
  for (const auto& [clip, length] : annotations.clips()) {
    if (clip_ids.contains(clip)) out.add_clip(clip, length);
  }
  for (const auto& e : annotations.events()) {
    if (clip_ids.contains(e.clip_id)) out.add_event(e);
  }
  return out;
}

PipelineEvaluator::PipelineEvaluator(std::vector<ClipPrediction> dataset,
                                     const AnnotationSet& annotations, EvaluatorOptions options)
    : dataset_(std::move(dataset)), options_(options) {
  if (dataset_.empty()) throw ConfigError("tuning needs at least one clip");
  classes_ = dataset_.front().class_names();
  const double frame_duration = dataset_.front().frame_duration();

  std::map<std::string, std::size_t> clip_index;
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    const auto& clip = dataset_[i];
    if (clip.class_names() != classes_) {
      throw ConfigError("clip '" + clip.clip_id() + "' has a different class list");
    }
    if (clip.frame_duration() != frame_duration) {
      throw ConfigError("clip '" + clip.clip_id() + "' has a different frame duration");
    }
    if (!annotations.has_clip(clip.clip_id())) {
      throw ConfigError("clip '" + clip.clip_id() + "' has no annotations");
    }
    if (!clip_index.emplace(clip.clip_id(), i).second) {
      throw ConfigError("duplicate clip '" + clip.clip_id() + "'");
    }
  }

  refs_.assign(dataset_.size(), std::vector<std::vector<Event>>(classes_.size()));
  std::map<std::string, long> orphans;
  for (const auto& e : annotations.events()) {
    auto clip = clip_index.find(e.clip_id);
    if (clip == clip_index.end()) continue;
    oracle_[e.clip_id].insert(e.class_name);
    auto cls = std::find(classes_.begin(), classes_.end(), e.class_name);
    if (cls == classes_.end()) {
      ++orphans[e.class_name];
      continue;
    }
    refs_[clip->second][static_cast<std::size_t>(cls - classes_.begin())].push_back(e);
  }
  orphan_classes_.assign(orphans.begin(), orphans.end());

  active_.assign(dataset_.size(), std::vector<bool>(classes_.size(), true));
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    auto& tags = oracle_[dataset_[i].clip_id()];
    if (!options_.use_oracle) continue;
    for (std::size_t c = 0; c < classes_.size(); ++c) active_[i][c] = tags.contains(classes_[c]);
  }

  SegmenterConfig margins;
  margins.min_gap_frames = options_.min_gap_frames;
  margins.min_len_frames = options_.min_len_frames;
  min_gap_ = effective_min_gap(margins, frame_duration);
  min_len_ = effective_min_len(margins, frame_duration);
  if (min_gap_ < 0 || min_len_ < 0) throw ParameterError("merge/prune margins must be >= 0");
  thresholds_ = compute_datawise_thresholds(dataset_);
}

std::shared_ptr<const std::vector<std::vector<double>>> PipelineEvaluator::smoothed(
    std::size_t class_index, int window) const {
  const auto key = std::make_pair(class_index, window);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  auto curves = std::make_shared<std::vector<std::vector<double>>>();
  curves->reserve(dataset_.size());
  for (const auto& clip : dataset_) {
    curves->push_back(smooth_moving_average(clip.curve(class_index), window));
  }
  std::lock_guard lock(cache_mutex_);
  // A concurrent caller may have filled the slot; both results are identical.
  return cache_.try_emplace(key, std::move(curves)).first->second;
}

MatchCounts PipelineEvaluator::class_counts(std::size_t class_index, Family family,
                                            const ClassParams& params) const {
  if (class_index >= classes_.size()) throw std::out_of_range("class index out of range");
  validate_params(params, family);
  const bool smooth = family != Family::kDatawiseAverage && params.window > 1;
  const auto curves = smooth ? smoothed(class_index, params.window) : nullptr;

  MatchCounts total;
  std::vector<Event> preds;
  for (std::size_t i = 0; i < dataset_.size(); ++i) {
    const auto& refs = refs_[i][class_index];
    if (!active_[i][class_index]) {
      total.fn += static_cast<long>(refs.size());
      continue;
    }
    const auto& clip = dataset_[i];
    const std::span<const double> curve =
        curves ? std::span<const double>((*curves)[i]) : clip.curve(class_index);
    const Mask mask = binarize(curve, family, params, params.threshold);
    const auto segments = merge_and_prune(mask_to_segments(mask, static_cast<int>(class_index)),
                                          min_gap_, min_len_);
    preds.clear();
    for (const auto& seg : segments) {
      preds.push_back({clip.clip_id(), classes_[class_index],
                       frames_to_seconds(seg.start_frame, clip.frame_duration()),
                       frames_to_seconds(seg.end_frame, clip.frame_duration())});
    }
    total += match_group(refs, preds, options_.collars);
  }
  return total;
}

ScoreReport PipelineEvaluator::evaluate(const SegmenterConfig& config) const {
  validate_config(config, classes_.size());
  const Family family = method_family(config.method);
  const bool dependent = is_class_dependent(config.method);
  if (config.min_gap_frames.value_or(min_gap_) != min_gap_ ||
      config.min_len_frames.value_or(min_len_) != min_len_) {
    throw ConfigError("configuration margins differ from the evaluator's margins");
  }

  std::vector<std::pair<std::string, MatchCounts>> rows;
  for (std::size_t c = 0; c < classes_.size(); ++c) {
    ClassParams params;
    if (family == Family::kDatawiseAverage) {
      params.threshold = dependent ? thresholds_.per_class[c] : thresholds_.global;
    } else {
      params = config.params_for(c);
    }
    rows.emplace_back(classes_[c], class_counts(c, family, params));
  }
  for (const auto& [name, n] : orphan_classes_) rows.push_back({name, MatchCounts{0, 0, n}});
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> names;
  std::vector<MatchCounts> counts;
  for (auto& [name, c] : rows) {
    names.push_back(name);
    counts.push_back(c);
  }
  return make_report(names, counts);
}

ParameterSpace default_space(Family family) {
  ParameterSpace space;
  auto odd_window = ParameterBounds{"window", 1, 31, ValueKind::kOddInteger};
  switch (family) {
    case Family::kDatawiseAverage:
      break;
    case Family::kAbsolute:
      space.dims = {odd_window, {"threshold", 0, 1, ValueKind::kReal}};
      break;
    case Family::kHysteresis:
      space.dims = {odd_window, {"high", 0, 1, ValueKind::kReal}, {"low", 0, 1, ValueKind::kReal}};
      break;
    case Family::kSlope:
      space.dims = {odd_window,
                    {"k", 1, 5, ValueKind::kInteger},
                    {"rise", 0, 0.3, ValueKind::kReal},
                    {"fall", 0, 0.3, ValueKind::kReal}};
      break;
  }
  return space;
}

void check_space_for(const ParameterSpace& space, Family family) {
  const auto allowed = parameters_for(family);
  std::set<std::string> seen;
  for (const auto& d : space.dims) {
    if (std::find(allowed.begin(), allowed.end(), d.name) == allowed.end()) {
      throw ConfigError("parameter '" + d.name + "' is not used by this method");
    }
    if (!seen.insert(d.name).second) throw ConfigError("duplicate parameter '" + d.name + "'");
    if (d.name == "window" && d.kind != ValueKind::kOddInteger) {
      throw ConfigError("window must be searched as an odd integer");
    }
    if ((d.name == "k" || d.name == "plateau_len") && d.kind == ValueKind::kReal) {
      throw ConfigError("parameter '" + d.name + "' must be searched as an integer");
    }
  }
  validate_space(space);
}

ParameterSpace read_space(std::istream& in, const std::string& source) {
  ParameterSpace space;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'name = ...'");
    const std::string key(detail::trim(body.substr(0, eq)));
    std::vector<std::string_view> tokens;
    for (auto t : detail::split(detail::trim(body.substr(eq + 1)), ' ')) {
      if (!detail::trim(t).empty()) tokens.push_back(detail::trim(t));
    }
    try {
      if (key == "points" || key == "steps") {
        if (tokens.size() != 1) throw ParameterError(key + " takes one integer");
        const double v = detail::parse_double(tokens[0]);
        if (v != std::floor(v)) throw ParameterError(key + " must be an integer");
        (key == "points" ? space.points_per_dim : space.steps) = static_cast<int>(v);
        continue;
      }
      (void)get_parameter(ClassParams{}, key);
      if (tokens.size() < 2 || tokens.size() > 3) {
        throw ParameterError("expected 'lower upper [real|int|odd]'");
      }
      ParameterBounds b{key, detail::parse_double(tokens[0]), detail::parse_double(tokens[1]),
                        ValueKind::kReal};
      if (tokens.size() == 3) {
        if (tokens[2] == "real") {
          b.kind = ValueKind::kReal;
        } else if (tokens[2] == "int") {
          b.kind = ValueKind::kInteger;
        } else if (tokens[2] == "odd") {
          b.kind = ValueKind::kOddInteger;
        } else {
          throw ParameterError("unknown value kind '" + std::string(tokens[2]) + "'");
        }
      } else if (key == "window") {
        b.kind = ValueKind::kOddInteger;
      } else if (key == "k" || key == "plateau_len") {
        b.kind = ValueKind::kInteger;
      }
      space.dims.push_back(b);
    } catch (const Error& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  return space;
}

void write_space(std::ostream& out, const ParameterSpace& space) {
  for (const auto& d : space.dims) {
    const char* kind = d.kind == ValueKind::kReal ? "real"
                       : d.kind == ValueKind::kInteger ? "int"
                                                       : "odd";
    out << d.name << " = " << detail::format_double(d.lower) << ' '
        << detail::format_double(d.upper) << ' ' << kind << '\n';
  }
  out << "points = " << space.points_per_dim << '\n';
  out << "steps = " << space.steps << '\n';
}

ClassParams apply_point(ClassParams base, const ParameterSpace& space,
                        std::span<const double> point) {
  for (std::size_t d = 0; d < space.dims.size(); ++d) {
    set_parameter(base, space.dims[d].name, point[d]);
  }
  return base;
}

namespace {

SearchResult run_search(const Objective& objective, const ParameterSpace& space,
                        const TuningOptions& options) {
  if (options.mode == SearchMode::kDichotomic) {
    return dichotomic_search(objective, space, options.search);
  }
  std::vector<std::vector<double>> grid;
  std::vector<std::string> names;
  for (const auto& d : space.dims) {
    grid.push_back(grid_values(d, d.lower, d.upper, space.points_per_dim));
    names.push_back(d.name);
  }
  return coarse_grid_search(objective, grid, names, options.search);
}

void require_parametric(Method method, bool class_dependent) {
  if (is_statistic_based(method)) {
    throw ConfigError(std::string(method_name(method)) + " has no parameters to optimize");
  }
  if (is_class_dependent(method) != class_dependent) {
    throw ConfigError(std::string(method_name(method)) + " is not a class-" +
                      (class_dependent ? "dependent" : "independent") + " method");
  }
}

SegmenterConfig base_config(Method method, const PipelineEvaluator& evaluator) {
  SegmenterConfig config;
  config.method = method;
  config.min_gap_frames = evaluator.min_gap_frames();
  config.min_len_frames = evaluator.min_len_frames();
  return config;
}

}  // namespace

TuningResult optimize_class_independent(Method method, const ParameterSpace& space,
                                        const PipelineEvaluator& evaluator,
                                        const TuningOptions& options) {
  require_parametric(method, false);
  const Family family = method_family(method);
  check_space_for(space, family);

  SegmenterConfig probe = base_config(method, evaluator);
  const Objective objective = [&](std::span<const double> point) {
    SegmenterConfig config = probe;
    config.params = {apply_point(options.base, space, point)};
    try {
      validate_params(config.params.front(), family);
    } catch (const ParameterError&) {
      return kInfeasible;
    }
    return evaluator.evaluate(config).macro_f1;
  };

  TuningResult result;
  result.searches.push_back(run_search(objective, space, options));
  result.evaluations = result.searches.front().evaluations;
  result.config = probe;
  result.config.params = {apply_point(options.base, space, result.searches.front().best)};

  const ScoreReport report = evaluator.evaluate(result.config);
  result.macro_f1 = report.macro_f1;
  for (const auto& name : evaluator.class_names()) {
    auto it = std::find_if(report.classes.begin(), report.classes.end(),
                           [&](const ClassScore& cs) { return cs.class_name == name; });
    result.class_f1.push_back(it->f1);
    result.class_included.push_back(it->included);
  }
  return result;
}

TuningResult optimize_class_dependent(Method method, const ParameterSpace& space,
                                      const PipelineEvaluator& evaluator,
                                      const TuningOptions& options) {
  require_parametric(method, true);
  const Family family = method_family(method);
  check_space_for(space, family);

  TuningResult result;
  result.config = base_config(method, evaluator);
  result.config.class_names = evaluator.class_names();
  for (std::size_t c = 0; c < evaluator.num_classes(); ++c) {
    const Objective objective = [&, c](std::span<const double> point) {
      const ClassParams params = apply_point(options.base, space, point);
      try {
        validate_params(params, family);
      } catch (const ParameterError&) {
        return kInfeasible;
      }
      const MatchCounts counts = evaluator.class_counts(c, family, params);
      const bool included = counts.n_ref() > 0 || counts.n_pred() > 0;
      return included ? f1_from_counts(counts) : 1.0;
    };
    result.searches.push_back(run_search(objective, space, options));
    result.evaluations += result.searches.back().evaluations;

    const ClassParams best = apply_point(options.base, space, result.searches.back().best);
    result.config.params.push_back(best);
    const MatchCounts counts = evaluator.class_counts(c, family, best);
    result.class_f1.push_back(f1_from_counts(counts));
    result.class_included.push_back(counts.n_ref() > 0 || counts.n_pred() > 0);
  }

  double sum = 0.0;
  std::size_t included = 0;
  for (std::size_t c = 0; c < result.class_f1.size(); ++c) {
    if (!result.class_included[c]) continue;
    sum += result.class_f1[c];
    ++included;
  }
  included += evaluator.orphan_classes().size();
  result.macro_f1 = included == 0 ? 1.0 : sum / static_cast<double>(included);
  return result;
}

TuningResult optimize(Method method, const ParameterSpace& space,
                      const PipelineEvaluator& evaluator, const TuningOptions& options) {
  return is_class_dependent(method)
             ? optimize_class_dependent(method, space, evaluator, options)
             : optimize_class_independent(method, space, evaluator, options);
}

}  // namespace sedpost
