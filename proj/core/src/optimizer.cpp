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

#include "sedpost/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "sedpost/core.hpp"

namespace sedpost {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double lowest_admissible(const ParameterBounds& b) {
  switch (b.kind) {
    case ValueKind::kReal:
      return b.lower;
    case ValueKind::kInteger:
      return std::ceil(b.lower);
    case ValueKind::kOddInteger: {
      double v = std::ceil(b.lower);
      return std::fmod(std::abs(v), 2.0) == 1.0 ? v : v + 1.0;
    }
  }
  return b.lower;
}

double highest_admissible(const ParameterBounds& b) {
  switch (b.kind) {
    case ValueKind::kReal:
      return b.upper;
    case ValueKind::kInteger:
      return std::floor(b.upper);
    case ValueKind::kOddInteger: {
      double v = std::floor(b.upper);
      return std::fmod(std::abs(v), 2.0) == 1.0 ? v : v - 1.0;
    }
  }
  return b.upper;
}

double snap(const ParameterBounds& global, double x) {
  double v = x;
  switch (global.kind) {
    case ValueKind::kReal:
      break;
    case ValueKind::kInteger:
      v = std::round(x);
      break;
    case ValueKind::kOddInteger:
      v = 2.0 * std::round((x - 1.0) / 2.0) + 1.0;
      break;
  }
  return std::clamp(v, lowest_admissible(global), highest_admissible(global));
}

// Objective values are compared with NaN demoted to -inf.
double sanitize(double v) { return std::isnan(v) ? kNegInf : v; }

bool better(double value, const std::vector<double>& point, double best_value,
            const std::vector<double>& best_point) {
  if (value != best_value) return value > best_value;
  return std::lexicographical_compare(point.begin(), point.end(), best_point.begin(),
                                      best_point.end());
}

struct GridOutcome {
  std::vector<double> best;
  double best_value = kNegInf;
  long evaluations = 0;
};

GridOutcome evaluate_grid(const Objective& objective, const std::vector<std::vector<double>>& grid,
                          const SearchOptions& options) {
  std::size_t total = 1;
  for (const auto& values : grid) {
    if (values.empty()) throw ParameterError("grid search needs non-empty value lists");
    total *= values.size();
  }
  auto point_at = [&](std::size_t index) {
    std::vector<double> point(grid.size());
    for (std::size_t d = grid.size(); d-- > 0;) {
      point[d] = grid[d][index % grid[d].size()];
      index /= grid[d].size();
    }
    return point;
  };

  std::vector<double> values(total);
  parallel_for(total, options.threads,
               [&](std::size_t i) { values[i] = sanitize(objective(point_at(i))); });

  GridOutcome out;
  out.evaluations = static_cast<long>(total);
  for (std::size_t i = 0; i < total; ++i) {
    auto point = point_at(i);
    if (i == 0 || better(values[i], point, out.best_value, out.best)) {
      out.best_value = values[i];
      out.best = std::move(point);
    }
  }
  return out;
}

}  // namespace

void validate_space(const ParameterSpace& space) {
  if (space.points_per_dim < 2) throw ParameterError("points_per_dim must be >= 2");
  if (space.steps < 1) throw ParameterError("steps must be >= 1");
  for (const auto& d : space.dims) {
    if (!std::isfinite(d.lower) || !std::isfinite(d.upper) || d.lower > d.upper) {
      throw ParameterError("invalid bounds for parameter '" + d.name + "'");
    }
    if (lowest_admissible(d) > highest_admissible(d)) {
      throw ParameterError("no admissible integer value for parameter '" + d.name + "'");
    }
  }
}

std::vector<double> grid_values(const ParameterBounds& global, double lower, double upper,
                                int points) {
  std::vector<double> values;
  if (lower == upper || points < 2) {
    values.push_back(snap(global, lower));
    return values;
  }
  values.reserve(static_cast<std::size_t>(points));
  const double span = upper - lower;
  for (int i = 0; i < points; ++i) {
    const double x = i == points - 1 ? upper : lower + span * i / (points - 1);
    values.push_back(snap(global, x));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

SearchResult coarse_grid_search(const Objective& objective,
                                const std::vector<std::vector<double>>& grid,
                                const std::vector<std::string>& names,
                                const SearchOptions& options) {
  auto outcome = evaluate_grid(objective, grid, options);
  SearchResult result;
  result.names = names;
  result.best = outcome.best;
  result.best_value = outcome.best_value;
  result.evaluations = outcome.evaluations;

  SearchStep step;
  for (const auto& values : grid) step.bounds.emplace_back(values.front(), values.back());
  step.grid = grid;
  step.best = outcome.best;
  step.best_value = outcome.best_value;
  step.evaluations = outcome.evaluations;
  result.trace.push_back(std::move(step));
  return result;
}

SearchResult dichotomic_search(const Objective& objective, const ParameterSpace& space,
                               const SearchOptions& options) {
  validate_space(space);
  SearchResult result;
  for (const auto& d : space.dims) result.names.push_back(d.name);

  std::vector<std::pair<double, double>> bounds;
  for (const auto& d : space.dims) bounds.emplace_back(d.lower, d.upper);

  for (int s = 0; s < space.steps; ++s) {
    SearchStep step;
    step.bounds = bounds;
    for (std::size_t d = 0; d < space.dims.size(); ++d) {
      step.grid.push_back(
          grid_values(space.dims[d], bounds[d].first, bounds[d].second, space.points_per_dim));
    }
    auto outcome = evaluate_grid(objective, step.grid, options);
    step.best = outcome.best;
    step.best_value = outcome.best_value;
    step.evaluations = outcome.evaluations;
    result.evaluations += outcome.evaluations;
    if (s == 0 || better(outcome.best_value, outcome.best, result.best_value, result.best)) {
      result.best = outcome.best;
      result.best_value = outcome.best_value;
    }

    for (std::size_t d = 0; d < space.dims.size(); ++d) {
      const auto& g = space.dims[d];
      const double spacing = (bounds[d].second - bounds[d].first) / (space.points_per_dim - 1);
      bounds[d] = {std::max(g.lower, step.best[d] - spacing),
                   std::min(g.upper, step.best[d] + spacing)};
    }
    result.trace.push_back(std::move(step));
  }
  return result;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> workers;
    const auto count = std::min<std::size_t>(threads, n);
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace sedpost
