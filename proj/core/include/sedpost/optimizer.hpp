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

// Derivative-free maximization over box-bounded parameter spaces: exhaustive
// grid search and iterative grid refinement ("dichotomic" search).
//
// Refinement: each step lays `points_per_dim` equally spaced values across
// the current bounds of every dimension, evaluates the Cartesian product,
// and re-centres the bounds on the step's best point with a half-width of one
// grid spacing, clipped to the global bounds. The best point over all steps
// is returned. Ties are broken towards the lexicographically smallest
// parameter vector.

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace sedpost {

enum class ValueKind { kReal, kInteger, kOddInteger };

struct ParameterBounds {
  std::string name;
  double lower = 0.0;
  double upper = 1.0;
  ValueKind kind = ValueKind::kReal;
};

struct ParameterSpace {
  std::vector<ParameterBounds> dims;
  int points_per_dim = 9;
  int steps = 4;
};

/// Throws ParameterError on lower > upper, points_per_dim < 2, steps < 1, or
/// an integer dimension whose bounds contain no admissible value.
void validate_space(const ParameterSpace& space);

/// Maps a point (one value per dimension) to the score to maximize. Must be
/// safe to call concurrently when more than one thread is requested.
using Objective = std::function<double(std::span<const double>)>;

struct SearchStep {
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::vector<double>> grid;
  std::vector<double> best;
  double best_value = 0.0;
  long evaluations = 0;
};

struct SearchResult {
  std::vector<std::string> names;
  std::vector<double> best;
  double best_value = 0.0;
  long evaluations = 0;
  std::vector<SearchStep> trace;
};

struct SearchOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 1;
};

/// Equally spaced values over [lower, upper] snapped to the dimension's kind
/// and deduplicated, ascending. Integer values are kept inside
/// [global.lower, global.upper].
std::vector<double> grid_values(const ParameterBounds& global, double lower, double upper,
                                int points);

/// Evaluates every point of the Cartesian product of `grid` (one value list
/// per dimension). Returns the argmax with the lexicographic tie-break.
SearchResult coarse_grid_search(const Objective& objective,
                                const std::vector<std::vector<double>>& grid,
                                const std::vector<std::string>& names = {},
                                const SearchOptions& options = {});

SearchResult dichotomic_search(const Objective& objective, const ParameterSpace& space,
                               const SearchOptions& options = {});

/// Runs `fn(i)` for i in [0, n) on up to `threads` worker threads.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace sedpost
