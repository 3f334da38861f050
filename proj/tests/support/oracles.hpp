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

// Reference implementations for tests, written from the plain definitions
// with no code shared with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sedpost/core.hpp"

namespace sedpost::oracle {

/// Mean over the centred window, truncated at the edges.
inline std::vector<double> moving_average(const std::vector<double>& x, int window) {
  const int n = static_cast<int>(x.size());
  const int h = (window - 1) / 2;
  std::vector<double> out;
  for (int i = 0; i < n; ++i) {
    long double sum = 0;
    int count = 0;
    for (int j = i - h; j <= i + h; ++j) {
      if (j < 0 || j >= n) continue;
      sum += x[static_cast<std::size_t>(j)];
      ++count;
    }
    out.push_back(static_cast<double>(sum / count));
  }
  return out;
}

/// Frame sets: indices of true entries.
inline std::set<long> true_frames(const std::vector<bool>& mask) {
  std::set<long> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.insert(static_cast<long>(i));
  }
  return out;
}

/// Flat mean of class c over the concatenation of every clip's frames.
inline double concatenated_mean(const std::vector<ClipPrediction>& clips, std::size_t c) {
  std::vector<double> all;
  for (const auto& clip : clips) {
    for (std::size_t t = 0; t < clip.num_frames(); ++t) all.push_back(clip.at(t, c));
  }
  long double sum = 0;
  for (double v : all) sum += v;
  return static_cast<double>(sum / static_cast<long double>(all.size()));
}

/// Maximum-cardinality bipartite matching size by augmenting paths.
inline long max_matching(const std::vector<std::vector<bool>>& eligible) {
  const std::size_t n_ref = eligible.size();
  const std::size_t n_pred = n_ref ? eligible.front().size() : 0;
  std::vector<long> owner(n_pred, -1);
  long matched = 0;
  for (std::size_t r = 0; r < n_ref; ++r) {
    std::vector<bool> seen(n_pred, false);
    auto augment = [&](auto&& self, std::size_t ref) -> bool {
      for (std::size_t p = 0; p < n_pred; ++p) {
        if (!eligible[ref][p] || seen[p]) continue;
        seen[p] = true;
        if (owner[p] < 0 || self(self, static_cast<std::size_t>(owner[p]))) {
          owner[p] = static_cast<long>(ref);
          return true;
        }
      }
      return false;
    };
    if (augment(augment, r)) ++matched;
  }
  return matched;
}

/// Small deterministic generator for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  long integer(long lo, long hi) {
    return lo + static_cast<long>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool coin(double p = 0.5) { return uniform() < p; }

  /// Random curve in [0,1]; mixes smooth plateaus with noise and exact ties.
  std::vector<double> curve(std::size_t n) {
    std::vector<double> x(n);
    double level = uniform();
    for (auto& v : x) {
      if (coin(0.1)) level = uniform();
      v = coin(0.2) ? std::round(level * 10.0) / 10.0 : std::clamp(level + uniform(-0.2, 0.2), 0.0, 1.0);
    }
    return x;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sedpost::oracle
