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

#include "sedpost/smoothing.hpp"

#include <algorithm>

namespace sedpost {

std::vector<double> smooth_moving_average(std::span<const double> curve, int window) {
  if (window < 1 || window % 2 == 0) {
    throw ParameterError("smoothing window must be an odd integer >= 1, got " +
                         std::to_string(window));
  }
  const auto n = static_cast<long>(curve.size());
  if (window == 1) return {curve.begin(), curve.end()};
  const long half = (window - 1) / 2;
  std::vector<double> out(curve.size());
  for (long i = 0; i < n; ++i) {
    const long lo = std::max(0L, i - half);
    const long hi = std::min(n - 1, i + half);
    double sum = 0.0;
    for (long j = lo; j <= hi; ++j) sum += curve[static_cast<std::size_t>(j)];
    // Clamp against rounding so the output never leaves the input range.
    double mean = sum / static_cast<double>(hi - lo + 1);
    const auto [mn, mx] = std::minmax_element(curve.begin() + lo, curve.begin() + hi + 1);
    out[static_cast<std::size_t>(i)] = std::clamp(mean, *mn, *mx);
  }
  return out;
}

ClipPrediction smooth_clip(const ClipPrediction& pred, int window) {
  std::vector<std::vector<double>> curves;
  curves.reserve(pred.num_classes());
  for (std::size_t c = 0; c < pred.num_classes(); ++c) {
    curves.push_back(smooth_moving_average(pred.curve(c), window));
  }
  return pred.with_curves(std::move(curves));
}

ClipPrediction smooth_clip(const ClipPrediction& pred, const std::map<std::string, int>& windows) {
  std::vector<std::vector<double>> curves;
  curves.reserve(pred.num_classes());
  for (std::size_t c = 0; c < pred.num_classes(); ++c) {
    const auto& name = pred.class_names()[c];
    auto it = windows.find(name);
    if (it == windows.end()) throw ConfigError("no smoothing window for class '" + name + "'");
    curves.push_back(smooth_moving_average(pred.curve(c), it->second));
  }
  return pred.with_curves(std::move(curves));
}

}  // namespace sedpost
