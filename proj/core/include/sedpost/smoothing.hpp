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

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "sedpost/core.hpp"

namespace sedpost {

/// Centered moving average with an odd window. Near the clip edges the window
/// is truncated and the mean taken over the frames that remain, so a constant
/// curve is left unchanged everywhere. Throws ParameterError for an even or
/// non-positive window.
std::vector<double> smooth_moving_average(std::span<const double> curve, int window);

/// Smooths every class curve with the same window.
ClipPrediction smooth_clip(const ClipPrediction& pred, int window);
/// Per-class windows keyed by class name; every class of `pred` must appear
/// (ConfigError otherwise).
ClipPrediction smooth_clip(const ClipPrediction& pred, const std::map<std::string, int>& windows);

}  // namespace sedpost
