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

// Deterministic synthetic corpus: strong annotations plus matching noisy
// probability matrices. Each class curve is a boxcar (inside_prob over event
// frames, outside_prob elsewhere) with additive Gaussian noise, smoothed and
// clipped to [0,1].
//
// Engine: std::mt19937_64. Distributions are local (53-bit uniform doubles,
// rejection-sampled integers, Box-Muller normals), not <random>'s. Clip i
// draws from its own engine seeded with splitmix64(seed ^ splitmix64(i)).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sedpost/core.hpp"

namespace sedpost {

struct SynthSpec {
  std::uint64_t seed = 0;
  int n_clips = 100;
  std::vector<std::string> classes = dcase2018_classes();
  /// Events per clip, uniform over [min_events, max_events].
  int min_events = 0;
  int max_events = 3;
  double min_duration = 0.5;
  double max_duration = 4.0;
  /// Minimum silence between two events of the same class, in seconds.
  double min_same_class_gap = 1.0;
  double inside_prob = 0.9;
  double outside_prob = 0.1;
  double noise_sigma = 0.05;
  int render_window = 5;
  int num_frames = kDefaultNumFrames;
  double frame_duration = kDefaultFrameDuration;
  std::string clip_prefix = "synth_";
  /// Attempts per clip before generation fails.
  int max_retries = 16;

  double clip_length() const { return num_frames * frame_duration; }
};

/// Throws ParameterError when the spec violates its invariants.
void validate_spec(const SynthSpec& spec);

struct SynthCorpus {
  AnnotationSet annotations;
  std::vector<ClipPrediction> predictions;
};

/// Clip ids are "<clip_prefix><index, 4 digits>.wav". Event boundaries sit on
/// frame edges (onset frame floor, offset frame ceil).
SynthCorpus generate(const SynthSpec& spec);

/// splitmix64 finalizer, used to derive per-clip seeds.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace sedpost
