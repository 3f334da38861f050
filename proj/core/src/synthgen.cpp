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

#include "sedpost/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "sedpost/smoothing.hpp"

namespace sedpost {

namespace {

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [lo, hi], by rejection sampling.
  long integer(long lo, long hi) {
    const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<long>(x % range);
  }

  // Box-Muller; the spare deviate is kept for the next call.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct FrameEvent {
  std::size_t class_index;
  long start;
  long end;
};

std::string clip_name(const SynthSpec& spec, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d", index);
  return spec.clip_prefix + buf + ".wav";
}

// Draws event frames for one clip; empty optional when packing failed.
std::optional<std::vector<FrameEvent>> draw_events(const SynthSpec& spec, Sampler& rng) {
  const long n_events = rng.integer(spec.min_events, spec.max_events);
  const double length = spec.clip_length();
  const long gap_frames = static_cast<long>(std::ceil(spec.min_same_class_gap / spec.frame_duration));
  std::vector<FrameEvent> events;
  for (long e = 0; e < n_events; ++e) {
    const auto cls = static_cast<std::size_t>(
        rng.integer(0, static_cast<long>(spec.classes.size()) - 1));
    bool placed = false;
    for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
      const double duration = rng.uniform(spec.min_duration, std::min(spec.max_duration, length));
      const double onset = rng.uniform(0.0, length - duration);
      const long start = seconds_to_frames(onset, spec.frame_duration);
      long end = static_cast<long>(std::ceil((onset + duration) / spec.frame_duration - 1e-9));
      end = std::min<long>(end, spec.num_frames);
      if (end - start < 2) continue;
      const bool clash = std::any_of(events.begin(), events.end(), [&](const FrameEvent& o) {
        return o.class_index == cls && start < o.end + gap_frames && o.start < end + gap_frames;
      });
      if (clash) continue;
      events.push_back({cls, start, end});
      placed = true;
    }
    if (!placed) return std::nullopt;
  }
  return events;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void validate_spec(const SynthSpec& spec) {
  if (spec.n_clips < 0) throw ParameterError("clip count must be >= 0");
  if (spec.classes.empty()) throw ParameterError("synthetic corpus needs at least one class");
  if (spec.min_events < 0 || spec.max_events < spec.min_events) {
    throw ParameterError("invalid events-per-clip range");
  }
  if (!(0.0 <= spec.outside_prob && spec.outside_prob < spec.inside_prob &&
        spec.inside_prob <= 1.0)) {
    throw ParameterError("need 0 <= outside_prob < inside_prob <= 1");
  }
  if (!(spec.noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
  if (spec.render_window < 1 || spec.render_window % 2 == 0) {
    throw ParameterError("render window must be an odd integer >= 1");
  }
  if (spec.num_frames < 1 || !(spec.frame_duration > 0.0)) {
    throw ParameterError("invalid frame grid");
  }
  if (!(spec.min_duration >= 2.0 * spec.frame_duration) || spec.max_duration < spec.min_duration ||
      spec.min_duration > spec.clip_length()) {
    throw ParameterError("event durations must lie in [2 frames, clip length]");
  }
  if (!(spec.min_same_class_gap >= 0.0)) throw ParameterError("same-class gap must be >= 0");
  if (spec.max_retries < 1) throw ParameterError("max_retries must be >= 1");
}

SynthCorpus generate(const SynthSpec& spec) {
  validate_spec(spec);
  SynthCorpus corpus;
  const auto n_frames = static_cast<std::size_t>(spec.num_frames);
  for (int i = 0; i < spec.n_clips; ++i) {
    const std::string clip = clip_name(spec, i);
    Sampler rng(splitmix64(spec.seed ^ splitmix64(static_cast<std::uint64_t>(i))));

    std::optional<std::vector<FrameEvent>> events;
    for (int attempt = 0; attempt < spec.max_retries && !events; ++attempt) {
      events = draw_events(spec, rng);
    }
    if (!events) throw Error("could not pack events into clip " + clip);

    std::vector<std::vector<double>> curves(spec.classes.size(),
                                            std::vector<double>(n_frames, spec.outside_prob));
    corpus.annotations.add_clip(clip, spec.clip_length());
    for (const auto& e : *events) {
      for (long t = e.start; t < e.end; ++t) {
        curves[e.class_index][static_cast<std::size_t>(t)] = spec.inside_prob;
      }
      corpus.annotations.add_event({clip, spec.classes[e.class_index],
                                    frames_to_seconds(e.start, spec.frame_duration),
                                    frames_to_seconds(e.end, spec.frame_duration)});
    }
    for (auto& curve : curves) {
      if (spec.noise_sigma > 0.0) {
        for (double& v : curve) v += spec.noise_sigma * rng.normal();
      }
      curve = smooth_moving_average(curve, spec.render_window);
      for (double& v : curve) v = std::clamp(v, 0.0, 1.0);
    }
    corpus.predictions.emplace_back(clip, spec.classes, std::move(curves), spec.frame_duration);
  }
  return corpus;
}

}  // namespace sedpost
