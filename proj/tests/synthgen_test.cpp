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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "sedpost/dataio.hpp"
#include "sedpost/metrics.hpp"
#include "sedpost/segmentation.hpp"
#include "sedpost/synthgen.hpp"

namespace sedpost {
namespace {

std::string serialize(const SynthCorpus& c) {
  std::ostringstream out;
  write_annotations_tsv(out, c.annotations);
  for (const auto& p : c.predictions) write_probability_csv(out, p);
  return out.str();
}

TEST(Synth, DeterministicPerSeed) {
  SynthSpec spec;
  spec.seed = 42;
  spec.n_clips = 10;
  EXPECT_EQ(serialize(generate(spec)), serialize(generate(spec)));
  auto other = spec;
  other.seed = 43;
  EXPECT_NE(serialize(generate(spec)), serialize(generate(other)));
}

TEST(Synth, ClipsAreIndependentOfCorpusSize) {
  SynthSpec small;
  small.seed = 5;
  small.n_clips = 3;
  SynthSpec large = small;
  large.n_clips = 8;
  const auto a = generate(small);
  const auto b = generate(large);
  for (std::size_t i = 0; i < a.predictions.size(); ++i) {
    EXPECT_EQ(a.predictions[i].clip_id(), b.predictions[i].clip_id());
    for (std::size_t c = 0; c < a.predictions[i].num_classes(); ++c) {
      const auto x = a.predictions[i].curve(c);
      const auto y = b.predictions[i].curve(c);
      EXPECT_TRUE(std::equal(x.begin(), x.end(), y.begin(), y.end()));
    }
  }
}

TEST(Synth, ShapeAndRanges) {
  SynthSpec spec;
  spec.seed = 1;
  spec.n_clips = 30;
  spec.noise_sigma = 0.3;
  const auto corpus = generate(spec);
  ASSERT_EQ(corpus.predictions.size(), 30u);
  EXPECT_EQ(corpus.predictions[7].clip_id(), "synth_0007.wav");
  EXPECT_EQ(corpus.annotations.clips().size(), 30u);
  for (const auto& p : corpus.predictions) {
    EXPECT_EQ(p.num_frames(), static_cast<std::size_t>(kDefaultNumFrames));
    EXPECT_EQ(p.class_names(), dcase2018_classes());
    for (std::size_t c = 0; c < p.num_classes(); ++c) {
      for (double v : p.curve(c)) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
      }
    }
  }
}

TEST(Synth, EventConstraints) {
  SynthSpec spec;
  spec.seed = 9;
  spec.n_clips = 100;
  const auto corpus = generate(spec);
  std::map<std::string, long> per_clip;
  EventList events = corpus.annotations.events();
  sort_events(events);
  for (const auto& e : events) {
    ++per_clip[e.clip_id];
    const double d = e.offset - e.onset;
    EXPECT_GE(d, spec.min_duration - spec.frame_duration);
    EXPECT_LE(d, spec.max_duration + spec.frame_duration);
    EXPECT_GE(e.onset, 0.0);
    EXPECT_LE(e.offset, spec.clip_length() + 1e-9);
  }
  for (const auto& [clip, n] : per_clip) EXPECT_LE(n, spec.max_events);
  for (std::size_t i = 0; i < events.size(); ++i) {
    for (std::size_t j = i + 1; j < events.size(); ++j) {
      const auto& a = events[i];
      const auto& b = events[j];
      if (a.clip_id != b.clip_id || a.class_name != b.class_name) continue;
      EXPECT_GE(b.onset - a.offset, spec.min_same_class_gap - 1e-9);
    }
  }
}

TEST(Synth, NoiselessCorpusIsRecoveredExactly) {
  SynthSpec spec;
  spec.seed = 3;
  spec.n_clips = 40;
  spec.noise_sigma = 0.0;
  spec.render_window = 1;
  const auto corpus = generate(spec);
  SegmenterConfig config;
  config.method = Method::kCIA;
  config.params = {ClassParams{}};
  config.params[0].threshold = (spec.inside_prob + spec.outside_prob) / 2;
  config.min_gap_frames = 0;
  config.min_len_frames = 0;
  const auto events = segment_dataset(corpus.predictions, config);
  const auto report = score(corpus.annotations, events, {}, spec.classes);
  EXPECT_EQ(report.total.fp, 0);
  EXPECT_EQ(report.total.fn, 0);
  EXPECT_DOUBLE_EQ(report.macro_f1, 1.0);
}

TEST(Synth, DefaultCorpusIsSeparable) {
  SynthSpec spec;
  spec.seed = 2018;
  const auto corpus = generate(spec);
  const auto& classes = spec.classes;
  std::vector<double> inside_sum(classes.size()), outside_sum(classes.size());
  std::vector<long> inside_n(classes.size()), outside_n(classes.size());
  for (const auto& clip : corpus.predictions) {
    std::vector<std::vector<bool>> in(classes.size(), std::vector<bool>(clip.num_frames()));
    for (const auto& e : corpus.annotations.events()) {
      if (e.clip_id != clip.clip_id()) continue;
      const auto c = *clip.class_index(e.class_name);
      const long a = std::lround(e.onset / spec.frame_duration);
      const long b = std::lround(e.offset / spec.frame_duration);
      for (long t = a; t < b; ++t) in[c][static_cast<std::size_t>(t)] = true;
    }
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (std::size_t t = 0; t < clip.num_frames(); ++t) {
        (in[c][t] ? inside_sum : outside_sum)[c] += clip.at(t, c);
        ++(in[c][t] ? inside_n : outside_n)[c];
      }
    }
  }
  for (std::size_t c = 0; c < classes.size(); ++c) {
    ASSERT_GT(inside_n[c], 0) << classes[c];
    EXPECT_GE(inside_sum[c] / inside_n[c], spec.inside_prob - 2 * spec.noise_sigma) << classes[c];
    EXPECT_LE(outside_sum[c] / outside_n[c], spec.outside_prob + 2 * spec.noise_sigma)
        << classes[c];
  }
}

TEST(Synth, ZeroClips) {
  SynthSpec spec;
  spec.n_clips = 0;
  const auto corpus = generate(spec);
  EXPECT_TRUE(corpus.predictions.empty());
  EXPECT_TRUE(corpus.annotations.clips().empty());
}

TEST(Synth, InvalidSpecs) {
  SynthSpec spec;
  spec.inside_prob = 0.1;
  EXPECT_THROW(generate(spec), ParameterError);
  spec = {};
  spec.render_window = 4;
  EXPECT_THROW(generate(spec), ParameterError);
  spec = {};
  spec.noise_sigma = -1;
  EXPECT_THROW(generate(spec), ParameterError);
  spec = {};
  spec.max_events = -1;
  EXPECT_THROW(generate(spec), ParameterError);
}

TEST(Splitmix, KnownValues) {
  // Reference outputs of the published splitmix64 finalizer.
  EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(splitmix64(1), 0x910A2DEC89025CC1ULL);
}

}  // namespace
}  // namespace sedpost
