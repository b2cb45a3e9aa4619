#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "atba/error.hpp"
#include "atba/losses.hpp"
#include "atba/matrix.hpp"
#include "atba/rng.hpp"
#include "atba/types.hpp"

namespace atba {

// Synthetic desk-scale corpus: ground-truth segmentations, transcripts, noisy
// probability sequences and frame embeddings with controllable noise. Every
// video is a pure function of (seed, video index); the generator draws from
// its own splitmix64 substream and never touches platform-default randomness.

struct GeneratorSpec {
  std::uint64_t seed = 0;
  int videos = 0;
  int min_frames = 400;
  int max_frames = 700;
  int min_segments = 2;
  int max_segments = 5;
  int classes = 8;
  int background_class = 1;
  double background_rate = 0.0;  // target fraction of background frames; 0 disables background segments
  double confusion = 0.0;        // probability mass leaked to wrong classes
  int smoothing_radius = 0;      // half-width of the cross-fade at each transition
  double distractor_rate = 0.0;  // expected intra-segment false-boundary events per segment
  int embedding_dim = 16;
  double embedding_noise = 0.1;

  // Segments never get shorter than this: wide enough for the default
  // transition template and for non-overlapping cross-fades.
  int minimum_segment_length() const { return std::max(31, 2 * smoothing_radius + 2); }

  void validate() const {
    if (videos < 0) fail(ErrorKind::Generator, "video count must be non-negative");
    if (min_frames < 1 || max_frames < min_frames)
      fail(ErrorKind::Generator, "frame range is empty");
    if (min_segments < 1 || max_segments < min_segments)
      fail(ErrorKind::Generator, "segment range is empty");
    if (classes < 2) fail(ErrorKind::Generator, "need at least two classes");
    if (background_class < 1 || background_class > classes)
      fail(ErrorKind::Generator, "background class out of range");
    if (!(background_rate >= 0.0 && background_rate < 1.0))
      fail(ErrorKind::Generator, "background rate must lie in [0, 1)");
    if (!(confusion >= 0.0 && confusion <= 1.0))
      fail(ErrorKind::Generator, "confusion must lie in [0, 1]");
    if (smoothing_radius < 0) fail(ErrorKind::Generator, "smoothing radius must be non-negative");
    if (!(distractor_rate >= 0.0 && distractor_rate <= 1.0))
      fail(ErrorKind::Generator, "distractor rate must lie in [0, 1]");
    if (embedding_dim < 1) fail(ErrorKind::Generator, "embedding dimension must be >= 1");
    if (!(embedding_noise >= 0.0)) fail(ErrorKind::Generator, "embedding noise must be non-negative");
  }
};

struct VideoSample {
  std::string id;
  ProbabilitySequence probabilities;
  EmbeddingSet embeddings;
  Transcript transcript;
  PseudoLabels ground_truth;
};

namespace detail {

// Splits `total` frames among `count` segments: every segment gets the floor,
// the rest is shared proportionally to the weights with largest-remainder
// rounding (ties to the lower index).
inline std::vector<int> allocate_lengths(int total, int count, int floor_length,
                                         std::span<const double> weights) {
  const int extra = total - count * floor_length;
  if (extra < 0) fail(ErrorKind::Generator, "segments do not fit the frame budget");
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;

  std::vector<int> lengths(static_cast<std::size_t>(count), floor_length);
  std::vector<std::pair<double, int>> remainders;
  remainders.reserve(static_cast<std::size_t>(count));
  int assigned = 0;
  for (int i = 0; i < count; ++i) {
    const double share = extra * weights[static_cast<std::size_t>(i)] / weight_sum;
    const int whole = static_cast<int>(share);
    lengths[static_cast<std::size_t>(i)] += whole;
    assigned += whole;
    remainders.push_back({share - whole, i});
  }
  std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int i = 0; i < extra - assigned; ++i)
    ++lengths[static_cast<std::size_t>(remainders[static_cast<std::size_t>(i)].second)];
  return lengths;
}

struct DisplayRun {
  int label = 0;
  int start = 0;  // 1-based inclusive
  int end = 0;
};

}  // namespace detail

// Generates one video. The draw order is fixed (frame count, segment count,
// transcript, length weights, events, class mixture, embeddings), so outputs
// are bit-identical across runs and platforms for a given (seed, index).
inline VideoSample generate_video(const GeneratorSpec& spec, int index) {
  spec.validate();
  SplitMix64 rng = substream(spec.seed, static_cast<std::uint64_t>(index));
  const int floor_length = spec.minimum_segment_length();

  const int total = rng.uniform_int(spec.min_frames, spec.max_frames);

  // Segment count; background corpora interleave background with actions and
  // therefore need an odd count.
  int segments = rng.uniform_int(spec.min_segments, spec.max_segments);
  const bool with_background = spec.background_rate > 0.0;
  if (with_background) {
    if (segments % 2 == 0) segments = (segments + 1 <= spec.max_segments) ? segments + 1 : segments - 1;
    if (segments < 3 || segments % 2 == 0)
      fail(ErrorKind::Generator, "background corpora need an odd segment count >= 3 in range");
  }
  if (segments * floor_length > total)
    fail(ErrorKind::Generator, "cannot fit " + std::to_string(segments) + " segments of >= " +
                                   std::to_string(floor_length) + " frames into " +
                                   std::to_string(total));

  // Transcript.
  std::vector<int> action_pool;
  for (int c = 1; c <= spec.classes; ++c)
    if (c != spec.background_class) action_pool.push_back(c);
  std::vector<int> actions(static_cast<std::size_t>(segments), 0);
  if (with_background) {
    for (int m = 0; m < segments; ++m) {
      if (m % 2 == 0) {
        actions[static_cast<std::size_t>(m)] = spec.background_class;
      } else {
        if (action_pool.empty()) fail(ErrorKind::Generator, "no non-background classes available");
        actions[static_cast<std::size_t>(m)] =
            action_pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(action_pool.size()) - 1))];
      }
    }
  } else {
    if (segments >= 2 && action_pool.size() < 2)
      fail(ErrorKind::Generator, "need at least two non-background classes for transitions");
    for (int m = 0; m < segments; ++m) {
      int pick;
      do {
        pick = action_pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(action_pool.size()) - 1))];
      } while (m > 0 && pick == actions[static_cast<std::size_t>(m - 1)]);
      actions[static_cast<std::size_t>(m)] = pick;
    }
  }
  Transcript transcript(actions, spec.classes);

  // Segment lengths: jittered shares above the floor. In background mode the
  // background and action budgets are split first so the realized background
  // fraction tracks the target.
  std::vector<double> weights(static_cast<std::size_t>(segments));
  for (double& w : weights) w = rng.uniform(0.7, 1.3);
  std::vector<int> lengths;
  if (with_background) {
    const int bg_count = (segments + 1) / 2;
    const int action_count = segments - bg_count;
    int bg_total = std::max(bg_count * floor_length,
                            static_cast<int>(spec.background_rate * total + 0.5));
    bg_total = std::min(bg_total, total - action_count * floor_length);
    if (bg_total < bg_count * floor_length)
      fail(ErrorKind::Generator, "background budget infeasible for the frame count");
    std::vector<double> bg_weights, action_weights;
    for (int m = 0; m < segments; ++m)
      (m % 2 == 0 ? bg_weights : action_weights).push_back(weights[static_cast<std::size_t>(m)]);
    const std::vector<int> bg_lengths =
        detail::allocate_lengths(bg_total, bg_count, floor_length, bg_weights);
    const std::vector<int> action_lengths =
        detail::allocate_lengths(total - bg_total, action_count, floor_length, action_weights);
    lengths.resize(static_cast<std::size_t>(segments));
    for (int m = 0, b = 0, a = 0; m < segments; ++m)
      lengths[static_cast<std::size_t>(m)] =
          (m % 2 == 0) ? bg_lengths[static_cast<std::size_t>(b++)] : action_lengths[static_cast<std::size_t>(a++)];
  } else {
    lengths = detail::allocate_lengths(total, segments, floor_length, weights);
  }

  // Ground-truth labels.
  std::vector<int> truth(static_cast<std::size_t>(total), 0);
  std::vector<int> starts(static_cast<std::size_t>(segments), 0);
  {
    int cursor = 1;
    for (int m = 0; m < segments; ++m) {
      starts[static_cast<std::size_t>(m)] = cursor;
      for (int t = 0; t < lengths[static_cast<std::size_t>(m)]; ++t)
        truth[static_cast<std::size_t>(cursor - 1 + t)] = actions[static_cast<std::size_t>(m)];
      cursor += lengths[static_cast<std::size_t>(m)];
    }
  }

  // Distractor events: an intra-segment excursion to a class outside the
  // transcript. Edges are cross-faded like real transitions, so the event
  // produces class-agnostic boundaries without matching any transition
  // pattern. At most one event per segment; infeasibly small segments skip.
  const std::set<int> transcript_classes(actions.begin(), actions.end());
  std::vector<int> outside_pool;
  for (int c = 1; c <= spec.classes; ++c)
    if (!transcript_classes.count(c)) outside_pool.push_back(c);

  std::vector<int> display(truth);
  const int event_min = std::max(2 * spec.smoothing_radius + 2, 8);
  for (int m = 0; m < segments; ++m) {
    if (spec.distractor_rate <= 0.0) break;
    if (rng.uniform() >= spec.distractor_rate) continue;
    if (outside_pool.empty()) continue;
    const int len = lengths[static_cast<std::size_t>(m)];
    // Events stay in the middle third of the segment, so the suppression zone
    // around an event edge cannot swallow the neighboring real transitions.
    const int margin = std::max(2 * spec.smoothing_radius + 2, len / 3);
    const int event_max = std::min(len - 2 * margin, 62);
    if (event_max < event_min) continue;
    const int event_len = rng.uniform_int(event_min, event_max);
    const int offset = rng.uniform_int(margin, len - margin - event_len);
    const int event_class =
        outside_pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(outside_pool.size()) - 1))];
    const int event_start = starts[static_cast<std::size_t>(m)] + offset;
    for (int t = event_start; t < event_start + event_len; ++t)
      display[static_cast<std::size_t>(t - 1)] = event_class;
  }

  // Per-video off-class mixture: one random distribution over all classes,
  // re-normalized per class with that class removed. Keeping it fixed within
  // a video makes same-class frames identical away from fades, so flat
  // regions score exactly zero in the boundary detector.
  std::vector<double> mixture(static_cast<std::size_t>(spec.classes));
  double mixture_sum = 0.0;
  for (double& v : mixture) {
    v = rng.exponential();
    mixture_sum += v;
  }
  for (double& v : mixture) v /= mixture_sum;

  auto class_distribution = [&](int label) {
    std::vector<double> row(static_cast<std::size_t>(spec.classes), 0.0);
    row[static_cast<std::size_t>(label - 1)] = 1.0;
    if (spec.confusion > 0.0) {
      const double rest = 1.0 - mixture[static_cast<std::size_t>(label - 1)];
      for (int c = 0; c < spec.classes; ++c) {
        const double off = (c == label - 1) ? 0.0 : mixture[static_cast<std::size_t>(c)] / rest;
        row[static_cast<std::size_t>(c)] =
            (1.0 - spec.confusion) * row[static_cast<std::size_t>(c)] + spec.confusion * off;
      }
    }
    return row;
  };

  // Display runs and their distributions.
  std::vector<detail::DisplayRun> runs;
  {
    int start = 1;
    for (int t = 2; t <= total; ++t) {
      if (display[static_cast<std::size_t>(t - 1)] != display[static_cast<std::size_t>(start - 1)]) {
        runs.push_back({display[static_cast<std::size_t>(start - 1)], start, t - 1});
        start = t;
      }
    }
    runs.push_back({display[static_cast<std::size_t>(start - 1)], start, total});
  }
  std::vector<std::vector<double>> run_distribution;
  run_distribution.reserve(runs.size());
  for (const auto& run : runs) run_distribution.push_back(class_distribution(run.label));

  // Probabilities: run interiors take the run distribution; each run boundary
  // gets a linear cross-fade over the smoothing radius. Fade zones never
  // overlap because run lengths stay above 2 * radius by construction.
  Matrix probabilities(total, spec.classes);
  for (std::size_t r = 0; r < runs.size(); ++r)
    for (int t = runs[r].start; t <= runs[r].end; ++t)
      for (int c = 0; c < spec.classes; ++c)
        probabilities(t - 1, c) = run_distribution[r][static_cast<std::size_t>(c)];
  if (spec.smoothing_radius > 0) {
    const int radius = spec.smoothing_radius;
    for (std::size_t r = 0; r + 1 < runs.size(); ++r) {
      const int boundary = runs[r + 1].start;
      for (int o = 0; o < 2 * radius; ++o) {
        const int t = boundary - radius + o;
        const double w = (o + 0.5) / (2.0 * radius);
        for (int c = 0; c < spec.classes; ++c)
          probabilities(t - 1, c) = (1.0 - w) * run_distribution[r][static_cast<std::size_t>(c)] +
                                    w * run_distribution[r + 1][static_cast<std::size_t>(c)];
      }
    }
  }

  // Embeddings: per-class Gaussian means, frame noise, clean prototypes and
  // noisy occurrence logits keyed to the transcript.
  Matrix means(spec.classes, spec.embedding_dim);
  for (int c = 0; c < spec.classes; ++c)
    for (int d = 0; d < spec.embedding_dim; ++d) means(c, d) = 2.0 * rng.normal();
  EmbeddingSet embeddings;
  embeddings.prototypes = means;
  embeddings.frames = Matrix(total, spec.embedding_dim);
  for (int t = 0; t < total; ++t) {
    const int label = truth[static_cast<std::size_t>(t)];
    for (int d = 0; d < spec.embedding_dim; ++d)
      embeddings.frames(t, d) = means(label - 1, d) + spec.embedding_noise * rng.normal();
  }
  embeddings.occurrence_logits.resize(static_cast<std::size_t>(spec.classes));
  for (int c = 1; c <= spec.classes; ++c)
    embeddings.occurrence_logits[static_cast<std::size_t>(c - 1)] =
        (transcript_classes.count(c) ? 2.0 : -2.0) + 0.5 * rng.normal();

  char id[24];
  std::snprintf(id, sizeof id, "video_%05d", index);
  return {id, ProbabilitySequence(std::move(probabilities)), std::move(embeddings),
          std::move(transcript), PseudoLabels(std::move(truth), spec.classes)};
}

}  // namespace atba
