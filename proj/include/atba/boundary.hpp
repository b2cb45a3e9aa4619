#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "atba/error.hpp"
#include "atba/matrix.hpp"
#include "atba/types.hpp"

namespace atba {

// Class-agnostic boundary detection: each frame is scored by correlating a
// fixed +-1 template against the pairwise Jensen-Shannon similarity matrix of
// its local window, then candidates are picked greedily with non-maximum
// suppression.

// Jensen-Shannon divergence with base-2 logarithms, so the result lies in
// [0, 1] and 1 - 2*JS lies in [-1, 1]. Terms with p_i = 0 contribute zero;
// the midpoint is positive whenever p_i > 0.
inline double js_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    fail(ErrorKind::Validation, "distributions must have equal length");
  double js = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) js += 0.5 * p[i] * std::log2(p[i] / m);
    if (q[i] > 0.0) js += 0.5 * q[i] * std::log2(q[i] / m);
  }
  return js;
}

inline int clamp_frame(int frame, int total) { return std::clamp(frame, 1, total); }

// Square boundary template: entry (i, j) is sign(i - c) * sign(j - c) with c
// the center, i.e. +1 blocks on the diagonal, -1 off-diagonal and a zero
// center cross. Its total sum is zero, so constant windows score exactly 0.
inline Matrix boundary_template(int window) {
  if (window < 3 || window % 2 == 0)
    fail(ErrorKind::Config, "boundary template size must be odd and >= 3");
  const int center = (window - 1) / 2;
  Matrix t(window, window);
  for (int i = 0; i < window; ++i) {
    const int si = (i > center) - (i < center);
    for (int j = 0; j < window; ++j) {
      const int sj = (j > center) - (j < center);
      t(i, j) = static_cast<double>(si * sj);
    }
  }
  return t;
}

namespace detail {

// Similarity between two frames, computed with the lower frame first so the
// result is identical regardless of argument order.
inline double frame_similarity(const ProbabilitySequence& sequence, int u, int v) {
  if (u == v) return 1.0;
  const int lo = std::min(u, v), hi = std::max(u, v);
  return 1.0 - 2.0 * js_divergence(sequence.row(lo), sequence.row(hi));
}

}  // namespace detail

// Pairwise similarity matrix of the window centered at `center`. Window
// positions falling outside [1, T] are clamped to the nearest valid frame
// (replicate padding), so every frame receives a full-size window.
inline Matrix pairwise_similarity(const ProbabilitySequence& sequence, int center, int window) {
  if (window < 3 || window % 2 == 0)
    fail(ErrorKind::Config, "similarity window must be odd and >= 3");
  if (center < 1 || center > sequence.frames())
    fail(ErrorKind::Index, "window center " + std::to_string(center) + " out of 1.." +
                               std::to_string(sequence.frames()));
  const int half = window / 2;
  std::vector<int> frames(static_cast<std::size_t>(window));
  for (int i = 0; i < window; ++i)
    frames[static_cast<std::size_t>(i)] = clamp_frame(center - half + i, sequence.frames());

  Matrix sim(window, window);
  for (int i = 0; i < window; ++i) {
    sim(i, i) = 1.0;
    for (int j = i + 1; j < window; ++j) {
      const double s = detail::frame_similarity(sequence, frames[static_cast<std::size_t>(i)],
                                                frames[static_cast<std::size_t>(j)]);
      sim(i, j) = s;
      sim(j, i) = s;
    }
  }
  return sim;
}

// Boundary score for every frame: the mean of the template-weighted window
// similarities, normalized by window^2 including the zero template cells.
// Similarities are precomputed per (frame, offset) pair, which keeps the
// result bit-identical to evaluating pairwise_similarity window by window
// while avoiding redundant divergence evaluations in overlapping windows.
inline BoundaryScores score_boundaries(const ProbabilitySequence& sequence, const Config& config) {
  config.validate();
  const int total = sequence.frames();
  const int window = config.boundary_window;
  const int half = window / 2;
  const Matrix tmpl = boundary_template(window);

  // pair[d][t-1] = similarity(t, t + d) for d in 1..window-1.
  std::vector<std::vector<double>> pair(static_cast<std::size_t>(window));
  for (int d = 1; d < window; ++d) {
    auto& row = pair[static_cast<std::size_t>(d)];
    row.resize(total > d ? static_cast<std::size_t>(total - d) : 0);
    for (int t = 1; t + d <= total; ++t)
      row[static_cast<std::size_t>(t - 1)] = detail::frame_similarity(sequence, t, t + d);
  }

  const double norm = 1.0 / (static_cast<double>(window) * static_cast<double>(window));
  BoundaryScores scores(static_cast<std::size_t>(total), 0.0);
  for (int t = 1; t <= total; ++t) {
    double acc = 0.0;
    for (int i = 0; i < window; ++i) {
      const int u = clamp_frame(t - half + i, total);
      for (int j = 0; j < window; ++j) {
        const double w = tmpl(i, j);
        if (w == 0.0) continue;
        const int v = clamp_frame(t - half + j, total);
        const double s =
            (u == v) ? 1.0
                     : pair[static_cast<std::size_t>(std::abs(u - v))][static_cast<std::size_t>(std::min(u, v) - 1)];
        acc += w * s;
      }
    }
    scores[static_cast<std::size_t>(t - 1)] = acc * norm;
  }
  return scores;
}

// Radius of the NMS invalid interval: floor(fraction * T / M), computed on
// the frame count actually processed. Radius 0 invalidates only the selected
// frame itself.
inline int suppression_radius(int frames, int segments, double fraction) {
  return static_cast<int>(std::floor(fraction * static_cast<double>(frames) /
                                     static_cast<double>(segments)));
}

namespace detail {

// Greedy peak picking: repeatedly take the highest-scoring valid timestamp
// and invalidate its neighborhood, until `cap` picks are made or no valid
// timestamp remains. Frame 1 is never selectable. Ties on the score go to
// the largest timestamp; at a step boundary the score plateau covers the last
// frame of the outgoing segment and the first frame of the incoming one, and
// the right end is the frame the emitted segmentation treats as segment start.
inline CandidateSet greedy_select(const BoundaryScores& scores, int segments, double fraction,
                                  int cap) {
  const int total = static_cast<int>(scores.size());
  const int radius = suppression_radius(total, segments, fraction);
  if (total < 2)
    fail(ErrorKind::EmptyCandidates, "no selectable timestamps: sequence has " +
                                         std::to_string(total) + " frame(s)");

  std::vector<char> valid(static_cast<std::size_t>(total + 1), 1);
  valid[0] = 0;
  valid[1] = 0;  // frame 1 never starts a new segment

  CandidateSet out;
  out.suppression_radius = radius;
  while (static_cast<int>(out.selection_order.size()) < cap) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int t = 2; t <= total; ++t) {
      if (!valid[static_cast<std::size_t>(t)]) continue;
      const double s = scores[static_cast<std::size_t>(t - 1)];
      if (s >= best_score) {
        best_score = s;
        best = t;
      }
    }
    if (best < 0) break;
    out.selection_order.push_back(best);
    const int lo = std::max(1, best - radius);
    const int hi = std::min(total, best + radius);
    for (int t = lo; t <= hi; ++t) valid[static_cast<std::size_t>(t)] = 0;
  }

  if (out.selection_order.empty())
    fail(ErrorKind::EmptyCandidates, "candidate selection produced no timestamps");
  out.timestamps = out.selection_order;
  std::sort(out.timestamps.begin(), out.timestamps.end());
  return out;
}

}  // namespace detail

// Selects up to multiplier * (M - 1) candidate boundaries.
inline CandidateSet select_candidates(const BoundaryScores& scores, const Transcript& transcript,
                                      const Config& config) {
  config.validate();
  if (transcript.segments() < 2)
    fail(ErrorKind::NoTransition, "transcript has no transitions; emit a single-segment labeling");
  const int cap = config.candidate_multiplier * transcript.transition_count();
  return detail::greedy_select(scores, transcript.segments(), config.suppression_fraction, cap);
}

}  // namespace atba
