#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "atba/boundary.hpp"
#include "atba/error.hpp"
#include "atba/matrix.hpp"
#include "atba/types.hpp"

namespace atba {

// Transition-aware alignment: each (candidate, transition) pair is scored
// with a 2 x w template over the outgoing/incoming class activations, fused
// with the class-agnostic boundary scores, and the best order-preserving
// assignment of candidates to transitions (surplus candidates dropped) is
// found by dynamic programming over an expanded cost matrix.

// 2 x window template. Row 0 covers the outgoing class: +1 before the center
// column, -1 after it. Row 1 mirrors it for the incoming class. Both rows sum
// to zero, so constant activations score exactly 0.
inline Matrix transition_template(int window) {
  if (window < 3 || window % 2 == 0)
    fail(ErrorKind::Config, "transition template size must be odd and >= 3");
  const int center = (window - 1) / 2;
  Matrix t(2, window);
  for (int j = 0; j < window; ++j) {
    const int s = (j < center) ? 1 : (j > center) ? -1 : 0;
    t(0, j) = static_cast<double>(s);
    t(1, j) = static_cast<double>(-s);
  }
  return t;
}

// Score of candidate k against transition r: template-weighted sum of the
// outgoing/incoming class probabilities over the window centered at the
// candidate, normalized by 2 * window. Window frames outside [1, T] are
// clamped (replicate padding), matching the boundary detector.
inline TransitionScores score_transitions(const ProbabilitySequence& sequence,
                                          const Transcript& transcript,
                                          const CandidateSet& candidates, const Config& config) {
  config.validate();
  if (transcript.segments() < 2)
    fail(ErrorKind::NoTransition, "transcript has no transitions");
  if (candidates.size() < 1)
    fail(ErrorKind::Validation, "candidate set is empty");

  const int window = config.transition_window;
  const int half = window / 2;
  const Matrix tmpl = transition_template(window);
  const int total = sequence.frames();
  const int transitions = transcript.transition_count();

  Matrix values(candidates.size(), transitions);
  const double norm = 1.0 / (2.0 * static_cast<double>(window));
  for (int k = 0; k < candidates.size(); ++k) {
    const int center = candidates.timestamps[static_cast<std::size_t>(k)];
    if (center < 2 || center > total)
      fail(ErrorKind::Validation, "candidate timestamp " + std::to_string(center) +
                                      " outside (1, " + std::to_string(total) + "]");
    for (int r = 0; r < transitions; ++r) {
      const auto [outgoing, incoming] = transcript.transition(r + 1);
      double acc = 0.0;
      for (int j = 0; j < window; ++j) {
        const double w = tmpl(0, j);
        if (w == 0.0) continue;
        acc += w * sequence.at(clamp_frame(center - half + j, total), outgoing);
      }
      for (int j = 0; j < window; ++j) {
        const double w = tmpl(1, j);
        if (w == 0.0) continue;
        acc += w * sequence.at(clamp_frame(center - half + j, total), incoming);
      }
      values(k, r) = acc * norm;
    }
  }
  return {std::move(values), candidates};
}

// Adds the class-agnostic boundary score of each candidate to all of its
// transition scores.
inline TransitionScores combine_scores(const TransitionScores& transition,
                                       const BoundaryScores& boundary) {
  TransitionScores out = transition;
  for (int k = 0; k < out.count(); ++k) {
    const int t = out.candidates.timestamps[static_cast<std::size_t>(k)];
    if (t < 1 || t > static_cast<int>(boundary.size()))
      fail(ErrorKind::Validation, "boundary scores do not cover candidate timestamp " +
                                      std::to_string(t));
    const double bonus = boundary[static_cast<std::size_t>(t - 1)];
    for (int r = 0; r < out.transitions(); ++r) out.values(k, r) += bonus;
  }
  return out;
}

// Expanded cost matrix over the transition sequence interleaved with the
// empty symbol: K rows, 2(M-1)+1 columns. Even 1-based columns carry the
// negated transition scores, odd columns (drops) carry zero. The
// initialization mask marks cumulative-cost cells that are pinned to
// +infinity before the recursion: column 1 below row K-(M-1), column 2 below
// row K-(M-1)+1, and row 1 from column 3 on.
struct CostMatrix {
  Matrix delta;  // K x (2(M-1)+1)

  int candidate_count() const { return delta.rows(); }
  int transition_count() const { return (delta.cols() - 1) / 2; }

  // 0-based column; 1-based odd columns (the empty symbol) are even here.
  static bool is_drop_column(int column) { return column % 2 == 0; }

  // True when the cumulative-cost cell (0-based) is directly initialized to
  // +infinity.
  bool init_infinite(int row, int column) const {
    const int drops_allowed = candidate_count() - transition_count();
    if (column == 0) return row >= drops_allowed;
    if (column == 1) return row >= drops_allowed + 1;
    return row == 0;  // columns >= 2 of the first row
  }
};

inline CostMatrix build_cost_matrix(const TransitionScores& scores) {
  const int candidates = scores.count();
  const int transitions = scores.transitions();
  if (transitions < 1) fail(ErrorKind::Validation, "cost matrix needs at least one transition");
  if (candidates < transitions)
    fail(ErrorKind::InfeasibleAlignment,
         std::to_string(candidates) + " candidate(s) cannot cover " + std::to_string(transitions) +
             " transition(s)");

  Matrix delta(candidates, 2 * transitions + 1, 0.0);
  for (int k = 0; k < candidates; ++k)
    for (int r = 0; r < transitions; ++r) delta(k, 2 * r + 1) = -scores.values(k, r);
  return {std::move(delta)};
}

// Minimum-cost monotone one-to-one matching of candidates to transitions with
// exactly K-(M-1) candidates dropped. Cumulative costs propagate serially
// over candidate rows; +infinity is a genuine non-finite sentinel. When two
// predecessor costs tie, the drop branch is preferred, both in the recursion
// sense and during backtracking; this makes the result deterministic and
// reproducible by the brute-force oracle.
inline AlignmentResult align_transitions(const CostMatrix& cost) {
  const int rows = cost.candidate_count();
  const int cols = cost.delta.cols();
  const double inf = std::numeric_limits<double>::infinity();

  Matrix d(rows, cols, inf);
  for (int k = 0; k < rows; ++k) {
    if (!cost.init_infinite(k, 0)) d(k, 0) = cost.delta(k, 0);
    if (!cost.init_infinite(k, 1)) d(k, 1) = cost.delta(k, 1);
  }
  for (int k = 1; k < rows; ++k) {
    for (int j = 2; j < cols; ++j) {
      const double best = CostMatrix::is_drop_column(j)
                              ? std::min(d(k - 1, j), d(k - 1, j - 1))
                              : std::min(d(k - 1, j - 1), d(k - 1, j - 2));
      d(k, j) = cost.delta(k, j) + best;
    }
  }

  const double total =
      (cols >= 2) ? std::min(d(rows - 1, cols - 2), d(rows - 1, cols - 1)) : d(rows - 1, cols - 1);
  if (!std::isfinite(total))
    fail(ErrorKind::InfeasibleAlignment, "no feasible alignment path");

  // Backtracking. At each row the column is chosen among the two allowed
  // predecessors of the incoming column; <= keeps the drop branch on ties.
  std::vector<int> matched(static_cast<std::size_t>(cost.transition_count()), -1);
  int j = cols - 1;
  for (int k = rows - 1; k >= 0; --k) {
    int next;
    if (CostMatrix::is_drop_column(j)) {
      const double stay = d(k, j);
      const double diag = (j >= 1) ? d(k, j - 1) : inf;
      next = (stay <= diag) ? j : j - 1;
    } else {
      const double drop = d(k, j - 1);
      const double prev = (j >= 2) ? d(k, j - 2) : inf;
      next = (drop <= prev) ? j - 1 : j - 2;
    }
    if (!CostMatrix::is_drop_column(next)) matched[static_cast<std::size_t>(next / 2)] = k;
    j = next;
  }
  if (j > 1) fail(ErrorKind::InfeasibleAlignment, "backtracking did not reach a start position");

  AlignmentResult result;
  result.total_cost = total;
  result.matched_candidates.reserve(matched.size());
  for (std::size_t r = 0; r < matched.size(); ++r) {
    if (matched[r] < 0)
      fail(ErrorKind::InfeasibleAlignment, "transition " + std::to_string(r + 1) + " unmatched");
    result.matched_candidates.push_back(matched[r] + 1);
  }
  return result;
}

// Resolves matched candidate rows to timestamps.
inline AlignmentResult align_transitions(const CostMatrix& cost, const CandidateSet& candidates) {
  AlignmentResult result = align_transitions(cost);
  result.boundaries.reserve(result.matched_candidates.size());
  for (int k : result.matched_candidates)
    result.boundaries.push_back(candidates.timestamps[static_cast<std::size_t>(k - 1)]);
  return result;
}

// Expands an aligned boundary set into frame-wise labels: segment r occupies
// [b_{r-1}, b_r - 1] with sentinels b_0 = 1 and b_M = T + 1, so each boundary
// frame starts its incoming segment.
inline PseudoLabels emit_pseudo_labels(const AlignmentResult& alignment,
                                       const Transcript& transcript, int total_frames) {
  const int segments = transcript.segments();
  if (static_cast<int>(alignment.boundaries.size()) != segments - 1)
    fail(ErrorKind::Validation,
         "expected " + std::to_string(segments - 1) + " boundaries, got " +
             std::to_string(alignment.boundaries.size()));
  int previous = 1;
  for (int b : alignment.boundaries) {
    if (b <= previous || b > total_frames)
      fail(ErrorKind::Validation, "boundary " + std::to_string(b) +
                                      " violates strict ordering within (1, " +
                                      std::to_string(total_frames) + "]");
    previous = b;
  }

  std::vector<int> labels(static_cast<std::size_t>(total_frames), 0);
  int start = 1;
  for (int m = 1; m <= segments; ++m) {
    const int end = (m == segments) ? total_frames
                                    : alignment.boundaries[static_cast<std::size_t>(m - 1)] - 1;
    for (int t = start; t <= end; ++t)
      labels[static_cast<std::size_t>(t - 1)] = transcript.action(m);
    start = end + 1;
  }
  return PseudoLabels(std::move(labels));
}

// Uniform segmentation used when candidate selection cannot cover all
// transitions: floor(T / M)-sized segments with the remainder on the last.
inline PseudoLabels uniform_fallback_labels(const Transcript& transcript, int total_frames) {
  const int segments = transcript.segments();
  if (total_frames < segments)
    fail(ErrorKind::Validation, "cannot tile " + std::to_string(segments) + " segments into " +
                                    std::to_string(total_frames) + " frames");
  const int base = total_frames / segments;
  std::vector<int> labels(static_cast<std::size_t>(total_frames), transcript.action(segments));
  for (int m = 1; m < segments; ++m)
    for (int t = (m - 1) * base + 1; t <= m * base; ++t)
      labels[static_cast<std::size_t>(t - 1)] = transcript.action(m);
  return PseudoLabels(std::move(labels));
}

struct PipelineOptions {
  // When false, the alignment runs on the raw transition scores without the
  // class-agnostic bonus (the ablation variant).
  bool fuse_boundary_scores = true;
};

struct PipelineDiagnostics {
  int candidate_count = 0;
  std::vector<int> candidates;
  std::vector<int> boundaries;
  std::vector<int> matched_candidates;
  double alignment_cost = 0.0;
  bool used_fallback = false;
  bool single_segment = false;
  bool fused_scores = true;
  double seconds_boundary_scoring = 0.0;
  double seconds_transition_scoring = 0.0;
  double seconds_alignment = 0.0;
};

struct PipelineResult {
  PseudoLabels labels;
  PipelineDiagnostics diagnostics;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace detail

// Full pseudo-label pipeline: boundary scoring, candidate selection,
// transition scoring, score fusion, drop-allowed alignment and label
// emission. Single-segment transcripts short-circuit to a constant labeling;
// when suppression exhausts the timeline before M-1 candidates exist, the
// uniform fallback is emitted and flagged in the diagnostics.
inline PipelineResult atba_pipeline(const ProbabilitySequence& sequence,
                                    const Transcript& transcript, const Config& config,
                                    const PipelineOptions& options = {}) {
  config.validate();
  const int total = sequence.frames();
  const int segments = transcript.segments();
  if (total < segments)
    fail(ErrorKind::Validation, "transcript longer than the sequence: " +
                                    std::to_string(segments) + " segments, " +
                                    std::to_string(total) + " frames");

  PipelineDiagnostics diag;
  diag.fused_scores = options.fuse_boundary_scores;

  if (segments == 1) {
    diag.single_segment = true;
    std::vector<int> labels(static_cast<std::size_t>(total), transcript.action(1));
    return {PseudoLabels(std::move(labels)), std::move(diag)};
  }

  auto start = std::chrono::steady_clock::now();
  const BoundaryScores scores = score_boundaries(sequence, config);
  diag.seconds_boundary_scoring = detail::seconds_since(start);

  CandidateSet candidates;
  bool fallback = false;
  try {
    candidates = select_candidates(scores, transcript, config);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyCandidates) throw;
    fallback = true;
  }
  if (!fallback && candidates.size() < transcript.transition_count()) fallback = true;

  if (fallback) {
    diag.used_fallback = true;
    diag.candidate_count = candidates.size();
    diag.candidates = candidates.timestamps;
    return {uniform_fallback_labels(transcript, total), std::move(diag)};
  }

  diag.candidate_count = candidates.size();
  diag.candidates = candidates.timestamps;

  start = std::chrono::steady_clock::now();
  TransitionScores transition = score_transitions(sequence, transcript, candidates, config);
  if (options.fuse_boundary_scores) transition = combine_scores(transition, scores);
  diag.seconds_transition_scoring = detail::seconds_since(start);

  start = std::chrono::steady_clock::now();
  const CostMatrix cost = build_cost_matrix(transition);
  const AlignmentResult alignment = align_transitions(cost, candidates);
  diag.seconds_alignment = detail::seconds_since(start);

  diag.boundaries = alignment.boundaries;
  diag.matched_candidates = alignment.matched_candidates;
  diag.alignment_cost = alignment.total_cost;

  return {emit_pseudo_labels(alignment, transcript, total), std::move(diag)};
}

}  // namespace atba
