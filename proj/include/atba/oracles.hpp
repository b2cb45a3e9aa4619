#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "atba/alignment.hpp"
#include "atba/boundary.hpp"
#include "atba/error.hpp"
#include "atba/types.hpp"

namespace atba {

// Slow, obviously-correct references used to validate the fast pipeline and
// to reproduce the ablation baselines. Guards fail loudly rather than
// truncating: oracles exist to be trusted.

namespace detail {

inline std::uint64_t binomial_guarded(int n, int k, std::uint64_t guard) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result fits in 64 bits for every n used here once capped by the guard.
    result = result * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
    if (result > guard) return result;
  }
  return result;
}

}  // namespace detail

// Exact minimization of the alignment cost by enumerating every strictly
// increasing (M-1)-subset of candidates. Subsets are visited in lexicographic
// order and only strict improvements are kept, so ties resolve to the
// lexicographically smallest matched index set; the dynamic program's
// prefer-drop backtracking picks the same one.
inline AlignmentResult brute_force_alignment(const TransitionScores& scores,
                                             std::uint64_t guard = 1000000) {
  const int candidates = scores.count();
  const int transitions = scores.transitions();
  if (transitions < 1) fail(ErrorKind::Validation, "alignment needs at least one transition");
  if (candidates < transitions)
    fail(ErrorKind::InfeasibleAlignment,
         std::to_string(candidates) + " candidate(s) cannot cover " +
             std::to_string(transitions) + " transition(s)");
  const std::uint64_t subsets = detail::binomial_guarded(candidates, transitions, guard);
  if (subsets > guard)
    fail(ErrorKind::OracleTooLarge, "C(" + std::to_string(candidates) + ", " +
                                        std::to_string(transitions) + ") exceeds the guard of " +
                                        std::to_string(guard));

  std::vector<int> pick(static_cast<std::size_t>(transitions));
  for (int r = 0; r < transitions; ++r) pick[static_cast<std::size_t>(r)] = r;

  AlignmentResult best;
  best.total_cost = std::numeric_limits<double>::infinity();
  while (true) {
    double acc = 0.0;
    for (int r = 0; r < transitions; ++r) acc += scores.values(pick[static_cast<std::size_t>(r)], r);
    const double cost = -acc;
    if (cost < best.total_cost) {
      best.total_cost = cost;
      best.matched_candidates.assign(pick.begin(), pick.end());
      for (int& k : best.matched_candidates) ++k;  // 1-based
    }

    // Next combination in lexicographic order.
    int i = transitions - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == candidates - transitions + i) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < transitions; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }

  best.boundaries.reserve(best.matched_candidates.size());
  for (int k : best.matched_candidates)
    best.boundaries.push_back(scores.candidates.timestamps[static_cast<std::size_t>(k - 1)]);
  return best;
}

// Maximum-log-likelihood segmentation consistent with the transcript, solved
// by the classic O(T^2 M) dynamic program over (frame, segment) states with
// an explicit scan over the previous segment end. No length or context model;
// ties between split points go to the earliest one. Log-probabilities are
// floored at -1e300 so prefix-sum differences of impossible labelings stay
// ordered instead of producing NaN.
inline PseudoLabels exhaustive_segmentation_labels(const ProbabilitySequence& sequence,
                                                   const Transcript& transcript,
                                                   int frame_guard = 2000) {
  const int total = sequence.frames();
  const int segments = transcript.segments();
  if (total > frame_guard)
    fail(ErrorKind::OracleTooLarge, "sequence of " + std::to_string(total) +
                                        " frames exceeds the oracle guard of " +
                                        std::to_string(frame_guard));
  if (segments > total)
    fail(ErrorKind::Validation, "transcript longer than the sequence");

  if (segments == 1) {
    std::vector<int> labels(static_cast<std::size_t>(total), transcript.action(1));
    return PseudoLabels(std::move(labels));
  }

  constexpr double kLogFloor = -1e300;
  // prefix[m][t] = sum over frames 1..t of the floored log-probability of the
  // class of segment m.
  std::vector<std::vector<double>> prefix(static_cast<std::size_t>(segments + 1));
  for (int m = 1; m <= segments; ++m) {
    auto& row = prefix[static_cast<std::size_t>(m)];
    row.assign(static_cast<std::size_t>(total + 1), 0.0);
    const int label = transcript.action(m);
    for (int t = 1; t <= total; ++t) {
      const double p = sequence.at(t, label);
      row[static_cast<std::size_t>(t)] =
          row[static_cast<std::size_t>(t - 1)] + std::max(std::log(p), kLogFloor);
    }
  }

  const double neg_inf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(static_cast<std::size_t>(segments + 1),
                                        std::vector<double>(static_cast<std::size_t>(total + 1), neg_inf));
  std::vector<std::vector<int>> parent(static_cast<std::size_t>(segments + 1),
                                       std::vector<int>(static_cast<std::size_t>(total + 1), -1));
  for (int t = 1; t <= total; ++t)
    best[1][static_cast<std::size_t>(t)] = prefix[1][static_cast<std::size_t>(t)];

  for (int m = 2; m <= segments; ++m) {
    for (int t = m; t <= total; ++t) {
      double best_value = neg_inf;
      int best_split = -1;
      for (int split = m - 1; split <= t - 1; ++split) {
        const double candidate =
            best[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(split)] +
            (prefix[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] -
             prefix[static_cast<std::size_t>(m)][static_cast<std::size_t>(split)]);
        if (candidate > best_value) {
          best_value = candidate;
          best_split = split;
        }
      }
      best[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] = best_value;
      parent[static_cast<std::size_t>(m)][static_cast<std::size_t>(t)] = best_split;
    }
  }

  std::vector<int> labels(static_cast<std::size_t>(total), 0);
  int end = total;
  for (int m = segments; m >= 1; --m) {
    const int start = (m == 1) ? 0 : parent[static_cast<std::size_t>(m)][static_cast<std::size_t>(end)];
    if (m > 1 && start < 0)
      fail(ErrorKind::InfeasibleAlignment, "segmentation oracle failed to backtrack");
    for (int t = start + 1; t <= end; ++t)
      labels[static_cast<std::size_t>(t - 1)] = transcript.action(m);
    end = start;
  }
  return PseudoLabels(std::move(labels));
}

// Ablation baseline: pick exactly M-1 boundaries with the same greedy NMS
// rule (no transition scoring, no alignment) and emit labels directly. Falls
// back to the uniform segmentation when fewer than M-1 timestamps survive.
inline PseudoLabels class_agnostic_baseline(const ProbabilitySequence& sequence,
                                            const Transcript& transcript, const Config& config) {
  config.validate();
  const int total = sequence.frames();
  const int segments = transcript.segments();
  if (total < segments)
    fail(ErrorKind::Validation, "transcript longer than the sequence");
  if (segments == 1) {
    std::vector<int> labels(static_cast<std::size_t>(total), transcript.action(1));
    return PseudoLabels(std::move(labels));
  }

  const BoundaryScores scores = score_boundaries(sequence, config);
  CandidateSet picked;
  try {
    picked = detail::greedy_select(scores, segments, config.suppression_fraction,
                                   transcript.transition_count());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyCandidates) throw;
  }
  if (picked.size() < transcript.transition_count())
    return uniform_fallback_labels(transcript, total);

  AlignmentResult direct;
  direct.boundaries = picked.timestamps;
  return emit_pseudo_labels(direct, transcript, total);
}

}  // namespace atba
