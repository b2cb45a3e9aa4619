#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "atba/error.hpp"
#include "atba/matrix.hpp"

namespace atba {

// Frames are 1-based and inclusive throughout the public interface; classes
// are indexed 1..C. Background is an ordinary class index recorded in Config,
// not a sentinel. All types here are immutable values after construction and
// safe to share across threads.

// ---------------------------------------------------------------------------
// Configuration

struct Config {
  int boundary_window = 7;            // square template size for boundary scoring, odd
  int transition_window = 31;         // temporal size of the transition template, odd
  int candidate_multiplier = 4;       // candidate cap is multiplier * (M - 1)
  double suppression_fraction = 0.3;  // NMS radius is floor(fraction * T / M)
  double temperature = 0.2;           // contrastive temperature
  double occurrence_weight = 1.0;     // stage-II weight of the occurrence loss
  double classification_weight = 1.0; // stage-II weight of the frame loss
  double contrastive_weight = 0.1;    // stage-II weight of the contrastive loss
  int background_class = 1;
  double background_sample_weight = 1.0;  // 0.8 suits corpora dominated by background

  void validate() const {
    if (boundary_window < 3 || boundary_window % 2 == 0)
      fail(ErrorKind::Config, "boundary_window must be odd and >= 3");
    if (transition_window < 3 || transition_window % 2 == 0)
      fail(ErrorKind::Config, "transition_window must be odd and >= 3");
    if (candidate_multiplier < 1)
      fail(ErrorKind::Config, "candidate_multiplier must be >= 1");
    if (!(suppression_fraction >= 0.0 && suppression_fraction <= 1.0))
      fail(ErrorKind::Config, "suppression_fraction must lie in [0, 1]");
    if (!(temperature > 0.0))
      fail(ErrorKind::Config, "temperature must be positive");
    if (background_class < 1)
      fail(ErrorKind::Config, "background_class must be a valid class index");
    if (!(background_sample_weight >= 0.0))
      fail(ErrorKind::Config, "background_sample_weight must be non-negative");
    if (!std::isfinite(occurrence_weight) || !std::isfinite(classification_weight) ||
        !std::isfinite(contrastive_weight))
      fail(ErrorKind::Config, "loss weights must be finite");
  }
};

// ---------------------------------------------------------------------------
// Probability sequences

struct ValidationIssue {
  int frame = 0;  // 1-based frame the issue refers to, 0 for shape problems
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }

  std::string summary(std::size_t limit = 3) const {
    std::string out;
    for (std::size_t i = 0; i < issues.size() && i < limit; ++i) {
      if (!out.empty()) out += "; ";
      if (issues[i].frame > 0) out += "frame " + std::to_string(issues[i].frame) + ": ";
      out += issues[i].message;
    }
    if (issues.size() > limit)
      out += "; (" + std::to_string(issues.size() - limit) + " more)";
    return out;
  }
};

inline constexpr double kRowSumTolerance = 1e-6;

// Reports every invariant violation: shape, entries outside [0, 1], and row
// sums drifting from 1 beyond the tolerance. Inputs failing the check are
// rejected by ProbabilitySequence instead of being silently renormalized.
inline ValidationReport validate_probabilities(const Matrix& values) {
  ValidationReport report;
  if (values.rows() < 1) report.issues.push_back({0, "frame count must be >= 1"});
  if (values.cols() < 2) report.issues.push_back({0, "class count must be >= 2"});
  if (!report.ok()) return report;

  char buffer[96];
  for (int t = 0; t < values.rows(); ++t) {
    double sum = 0.0;
    bool in_range = true;
    for (int c = 0; c < values.cols(); ++c) {
      const double v = values(t, c);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::snprintf(buffer, sizeof buffer, "entry for class %d is %.9g, outside [0, 1]", c + 1, v);
        report.issues.push_back({t + 1, buffer});
        in_range = false;
        break;
      }
      sum += v;
    }
    if (in_range && std::abs(sum - 1.0) > kRowSumTolerance) {
      std::snprintf(buffer, sizeof buffer, "row sums to %.9g instead of 1", sum);
      report.issues.push_back({t + 1, buffer});
    }
  }
  return report;
}

// T x C row-stochastic matrix of per-frame class probabilities.
class ProbabilitySequence {
 public:
  explicit ProbabilitySequence(Matrix values) : values_(std::move(values)) {
    const ValidationReport report = validate_probabilities(values_);
    if (!report.ok())
      fail(ErrorKind::Validation, "invalid probability sequence: " + report.summary());
  }

  int frames() const { return values_.rows(); }
  int classes() const { return values_.cols(); }

  // 1-based frame and class.
  double at(int frame, int class_index) const {
    check_frame(frame);
    if (class_index < 1 || class_index > classes())
      fail(ErrorKind::Index, "class index " + std::to_string(class_index) + " out of 1.." +
                                 std::to_string(classes()));
    return values_(frame - 1, class_index - 1);
  }

  std::span<const double> row(int frame) const {
    check_frame(frame);
    return values_.row(frame - 1);
  }

  const Matrix& matrix() const { return values_; }

 private:
  void check_frame(int frame) const {
    if (frame < 1 || frame > frames())
      fail(ErrorKind::Index,
           "frame " + std::to_string(frame) + " out of 1.." + std::to_string(frames()));
  }

  Matrix values_;
};

// ---------------------------------------------------------------------------
// Transcripts

// Ordered list of the M action segments of a video. Consecutive duplicates
// are rejected at construction: a transition requires a class change.
class Transcript {
 public:
  explicit Transcript(std::vector<int> actions, int class_count = 0)
      : actions_(std::move(actions)) {
    if (actions_.empty())
      fail(ErrorKind::Validation, "transcript must contain at least one action");
    for (std::size_t i = 0; i < actions_.size(); ++i) {
      if (actions_[i] < 1 || (class_count > 0 && actions_[i] > class_count))
        fail(ErrorKind::Validation,
             "action index " + std::to_string(actions_[i]) + " out of range at position " +
                 std::to_string(i + 1));
      if (i > 0 && actions_[i] == actions_[i - 1])
        fail(ErrorKind::Validation,
             "consecutive duplicate action " + std::to_string(actions_[i]) + " at position " +
                 std::to_string(i + 1));
    }
  }

  int segments() const { return static_cast<int>(actions_.size()); }  // M
  int transition_count() const { return segments() - 1; }

  // 1-based segment position.
  int action(int position) const {
    if (position < 1 || position > segments())
      fail(ErrorKind::Index, "segment position " + std::to_string(position) + " out of range");
    return actions_[static_cast<std::size_t>(position - 1)];
  }

  const std::vector<int>& actions() const { return actions_; }

  // 1-based transition index r -> (a_r, a_{r+1}).
  std::pair<int, int> transition(int index) const {
    if (index < 1 || index > transition_count())
      fail(ErrorKind::Index, "transition index " + std::to_string(index) + " out of range");
    return {actions_[static_cast<std::size_t>(index - 1)], actions_[static_cast<std::size_t>(index)]};
  }

  std::vector<std::pair<int, int>> transitions() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(transition_count()));
    for (int r = 1; r <= transition_count(); ++r) out.push_back(transition(r));
    return out;
  }

  std::vector<int> distinct_classes() const {
    std::set<int> unique(actions_.begin(), actions_.end());
    return {unique.begin(), unique.end()};
  }

  bool operator==(const Transcript&) const = default;

 private:
  std::vector<int> actions_;
};

// ---------------------------------------------------------------------------
// Labels and segmentations

class PseudoLabels {
 public:
  explicit PseudoLabels(std::vector<int> labels, int class_count = 0)
      : labels_(std::move(labels)) {
    if (labels_.empty()) fail(ErrorKind::Validation, "label vector must be non-empty");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (labels_[i] < 1 || (class_count > 0 && labels_[i] > class_count))
        fail(ErrorKind::Validation, "label " + std::to_string(labels_[i]) + " out of range at frame " +
                                        std::to_string(i + 1));
    }
  }

  int frames() const { return static_cast<int>(labels_.size()); }

  int at(int frame) const {
    if (frame < 1 || frame > frames())
      fail(ErrorKind::Index, "frame " + std::to_string(frame) + " out of range");
    return labels_[static_cast<std::size_t>(frame - 1)];
  }

  const std::vector<int>& values() const { return labels_; }

  bool operator==(const PseudoLabels&) const = default;

 private:
  std::vector<int> labels_;
};

struct Segment {
  int label = 0;
  int start = 0;  // inclusive, 1-based
  int end = 0;    // inclusive, 1-based

  int length() const { return end - start + 1; }
  bool operator==(const Segment&) const = default;
};

// Ordered segments tiling [1, T] exactly, adjacent segments differing in class.
class Segmentation {
 public:
  Segmentation(std::vector<Segment> segments, int total_frames)
      : segments_(std::move(segments)), total_frames_(total_frames) {
    if (segments_.empty()) fail(ErrorKind::Validation, "segmentation must contain a segment");
    int expected_start = 1;
    for (std::size_t i = 0; i < segments_.size(); ++i) {
      const Segment& s = segments_[i];
      if (s.label < 1) fail(ErrorKind::Validation, "segment label must be >= 1");
      if (s.start != expected_start)
        fail(ErrorKind::Validation,
             "segment " + std::to_string(i + 1) + " starts at " + std::to_string(s.start) +
                 ", expected " + std::to_string(expected_start));
      if (s.end < s.start)
        fail(ErrorKind::Validation, "segment " + std::to_string(i + 1) + " has non-positive length");
      if (i > 0 && s.label == segments_[i - 1].label)
        fail(ErrorKind::Validation, "adjacent segments share class " + std::to_string(s.label));
      expected_start = s.end + 1;
    }
    if (segments_.back().end != total_frames_)
      fail(ErrorKind::Validation, "segments cover 1.." + std::to_string(segments_.back().end) +
                                      " but total length is " + std::to_string(total_frames_));
  }

  int frames() const { return total_frames_; }
  int size() const { return static_cast<int>(segments_.size()); }
  const std::vector<Segment>& segments() const { return segments_; }

  bool operator==(const Segmentation&) const = default;

 private:
  std::vector<Segment> segments_;
  int total_frames_ = 0;
};

// Run-length encodes a label vector. The round trip through
// labels_from_segmentation is the identity.
inline Segmentation segmentation_from_labels(const PseudoLabels& labels) {
  const std::vector<int>& v = labels.values();
  std::vector<Segment> segments;
  int start = 1;
  for (int t = 2; t <= labels.frames(); ++t) {
    if (v[static_cast<std::size_t>(t - 1)] != v[static_cast<std::size_t>(start - 1)]) {
      segments.push_back({v[static_cast<std::size_t>(start - 1)], start, t - 1});
      start = t;
    }
  }
  segments.push_back({v[static_cast<std::size_t>(start - 1)], start, labels.frames()});
  return Segmentation(std::move(segments), labels.frames());
}

inline PseudoLabels labels_from_segmentation(const Segmentation& segmentation) {
  std::vector<int> labels(static_cast<std::size_t>(segmentation.frames()), 0);
  for (const Segment& s : segmentation.segments())
    for (int t = s.start; t <= s.end; ++t) labels[static_cast<std::size_t>(t - 1)] = s.label;
  return PseudoLabels(std::move(labels));
}

// ---------------------------------------------------------------------------
// Pipeline intermediates

// Per-frame class-agnostic boundary scores; frame t lives at index t - 1.
using BoundaryScores = std::vector<double>;

// Strictly increasing candidate boundary timestamps, each in (1, T].
struct CandidateSet {
  std::vector<int> timestamps;
  std::vector<int> selection_order;  // same timestamps, in greedy pick order
  int suppression_radius = 0;

  int size() const { return static_cast<int>(timestamps.size()); }
};

// K x (M-1) transition scores for the candidate set they were computed on.
struct TransitionScores {
  Matrix values;
  CandidateSet candidates;

  int count() const { return values.rows(); }        // K
  int transitions() const { return values.cols(); }  // M-1
};

struct AlignmentResult {
  std::vector<int> boundaries;          // M-1 timestamps, strictly increasing
  std::vector<int> matched_candidates;  // 1-based candidate index per transition
  double total_cost = 0.0;
};

}  // namespace atba
