#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "atba/error.hpp"
#include "atba/types.hpp"

namespace atba {

// Frame- and segment-level metrics over predicted and ground-truth labelings.
// All results are percentages in [0, 100].

// Mean over frames: percentage of frames whose labels match.
inline double mof(const PseudoLabels& predicted, const PseudoLabels& truth) {
  if (predicted.frames() != truth.frames())
    fail(ErrorKind::Validation, "predicted covers " + std::to_string(predicted.frames()) +
                                    " frames, truth covers " + std::to_string(truth.frames()));
  int matches = 0;
  for (int t = 0; t < predicted.frames(); ++t)
    if (predicted.values()[static_cast<std::size_t>(t)] == truth.values()[static_cast<std::size_t>(t)])
      ++matches;
  return 100.0 * static_cast<double>(matches) / static_cast<double>(predicted.frames());
}

// MoF restricted to frames whose ground truth is not the background class.
inline double mof_bg(const PseudoLabels& predicted, const PseudoLabels& truth, int background) {
  if (predicted.frames() != truth.frames())
    fail(ErrorKind::Validation, "predicted and truth cover different frame counts");
  int considered = 0;
  int matches = 0;
  for (int t = 0; t < predicted.frames(); ++t) {
    if (truth.values()[static_cast<std::size_t>(t)] == background) continue;
    ++considered;
    if (predicted.values()[static_cast<std::size_t>(t)] == truth.values()[static_cast<std::size_t>(t)])
      ++matches;
  }
  if (considered == 0)
    fail(ErrorKind::UndefinedMetric, "every ground-truth frame is background");
  return 100.0 * static_cast<double>(matches) / static_cast<double>(considered);
}

struct IouIod {
  double iou = 0.0;
  double iod = 0.0;
};

namespace detail {

inline int overlap(const Segment& a, const Segment& b) {
  return std::max(0, std::min(a.end, b.end) - std::max(a.start, b.start) + 1);
}

// Best IoU and best IoD of one ground-truth segment over same-class
// predictions; the two maxima are taken independently. Zero when no
// prediction shares the class.
inline IouIod best_match(const Segment& truth, const std::vector<Segment>& predictions) {
  IouIod best;
  for (const Segment& p : predictions) {
    if (p.label != truth.label) continue;
    const int inter = overlap(truth, p);
    const int uni = truth.length() + p.length() - inter;
    best.iou = std::max(best.iou, static_cast<double>(inter) / static_cast<double>(uni));
    best.iod = std::max(best.iod, static_cast<double>(inter) / static_cast<double>(p.length()));
  }
  return best;
}

}  // namespace detail

// Per-ground-truth-segment best IoU/IoD against same-class predicted
// segments, averaged over the ground-truth segments.
inline IouIod iou_iod(const Segmentation& predicted, const Segmentation& truth) {
  if (predicted.frames() != truth.frames())
    fail(ErrorKind::Validation, "segmentations cover different frame counts");
  double iou_sum = 0.0;
  double iod_sum = 0.0;
  for (const Segment& g : truth.segments()) {
    const IouIod best = detail::best_match(g, predicted.segments());
    iou_sum += best.iou;
    iod_sum += best.iod;
  }
  const double n = static_cast<double>(truth.size());
  return {100.0 * iou_sum / n, 100.0 * iod_sum / n};
}

// Accuracy of pseudo labels against ground truth; definitionally the same
// computation as MoF.
inline double pseudo_label_accuracy(const PseudoLabels& pseudo, const PseudoLabels& truth) {
  return mof(pseudo, truth);
}

struct CorpusMetrics {
  int videos = 0;
  long long frames = 0;
  double mof = 0.0;
  double mof_bg = 0.0;
  double iou = 0.0;
  double iod = 0.0;
  double pseudo_label_frame_weighted = 0.0;  // frames pooled across the corpus
  double pseudo_label_video_mean = 0.0;      // unweighted mean of per-video accuracy
};

// Corpus aggregation: MoF, MoF-Bg and pseudo-label accuracy pool frames
// across videos; IoU/IoD average over all ground-truth segments of the
// corpus. Pseudo-label accuracy is reported both frame-weighted and
// video-averaged.
inline CorpusMetrics evaluate_corpus(
    const std::vector<std::pair<PseudoLabels, PseudoLabels>>& pairs, int background) {
  if (pairs.empty()) fail(ErrorKind::UndefinedMetric, "empty corpus");

  CorpusMetrics out;
  out.videos = static_cast<int>(pairs.size());
  long long matched = 0;
  long long bg_considered = 0;
  long long bg_matched = 0;
  double iou_sum = 0.0;
  double iod_sum = 0.0;
  long long truth_segments = 0;
  double accuracy_sum = 0.0;

  for (const auto& [predicted, truth] : pairs) {
    if (predicted.frames() != truth.frames())
      fail(ErrorKind::Validation, "predicted and truth cover different frame counts");
    out.frames += truth.frames();
    for (int t = 0; t < truth.frames(); ++t) {
      const bool match = predicted.values()[static_cast<std::size_t>(t)] ==
                         truth.values()[static_cast<std::size_t>(t)];
      if (match) ++matched;
      if (truth.values()[static_cast<std::size_t>(t)] != background) {
        ++bg_considered;
        if (match) ++bg_matched;
      }
    }
    accuracy_sum += mof(predicted, truth);

    const Segmentation predicted_segments = segmentation_from_labels(predicted);
    const Segmentation truth_segmentation = segmentation_from_labels(truth);
    for (const Segment& g : truth_segmentation.segments()) {
      const IouIod best = detail::best_match(g, predicted_segments.segments());
      iou_sum += best.iou;
      iod_sum += best.iod;
      ++truth_segments;
    }
  }

  out.mof = 100.0 * static_cast<double>(matched) / static_cast<double>(out.frames);
  if (bg_considered == 0)
    fail(ErrorKind::UndefinedMetric, "every ground-truth frame in the corpus is background");
  out.mof_bg = 100.0 * static_cast<double>(bg_matched) / static_cast<double>(bg_considered);
  out.iou = 100.0 * iou_sum / static_cast<double>(truth_segments);
  out.iod = 100.0 * iod_sum / static_cast<double>(truth_segments);
  out.pseudo_label_frame_weighted = out.mof;
  out.pseudo_label_video_mean = accuracy_sum / static_cast<double>(out.videos);
  return out;
}

}  // namespace atba
