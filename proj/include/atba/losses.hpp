#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atba/error.hpp"
#include "atba/matrix.hpp"
#include "atba/types.hpp"

namespace atba {

// Training objectives as pure value-and-gradient computations on supplied
// logits and embeddings. Losses consume pre-activation scores and apply
// softmax/sigmoid internally in log-sum-exp form; gradients are analytic and
// verified against central finite differences in the test suite. Natural
// logarithms throughout.

// Frame embeddings, per-class prototype embeddings and pre-sigmoid occurrence
// scores, as produced by a temporal network (or the synthetic generator).
struct EmbeddingSet {
  Matrix frames;      // T x d
  Matrix prototypes;  // C x d
  std::vector<double> occurrence_logits;  // length C
};

struct FrameLossReport {
  double value = 0.0;
  Matrix logit_gradient;  // T x C
};

struct OccurrenceLossReport {
  double value = 0.0;
  std::vector<double> logit_gradient;  // length C
};

struct ContrastiveLossReport {
  double value = 0.0;
  Matrix frame_gradient;      // T x d
  Matrix prototype_gradient;  // C x d
};

namespace detail {

inline double log_sum_exp(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : values) peak = std::max(peak, v);
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - peak);
  return peak + std::log(acc);
}

inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

}  // namespace detail

// Weighted softmax cross entropy of the frame classifier against pseudo
// labels, averaged over frames. Frames whose pseudo label is the background
// class are weighted by background_sample_weight, all others by 1.
inline FrameLossReport frame_classification_loss(const Matrix& logits, const PseudoLabels& labels,
                                                 const Config& config) {
  config.validate();
  const int frames = logits.rows();
  const int classes = logits.cols();
  if (labels.frames() != frames)
    fail(ErrorKind::Validation, "labels cover " + std::to_string(labels.frames()) +
                                    " frames, logits cover " + std::to_string(frames));

  FrameLossReport report;
  report.logit_gradient = Matrix(frames, classes, 0.0);
  double total = 0.0;
  std::vector<double> probs(static_cast<std::size_t>(classes));
  for (int t = 0; t < frames; ++t) {
    const int label = labels.values()[static_cast<std::size_t>(t)];
    if (label < 1 || label > classes)
      fail(ErrorKind::Validation, "label " + std::to_string(label) + " at frame " +
                                      std::to_string(t + 1) + " outside 1.." +
                                      std::to_string(classes));
    const double weight = (label == config.background_class) ? config.background_sample_weight : 1.0;

    const auto row = logits.row(t);
    const double lse = detail::log_sum_exp(row);
    total += weight * (lse - row[static_cast<std::size_t>(label - 1)]);

    for (int c = 0; c < classes; ++c)
      probs[static_cast<std::size_t>(c)] = std::exp(row[static_cast<std::size_t>(c)] - lse);
    for (int c = 0; c < classes; ++c) {
      const double delta = (c == label - 1) ? 1.0 : 0.0;
      report.logit_gradient(t, c) =
          weight * (probs[static_cast<std::size_t>(c)] - delta) / static_cast<double>(frames);
    }
  }
  report.value = total / static_cast<double>(frames);
  return report;
}

// Binary cross entropy of the per-class occurrence predictions against the
// set of classes present in the transcript, averaged over all classes. The
// gradient with respect to the logits is (sigmoid - target) / C.
inline OccurrenceLossReport video_occurrence_loss(std::span<const double> occurrence_logits,
                                                  const Transcript& transcript) {
  const int classes = static_cast<int>(occurrence_logits.size());
  if (classes < 1) fail(ErrorKind::Validation, "occurrence logits must be non-empty");
  std::vector<char> present(static_cast<std::size_t>(classes + 1), 0);
  for (int a : transcript.actions()) {
    if (a > classes)
      fail(ErrorKind::Validation, "transcript action " + std::to_string(a) +
                                      " exceeds class count " + std::to_string(classes));
    present[static_cast<std::size_t>(a)] = 1;
  }

  OccurrenceLossReport report;
  report.logit_gradient.resize(static_cast<std::size_t>(classes));
  double total = 0.0;
  for (int c = 0; c < classes; ++c) {
    const double z = occurrence_logits[static_cast<std::size_t>(c)];
    const double y = present[static_cast<std::size_t>(c + 1)] ? 1.0 : 0.0;
    // -[y log s + (1-y) log(1-s)] = softplus(z) - y z, stable for large |z|.
    total += detail::softplus(z) - y * z;
    const double s = 1.0 / (1.0 + std::exp(-z));
    report.logit_gradient[static_cast<std::size_t>(c)] = (s - y) / static_cast<double>(classes);
  }
  report.value = total / static_cast<double>(classes);
  return report;
}

// InfoNCE between per-class feature centroids and the class prototypes. For
// each class present in the transcript, the centroid is the mean of the frame
// embeddings carrying that pseudo label; centroid and prototypes are
// L2-normalized after the mean, and the softmax runs over all C prototypes.
// Gradients flow through the mean and the normalization analytically.
inline ContrastiveLossReport global_local_contrastive_loss(const EmbeddingSet& embeddings,
                                                           const PseudoLabels& labels,
                                                           const Transcript& transcript,
                                                           double temperature) {
  if (!(temperature > 0.0)) fail(ErrorKind::Config, "temperature must be positive");
  const int frames = embeddings.frames.rows();
  const int dim = embeddings.frames.cols();
  const int classes = embeddings.prototypes.rows();
  if (embeddings.prototypes.cols() != dim)
    fail(ErrorKind::Validation, "frame and prototype dimensions differ");
  if (labels.frames() != frames)
    fail(ErrorKind::Validation, "labels and frame embeddings cover different frame counts");

  const std::vector<int> present = transcript.distinct_classes();
  for (int c : present)
    if (c > classes)
      fail(ErrorKind::Validation, "transcript class " + std::to_string(c) +
                                      " has no prototype (C = " + std::to_string(classes) + ")");

  // Normalized prototypes.
  Matrix unit_proto(classes, dim);
  std::vector<double> proto_norm(static_cast<std::size_t>(classes));
  for (int c = 0; c < classes; ++c) {
    double n2 = 0.0;
    for (int d = 0; d < dim; ++d) n2 += embeddings.prototypes(c, d) * embeddings.prototypes(c, d);
    const double n = std::sqrt(n2);
    if (!(n > 0.0))
      fail(ErrorKind::Validation, "prototype " + std::to_string(c + 1) + " has zero norm");
    proto_norm[static_cast<std::size_t>(c)] = n;
    for (int d = 0; d < dim; ++d) unit_proto(c, d) = embeddings.prototypes(c, d) / n;
  }

  ContrastiveLossReport report;
  report.frame_gradient = Matrix(frames, dim, 0.0);
  report.prototype_gradient = Matrix(classes, dim, 0.0);
  Matrix unit_proto_grad(classes, dim, 0.0);

  double total = 0.0;
  std::vector<double> centroid(static_cast<std::size_t>(dim));
  std::vector<double> unit(static_cast<std::size_t>(dim));
  std::vector<double> logits(static_cast<std::size_t>(classes));
  std::vector<double> grad_unit(static_cast<std::size_t>(dim));

  for (int c : present) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    int count = 0;
    for (int t = 0; t < frames; ++t) {
      if (labels.values()[static_cast<std::size_t>(t)] != c) continue;
      ++count;
      for (int d = 0; d < dim; ++d) centroid[static_cast<std::size_t>(d)] += embeddings.frames(t, d);
    }
    if (count == 0)
      fail(ErrorKind::DegenerateCentroid,
           "class " + std::to_string(c) + " appears in the transcript but has no pseudo-labeled frames");
    for (int d = 0; d < dim; ++d) centroid[static_cast<std::size_t>(d)] /= static_cast<double>(count);

    double n2 = 0.0;
    for (double v : centroid) n2 += v * v;
    const double norm = std::sqrt(n2);
    if (!(norm > 0.0))
      fail(ErrorKind::DegenerateCentroid, "class " + std::to_string(c) + " has a zero-norm centroid");
    for (int d = 0; d < dim; ++d) unit[static_cast<std::size_t>(d)] = centroid[static_cast<std::size_t>(d)] / norm;

    for (int p = 0; p < classes; ++p) {
      double dot = 0.0;
      for (int d = 0; d < dim; ++d) dot += unit[static_cast<std::size_t>(d)] * unit_proto(p, d);
      logits[static_cast<std::size_t>(p)] = dot / temperature;
    }
    const double lse = detail::log_sum_exp(logits);
    total += lse - logits[static_cast<std::size_t>(c - 1)];

    // d(loss_c)/d(unit centroid) and accumulation into the unit prototypes.
    std::fill(grad_unit.begin(), grad_unit.end(), 0.0);
    for (int p = 0; p < classes; ++p) {
      const double soft = std::exp(logits[static_cast<std::size_t>(p)] - lse);
      const double coeff = (soft - ((p == c - 1) ? 1.0 : 0.0)) / temperature;
      for (int d = 0; d < dim; ++d) {
        grad_unit[static_cast<std::size_t>(d)] += coeff * unit_proto(p, d);
        unit_proto_grad(p, d) += coeff * unit[static_cast<std::size_t>(d)];
      }
    }

    // Back through the normalization and the mean.
    double dot_ug = 0.0;
    for (int d = 0; d < dim; ++d) dot_ug += unit[static_cast<std::size_t>(d)] * grad_unit[static_cast<std::size_t>(d)];
    for (int t = 0; t < frames; ++t) {
      if (labels.values()[static_cast<std::size_t>(t)] != c) continue;
      for (int d = 0; d < dim; ++d) {
        const double g =
            (grad_unit[static_cast<std::size_t>(d)] - unit[static_cast<std::size_t>(d)] * dot_ug) / norm;
        report.frame_gradient(t, d) += g / static_cast<double>(count);
      }
    }
  }

  const double scale = 1.0 / static_cast<double>(present.size());
  report.value = total * scale;
  for (int t = 0; t < frames; ++t)
    for (int d = 0; d < dim; ++d) report.frame_gradient(t, d) *= scale;

  // Prototype gradients through their own normalization.
  for (int p = 0; p < classes; ++p) {
    double dot = 0.0;
    for (int d = 0; d < dim; ++d) dot += unit_proto(p, d) * unit_proto_grad(p, d);
    for (int d = 0; d < dim; ++d)
      report.prototype_gradient(p, d) =
          scale * (unit_proto_grad(p, d) - unit_proto(p, d) * dot) / proto_norm[static_cast<std::size_t>(p)];
  }
  return report;
}

enum class TrainingStage { One, Two };

// Stage composition: stage one trains on the occurrence loss alone; stage two
// adds the frame classification and contrastive terms with their weights.
inline double stage_loss(TrainingStage stage, std::optional<double> occurrence,
                         std::optional<double> classification, std::optional<double> contrastive,
                         const Config& config) {
  config.validate();
  if (!occurrence.has_value())
    fail(ErrorKind::Validation, "stage loss requires the occurrence component");
  if (stage == TrainingStage::One) return *occurrence;
  if (!classification.has_value() || !contrastive.has_value())
    fail(ErrorKind::Validation, "stage two requires classification and contrastive components");
  return config.occurrence_weight * *occurrence + config.classification_weight * *classification +
         config.contrastive_weight * *contrastive;
}

}  // namespace atba
