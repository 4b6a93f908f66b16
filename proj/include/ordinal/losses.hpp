#pragma once

#include <span>
#include <string_view>

#include "ordinal/matrix.hpp"
#include "ordinal/output_layers.hpp"
#include "ordinal/soft_labels.hpp"

namespace ordinal {

enum class PenaltyPower { linear = 1, quadratic = 2 };

/// w[j][k] = |j-k|^p / (J-1)^p.
struct PenalizationMatrix {
  int num_classes = 0;
  PenaltyPower power = PenaltyPower::quadratic;
  Matrix weights;

  double operator()(int j, int k) const { return weights(static_cast<std::size_t>(j), static_cast<std::size_t>(k)); }
};

PenalizationMatrix penalization_matrix(int num_classes, PenaltyPower power = PenaltyPower::quadratic);

struct LossResult {
  double value = 0.0;
  Matrix gradient;  // same shape as the loss input
};

inline constexpr double kProbabilityFloor = 1e-15;
inline constexpr double kWkEpsilon = 1e-9;

/// Cross-entropy of softmax(logits) against blended soft targets, batch mean.
/// Gradient is with respect to the logits: (p - t) / N.
LossResult soft_ce_loss(const Matrix& logits, std::span<const int> labels, const SoftLabelTable& table, double eta);

/// Same loss for heads that emit probabilities directly. Probabilities are
/// floored at kProbabilityFloor before the log; gradient is w.r.t. probs.
LossResult soft_ce_loss_from_probs(const ProbMatrix& probs, std::span<const int> labels, const SoftLabelTable& table,
                                   double eta);

/// Continuous weighted kappa loss O / (E + epsilon), where O is the
/// penalized observed disagreement of the batch and E the disagreement
/// expected from the batch marginals. Zero at perfect one-hot predictions.
LossResult wk_loss(const ProbMatrix& probs, std::span<const int> labels, const PenalizationMatrix& omega,
                   double epsilon = kWkEpsilon);

/// Mean squared distance between sigmoid outputs and the label's template.
LossResult ecoc_mse_loss(const Matrix& outputs, std::span<const int> labels, const EcocTemplateSet& templates);

}  // namespace ordinal
