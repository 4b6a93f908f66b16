#include "ordinal/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ordinal/error.hpp"

namespace ordinal {

namespace {

void check_batch(const Matrix& input, std::span<const int> labels, std::size_t cols, int num_classes,
                 const char* what) {
  if (input.rows() == 0) throw Error(ErrorKind::invalid_shape, std::string(what) + ": empty batch");
  if (input.rows() != labels.size())
    throw Error(ErrorKind::invalid_shape, std::string(what) + ": " + std::to_string(input.rows()) + " rows but " +
                                              std::to_string(labels.size()) + " labels");
  if (input.cols() != cols)
    throw Error(ErrorKind::invalid_shape, std::string(what) + ": expected " + std::to_string(cols) + " columns, got " +
                                              std::to_string(input.cols()));
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw Error(ErrorKind::invalid_label, std::string(what) + ": label " + std::to_string(y) + " out of range");
}

}  // namespace

PenalizationMatrix penalization_matrix(int num_classes, PenaltyPower power) {
  if (num_classes < 2) throw Error(ErrorKind::invalid_class_count, "penalization matrix needs at least 2 classes");
  const auto n = static_cast<std::size_t>(num_classes);
  const double p = static_cast<double>(power);
  const double scale = std::pow(static_cast<double>(num_classes - 1), p);
  PenalizationMatrix omega{num_classes, power, Matrix(n, n)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      omega.weights(j, k) = std::pow(std::abs(static_cast<double>(j) - static_cast<double>(k)), p) / scale;
  return omega;
}

LossResult soft_ce_loss(const Matrix& logits, std::span<const int> labels, const SoftLabelTable& table, double eta) {
  const auto classes = static_cast<std::size_t>(table.num_classes);
  check_batch(logits, labels, classes, table.num_classes, "soft_ce_loss");
  const ProbMatrix targets = targets_for(blend(table, eta), labels);
  const double n = static_cast<double>(logits.rows());

  LossResult result{0.0, Matrix(logits.rows(), classes)};
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto z = logits.row(i);
    double top = z[0];
    for (double v : z) top = std::max(top, v);
    double total = 0.0;
    for (double v : z) total += std::exp(v - top);
    const double log_norm = top + std::log(total);
    for (std::size_t k = 0; k < classes; ++k) {
      const double log_p = z[k] - log_norm;
      const double t = targets(i, k);
      if (t != 0.0) result.value -= t * log_p;
      result.gradient(i, k) = (std::exp(log_p) - t) / n;
    }
  }
  result.value /= n;
  return result;
}

LossResult soft_ce_loss_from_probs(const ProbMatrix& probs, std::span<const int> labels, const SoftLabelTable& table,
                                   double eta) {
  const auto classes = static_cast<std::size_t>(table.num_classes);
  check_batch(probs, labels, classes, table.num_classes, "soft_ce_loss");
  const ProbMatrix targets = targets_for(blend(table, eta), labels);
  const double n = static_cast<double>(probs.rows());

  LossResult result{0.0, Matrix(probs.rows(), classes)};
  for (std::size_t i = 0; i < probs.rows(); ++i)
    for (std::size_t k = 0; k < classes; ++k) {
      const double t = targets(i, k);
      if (t == 0.0) continue;
      const double p = probs(i, k);
      if (p > kProbabilityFloor) {
        result.value -= t * std::log(p);
        result.gradient(i, k) = -t / (n * p);
      } else {
        result.value -= t * std::log(kProbabilityFloor);
      }
    }
  result.value /= n;
  return result;
}

LossResult wk_loss(const ProbMatrix& probs, std::span<const int> labels, const PenalizationMatrix& omega,
                   double epsilon) {
  const auto classes = static_cast<std::size_t>(omega.num_classes);
  check_batch(probs, labels, classes, omega.num_classes, "wk_loss");
  const double n = static_cast<double>(probs.rows());

  // column mass of predictions and of penalties for the true labels
  std::vector<double> pred_mass(classes, 0.0);
  std::vector<double> penalty_mass(classes, 0.0);
  double observed = 0.0;
  for (std::size_t i = 0; i < probs.rows(); ++i)
    for (std::size_t k = 0; k < classes; ++k) {
      const double w = omega(labels[i], static_cast<int>(k));
      observed += w * probs(i, k);
      pred_mass[k] += probs(i, k);
      penalty_mass[k] += w;
    }
  double expected = 0.0;
  for (std::size_t k = 0; k < classes; ++k) expected += pred_mass[k] * penalty_mass[k];
  expected /= n;

  const double denom = expected + epsilon;
  LossResult result{observed / denom, Matrix(probs.rows(), classes)};
  for (std::size_t i = 0; i < probs.rows(); ++i)
    for (std::size_t k = 0; k < classes; ++k) {
      const double w = omega(labels[i], static_cast<int>(k));
      result.gradient(i, k) = (w * denom - observed * penalty_mass[k] / n) / (denom * denom);
    }
  return result;
}

LossResult ecoc_mse_loss(const Matrix& outputs, std::span<const int> labels, const EcocTemplateSet& templates) {
  const auto width = static_cast<std::size_t>(templates.num_classes - 1);
  check_batch(outputs, labels, width, templates.num_classes, "ecoc_mse_loss");
  const double scale = static_cast<double>(outputs.rows() * width);

  LossResult result{0.0, Matrix(outputs.rows(), width)};
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    const auto t = templates.of(labels[i]);
    for (std::size_t m = 0; m < width; ++m) {
      const double diff = outputs(i, m) - t[m];
      result.value += diff * diff;
      result.gradient(i, m) = 2.0 * diff / scale;
    }
  }
  result.value /= scale;
  return result;
}

}  // namespace ordinal
