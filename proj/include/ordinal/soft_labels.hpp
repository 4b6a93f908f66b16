#pragma once

#include <iosfwd>
#include <span>
#include <string_view>

#include "ordinal/matrix.hpp"

namespace ordinal {

enum class SoftLabelSource { onehot, poisson, binomial, exponential, beta, triangular, blended };

std::string_view to_string(SoftLabelSource source);

/// J x J row-stochastic table; row j is the training target for true class j.
struct SoftLabelTable {
  int num_classes = 0;
  Matrix rows;
  SoftLabelSource source = SoftLabelSource::onehot;

  std::span<const double> row(int true_class) const { return rows.row(static_cast<std::size_t>(true_class)); }
};

SoftLabelTable onehot_table(int num_classes);

/// Discrete adjacent-mass rule: 1-2a at the target, a on each neighbour
/// (1-a / a at the two ends of the scale). Requires 0 <= a < 0.5.
SoftLabelTable triangular_table(int num_classes, double adjacent_probability);

/// Row j proportional to exp(-|k-j|^t), t > 0.
SoftLabelTable exponential_table(int num_classes, double exponent);

/// Row j is the Binomial(J-1, (2j+1)/(2J)) pmf, whose mode is exactly j.
SoftLabelTable binomial_table(int num_classes);

/// Row j is the Poisson(j+1) pmf on support {1..J}, renormalized. For integer
/// rates pmf(j) == pmf(j+1) on that support, so the target shares the mode.
SoftLabelTable poisson_table(int num_classes);

/// Row j is the mass of Beta(a_j, b_j) on the J equal bins of [0, 1], with the
/// Beta mode placed at the bin centre (j+0.5)/J and a + b = concentration.
SoftLabelTable beta_table(int num_classes, double concentration = 10.0);

/// (1-eta) * onehot + eta * table.
SoftLabelTable blend(const SoftLabelTable& table, double eta);

/// Gathers table rows for each label.
ProbMatrix targets_for(const SoftLabelTable& table, std::span<const int> labels);

/// Regularized incomplete beta I_x(a, b) by Lentz continued fraction.
double regularized_incomplete_beta(double x, double a, double b);

/// J rows of J comma-separated values printed with 17 significant digits.
void write_csv(std::ostream& out, const SoftLabelTable& table);

}  // namespace ordinal
