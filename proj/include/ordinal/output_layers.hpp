#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "ordinal/matrix.hpp"

namespace ordinal {

enum class Link { logit, probit, cloglog };

std::string_view to_string(Link link);
Link parse_link(std::string_view name);

/// Link CDF and its density.
double link_cdf(Link link, double x);
double link_pdf(Link link, double x);

/// Cumulative link head. Thresholds are b_1 followed by b_1 + cumulative sums
/// of squared increments, so they are non-decreasing for any raw values.
struct ClmParams {
  double base_threshold = 0.0;
  std::vector<double> raw_increments;  // J - 2 entries
  Link link = Link::logit;

  int num_classes() const { return static_cast<int>(raw_increments.size()) + 2; }
  std::vector<double> thresholds() const;

  /// Thresholds evenly spaced on [-2, 2] (a single threshold sits at 0).
  static ClmParams initial(int num_classes, Link link = Link::logit);
};

struct ClmGradients {
  std::vector<double> projection;
  double base_threshold = 0.0;
  std::vector<double> raw_increments;
};

ProbMatrix clm_forward(std::span<const double> projection, const ClmParams& params);
ClmGradients clm_backward(std::span<const double> projection, const ClmParams& params, const Matrix& upstream);

/// N x (J-1) logits -> N x J probabilities; each logit takes a logistic share
/// of the mass left by the previous ones.
ProbMatrix stick_breaking_forward(const Matrix& logits);
Matrix stick_breaking_backward(const Matrix& logits, const Matrix& upstream);

/// Element-wise logistic; output m estimates P(y > m).
Matrix obd_forward(const Matrix& logits);
Matrix obd_backward(const Matrix& logits, const Matrix& upstream);

ProbMatrix softmax_forward(const Matrix& logits);
/// Vector-Jacobian product of the row softmax given its output.
Matrix softmax_backward(const ProbMatrix& probs, const Matrix& upstream);

/// Row j is j ones followed by J-1-j zeros.
struct EcocTemplateSet {
  int num_classes = 0;
  Matrix templates;  // J x (J-1)

  std::span<const double> of(int cls) const { return templates.row(static_cast<std::size_t>(cls)); }
};

EcocTemplateSet ecoc_templates(int num_classes);
int hamming_distance(const EcocTemplateSet& set, int a, int b);

/// Squared Euclidean distance from each output row to each template (N x J).
Matrix ecoc_distances(const Matrix& outputs, const EcocTemplateSet& set);

/// Nearest template per row; ties go to the lower class.
Labels ecoc_decode(const Matrix& outputs, const EcocTemplateSet& set);

}  // namespace ordinal
