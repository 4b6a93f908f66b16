#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ordinal/matrix.hpp"

namespace ordinal {

/// True labels plus hard predictions and, optionally, the probability rows
/// they came from.
struct EvalInput {
  Labels true_labels;
  Labels pred_labels;
  std::optional<ProbMatrix> probs;
  int num_classes = 0;

  static EvalInput from_labels(Labels truth, Labels predicted, int num_classes);
  /// Predictions are the row argmax (ties to the lower class).
  static EvalInput from_probs(Labels truth, ProbMatrix probs);
};

Labels argmax_labels(const ProbMatrix& probs);

double ccr(const EvalInput& in);
double mae(const EvalInput& in);
double one_off(const EvalInput& in);

struct ClassMae {
  double value = 0.0;
  /// Classes with no true samples; excluded from the aggregate.
  std::vector<int> absent_classes;
};

/// Per-class MAE for every class present in true_labels.
std::vector<std::pair<int, double>> per_class_mae(const EvalInput& in);
ClassMae amae(const EvalInput& in);
ClassMae mmae(const EvalInput& in);

/// Count-based quadratic weighted kappa. Returns 0 when the expected
/// weighted disagreement is 0.
double qwk(const EvalInput& in);

double rps(const EvalInput& in);

/// Geometric mean of the recalls of the first and last classes.
double gmsec(const EvalInput& in);

/// Flat report keyed ccr, mae, one_off, amae, mmae, qwk, rps, gmsec. Metrics
/// that cannot be computed for the input are left empty.
using MetricReport = std::vector<std::pair<std::string, std::optional<double>>>;

MetricReport metric_report(const EvalInput& in);
std::string format_report(const MetricReport& report);

}  // namespace ordinal
