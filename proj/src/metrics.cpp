#include "ordinal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ordinal/error.hpp"

namespace ordinal {

namespace {

void require_nonempty(const EvalInput& in) {
  if (in.true_labels.empty()) throw Error(ErrorKind::invalid_shape, "metric input is empty");
  if (in.true_labels.size() != in.pred_labels.size())
    throw Error(ErrorKind::invalid_shape, "true and predicted label counts differ");
}

int abs_error(int a, int b) { return a > b ? a - b : b - a; }

void check_labels(const Labels& labels, int num_classes) {
  for (int y : labels)
    if (y < 0 || y >= num_classes)
      throw Error(ErrorKind::invalid_label, "label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) + ")");
}

}  // namespace

Labels argmax_labels(const ProbMatrix& probs) {
  Labels out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) out[i] = static_cast<int>(argmax(probs.row(i)));
  return out;
}

EvalInput EvalInput::from_labels(Labels truth, Labels predicted, int num_classes) {
  if (truth.size() != predicted.size()) throw Error(ErrorKind::invalid_shape, "true and predicted label counts differ");
  check_labels(truth, num_classes);
  check_labels(predicted, num_classes);
  return {std::move(truth), std::move(predicted), std::nullopt, num_classes};
}

EvalInput EvalInput::from_probs(Labels truth, ProbMatrix probs) {
  if (truth.size() != probs.rows()) throw Error(ErrorKind::invalid_shape, "label count differs from probability rows");
  const int classes = static_cast<int>(probs.cols());
  check_labels(truth, classes);
  Labels predicted = argmax_labels(probs);
  return {std::move(truth), std::move(predicted), std::move(probs), classes};
}

double ccr(const EvalInput& in) {
  require_nonempty(in);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) hits += in.true_labels[i] == in.pred_labels[i];
  return static_cast<double>(hits) / static_cast<double>(in.true_labels.size());
}

double mae(const EvalInput& in) {
  require_nonempty(in);
  double total = 0.0;
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) total += abs_error(in.true_labels[i], in.pred_labels[i]);
  return total / static_cast<double>(in.true_labels.size());
}

double one_off(const EvalInput& in) {
  require_nonempty(in);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) hits += abs_error(in.true_labels[i], in.pred_labels[i]) <= 1;
  return static_cast<double>(hits) / static_cast<double>(in.true_labels.size());
}

std::vector<std::pair<int, double>> per_class_mae(const EvalInput& in) {
  require_nonempty(in);
  const auto classes = static_cast<std::size_t>(in.num_classes);
  std::vector<double> error_sum(classes, 0.0);
  std::vector<std::size_t> count(classes, 0);
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(in.true_labels[i]);
    error_sum[y] += abs_error(in.true_labels[i], in.pred_labels[i]);
    ++count[y];
  }
  std::vector<std::pair<int, double>> out;
  for (std::size_t j = 0; j < classes; ++j)
    if (count[j] > 0) out.emplace_back(static_cast<int>(j), error_sum[j] / static_cast<double>(count[j]));
  return out;
}

namespace {

std::vector<int> absent_classes(const EvalInput& in, const std::vector<std::pair<int, double>>& present) {
  std::vector<int> absent;
  std::size_t next = 0;
  for (int j = 0; j < in.num_classes; ++j) {
    if (next < present.size() && present[next].first == j) {
      ++next;
    } else {
      absent.push_back(j);
    }
  }
  return absent;
}

}  // namespace

ClassMae amae(const EvalInput& in) {
  const auto per_class = per_class_mae(in);
  ClassMae out{0.0, absent_classes(in, per_class)};
  for (const auto& [cls, value] : per_class) out.value += value;
  out.value /= static_cast<double>(per_class.size());
  return out;
}

ClassMae mmae(const EvalInput& in) {
  const auto per_class = per_class_mae(in);
  ClassMae out{0.0, absent_classes(in, per_class)};
  for (const auto& [cls, value] : per_class) out.value = std::max(out.value, value);
  return out;
}

double qwk(const EvalInput& in) {
  require_nonempty(in);
  const auto classes = static_cast<std::size_t>(in.num_classes);
  const double n = static_cast<double>(in.true_labels.size());
  Matrix observed(classes, classes);
  std::vector<double> true_count(classes, 0.0);
  std::vector<double> pred_count(classes, 0.0);
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) {
    const auto y = static_cast<std::size_t>(in.true_labels[i]);
    const auto p = static_cast<std::size_t>(in.pred_labels[i]);
    observed(y, p) += 1.0;
    true_count[y] += 1.0;
    pred_count[p] += 1.0;
  }

  if (classes < 2) return 0.0;
  const double scale = static_cast<double>((classes - 1) * (classes - 1));
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < classes; ++j)
    for (std::size_t k = 0; k < classes; ++k) {
      const double d = static_cast<double>(j) - static_cast<double>(k);
      const double w = d * d / scale;
      num += w * observed(j, k);
      den += w * true_count[j] * pred_count[k] / n;
    }
  if (den == 0.0) return 0.0;
  return 1.0 - num / den;
}

double rps(const EvalInput& in) {
  require_nonempty(in);
  if (!in.probs) throw Error(ErrorKind::probability_required, "rps needs predicted probabilities");
  const ProbMatrix& p = *in.probs;
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    double cum_p = 0.0;
    for (std::size_t k = 0; k < p.cols(); ++k) {
      cum_p += p(i, k);
      const double cum_y = static_cast<int>(k) >= in.true_labels[i] ? 1.0 : 0.0;
      total += (cum_p - cum_y) * (cum_p - cum_y);
    }
  }
  return total / static_cast<double>(p.rows());
}

double gmsec(const EvalInput& in) {
  require_nonempty(in);
  const int last = in.num_classes - 1;
  double hits_first = 0.0, count_first = 0.0, hits_last = 0.0, count_last = 0.0;
  for (std::size_t i = 0; i < in.true_labels.size(); ++i) {
    const int y = in.true_labels[i];
    if (y == 0) {
      count_first += 1.0;
      hits_first += in.pred_labels[i] == 0;
    } else if (y == last) {
      count_last += 1.0;
      hits_last += in.pred_labels[i] == last;
    }
  }
  if (count_first == 0.0 || count_last == 0.0)
    throw Error(ErrorKind::undefined_metric, "gmsec needs both extreme classes among the true labels");
  return std::sqrt((hits_first / count_first) * (hits_last / count_last));
}

MetricReport metric_report(const EvalInput& in) {
  auto attempt = [](auto&& fn) -> std::optional<double> {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::undefined_metric || e.kind() == ErrorKind::probability_required) return std::nullopt;
      throw;
    }
  };
  return {
      {"ccr", ccr(in)},
      {"mae", mae(in)},
      {"one_off", one_off(in)},
      {"amae", amae(in).value},
      {"mmae", mmae(in).value},
      {"qwk", qwk(in)},
      {"rps", attempt([&] { return rps(in); })},
      {"gmsec", attempt([&] { return gmsec(in); })},
  };
}

std::string format_report(const MetricReport& report) {
  std::string out;
  char buf[64];
  for (const auto& [name, value] : report) {
    if (value) {
      std::snprintf(buf, sizeof buf, "%.6g", *value);
      out += name + "=" + buf + "\n";
    } else {
      out += name + "=undefined\n";
    }
  }
  return out;
}

}  // namespace ordinal
