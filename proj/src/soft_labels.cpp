#include "ordinal/soft_labels.hpp"

#include <cmath>
#include <algorithm>
#include <ostream>
#include <string>

#include "ordinal/error.hpp"

namespace ordinal {

namespace {

void require_classes(int num_classes) {
  if (num_classes < 2)
    throw Error(ErrorKind::invalid_class_count, "need at least 2 classes, got " + std::to_string(num_classes));
}

void normalize_rows(Matrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double total = 0.0;
    for (double v : row) total += v;
    for (double& v : row) v /= total;
  }
}

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

// Continued fraction for I_x(a, b), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kTolerance = 1e-15;
  constexpr int kMaxIter = 10000;

  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double num = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    num = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + num * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + num / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kTolerance) break;
  }
  return h;
}

}  // namespace

std::string_view to_string(SoftLabelSource source) {
  switch (source) {
    case SoftLabelSource::onehot: return "onehot";
    case SoftLabelSource::poisson: return "poisson";
    case SoftLabelSource::binomial: return "binomial";
    case SoftLabelSource::exponential: return "exponential";
    case SoftLabelSource::beta: return "beta";
    case SoftLabelSource::triangular: return "triangular";
    case SoftLabelSource::blended: return "blended";
  }
  return "unknown";
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::invalid_parameter, "beta shape parameters must be positive");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

SoftLabelTable onehot_table(int num_classes) {
  require_classes(num_classes);
  return {num_classes, Matrix::identity(static_cast<std::size_t>(num_classes)), SoftLabelSource::onehot};
}

SoftLabelTable triangular_table(int num_classes, double adjacent_probability) {
  require_classes(num_classes);
  const double a = adjacent_probability;
  if (!(a >= 0.0 && a < 0.5))
    throw Error(ErrorKind::invalid_parameter, "adjacent probability must lie in [0, 0.5)");

  const auto n = static_cast<std::size_t>(num_classes);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const bool boundary = j == 0 || j + 1 == n;
    m(j, j) = boundary ? 1.0 - a : 1.0 - 2.0 * a;
    if (j > 0) m(j, j - 1) = a;
    if (j + 1 < n) m(j, j + 1) = a;
  }
  return {num_classes, std::move(m), SoftLabelSource::triangular};
}

SoftLabelTable exponential_table(int num_classes, double exponent) {
  require_classes(num_classes);
  if (!(exponent > 0.0)) throw Error(ErrorKind::invalid_parameter, "exponent must be positive");

  const auto n = static_cast<std::size_t>(num_classes);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      const double dist = std::abs(static_cast<double>(k) - static_cast<double>(j));
      m(j, k) = std::exp(-std::pow(dist, exponent));
    }
  normalize_rows(m);
  return {num_classes, std::move(m), SoftLabelSource::exponential};
}

SoftLabelTable binomial_table(int num_classes) {
  require_classes(num_classes);
  const auto n = static_cast<std::size_t>(num_classes);
  const int trials = num_classes - 1;
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double p = (2.0 * static_cast<double>(j) + 1.0) / (2.0 * num_classes);
    for (int k = 0; k <= trials; ++k) {
      const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(k + 1.0) - std::lgamma(trials - k + 1.0);
      m(j, static_cast<std::size_t>(k)) = std::exp(log_choose + k * std::log(p) + (trials - k) * std::log1p(-p));
    }
  }
  normalize_rows(m);
  return {num_classes, std::move(m), SoftLabelSource::binomial};
}

SoftLabelTable poisson_table(int num_classes) {
  require_classes(num_classes);
  const auto n = static_cast<std::size_t>(num_classes);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rate = static_cast<double>(j) + 1.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double support = static_cast<double>(k) + 1.0;
      m(j, k) = std::exp(support * std::log(rate) - rate - std::lgamma(support + 1.0));
    }
  }
  normalize_rows(m);
  return {num_classes, std::move(m), SoftLabelSource::poisson};
}

SoftLabelTable beta_table(int num_classes, double concentration) {
  require_classes(num_classes);
  if (!(concentration > 2.0)) throw Error(ErrorKind::invalid_parameter, "beta concentration must exceed 2");

  const auto n = static_cast<std::size_t>(num_classes);
  const double bins = static_cast<double>(num_classes);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double mode = (static_cast<double>(j) + 0.5) / bins;
    const double a = mode * (concentration - 2.0) + 1.0;
    const double b = concentration - a;
    double lower = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double upper = k + 1 == n ? 1.0 : regularized_incomplete_beta((static_cast<double>(k) + 1.0) / bins, a, b);
      m(j, k) = std::max(upper - lower, 0.0);
      lower = upper;
    }
  }
  normalize_rows(m);
  return {num_classes, std::move(m), SoftLabelSource::beta};
}

SoftLabelTable blend(const SoftLabelTable& table, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorKind::invalid_parameter, "smoothing factor must lie in [0, 1]");
  const auto n = static_cast<std::size_t>(table.num_classes);
  Matrix m(n, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k)
      m(j, k) = (j == k ? 1.0 - eta : 0.0) + eta * table.rows(j, k);
  return {table.num_classes, std::move(m), SoftLabelSource::blended};
}

ProbMatrix targets_for(const SoftLabelTable& table, std::span<const int> labels) {
  const auto n = static_cast<std::size_t>(table.num_classes);
  ProbMatrix out(labels.size(), n);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int y = labels[i];
    if (y < 0 || y >= table.num_classes)
      throw Error(ErrorKind::invalid_label, "label " + std::to_string(y) + " outside [0, " +
                                                std::to_string(table.num_classes) + ")");
    const auto src = table.row(y);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

void write_csv(std::ostream& out, const SoftLabelTable& table) {
  const auto old_precision = out.precision(17);
  for (std::size_t j = 0; j < table.rows.rows(); ++j) {
    const auto row = table.rows.row(j);
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << row[k];
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace ordinal
