#include "ordinal/output_layers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ordinal/error.hpp"

namespace ordinal {

namespace {

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorKind::invalid_shape, std::string(what) + ": upstream shape does not match");
}

}  // namespace

std::string_view to_string(Link link) {
  switch (link) {
    case Link::logit: return "logit";
    case Link::probit: return "probit";
    case Link::cloglog: return "cloglog";
  }
  return "unknown";
}

Link parse_link(std::string_view name) {
  if (name == "logit") return Link::logit;
  if (name == "probit") return Link::probit;
  if (name == "cloglog") return Link::cloglog;
  throw Error(ErrorKind::invalid_parameter, "unknown link '" + std::string(name) + "'");
}

double link_cdf(Link link, double x) {
  switch (link) {
    case Link::logit: return logistic(x);
    case Link::probit: return 0.5 * std::erfc(-x / std::numbers::sqrt2);
    case Link::cloglog: return -std::expm1(-std::exp(x));
  }
  return 0.0;
}

double link_pdf(Link link, double x) {
  switch (link) {
    case Link::logit: {
      const double s = logistic(x);
      return s * (1.0 - s);
    }
    case Link::probit: return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
    case Link::cloglog: return std::exp(x - std::exp(x));
  }
  return 0.0;
}

std::vector<double> ClmParams::thresholds() const {
  std::vector<double> b(raw_increments.size() + 1);
  b[0] = base_threshold;
  for (std::size_t m = 0; m < raw_increments.size(); ++m) b[m + 1] = b[m] + raw_increments[m] * raw_increments[m];
  return b;
}

ClmParams ClmParams::initial(int num_classes, Link link) {
  if (num_classes < 2) throw Error(ErrorKind::invalid_class_count, "CLM needs at least 2 classes");
  ClmParams params;
  params.link = link;
  const auto gaps = static_cast<std::size_t>(num_classes - 2);
  if (gaps == 0) return params;
  params.base_threshold = -2.0;
  params.raw_increments.assign(gaps, std::sqrt(4.0 / static_cast<double>(gaps)));
  return params;
}

ProbMatrix clm_forward(std::span<const double> projection, const ClmParams& params) {
  const auto b = params.thresholds();
  const std::size_t classes = b.size() + 1;
  ProbMatrix p(projection.size(), classes);
  for (std::size_t i = 0; i < projection.size(); ++i) {
    const double f = projection[i];
    if (!std::isfinite(f)) throw Error(ErrorKind::numeric_error, "non-finite CLM projection at row " + std::to_string(i));
    double prev = 0.0;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double c = link_cdf(params.link, b[k] - f);
      p(i, k) = std::max(c - prev, 0.0);
      prev = c;
    }
    p(i, classes - 1) = std::max(1.0 - prev, 0.0);
  }
  return p;
}

ClmGradients clm_backward(std::span<const double> projection, const ClmParams& params, const Matrix& upstream) {
  const auto b = params.thresholds();
  const std::size_t cuts = b.size();
  if (upstream.rows() != projection.size() || upstream.cols() != cuts + 1)
    throw Error(ErrorKind::invalid_shape, "clm_backward: upstream shape does not match");

  ClmGradients grad;
  grad.projection.assign(projection.size(), 0.0);
  grad.raw_increments.assign(params.raw_increments.size(), 0.0);
  std::vector<double> grad_thresholds(cuts, 0.0);

  for (std::size_t i = 0; i < projection.size(); ++i) {
    for (std::size_t k = 0; k < cuts; ++k) {
      // c_k enters p_k positively and p_{k+1} negatively.
      const double dc = upstream(i, k) - upstream(i, k + 1);
      const double density = link_pdf(params.link, b[k] - projection[i]);
      grad.projection[i] -= dc * density;
      grad_thresholds[k] += dc * density;
    }
  }

  // b_k = b_1 + sum_{m<k} delta_m^2
  double suffix = 0.0;
  for (std::size_t k = cuts; k-- > 1;) {
    suffix += grad_thresholds[k];
    grad.raw_increments[k - 1] = 2.0 * params.raw_increments[k - 1] * suffix;
  }
  for (double g : grad_thresholds) grad.base_threshold += g;
  return grad;
}

ProbMatrix stick_breaking_forward(const Matrix& logits) {
  const std::size_t sticks = logits.cols();
  ProbMatrix p(logits.rows(), sticks + 1);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    double remaining = 1.0;
    for (std::size_t k = 0; k < sticks; ++k) {
      const double s = logistic(logits(i, k));
      p(i, k) = s * remaining;
      remaining *= 1.0 - s;
    }
    p(i, sticks) = remaining;
  }
  return p;
}

Matrix stick_breaking_backward(const Matrix& logits, const Matrix& upstream) {
  const std::size_t sticks = logits.cols();
  if (upstream.rows() != logits.rows() || upstream.cols() != sticks + 1)
    throw Error(ErrorKind::invalid_shape, "stick_breaking_backward: upstream shape does not match");

  const ProbMatrix p = stick_breaking_forward(logits);
  Matrix grad(logits.rows(), sticks);
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    // tail = sum_{k > m} upstream_k * p_k
    double tail = upstream(i, sticks) * p(i, sticks);
    for (std::size_t m = sticks; m-- > 0;) {
      const double s = logistic(logits(i, m));
      // p_m = s_m * R_m, so s_m (1 - s_m) R_m = (1 - s_m) p_m.
      grad(i, m) = upstream(i, m) * (1.0 - s) * p(i, m) - s * tail;
      tail += upstream(i, m) * p(i, m);
    }
  }
  return grad;
}

Matrix obd_forward(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t n = 0; n < logits.data().size(); ++n) out.data()[n] = logistic(logits.data()[n]);
  return out;
}

Matrix obd_backward(const Matrix& logits, const Matrix& upstream) {
  require_same_shape(logits, upstream, "obd_backward");
  Matrix grad(logits.rows(), logits.cols());
  for (std::size_t n = 0; n < logits.data().size(); ++n) {
    const double s = logistic(logits.data()[n]);
    grad.data()[n] = upstream.data()[n] * s * (1.0 - s);
  }
  return grad;
}

ProbMatrix softmax_forward(const Matrix& logits) {
  ProbMatrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    const auto z = logits.row(i);
    double top = z[0];
    for (double v : z) top = std::max(top, v);
    double total = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) total += p(i, k) = std::exp(z[k] - top);
    for (std::size_t k = 0; k < z.size(); ++k) p(i, k) /= total;
  }
  return p;
}

Matrix softmax_backward(const ProbMatrix& probs, const Matrix& upstream) {
  require_same_shape(probs, upstream, "softmax_backward");
  Matrix grad(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    double dot = 0.0;
    for (std::size_t k = 0; k < probs.cols(); ++k) dot += upstream(i, k) * probs(i, k);
    for (std::size_t k = 0; k < probs.cols(); ++k) grad(i, k) = probs(i, k) * (upstream(i, k) - dot);
  }
  return grad;
}

EcocTemplateSet ecoc_templates(int num_classes) {
  if (num_classes < 2) throw Error(ErrorKind::invalid_class_count, "ECOC templates need at least 2 classes");
  const auto n = static_cast<std::size_t>(num_classes);
  EcocTemplateSet set{num_classes, Matrix(n, n - 1)};
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t m = 0; m < j; ++m) set.templates(j, m) = 1.0;
  return set;
}

int hamming_distance(const EcocTemplateSet& set, int a, int b) {
  const auto ta = set.of(a);
  const auto tb = set.of(b);
  int d = 0;
  for (std::size_t m = 0; m < ta.size(); ++m) d += ta[m] != tb[m];
  return d;
}

Matrix ecoc_distances(const Matrix& outputs, const EcocTemplateSet& set) {
  if (outputs.cols() + 1 != static_cast<std::size_t>(set.num_classes))
    throw Error(ErrorKind::invalid_shape, "ECOC outputs need J-1 columns");
  const auto classes = static_cast<std::size_t>(set.num_classes);
  Matrix dist(outputs.rows(), classes);
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    const auto o = outputs.row(i);
    for (std::size_t j = 0; j < classes; ++j) {
      const auto t = set.of(static_cast<int>(j));
      double d = 0.0;
      for (std::size_t m = 0; m < o.size(); ++m) d += (o[m] - t[m]) * (o[m] - t[m]);
      dist(i, j) = d;
    }
  }
  return dist;
}

Labels ecoc_decode(const Matrix& outputs, const EcocTemplateSet& set) {
  const Matrix dist = ecoc_distances(outputs, set);
  Labels out(outputs.rows());
  for (std::size_t i = 0; i < outputs.rows(); ++i) {
    const auto d = dist.row(i);
    std::size_t best = 0;
    for (std::size_t j = 1; j < d.size(); ++j)
      if (d[j] < d[best]) best = j;
    out[i] = static_cast<int>(best);
  }
  return out;
}

}  // namespace ordinal
