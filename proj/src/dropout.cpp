#include "ordinal/dropout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ordinal/error.hpp"

namespace ordinal {

void HybridDropoutConfig::validate() const {
  if (!(base_rate >= 0.0 && base_rate < 1.0)) throw Error(ErrorKind::invalid_parameter, "dropout rate must lie in [0, 1)");
  if (!(mix >= 0.0 && mix <= 1.0)) throw Error(ErrorKind::invalid_parameter, "dropout mix must lie in [0, 1]");
  if (min_batch < 2) throw Error(ErrorKind::invalid_parameter, "dropout min_batch must be at least 2");
}

std::vector<double> neuron_target_correlation(const Matrix& activations, std::span<const int> labels) {
  const std::size_t n = activations.rows();
  if (n < 2) throw Error(ErrorKind::insufficient_batch, "correlation needs at least 2 samples");
  if (labels.size() != n) throw Error(ErrorKind::invalid_shape, "activation rows and labels differ in length");

  const double count = static_cast<double>(n);
  double label_mean = 0.0;
  for (int y : labels) label_mean += y;
  label_mean /= count;
  double label_ss = 0.0;
  for (int y : labels) label_ss += (y - label_mean) * (y - label_mean);

  std::vector<double> r(activations.cols(), 0.0);
  if (label_ss == 0.0) return r;
  for (std::size_t u = 0; u < activations.cols(); ++u) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += activations(i, u);
    mean /= count;
    double ss = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = activations(i, u) - mean;
      ss += d * d;
      cross += d * (labels[i] - label_mean);
    }
    if (ss > 0.0) r[u] = std::clamp(cross / std::sqrt(ss * label_ss), -1.0, 1.0);
  }
  return r;
}

std::vector<double> mixed_drop_probabilities(std::span<const double> correlations, const HybridDropoutConfig& config) {
  config.validate();
  const std::size_t h = correlations.size();
  const double p = config.base_rate;
  double spread = 0.0;
  for (double r : correlations) spread += 1.0 - std::abs(r);

  std::vector<double> q(h, p);
  if (!(spread > 0.0)) return q;
  const double scale = p * static_cast<double>(h) / spread;
  for (std::size_t u = 0; u < h; ++u) {
    const double ordinal_q = scale * (1.0 - std::abs(correlations[u]));
    q[u] = config.mix * ordinal_q + (1.0 - config.mix) * p;
  }
  return q;
}

std::vector<double> hybrid_drop_probabilities(std::span<const double> correlations, const HybridDropoutConfig& config) {
  auto q = mixed_drop_probabilities(correlations, config);
  for (double& v : q) v = std::clamp(v, 0.0, kMaxDropProbability);
  return q;
}

DropoutResult apply_hybrid_dropout(const Matrix& activations, std::span<const int> labels,
                                   const HybridDropoutConfig& config, DropoutMode mode, std::mt19937_64& rng) {
  config.validate();
  const std::size_t h = activations.cols();
  if (mode == DropoutMode::eval) return {activations, std::vector<double>(h, 1.0)};

  std::vector<double> q;
  if (activations.rows() >= static_cast<std::size_t>(config.min_batch)) {
    q = hybrid_drop_probabilities(neuron_target_correlation(activations, labels), config);
  } else {
    q.assign(h, std::min(config.base_rate, kMaxDropProbability));
  }

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  DropoutResult result{Matrix(activations.rows(), h), std::vector<double>(h)};
  for (std::size_t u = 0; u < h; ++u) {
    const bool dropped = uniform(rng) < q[u];
    result.mask[u] = dropped ? 0.0 : 1.0 / (1.0 - q[u]);
  }
  for (std::size_t i = 0; i < activations.rows(); ++i)
    for (std::size_t u = 0; u < h; ++u) result.output(i, u) = activations(i, u) * result.mask[u];
  return result;
}

}  // namespace ordinal
