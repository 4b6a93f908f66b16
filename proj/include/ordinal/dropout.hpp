#pragma once

#include <random>
#include <span>
#include <vector>

#include "ordinal/matrix.hpp"

namespace ordinal {

/// Hybrid ordinal dropout settings.
///   base_rate  mean drop probability p, in [0, 1)
///   mix        0 = plain dropout at rate p, 1 = fully correlation-driven
///   min_batch  batches smaller than this fall back to plain dropout
struct HybridDropoutConfig {
  double base_rate = 0.2;
  double mix = 0.5;
  int min_batch = 8;

  void validate() const;
  friend bool operator==(const HybridDropoutConfig&, const HybridDropoutConfig&) = default;
};

inline constexpr double kMaxDropProbability = 0.95;

enum class DropoutMode { train, eval };

/// Pearson correlation of each activation column with the label index.
/// Constant columns (or constant labels) give 0.
std::vector<double> neuron_target_correlation(const Matrix& activations, std::span<const int> labels);

/// Per-neuron drop probabilities before clamping; their mean is exactly the
/// base rate. Neurons with larger |r| get smaller probabilities.
std::vector<double> mixed_drop_probabilities(std::span<const double> correlations, const HybridDropoutConfig& config);

/// mixed_drop_probabilities clamped to [0, kMaxDropProbability].
std::vector<double> hybrid_drop_probabilities(std::span<const double> correlations, const HybridDropoutConfig& config);

struct DropoutResult {
  Matrix output;
  /// Per-neuron multiplier shared by the whole batch: 0 when dropped,
  /// 1 / (1 - q_u) when kept.
  std::vector<double> mask;
};

DropoutResult apply_hybrid_dropout(const Matrix& activations, std::span<const int> labels,
                                   const HybridDropoutConfig& config, DropoutMode mode, std::mt19937_64& rng);

}  // namespace ordinal
