#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ordinal/data.hpp"
#include "ordinal/dropout.hpp"
#include "ordinal/losses.hpp"
#include "ordinal/matrix.hpp"
#include "ordinal/output_layers.hpp"
#include "ordinal/soft_labels.hpp"

namespace ordinal {

enum class Activation { relu, tanh };
enum class HeadKind { softmax, clm, stick_breaking, obd };

std::string_view to_string(Activation activation);
std::string_view to_string(HeadKind head);
Activation parse_activation(std::string_view name);
HeadKind parse_head(std::string_view name);

/// Dense feature stack followed by an ordinal head. Hybrid dropout, when
/// set, sits after the last hidden layer.
struct ModelSpec {
  int input_dim = 1;
  std::vector<int> hidden_dims;
  Activation activation = Activation::relu;
  HeadKind head = HeadKind::softmax;
  Link link = Link::logit;  // clm head only
  std::optional<HybridDropoutConfig> dropout;
  int num_classes = 2;

  /// Width of the dense layer feeding the head: J, 1 or J-1.
  int head_arity() const;
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct ParameterBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  friend bool operator==(const ParameterBlock&, const ParameterBlock&) = default;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  int best_epoch = -1;  // -1 when no epoch ran

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct FittedModel {
  ModelSpec spec;
  std::vector<double> parameters;
  std::vector<ParameterBlock> layout;
  TrainHistory history;
  std::uint64_t seed = 0;

  const ParameterBlock& block(std::string_view name) const;
  std::span<const double> values(const ParameterBlock& b) const {
    return std::span<const double>(parameters).subspan(b.offset, b.size());
  }
  ClmParams clm_params() const;

  friend bool operator==(const FittedModel&, const FittedModel&) = default;
};

/// Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0, CLM thresholds
/// evenly spaced on [-2, 2].
FittedModel build_model(const ModelSpec& spec, std::uint64_t seed);

// Loss selection -------------------------------------------------------------

struct SoftCe {
  SoftLabelTable table;
  double eta = 0.0;
};

struct WeightedKappa {
  PenalizationMatrix omega;
  double epsilon = kWkEpsilon;
};

struct EcocMse {};

using LossSpec = std::variant<SoftCe, WeightedKappa, EcocMse>;

std::string_view loss_name(const LossSpec& loss);
bool compatible(HeadKind head, const LossSpec& loss);

// Forward / backward ---------------------------------------------------------

/// Eval-mode head output: probabilities for softmax/clm/stick-breaking, the
/// J-1 sigmoid outputs for obd.
Matrix forward(const FittedModel& model, const Matrix& X);

struct LossGradient {
  double value = 0.0;
  std::vector<double> gradient;  // aligned with model.parameters
};

/// Loss and full parameter gradient. With a generator the pass runs in train
/// mode (hybrid dropout active); without one it is the eval-mode loss.
LossGradient loss_and_grad(const FittedModel& model, const Matrix& X, std::span<const int> labels, const LossSpec& loss,
                           std::mt19937_64* rng = nullptr);

double loss_value(const FittedModel& model, const Matrix& X, std::span<const int> labels, const LossSpec& loss);

/// Probability rows for every head. The obd head maps its outputs to a
/// softmax over negative squared template distances.
ProbMatrix predict_proba(const FittedModel& model, const Matrix& X);
Labels predict(const FittedModel& model, const Matrix& X);

// Training ---------------------------------------------------------------------

enum class OptimizerKind { sgd, adam };

std::string_view to_string(OptimizerKind optimizer);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  double learning_rate = 1e-3;
  int batch_size = 128;
  int max_epochs = 100;
  int patience = 40;
  OptimizerKind optimizer = OptimizerKind::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Smallest validation-loss decrease that counts as improvement.
  double min_improvement = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Mini-batch training with early stopping on validation loss. Returns the
/// parameters of the best validation epoch. An empty validation set makes the
/// stopping rule watch the training loss instead.
FittedModel fit(FittedModel model, const Dataset& train, const Dataset& validation, const TrainConfig& config,
                const LossSpec& loss);

// Gradient checking ------------------------------------------------------------

inline constexpr double kFiniteDifferenceStep = 1e-6;
/// |a - n| / max(|a|, |n|, floor); keeps round-off in near-zero entries from
/// dominating the ratio.
inline constexpr double kRelativeErrorFloor = 1e-2;

double relative_error(double analytic, double numeric);

struct BlockError {
  std::string name;
  double max_relative_error = 0.0;
};

struct GradientCheckReport {
  std::vector<BlockError> blocks;
  double max_relative_error = 0.0;
  double tolerance = 0.0;

  bool passed() const { return max_relative_error < tolerance; }
};

/// Central differences (eval mode) against the analytic gradient.
GradientCheckReport gradient_check(const FittedModel& model, const Matrix& X, std::span<const int> labels,
                                   const LossSpec& loss, double tolerance);

/// Same comparison for a caller-supplied gradient.
GradientCheckReport compare_gradient(const FittedModel& model, const Matrix& X, std::span<const int> labels,
                                     const LossSpec& loss, std::span<const double> analytic, double tolerance);

// Checkpoints ------------------------------------------------------------------

/// Text record of spec, seed, layout, parameters and history. Reals are
/// written as hexfloats, so a round trip is bit-exact.
void save_checkpoint(std::ostream& out, const FittedModel& model);
FittedModel load_checkpoint(std::istream& in);

}  // namespace ordinal
