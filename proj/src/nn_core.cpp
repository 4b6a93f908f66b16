#include "ordinal/nn_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "ordinal/error.hpp"

namespace ordinal {

std::string_view to_string(Activation activation) { return activation == Activation::relu ? "relu" : "tanh"; }

std::string_view to_string(HeadKind head) {
  switch (head) {
    case HeadKind::softmax: return "softmax";
    case HeadKind::clm: return "clm";
    case HeadKind::stick_breaking: return "stick_breaking";
    case HeadKind::obd: return "obd";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw Error(ErrorKind::invalid_spec, "unknown activation '" + std::string(name) + "'");
}

HeadKind parse_head(std::string_view name) {
  for (auto head : {HeadKind::softmax, HeadKind::clm, HeadKind::stick_breaking, HeadKind::obd})
    if (name == to_string(head)) return head;
  throw Error(ErrorKind::invalid_spec, "unknown head '" + std::string(name) + "'");
}

std::string_view to_string(OptimizerKind optimizer) { return optimizer == OptimizerKind::sgd ? "sgd" : "adam"; }

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::sgd;
  if (name == "adam") return OptimizerKind::adam;
  throw Error(ErrorKind::invalid_parameter, "unknown optimizer '" + std::string(name) + "'");
}

int ModelSpec::head_arity() const {
  switch (head) {
    case HeadKind::softmax: return num_classes;
    case HeadKind::clm: return 1;
    case HeadKind::stick_breaking:
    case HeadKind::obd: return num_classes - 1;
  }
  return 0;
}

void ModelSpec::validate() const {
  if (num_classes < 2) throw Error(ErrorKind::invalid_spec, "need at least 2 classes");
  if (input_dim < 1) throw Error(ErrorKind::invalid_spec, "input_dim must be positive");
  for (int h : hidden_dims)
    if (h < 1) throw Error(ErrorKind::invalid_spec, "hidden layer widths must be positive");
  if (dropout) {
    if (hidden_dims.empty()) throw Error(ErrorKind::invalid_spec, "hybrid dropout needs at least one hidden layer");
    dropout->validate();
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::invalid_parameter, "learning rate must be positive");
  if (batch_size < 1) throw Error(ErrorKind::invalid_parameter, "batch size must be at least 1");
  if (max_epochs < 0) throw Error(ErrorKind::invalid_parameter, "max_epochs must be non-negative");
  if (patience < 0 || patience > max_epochs) throw Error(ErrorKind::invalid_parameter, "patience must lie in [0, max_epochs]");
}

const ParameterBlock& FittedModel::block(std::string_view name) const {
  for (const auto& b : layout)
    if (b.name == name) return b;
  throw Error(ErrorKind::invalid_spec, "no parameter block named '" + std::string(name) + "'");
}

ClmParams FittedModel::clm_params() const {
  ClmParams params;
  params.link = spec.link;
  params.base_threshold = values(block("clm.base_threshold"))[0];
  if (spec.num_classes > 2) {
    const auto inc = values(block("clm.increments"));
    params.raw_increments.assign(inc.begin(), inc.end());
  }
  return params;
}

namespace {

std::string hidden_name(std::size_t layer, const char* part) { return "hidden" + std::to_string(layer) + "." + part; }

std::vector<ParameterBlock> make_layout(const ModelSpec& spec) {
  std::vector<ParameterBlock> layout;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout.push_back({std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  auto in = static_cast<std::size_t>(spec.input_dim);
  for (std::size_t l = 0; l < spec.hidden_dims.size(); ++l) {
    const auto out = static_cast<std::size_t>(spec.hidden_dims[l]);
    add(hidden_name(l, "weight"), in, out);
    add(hidden_name(l, "bias"), 1, out);
    in = out;
  }
  const auto arity = static_cast<std::size_t>(spec.head_arity());
  add("head.weight", in, arity);
  add("head.bias", 1, arity);
  if (spec.head == HeadKind::clm) {
    add("clm.base_threshold", 1, 1);
    if (spec.num_classes > 2) add("clm.increments", 1, static_cast<std::size_t>(spec.num_classes - 2));
  }
  return layout;
}

// Dense layers are (weight, bias) block pairs: hidden layers first, head last.
struct DenseRef {
  const ParameterBlock* weight;
  const ParameterBlock* bias;
};

std::vector<DenseRef> dense_layers(const FittedModel& model) {
  std::vector<DenseRef> layers;
  const std::size_t count = model.spec.hidden_dims.size() + 1;
  for (std::size_t l = 0; l < count; ++l) layers.push_back({&model.layout[2 * l], &model.layout[2 * l + 1]});
  return layers;
}

Matrix dense(const Matrix& A, const FittedModel& model, const DenseRef& layer) {
  const auto W = model.values(*layer.weight);
  const auto b = model.values(*layer.bias);
  const std::size_t in = layer.weight->rows;
  const std::size_t out = layer.weight->cols;
  Matrix Z(A.rows(), out);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    auto z = Z.row(i);
    std::copy(b.begin(), b.end(), z.begin());
    const auto a = A.row(i);
    for (std::size_t k = 0; k < in; ++k) {
      const double ak = a[k];
      if (ak == 0.0) continue;
      const double* w = W.data() + k * out;
      for (std::size_t j = 0; j < out; ++j) z[j] += ak * w[j];
    }
  }
  return Z;
}

Matrix activate(const Matrix& Z, Activation activation) {
  Matrix A(Z.rows(), Z.cols());
  for (std::size_t n = 0; n < Z.data().size(); ++n) {
    const double z = Z.data()[n];
    A.data()[n] = activation == Activation::relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
  }
  return A;
}

struct Trace {
  std::vector<Matrix> inputs;          // input of every dense layer, head included
  std::vector<Matrix> pre_activation;  // hidden layers only
  std::vector<double> mask;            // dropout multipliers; empty when inactive
  Matrix head_out;
};

Trace run_network(const FittedModel& model, const Matrix& X, std::span<const int> labels, std::mt19937_64* rng) {
  if (X.rows() == 0) throw Error(ErrorKind::invalid_shape, "empty batch");
  if (X.cols() != static_cast<std::size_t>(model.spec.input_dim))
    throw Error(ErrorKind::invalid_shape, "expected " + std::to_string(model.spec.input_dim) + " features, got " +
                                              std::to_string(X.cols()));
  const auto layers = dense_layers(model);
  Trace trace;
  Matrix A = X;
  for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
    trace.inputs.push_back(A);
    trace.pre_activation.push_back(dense(A, model, layers[l]));
    A = activate(trace.pre_activation.back(), model.spec.activation);
  }
  if (model.spec.dropout && rng) {
    auto dropped = apply_hybrid_dropout(A, labels, *model.spec.dropout, DropoutMode::train, *rng);
    trace.mask = std::move(dropped.mask);
    A = std::move(dropped.output);
  }
  trace.inputs.push_back(A);
  trace.head_out = dense(A, model, layers.back());
  return trace;
}

std::vector<double> first_column(const Matrix& m) {
  std::vector<double> col(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) col[i] = m(i, 0);
  return col;
}

Matrix head_output(const FittedModel& model, const Matrix& head_out) {
  switch (model.spec.head) {
    case HeadKind::softmax: return softmax_forward(head_out);
    case HeadKind::clm: return clm_forward(first_column(head_out), model.clm_params());
    case HeadKind::stick_breaking: return stick_breaking_forward(head_out);
    case HeadKind::obd: return obd_forward(head_out);
  }
  return {};
}

LossResult probability_loss(const ProbMatrix& probs, std::span<const int> labels, const LossSpec& loss) {
  if (const auto* ce = std::get_if<SoftCe>(&loss)) return soft_ce_loss_from_probs(probs, labels, ce->table, ce->eta);
  const auto& wk = std::get<WeightedKappa>(loss);
  return wk_loss(probs, labels, wk.omega, wk.epsilon);
}

struct HeadGradient {
  double value = 0.0;
  Matrix d_head_out;
  std::optional<ClmGradients> clm;
};

void check_loss_classes(const FittedModel& model, const LossSpec& loss) {
  int classes = model.spec.num_classes;
  if (const auto* ce = std::get_if<SoftCe>(&loss)) classes = ce->table.num_classes;
  if (const auto* wk = std::get_if<WeightedKappa>(&loss)) classes = wk->omega.num_classes;
  if (classes != model.spec.num_classes)
    throw Error(ErrorKind::invalid_combination, "loss is built for " + std::to_string(classes) + " classes, model for " +
                                                    std::to_string(model.spec.num_classes));
}

HeadGradient head_loss(const FittedModel& model, const Matrix& head_out, std::span<const int> labels,
                       const LossSpec& loss) {
  if (!compatible(model.spec.head, loss))
    throw Error(ErrorKind::invalid_combination, std::string(loss_name(loss)) + " loss cannot train a " +
                                                    std::string(to_string(model.spec.head)) + " head");
  check_loss_classes(model, loss);
  if (labels.size() != head_out.rows()) throw Error(ErrorKind::invalid_shape, "label count differs from batch rows");

  HeadGradient out;
  switch (model.spec.head) {
    case HeadKind::softmax: {
      if (const auto* ce = std::get_if<SoftCe>(&loss)) {
        auto r = soft_ce_loss(head_out, labels, ce->table, ce->eta);
        out.value = r.value;
        out.d_head_out = std::move(r.gradient);
      } else {
        const ProbMatrix p = softmax_forward(head_out);
        auto r = probability_loss(p, labels, loss);
        out.value = r.value;
        out.d_head_out = softmax_backward(p, r.gradient);
      }
      break;
    }
    case HeadKind::clm: {
      const auto projection = first_column(head_out);
      const auto params = model.clm_params();
      auto r = probability_loss(clm_forward(projection, params), labels, loss);
      out.value = r.value;
      out.clm = clm_backward(projection, params, r.gradient);
      out.d_head_out = Matrix(head_out.rows(), 1);
      for (std::size_t i = 0; i < head_out.rows(); ++i) out.d_head_out(i, 0) = out.clm->projection[i];
      break;
    }
    case HeadKind::stick_breaking: {
      auto r = probability_loss(stick_breaking_forward(head_out), labels, loss);
      out.value = r.value;
      out.d_head_out = stick_breaking_backward(head_out, r.gradient);
      break;
    }
    case HeadKind::obd: {
      auto r = ecoc_mse_loss(obd_forward(head_out), labels, ecoc_templates(model.spec.num_classes));
      out.value = r.value;
      out.d_head_out = obd_backward(head_out, r.gradient);
      break;
    }
  }
  return out;
}

}  // namespace

FittedModel build_model(const ModelSpec& spec, std::uint64_t seed) {
  spec.validate();
  FittedModel model;
  model.spec = spec;
  model.seed = seed;
  model.layout = make_layout(spec);
  const auto& last = model.layout.back();
  model.parameters.assign(last.offset + last.size(), 0.0);

  std::mt19937_64 rng(seed);
  for (const auto& b : model.layout) {
    if (b.name.ends_with(".weight")) {
      const double limit = 1.0 / std::sqrt(static_cast<double>(b.rows));
      std::uniform_real_distribution<double> uniform(-limit, limit);
      for (std::size_t n = 0; n < b.size(); ++n) model.parameters[b.offset + n] = uniform(rng);
    }
  }
  if (spec.head == HeadKind::clm) {
    const auto init = ClmParams::initial(spec.num_classes, spec.link);
    model.parameters[model.block("clm.base_threshold").offset] = init.base_threshold;
    if (spec.num_classes > 2) {
      const auto& inc = model.block("clm.increments");
      std::copy(init.raw_increments.begin(), init.raw_increments.end(),
                model.parameters.begin() + static_cast<std::ptrdiff_t>(inc.offset));
    }
  }
  return model;
}

std::string_view loss_name(const LossSpec& loss) {
  if (std::holds_alternative<SoftCe>(loss)) return "soft_ce";
  if (std::holds_alternative<WeightedKappa>(loss)) return "wk";
  return "ecoc_mse";
}

bool compatible(HeadKind head, const LossSpec& loss) {
  if (std::holds_alternative<EcocMse>(loss)) return head == HeadKind::obd;
  return head != HeadKind::obd;
}

Matrix forward(const FittedModel& model, const Matrix& X) {
  const Trace trace = run_network(model, X, {}, nullptr);
  return head_output(model, trace.head_out);
}

LossGradient loss_and_grad(const FittedModel& model, const Matrix& X, std::span<const int> labels, const LossSpec& loss,
                           std::mt19937_64* rng) {
  if (labels.size() != X.rows()) throw Error(ErrorKind::invalid_shape, "label count differs from batch rows");
  const Trace trace = run_network(model, X, labels, rng);
  HeadGradient head = head_loss(model, trace.head_out, labels, loss);

  LossGradient out{head.value, std::vector<double>(model.parameters.size(), 0.0)};
  if (head.clm) {
    out.gradient[model.block("clm.base_threshold").offset] = head.clm->base_threshold;
    if (model.spec.num_classes > 2) {
      const auto& inc = model.block("clm.increments");
      std::copy(head.clm->raw_increments.begin(), head.clm->raw_increments.end(),
                out.gradient.begin() + static_cast<std::ptrdiff_t>(inc.offset));
    }
  }

  const auto layers = dense_layers(model);
  Matrix dZ = std::move(head.d_head_out);
  for (std::size_t l = layers.size(); l-- > 0;) {
    const Matrix& A = trace.inputs[l];
    const auto& wb = *layers[l].weight;
    const auto& bb = *layers[l].bias;
    const std::size_t in = wb.rows;
    const std::size_t width = wb.cols;
    double* gW = out.gradient.data() + wb.offset;
    double* gb = out.gradient.data() + bb.offset;
    for (std::size_t i = 0; i < A.rows(); ++i) {
      const auto dz = dZ.row(i);
      const auto a = A.row(i);
      for (std::size_t j = 0; j < width; ++j) gb[j] += dz[j];
      for (std::size_t k = 0; k < in; ++k) {
        const double ak = a[k];
        if (ak == 0.0) continue;
        double* row = gW + k * width;
        for (std::size_t j = 0; j < width; ++j) row[j] += ak * dz[j];
      }
    }
    if (l == 0) break;

    const auto W = model.values(wb);
    const Matrix& pre = trace.pre_activation[l - 1];
    Matrix dA(A.rows(), in);
    for (std::size_t i = 0; i < A.rows(); ++i) {
      const auto dz = dZ.row(i);
      for (std::size_t k = 0; k < in; ++k) {
        const double* w = W.data() + k * width;
        double s = 0.0;
        for (std::size_t j = 0; j < width; ++j) s += w[j] * dz[j];
        if (l + 1 == layers.size() && !trace.mask.empty()) s *= trace.mask[k];
        const double z = pre(i, k);
        if (model.spec.activation == Activation::relu) {
          s = z > 0.0 ? s : 0.0;
        } else {
          const double t = std::tanh(z);
          s *= 1.0 - t * t;
        }
        dA(i, k) = s;
      }
    }
    dZ = std::move(dA);
  }
  return out;
}

double loss_value(const FittedModel& model, const Matrix& X, std::span<const int> labels, const LossSpec& loss) {
  if (labels.size() != X.rows()) throw Error(ErrorKind::invalid_shape, "label count differs from batch rows");
  const Trace trace = run_network(model, X, labels, nullptr);
  return head_loss(model, trace.head_out, labels, loss).value;
}

ProbMatrix predict_proba(const FittedModel& model, const Matrix& X) {
  Matrix out = forward(model, X);
  if (model.spec.head != HeadKind::obd) return out;
  Matrix neg = ecoc_distances(out, ecoc_templates(model.spec.num_classes));
  for (double& v : neg.data()) v = -v;
  return softmax_forward(neg);
}

Labels predict(const FittedModel& model, const Matrix& X) {
  const ProbMatrix p = predict_proba(model, X);
  Labels out(p.rows());
  for (std::size_t i = 0; i < p.rows(); ++i) out[i] = static_cast<int>(argmax(p.row(i)));
  return out;
}

// ---------------------------------------------------------------------------
// Training

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, std::size_t size) : config_(config) {
    if (config.optimizer == OptimizerKind::adam) {
      first_.assign(size, 0.0);
      second_.assign(size, 0.0);
    }
  }

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    const double lr = config_.learning_rate;
    if (config_.optimizer == OptimizerKind::sgd) {
      for (std::size_t n = 0; n < params.size(); ++n) params[n] -= lr * grad[n];
      return;
    }
    ++steps_;
    const double b1 = config_.adam_beta1;
    const double b2 = config_.adam_beta2;
    const double correction1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double correction2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    for (std::size_t n = 0; n < params.size(); ++n) {
      first_[n] = b1 * first_[n] + (1.0 - b1) * grad[n];
      second_[n] = b2 * second_[n] + (1.0 - b2) * grad[n] * grad[n];
      const double m_hat = first_[n] / correction1;
      const double v_hat = second_[n] / correction2;
      params[n] -= lr * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
    }
  }

 private:
  const TrainConfig& config_;
  std::vector<double> first_;
  std::vector<double> second_;
  long steps_ = 0;
};

}  // namespace

FittedModel fit(FittedModel model, const Dataset& train, const Dataset& validation, const TrainConfig& config,
                const LossSpec& loss) {
  config.validate();
  if (train.size() == 0) throw Error(ErrorKind::invalid_data, "empty training set");
  if (!compatible(model.spec.head, loss))
    throw Error(ErrorKind::invalid_combination, std::string(loss_name(loss)) + " loss cannot train a " +
                                                    std::string(to_string(model.spec.head)) + " head");

  const Dataset& monitor = validation.size() > 0 ? validation : train;
  std::mt19937_64 rng(config.seed);
  Optimizer optimizer(config, model.parameters.size());
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> best = model.parameters;
  double best_loss = std::numeric_limits<double>::infinity();
  int stale = 0;
  model.history = {};

  const auto batch = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t stop = std::min(order.size(), start + batch);
      const Dataset mb = subset(train, std::span<const std::size_t>(order).subspan(start, stop - start));
      const auto lg = loss_and_grad(model, mb.X, mb.y, loss, &rng);
      epoch_loss += lg.value * static_cast<double>(stop - start);
      optimizer.step(model.parameters, lg.gradient);
    }
    model.history.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    const double val = loss_value(model, monitor.X, monitor.y, loss);
    model.history.validation_loss.push_back(val);
    if (std::isfinite(val) && val < best_loss - config.min_improvement) {
      best_loss = val;
      best = model.parameters;
      model.history.best_epoch = epoch;
      stale = 0;
    } else if (++stale >= config.patience) {
      break;
    }
  }
  model.parameters = std::move(best);
  return model;
}

// ---------------------------------------------------------------------------
// Gradient checking

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), kRelativeErrorFloor});
  return std::abs(analytic - numeric) / scale;
}

GradientCheckReport compare_gradient(const FittedModel& model, const Matrix& X, std::span<const int> labels,
                                     const LossSpec& loss, std::span<const double> analytic, double tolerance) {
  if (analytic.size() != model.parameters.size())
    throw Error(ErrorKind::invalid_shape, "gradient length differs from parameter count");
  GradientCheckReport report;
  report.tolerance = tolerance;
  FittedModel probe = model;
  for (const auto& b : model.layout) {
    BlockError err{b.name, 0.0};
    for (std::size_t n = b.offset; n < b.offset + b.size(); ++n) {
      const double original = probe.parameters[n];
      probe.parameters[n] = original + kFiniteDifferenceStep;
      const double up = loss_value(probe, X, labels, loss);
      probe.parameters[n] = original - kFiniteDifferenceStep;
      const double down = loss_value(probe, X, labels, loss);
      probe.parameters[n] = original;
      const double numeric = (up - down) / (2.0 * kFiniteDifferenceStep);
      err.max_relative_error = std::max(err.max_relative_error, relative_error(analytic[n], numeric));
    }
    report.max_relative_error = std::max(report.max_relative_error, err.max_relative_error);
    report.blocks.push_back(std::move(err));
  }
  return report;
}

GradientCheckReport gradient_check(const FittedModel& model, const Matrix& X, std::span<const int> labels,
                                   const LossSpec& loss, double tolerance) {
  const auto analytic = loss_and_grad(model, X, labels, loss).gradient;
  return compare_gradient(model, X, labels, loss, analytic, tolerance);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr std::string_view kMagic = "ordinal-checkpoint";
constexpr int kVersion = 1;

void write_real(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  out << buf;
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::string token() {
    std::string t;
    if (!(in_ >> t)) throw Error(ErrorKind::parse_error, "checkpoint ended early");
    return t;
  }
  void expect(std::string_view key) {
    const auto t = token();
    if (t != key) throw Error(ErrorKind::parse_error, "checkpoint: expected '" + std::string(key) + "', got '" + t + "'");
  }
  long integer() {
    const auto t = token();
    char* end = nullptr;
    const long v = std::strtol(t.c_str(), &end, 10);
    if (*end != '\0') throw Error(ErrorKind::parse_error, "checkpoint: bad integer '" + t + "'");
    return v;
  }
  std::uint64_t unsigned_integer() {
    const auto t = token();
    char* end = nullptr;
    const auto v = std::strtoull(t.c_str(), &end, 10);
    if (*end != '\0') throw Error(ErrorKind::parse_error, "checkpoint: bad integer '" + t + "'");
    return v;
  }
  double real() {
    const auto t = token();
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (*end != '\0') throw Error(ErrorKind::parse_error, "checkpoint: bad real '" + t + "'");
    return v;
  }
  std::vector<double> reals() {
    const auto n = static_cast<std::size_t>(integer());
    std::vector<double> v(n);
    for (double& x : v) x = real();
    return v;
  }

 private:
  std::istream& in_;
};

void write_reals(std::ostream& out, std::string_view key, const std::vector<double>& values) {
  out << key << ' ' << values.size();
  for (double v : values) {
    out << ' ';
    write_real(out, v);
  }
  out << '\n';
}

}  // namespace

void save_checkpoint(std::ostream& out, const FittedModel& model) {
  const auto& spec = model.spec;
  out << kMagic << ' ' << kVersion << '\n';
  out << "input_dim " << spec.input_dim << '\n';
  out << "hidden_dims " << spec.hidden_dims.size();
  for (int h : spec.hidden_dims) out << ' ' << h;
  out << '\n';
  out << "activation " << to_string(spec.activation) << '\n';
  out << "head " << to_string(spec.head) << '\n';
  out << "link " << to_string(spec.link) << '\n';
  out << "num_classes " << spec.num_classes << '\n';
  if (spec.dropout) {
    out << "dropout ";
    write_real(out, spec.dropout->base_rate);
    out << ' ';
    write_real(out, spec.dropout->mix);
    out << ' ' << spec.dropout->min_batch << '\n';
  } else {
    out << "dropout none\n";
  }
  out << "seed " << model.seed << '\n';
  out << "layout " << model.layout.size() << '\n';
  for (const auto& b : model.layout) out << b.name << ' ' << b.offset << ' ' << b.rows << ' ' << b.cols << '\n';
  write_reals(out, "parameters", model.parameters);
  write_reals(out, "train_loss", model.history.train_loss);
  write_reals(out, "validation_loss", model.history.validation_loss);
  out << "best_epoch " << model.history.best_epoch << '\n';
}

FittedModel load_checkpoint(std::istream& in) {
  Reader r(in);
  r.expect(kMagic);
  if (r.integer() != kVersion) throw Error(ErrorKind::parse_error, "unsupported checkpoint version");

  FittedModel model;
  auto& spec = model.spec;
  r.expect("input_dim");
  spec.input_dim = static_cast<int>(r.integer());
  r.expect("hidden_dims");
  spec.hidden_dims.resize(static_cast<std::size_t>(r.integer()));
  for (int& h : spec.hidden_dims) h = static_cast<int>(r.integer());
  r.expect("activation");
  spec.activation = parse_activation(r.token());
  r.expect("head");
  spec.head = parse_head(r.token());
  r.expect("link");
  spec.link = parse_link(r.token());
  r.expect("num_classes");
  spec.num_classes = static_cast<int>(r.integer());
  r.expect("dropout");
  if (auto t = r.token(); t != "none") {
    char* end = nullptr;
    HybridDropoutConfig cfg;
    cfg.base_rate = std::strtod(t.c_str(), &end);
    if (*end != '\0') throw Error(ErrorKind::parse_error, "checkpoint: bad dropout rate '" + t + "'");
    cfg.mix = r.real();
    cfg.min_batch = static_cast<int>(r.integer());
    spec.dropout = cfg;
  }
  spec.validate();
  r.expect("seed");
  model.seed = r.unsigned_integer();

  r.expect("layout");
  model.layout.resize(static_cast<std::size_t>(r.integer()));
  for (auto& b : model.layout) {
    b.name = r.token();
    b.offset = static_cast<std::size_t>(r.integer());
    b.rows = static_cast<std::size_t>(r.integer());
    b.cols = static_cast<std::size_t>(r.integer());
  }
  if (model.layout != make_layout(spec)) throw Error(ErrorKind::parse_error, "checkpoint layout does not match its spec");

  r.expect("parameters");
  model.parameters = r.reals();
  const auto& last = model.layout.back();
  if (model.parameters.size() != last.offset + last.size())
    throw Error(ErrorKind::parse_error, "checkpoint parameter count does not match its layout");
  r.expect("train_loss");
  model.history.train_loss = r.reals();
  r.expect("validation_loss");
  model.history.validation_loss = r.reals();
  r.expect("best_epoch");
  model.history.best_epoch = static_cast<int>(r.integer());
  return model;
}

}  // namespace ordinal
