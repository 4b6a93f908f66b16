#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "ordinal/error.hpp"
#include "ordinal/metrics.hpp"
#include "ordinal/nn_core.hpp"

using namespace ordinal;

namespace {

std::vector<LossSpec> losses_for(HeadKind head, int J) {
  if (head == HeadKind::obd) return {EcocMse{}};
  return {SoftCe{onehot_table(J), 0.0}, SoftCe{triangular_table(J, 0.1), 0.5}, SoftCe{beta_table(J), 1.0},
          WeightedKappa{penalization_matrix(J), kWkEpsilon}};
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::io_error;
}

Dataset separable(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset d;
  d.num_classes = 2;
  d.X = Matrix(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    d.X(i, 0) = (y ? 2.0 : -2.0) + 0.5 * normal(rng);
    d.X(i, 1) = normal(rng);
    d.y.push_back(y);
  }
  return d;
}

}  // namespace

TEST_CASE("layout arithmetic") {
  ModelSpec s{2, {4}, Activation::relu, HeadKind::softmax, Link::logit, std::nullopt, 3};
  const auto m = build_model(s, 1);
  CHECK(m.parameters.size() == 27);
  CHECK(m.block("hidden0.weight").size() == 8);
  CHECK(m.block("head.bias").size() == 3);
  for (double b : m.values(m.block("hidden0.bias"))) CHECK(b == 0.0);
  for (double w : m.values(m.block("hidden0.weight"))) CHECK(std::abs(w) <= 1.0 / std::sqrt(2.0));
  for (double w : m.values(m.block("head.weight"))) CHECK(std::abs(w) <= 0.5);

  s.head = HeadKind::clm;
  s.num_classes = 4;
  const auto c = build_model(s, 1);
  CHECK(c.block("head.weight").size() == 4);
  CHECK(c.block("head.bias").size() == 1);
  CHECK(c.block("clm.base_threshold").size() == 1);
  CHECK(c.block("clm.increments").size() == 2);
  CHECK(c.parameters.size() == 12 + 4 + 1 + 1 + 2);
  const auto b = c.clm_params().thresholds();
  CHECK(b.front() == -2.0);
  CHECK(b.back() == doctest::Approx(2.0).epsilon(1e-15));

  s.head = HeadKind::obd;
  CHECK(build_model(s, 1).block("head.bias").size() == 3);
  CHECK(build_model(s, 9) == build_model(s, 9));
  CHECK(!(build_model(s, 9).parameters == build_model(s, 10).parameters));
}

TEST_CASE("spec validation") {
  ModelSpec s{2, {}, Activation::relu, HeadKind::softmax, Link::logit, HybridDropoutConfig{}, 3};
  CHECK(kind_of([&] { build_model(s, 0); }) == ErrorKind::invalid_spec);
  s.dropout.reset();
  s.num_classes = 1;
  CHECK(kind_of([&] { build_model(s, 0); }) == ErrorKind::invalid_spec);
  s.num_classes = 3;
  s.hidden_dims = {0};
  CHECK(kind_of([&] { build_model(s, 0); }) == ErrorKind::invalid_spec);
  CHECK(parse_head("stick_breaking") == HeadKind::stick_breaking);
  CHECK(kind_of([] { parse_head("ordinal"); }) == ErrorKind::invalid_spec);
}

TEST_CASE("forward basics") {
  ModelSpec s{3, {5}, Activation::tanh, HeadKind::softmax, Link::logit, std::nullopt, 4};
  auto m = build_model(s, 2);
  std::fill(m.parameters.begin(), m.parameters.end(), 0.0);
  std::mt19937_64 rng(3);
  const Matrix X = oracle::random_matrix(6, 3, rng);
  const Matrix uniform = forward(m, X);
  for (double v : uniform.data()) CHECK(v == 0.25);

  for (auto head : {HeadKind::softmax, HeadKind::clm, HeadKind::stick_breaking}) {
    s.head = head;
    s.dropout = HybridDropoutConfig{};
    const auto model = build_model(s, 4);
    const auto p = predict_proba(model, X);
    CHECK(p == forward(model, X));
    CHECK(p == predict_proba(model, X));
    for (std::size_t i = 0; i < p.rows(); ++i) {
      const auto r = p.row(i);
      CHECK(std::abs(std::accumulate(r.begin(), r.end(), 0.0) - 1.0) < 1e-12);
    }
  }
  CHECK(kind_of([&] { forward(build_model(s, 4), Matrix(2, 4)); }) == ErrorKind::invalid_shape);
}

TEST_CASE("obd probabilities decode like the templates") {
  ModelSpec s{2, {}, Activation::relu, HeadKind::obd, Link::logit, std::nullopt, 4};
  auto m = build_model(s, 1);
  // zero weights: the head emits sigmoid(bias)
  std::fill(m.parameters.begin(), m.parameters.end(), 0.0);
  const auto& bias = m.block("head.bias");
  const Matrix X(1, 2);
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 3; ++k) m.parameters[bias.offset + static_cast<std::size_t>(k)] = k < j ? 40.0 : -40.0;
    const auto p = predict_proba(m, X);
    CHECK(argmax_labels(p) == Labels{j});
    CHECK(std::abs(std::accumulate(p.row(0).begin(), p.row(0).end(), 0.0) - 1.0) < 1e-12);
  }
  std::mt19937_64 rng(5);
  const auto model = build_model({3, {6}, Activation::relu, HeadKind::obd, Link::logit, std::nullopt, 5}, 6);
  const Matrix Xr = oracle::random_matrix(50, 3, rng, 3.0);
  CHECK(predict(model, Xr) == ecoc_decode(forward(model, Xr), ecoc_templates(5)));
}

TEST_CASE("compatibility of heads and losses") {
  CHECK(compatible(HeadKind::obd, EcocMse{}));
  CHECK(!compatible(HeadKind::softmax, EcocMse{}));
  CHECK(!compatible(HeadKind::obd, SoftCe{onehot_table(3), 0.0}));
  CHECK(compatible(HeadKind::clm, WeightedKappa{penalization_matrix(3), kWkEpsilon}));
  const auto m = build_model({2, {3}, Activation::relu, HeadKind::obd, Link::logit, std::nullopt, 3}, 0);
  const Labels y{0, 1};
  CHECK(kind_of([&] { loss_and_grad(m, Matrix(2, 2), y, SoftCe{onehot_table(3), 0.0}); }) ==
        ErrorKind::invalid_combination);
  CHECK(kind_of([&] { loss_and_grad(m, Matrix(0, 2), Labels{}, EcocMse{}); }) == ErrorKind::invalid_shape);
}

TEST_CASE("gradient check over every compatible pair") {
  std::mt19937_64 rng(7);
  for (auto head : {HeadKind::softmax, HeadKind::clm, HeadKind::stick_breaking, HeadKind::obd})
    for (int J : {3, 4})
      for (auto act : {Activation::relu, Activation::tanh})
        for (const auto& loss : losses_for(head, J)) {
          const ModelSpec s{3, {5}, act, head, head == HeadKind::clm ? Link::probit : Link::logit, std::nullopt, J};
          const auto m = build_model(s, rng());
          const Matrix X = oracle::random_matrix(8, 3, rng);
          const Labels y = oracle::random_labels(8, J, rng);
          const auto report = gradient_check(m, X, y, loss, 1e-5);
          INFO(to_string(head), " J=", J, " loss=", loss_name(loss), " err=", report.max_relative_error);
          CHECK(report.passed());
          CHECK(report.blocks.size() == m.layout.size());
        }
  for (auto link : {Link::logit, Link::cloglog}) {
    const ModelSpec s{3, {4, 3}, Activation::tanh, HeadKind::clm, link, std::nullopt, 5};
    const auto m = build_model(s, 3);
    const Matrix X = oracle::random_matrix(8, 3, rng);
    const Labels y = oracle::random_labels(8, 5, rng);
    CHECK(gradient_check(m, X, y, WeightedKappa{penalization_matrix(5), kWkEpsilon}, 1e-5).passed());
  }
}

TEST_CASE("gradient check flags a corrupted entry and handles a linear model") {
  std::mt19937_64 rng(8);
  const ModelSpec s{3, {5}, Activation::tanh, HeadKind::softmax, Link::logit, std::nullopt, 3};
  const auto m = build_model(s, 1);
  const Matrix X = oracle::random_matrix(8, 3, rng);
  const Labels y = oracle::random_labels(8, 3, rng);
  const LossSpec loss = SoftCe{onehot_table(3), 0.0};
  auto g = loss_and_grad(m, X, y, loss).gradient;
  CHECK(compare_gradient(m, X, y, loss, g, 1e-5).passed());
  g[4] += 1e-3;
  const auto bad = compare_gradient(m, X, y, loss, g, 1e-5);
  CHECK(!bad.passed());
  CHECK(bad.blocks[0].name == "hidden0.weight");
  CHECK(bad.blocks[0].max_relative_error > 1e-5);

  const auto linear = build_model({3, {}, Activation::relu, HeadKind::softmax, Link::logit, std::nullopt, 3}, 2);
  CHECK(gradient_check(linear, X, y, loss, 1e-5).passed());

  CHECK(relative_error(1.0, 1.0) == 0.0);
  CHECK(relative_error(1e-9, 2e-9) == doctest::Approx(1e-7));
  CHECK(relative_error(2.0, 1.0) == 0.5);
}

TEST_CASE("mean reduction: duplicated batch gives the same loss and gradient") {
  std::mt19937_64 rng(9);
  for (auto head : {HeadKind::softmax, HeadKind::clm, HeadKind::stick_breaking, HeadKind::obd}) {
    const ModelSpec s{3, {5}, Activation::relu, head, Link::logit, std::nullopt, 4};
    const auto m = build_model(s, 4);
    const Matrix X = oracle::random_matrix(8, 3, rng);
    const Labels y = oracle::random_labels(8, 4, rng);
    Matrix X2(16, 3);
    Labels y2 = y;
    y2.insert(y2.end(), y.begin(), y.end());
    for (std::size_t i = 0; i < 16; ++i)
      for (std::size_t k = 0; k < 3; ++k) X2(i, k) = X(i % 8, k);
    for (const auto& loss : losses_for(head, 4)) {
      if (std::holds_alternative<WeightedKappa>(loss)) continue;  // batch-level ratio, not a mean
      const auto a = loss_and_grad(m, X, y, loss);
      const auto b = loss_and_grad(m, X2, y2, loss);
      CHECK(std::abs(a.value - b.value) < 1e-12);
      for (std::size_t n = 0; n < a.gradient.size(); ++n) CHECK(std::abs(a.gradient[n] - b.gradient[n]) < 1e-12);
    }
  }
}

TEST_CASE("train-mode pass applies dropout deterministically") {
  std::mt19937_64 data_rng(10);
  const ModelSpec s{3, {6}, Activation::relu, HeadKind::softmax, Link::logit, HybridDropoutConfig{0.5, 0.5, 8}, 3};
  const auto m = build_model(s, 1);
  const Matrix X = oracle::random_matrix(16, 3, data_rng);
  const Labels y = oracle::random_labels(16, 3, data_rng);
  const LossSpec loss = SoftCe{onehot_table(3), 0.0};
  std::mt19937_64 a(5), b(5);
  const auto ga = loss_and_grad(m, X, y, loss, &a);
  const auto gb = loss_and_grad(m, X, y, loss, &b);
  CHECK(ga.value == gb.value);
  CHECK(ga.gradient == gb.gradient);
  CHECK(loss_and_grad(m, X, y, loss).value == loss_value(m, X, y, loss));
}

TEST_CASE("fit: zero epochs, separable toy set, patience trace") {
  const auto train = separable(200, 1);
  const auto val = separable(60, 2);
  const ModelSpec s{2, {8}, Activation::relu, HeadKind::softmax, Link::logit, std::nullopt, 2};
  const auto init = build_model(s, 3);
  const LossSpec loss = SoftCe{onehot_table(2), 0.0};

  TrainConfig none;
  none.max_epochs = 0;
  none.patience = 0;
  const auto same = fit(init, train, val, none, loss);
  CHECK(same.parameters == init.parameters);
  CHECK(same.history.train_loss.empty());

  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.seed = 4;
  const auto trained = fit(init, train, val, cfg, loss);
  CHECK(ccr(EvalInput::from_labels(train.y, predict(trained, train.X), 2)) >= 0.99);
  CHECK(trained.history.train_loss.size() <= 100);
  const auto& vl = trained.history.validation_loss;
  const double best = *std::min_element(vl.begin(), vl.end());
  CHECK(std::abs(loss_value(trained, val.X, val.y, loss) - vl[static_cast<std::size_t>(trained.history.best_epoch)]) <
        1e-12);
  CHECK(vl[static_cast<std::size_t>(trained.history.best_epoch)] <= best + 1e-6);
  CHECK(fit(init, train, val, cfg, loss) == trained);

  TrainConfig flat;
  flat.learning_rate = 1e-300;
  flat.optimizer = OptimizerKind::sgd;
  flat.patience = 1;
  const auto stopped = fit(init, train, val, flat, loss);
  CHECK(stopped.history.train_loss.size() == 2);
  CHECK(stopped.history.best_epoch == 0);

  CHECK(kind_of([&] { fit(init, Dataset{Matrix(0, 2), {}, 2, {}}, val, cfg, loss); }) == ErrorKind::invalid_data);
  TrainConfig bad;
  bad.patience = 200;
  CHECK_THROWS_AS(fit(init, train, val, bad, loss), Error);
}

TEST_CASE("checkpoint round trip is bit exact") {
  const auto train = separable(64, 5);
  const ModelSpec s{2, {4, 3}, Activation::tanh, HeadKind::clm, Link::cloglog, HybridDropoutConfig{0.3, 0.4, 8}, 2};
  TrainConfig cfg;
  cfg.max_epochs = 5;
  cfg.patience = 5;
  cfg.batch_size = 16;
  const auto m = fit(build_model(s, 7), train, train, cfg, WeightedKappa{penalization_matrix(2), kWkEpsilon});
  std::stringstream io;
  save_checkpoint(io, m);
  const auto back = load_checkpoint(io);
  CHECK(back == m);
  std::istringstream junk("not a checkpoint\n");
  CHECK_THROWS_AS(load_checkpoint(junk), Error);
}
