#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "ordinal/dropout.hpp"
#include "ordinal/error.hpp"

using namespace ordinal;

namespace {

// N=10 batch whose columns have correlations 1, -1, 0 (constant), ~0.5 with the labels.
struct Batch {
  Matrix acts{10, 4};
  Labels labels{0, 1, 2, 3, 4, 0, 1, 2, 3, 4};
};

Batch make_batch() {
  Batch b;
  const double wobble[] = {1.5, -0.7, 2.0, -1.1, 0.3, -2.2, 0.9, 1.4, -1.6, 0.1};
  for (std::size_t i = 0; i < 10; ++i) {
    const double y = b.labels[i];
    b.acts(i, 0) = y;
    b.acts(i, 1) = -y;
    b.acts(i, 2) = 3.0;
    b.acts(i, 3) = y + wobble[i];
  }
  return b;
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("neuron-target correlation") {
  const auto b = make_batch();
  const auto r = neuron_target_correlation(b.acts, b.labels);
  REQUIRE(r.size() == 4);
  CHECK(std::abs(r[0] - 1.0) < 1e-12);
  CHECK(std::abs(r[1] + 1.0) < 1e-12);
  CHECK(r[2] == 0.0);

  std::vector<double> col(10), lab(10);
  for (std::size_t i = 0; i < 10; ++i) {
    col[i] = b.acts(i, 3);
    lab[i] = b.labels[i];
  }
  CHECK(std::abs(r[3] - pearson(col, lab)) < 1e-12);

  const Labels constant(10, 2);
  for (double v : neuron_target_correlation(b.acts, constant)) CHECK(v == 0.0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix a = oracle::random_matrix(20, 6, rng);
    for (double v : neuron_target_correlation(a, oracle::random_labels(20, 4, rng))) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK_THROWS_AS(neuron_target_correlation(Matrix(1, 3), Labels{0}), Error);
}

TEST_CASE("drop probabilities") {
  const std::vector<double> r{1.0, 0.0};
  const auto q = mixed_drop_probabilities(r, {0.4, 1.0, 8});
  CHECK(q[0] == 0.0);
  CHECK(std::abs(q[1] - 0.8) < 1e-15);

  const std::vector<double> r3{0.9, -0.2, 0.5};
  for (double v : hybrid_drop_probabilities(r3, {0.3, 0.0, 8})) CHECK(v == 0.3);

  // every neuron fully correlated: ordinal part degenerates to uniform
  const std::vector<double> ones{1.0, -1.0, 1.0};
  for (double v : mixed_drop_probabilities(ones, {0.25, 1.0, 8})) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), prob(0.0, 0.99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> rr(1 + trial % 16);
    for (double& v : rr) v = unit(rng);
    const HybridDropoutConfig cfg{prob(rng), (trial % 11) / 10.0, 8};
    const auto pre = mixed_drop_probabilities(rr, cfg);
    const double mean = std::accumulate(pre.begin(), pre.end(), 0.0) / static_cast<double>(pre.size());
    CHECK(std::abs(mean - cfg.base_rate) < 1e-12);

    const auto post = hybrid_drop_probabilities(rr, cfg);
    for (std::size_t u = 0; u < rr.size(); ++u) {
      CHECK(post[u] >= 0.0);
      CHECK(post[u] <= kMaxDropProbability);
      for (std::size_t v = 0; v < rr.size(); ++v)
        if (std::abs(rr[u]) > std::abs(rr[v])) CHECK(post[u] <= post[v]);
    }
  }
}

TEST_CASE("config validation") {
  CHECK_NOTHROW(HybridDropoutConfig{}.validate());
  CHECK_THROWS_AS((HybridDropoutConfig{1.0, 0.5, 8}.validate()), Error);
  CHECK_THROWS_AS((HybridDropoutConfig{-0.1, 0.5, 8}.validate()), Error);
  CHECK_THROWS_AS((HybridDropoutConfig{0.2, 1.5, 8}.validate()), Error);
  CHECK_THROWS_AS((HybridDropoutConfig{0.2, 0.5, 1}.validate()), Error);
}

TEST_CASE("eval mode and zero rate are the identity") {
  const auto b = make_batch();
  std::mt19937_64 rng(3);
  const auto e = apply_hybrid_dropout(b.acts, b.labels, {}, DropoutMode::eval, rng);
  CHECK(e.output == b.acts);
  const auto z = apply_hybrid_dropout(b.acts, b.labels, {0.0, 0.7, 8}, DropoutMode::train, rng);
  CHECK(z.output == b.acts);
  for (double m : z.mask) CHECK(m == 1.0);
}

TEST_CASE("masks are column shared and deterministic") {
  const auto b = make_batch();
  std::mt19937_64 a(42), c(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = apply_hybrid_dropout(b.acts, b.labels, {0.5, 0.5, 8}, DropoutMode::train, a);
    const auto y = apply_hybrid_dropout(b.acts, b.labels, {0.5, 0.5, 8}, DropoutMode::train, c);
    CHECK(x.mask == y.mask);
    CHECK(x.output == y.output);
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t u = 0; u < 4; ++u) CHECK(x.output(i, u) == b.acts(i, u) * x.mask[u]);
  }
}

TEST_CASE("mix 0 reproduces plain dropout") {
  const auto b = make_batch();
  std::mt19937_64 a(7), c(7);
  const Matrix small(4, 4, 1.0);
  const Labels small_labels{0, 1, 2, 3};
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = apply_hybrid_dropout(b.acts, b.labels, {0.3, 0.0, 8}, DropoutMode::train, a);
    // a batch below min_batch takes the uniform fallback
    const auto y = apply_hybrid_dropout(small, small_labels, {0.3, 1.0, 8}, DropoutMode::train, c);
    CHECK(x.mask == y.mask);
  }
}

TEST_CASE("Monte-Carlo drop frequency and expectation") {
  const auto b = make_batch();
  const HybridDropoutConfig cfg;
  const auto q = hybrid_drop_probabilities(neuron_target_correlation(b.acts, b.labels), cfg);
  std::mt19937_64 rng(2024);
  const int trials = 10000;
  std::vector<double> drops(4, 0.0), mean_out(4, 0.0);
  for (int t = 0; t < trials; ++t) {
    const auto r = apply_hybrid_dropout(b.acts, b.labels, cfg, DropoutMode::train, rng);
    for (std::size_t u = 0; u < 4; ++u) {
      drops[u] += r.mask[u] == 0.0 ? 1.0 : 0.0;
      mean_out[u] += r.output(2, u);
    }
  }
  for (std::size_t u = 0; u < 4; ++u) {
    CHECK(std::abs(drops[u] / trials - q[u]) < 0.02);
    CHECK(std::abs(mean_out[u] / trials - b.acts(2, u)) <= 0.02 * std::abs(b.acts(2, u)));
  }
}
