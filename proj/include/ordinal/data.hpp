#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ordinal/matrix.hpp"

namespace ordinal {

struct Dataset {
  Matrix X;
  Labels y;
  int num_classes = 0;
  std::vector<std::string> feature_names;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t num_features() const noexcept { return X.cols(); }
  std::vector<std::size_t> class_counts() const;
  void validate() const;
};

/// Rows in the order given by indices.
Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

/// Latent-threshold generator: x ~ N(0, I), z = w.x + N(0, noise_sd^2) with a
/// seeded unit-norm w, and labels cut at the empirical quantiles of z implied
/// by the class proportions (uniform when empty).
struct SynthConfig {
  int n_samples = 1000;
  int n_features = 10;
  int num_classes = 5;
  double noise_sd = 0.5;
  std::vector<double> proportions;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset data;
  std::vector<double> latent;
  std::vector<double> direction;
};

SyntheticData generate_synthetic_with_latent(const SynthConfig& config);
Dataset generate_synthetic(const SynthConfig& config);

struct CsvOptions {
  /// Header name of the label column; the last column when empty.
  std::string label_column;
  /// Ordered category names; when set, labels are looked up by name.
  std::vector<std::string> categories;
  /// Declared class count; inferred as max label + 1 when absent.
  std::optional<int> num_classes;
};

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset read_csv(std::istream& in, const CsvOptions& options = {});

/// Header of feature names plus "label"; values with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
void save_csv(const std::filesystem::path& path, const Dataset& data);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Per class, round(n_c * fraction) rows (kept within [1, n_c - 1]) go to the
/// test side. Both index lists come back in ascending order.
SplitIndices stratified_split_indices(const Dataset& data, double test_fraction, std::uint64_t seed);
std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed);

struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> sd;

  static FeatureScaler fit(const Dataset& train);
  Dataset apply(const Dataset& data) const;
};

/// Scales train and every other dataset with train-only statistics (population
/// SD). Zero-variance features map to 0. Returns train first.
std::vector<Dataset> standardize(const Dataset& train, std::span<const Dataset> others);

}  // namespace ordinal
