#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ordinal/data.hpp"
#include "ordinal/nn_core.hpp"

namespace ordinal {

using Hyperparameters = std::map<std::string, double>;

/// Ordered candidate lists; expansion varies the last entry fastest.
using Grid = std::vector<std::pair<std::string, std::vector<double>>>;

std::vector<Hyperparameters> expand_grid(const Grid& grid);
std::size_t grid_size(const Grid& grid);

/// A benchmarked method: fixed hyperparameter defaults plus a search grid.
struct EstimatorConfig {
  std::string method;
  std::string description;
  Hyperparameters hyperparameters;
  Grid grid;

  bool declares(std::string_view name) const;
};

/// The nine ordinal methods plus the cross-entropy baseline, with the
/// default tuning grids.
const std::vector<EstimatorConfig>& registry();
const EstimatorConfig& registry_entry(std::string_view method);

/// Architecture and trainer settings shared by every method in a sweep.
struct ProtocolConfig {
  std::vector<std::uint64_t> seeds{0};
  int budget = 15;
  double test_fraction = 0.25;
  double validation_fraction = 0.15;
  TrainConfig trainer;
  std::vector<int> hidden_dims{32};
  Activation activation = Activation::relu;
  Link link = Link::logit;
  HybridDropoutConfig dropout;
  double beta_concentration = 10.0;
};

/// Everything needed to train one configuration of a method.
struct Estimator {
  ModelSpec spec;
  LossSpec loss;
  TrainConfig trainer;
};

Estimator make_estimator(std::string_view method, const Hyperparameters& hyperparameters, int input_dim,
                         int num_classes, const ProtocolConfig& protocol);

struct SearchTrial {
  Hyperparameters hyperparameters;
  double validation_loss = 0.0;
};

struct SearchResult {
  Hyperparameters chosen;
  double validation_loss = 0.0;
  FittedModel model;
  std::vector<SearchTrial> trials;  // in sampling order
};

/// Samples min(budget, |grid|) distinct grid points without replacement, fits
/// each on train, and keeps the lowest validation loss (first sampled wins
/// ties).
SearchResult random_search(const EstimatorConfig& estimator, const Dataset& train, const Dataset& validation,
                           int budget, std::uint64_t seed, const ProtocolConfig& protocol);

struct DatasetSource {
  std::string name;
  std::optional<SynthConfig> synthetic;
  std::filesystem::path csv;
  CsvOptions csv_options;

  Dataset load() const;
};

struct BenchmarkConfig {
  std::vector<DatasetSource> datasets;
  std::vector<EstimatorConfig> estimators;
  ProtocolConfig protocol;
};

/// Reads the JSON config. Relative CSV paths resolve against base_dir.
BenchmarkConfig parse_benchmark_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
BenchmarkConfig load_benchmark_config(const std::filesystem::path& path);

struct RunRecord {
  std::string dataset;
  std::string estimator;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  double qwk = 0.0;
  double mae = 0.0;
  double ccr = 0.0;
  double one_off = 0.0;
  double amae = 0.0;
  double mmae = 0.0;
  double rps = 0.0;
  std::optional<double> gmsec;
  /// Test MAE of always predicting the median training label.
  double baseline_mae = 0.0;
  double time_seconds = 0.0;
  Hyperparameters chosen_hyperparameters;
};

struct SummaryRow {
  std::string dataset;
  std::string estimator;
  std::size_t completed = 0;
  std::size_t failed = 0;
  double qwk_mean = 0.0, qwk_sd = 0.0;
  double mae_mean = 0.0, mae_sd = 0.0;
  double ccr_mean = 0.0, ccr_sd = 0.0;
  double time_mean = 0.0, time_sd = 0.0;
};

struct BenchmarkResult {
  std::vector<RunRecord> runs;
  std::vector<SummaryRow> summary;
};

/// One (dataset, estimator, seed) cell of the sweep: split, standardize,
/// search, evaluate on the test part. Never throws; failures are recorded.
RunRecord run_cell(const Dataset& data, const std::string& dataset_name, const EstimatorConfig& estimator,
                   std::uint64_t seed, const ProtocolConfig& protocol);

using ProgressFn = std::function<void(const RunRecord&)>;

/// Runs every cell, `jobs` at a time. Record order is dataset, estimator,
/// seed regardless of jobs.
BenchmarkResult run_benchmark(const BenchmarkConfig& config, int jobs = 1, const ProgressFn& progress = {});

/// Mean and sample SD over completed runs, grouped by (dataset, estimator)
/// in first-appearance order.
std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& runs);

std::string format_hyperparameters(const Hyperparameters& hyperparameters);

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary);
void write_summary_md(std::ostream& out, const std::vector<SummaryRow>& summary);

/// runs.csv, summary.csv, summary.md and metadata.json under dir.
void write_outputs(const std::filesystem::path& dir, const BenchmarkResult& result, const BenchmarkConfig& config);

}  // namespace ordinal
