#include "ordinal/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ordinal/data.hpp"
#include "ordinal/error.hpp"
#include "ordinal/harness.hpp"
#include "ordinal/metrics.hpp"

namespace ordinal {

namespace {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config_error:
    case ErrorKind::invalid_config:
    case ErrorKind::invalid_parameter:
    case ErrorKind::invalid_spec:
    case ErrorKind::invalid_combination:
    case ErrorKind::invalid_class_count: return kExitConfig;
    case ErrorKind::io_error:
    case ErrorKind::parse_error:
    case ErrorKind::invalid_label:
    case ErrorKind::invalid_data:
    case ErrorKind::invalid_shape:
    case ErrorKind::stratification_error:
    case ErrorKind::probability_required:
    case ErrorKind::undefined_metric: return kExitData;
    default: return kExitInternal;
  }
}

// Numeric CSV with a header row.
Matrix read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, path + ": missing header row");
  const std::size_t cols = static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      while (end && (*end == ' ' || *end == '\r' || *end == '\t')) ++end;
      if (field.empty() || *end != '\0')
        throw Error(ErrorKind::parse_error, path + ": line " + std::to_string(line_no) + ", column " +
                                                std::to_string(c + 1) + ": non-numeric value '" + field + "'");
      values.push_back(v);
      ++c;
    }
    if (c != cols)
      throw Error(ErrorKind::parse_error, path + ": line " + std::to_string(line_no) + " has " + std::to_string(c) +
                                              " fields, expected " + std::to_string(cols));
    ++rows;
  }
  Matrix m(rows, cols);
  m.data() = std::move(values);
  return m;
}

void print_grid(std::ostream& out, const EstimatorConfig& e) {
  out << e.method;
  for (const auto& [name, values] : e.grid) {
    out << ' ' << name << "={";
    for (std::size_t i = 0; i < values.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", values[i]);
      out << (i ? "," : "") << buf;
    }
    out << '}';
  }
  out << " configs=" << grid_size(e.grid) << " # " << e.description << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ordinal classification toolkit and benchmark harness", "ordinal"};
  app.require_subcommand(1);

  SynthConfig synth;
  std::string synth_out;
  std::vector<double> proportions;
  auto* generate = app.add_subcommand("generate-data", "Write a synthetic latent-threshold dataset as CSV");
  generate->add_option("--out", synth_out, "Output CSV path")->required();
  generate->add_option("--n", synth.n_samples, "Number of samples")->required();
  generate->add_option("--features", synth.n_features, "Number of features")->required();
  generate->add_option("--classes", synth.num_classes, "Number of ordered classes")->required();
  generate->add_option("--noise", synth.noise_sd, "Latent noise SD")->required();
  generate->add_option("--proportions", proportions, "Class proportions p1,...,pJ")->delimiter(',');
  generate->add_option("--seed", synth.seed, "Random seed")->required();

  std::string true_path, proba_path;
  auto* evaluate = app.add_subcommand("evaluate", "Print the metric report for predicted probabilities");
  evaluate->add_option("--true", true_path, "CSV of true labels (header, one label per row)")->required();
  evaluate->add_option("--proba", proba_path, "CSV of class probabilities (header, N x J)")->required();

  auto* list = app.add_subcommand("list-methods", "Print the method registry and search grids");

  std::string config_path, out_dir;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "Run a benchmark sweep");
  run->add_option("--config", config_path, "Benchmark config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (generate->parsed()) {
      synth.proportions = proportions;
      save_csv(synth_out, generate_synthetic(synth));
      out << "wrote " << synth.n_samples << " rows to " << synth_out << '\n';
    } else if (evaluate->parsed()) {
      const Matrix truth = read_numeric_csv(true_path);
      const Matrix probs = read_numeric_csv(proba_path);
      if (truth.rows() != probs.rows())
        throw Error(ErrorKind::invalid_shape, "label and probability files have different row counts");
      Labels y(truth.rows());
      for (std::size_t i = 0; i < truth.rows(); ++i) {
        const double v = truth(i, truth.cols() - 1);
        if (v != std::floor(v) || v < 0 || v >= static_cast<double>(probs.cols()))
          throw Error(ErrorKind::invalid_label, "row " + std::to_string(i + 1) + ": label outside [0, J)");
        y[i] = static_cast<int>(v);
      }
      for (std::size_t i = 0; i < probs.rows(); ++i) {
        double total = 0.0;
        for (double p : probs.row(i)) {
          if (p < 0.0) throw Error(ErrorKind::invalid_data, "row " + std::to_string(i + 1) + ": negative probability");
          total += p;
        }
        if (std::abs(total - 1.0) > 1e-6)
          throw Error(ErrorKind::invalid_data, "row " + std::to_string(i + 1) + ": probabilities do not sum to 1");
      }
      out << format_report(metric_report(EvalInput::from_probs(std::move(y), probs)));
    } else if (list->parsed()) {
      for (const auto& e : registry()) print_grid(out, e);
    } else if (run->parsed()) {
      const auto config = load_benchmark_config(config_path);
      const auto result = run_benchmark(config, jobs, [&](const RunRecord& r) {
        err << r.dataset << ' ' << r.estimator << " seed=" << r.seed << ' '
            << (r.ok ? "ok" : "error: " + r.error) << '\n';
      });
      write_outputs(out_dir, result, config);
      std::size_t failed = 0;
      for (const auto& r : result.runs) failed += !r.ok;
      out << "wrote " << result.runs.size() << " runs (" << failed << " failed) to " << out_dir << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace ordinal
