#include "ordinal/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "ordinal/error.hpp"

namespace ordinal {

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(static_cast<std::size_t>(std::max(num_classes, 0)), 0);
  for (int label : y) ++counts[static_cast<std::size_t>(label)];
  return counts;
}

void Dataset::validate() const {
  if (X.rows() != y.size()) throw Error(ErrorKind::invalid_data, "feature rows and labels differ in length");
  for (int label : y)
    if (label < 0 || label >= num_classes)
      throw Error(ErrorKind::invalid_label, "label " + std::to_string(label) + " outside [0, " + std::to_string(num_classes) + ")");
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.X = Matrix(indices.size(), data.X.cols());
  out.y.reserve(indices.size());
  out.num_classes = data.num_classes;
  out.feature_names = data.feature_names;
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const auto src = data.X.row(indices[r]);
    std::copy(src.begin(), src.end(), out.X.row(r).begin());
    out.y.push_back(data.y[indices[r]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic data

SyntheticData generate_synthetic_with_latent(const SynthConfig& config) {
  if (config.num_classes < 2) throw Error(ErrorKind::invalid_config, "need at least 2 classes");
  if (config.n_features < 1) throw Error(ErrorKind::invalid_config, "need at least 1 feature");
  if (config.n_samples < config.num_classes)
    throw Error(ErrorKind::invalid_config, "n_samples must be at least the number of classes");
  if (!(config.noise_sd >= 0.0)) throw Error(ErrorKind::invalid_config, "noise_sd must be non-negative");

  const auto classes = static_cast<std::size_t>(config.num_classes);
  std::vector<double> proportions = config.proportions;
  if (proportions.empty()) proportions.assign(classes, 1.0 / static_cast<double>(classes));
  if (proportions.size() != classes) throw Error(ErrorKind::invalid_config, "need one proportion per class");
  if (std::any_of(proportions.begin(), proportions.end(), [](double p) { return !(p >= 0.0); }))
    throw Error(ErrorKind::invalid_config, "class proportions must be non-negative");
  if (std::abs(std::accumulate(proportions.begin(), proportions.end(), 0.0) - 1.0) > 1e-9)
    throw Error(ErrorKind::invalid_config, "class proportions must sum to 1");

  const auto n = static_cast<std::size_t>(config.n_samples);
  const auto d = static_cast<std::size_t>(config.n_features);
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<double> w(d);
  double norm = 0.0;
  do {
    norm = 0.0;
    for (double& v : w) {
      v = normal(rng);
      norm += v * v;
    }
  } while (norm == 0.0);
  norm = std::sqrt(norm);
  for (double& v : w) v /= norm;

  SyntheticData out;
  out.direction = w;
  Dataset& data = out.data;
  data.X = Matrix(n, d);
  data.num_classes = config.num_classes;
  for (std::size_t f = 0; f < d; ++f) data.feature_names.push_back("x" + std::to_string(f));

  out.latent.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = 0.0;
    for (std::size_t f = 0; f < d; ++f) {
      data.X(i, f) = normal(rng);
      z += w[f] * data.X(i, f);
    }
    out.latent[i] = z + config.noise_sd * normal(rng);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return out.latent[a] < out.latent[b]; });

  data.y.assign(n, 0);
  double cumulative = 0.0;
  std::size_t start = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    cumulative += proportions[c];
    const std::size_t end = c + 1 == classes ? n : std::min(n, static_cast<std::size_t>(std::llround(cumulative * n)));
    for (std::size_t r = start; r < end; ++r) data.y[order[r]] = static_cast<int>(c);
    start = std::max(start, end);
  }
  return out;
}

Dataset generate_synthetic(const SynthConfig& config) { return generate_synthetic_with_latent(config).data; }

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  s = s.substr(first, last - first + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

}  // namespace

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::parse_error, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_fields(line);
  if (header.size() < 2) throw Error(ErrorKind::parse_error, "need at least one feature column and a label column");

  std::size_t label_col = header.size() - 1;
  if (!options.label_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), options.label_column);
    if (it == header.end()) throw Error(ErrorKind::parse_error, "label column '" + options.label_column + "' not in header");
    label_col = static_cast<std::size_t>(it - header.begin());
  }

  Dataset data;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (c != label_col) data.feature_names.push_back(header[c]);
  const std::size_t d = data.feature_names.size();

  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(ErrorKind::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(header.size()) + " fields, got " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == label_col) {
        int label = -1;
        if (!options.categories.empty()) {
          const auto it = std::find(options.categories.begin(), options.categories.end(), fields[c]);
          if (it == options.categories.end())
            throw Error(ErrorKind::invalid_label, location(line_no, c) + ": unknown category '" + fields[c] + "'");
          label = static_cast<int>(it - options.categories.begin());
        } else {
          const auto* end = fields[c].data() + fields[c].size();
          const auto [ptr, ec] = std::from_chars(fields[c].data(), end, label);
          if (ec != std::errc() || ptr != end || label < 0)
            throw Error(ErrorKind::invalid_label, location(line_no, c) + ": label '" + fields[c] + "' is not a class index");
        }
        data.y.push_back(label);
      } else {
        const auto v = parse_double(fields[c]);
        if (!v) throw Error(ErrorKind::parse_error, location(line_no, c) + ": non-numeric value '" + fields[c] + "'");
        values.push_back(*v);
      }
    }
  }

  data.X = Matrix(data.y.size(), d);
  data.X.data() = std::move(values);
  if (!options.categories.empty()) {
    data.num_classes = static_cast<int>(options.categories.size());
  } else if (options.num_classes) {
    data.num_classes = *options.num_classes;
  } else {
    data.num_classes = data.y.empty() ? 0 : *std::max_element(data.y.begin(), data.y.end()) + 1;
  }
  for (int label : data.y)
    if (label >= data.num_classes)
      throw Error(ErrorKind::invalid_label, "label " + std::to_string(label) + " exceeds declared class count " +
                                                std::to_string(data.num_classes));
  return data;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open " + path.string());
  return read_csv(in, options);
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (std::size_t f = 0; f < data.X.cols(); ++f)
    out << (f < data.feature_names.size() ? data.feature_names[f] : "x" + std::to_string(f)) << ',';
  out << "label\n";
  char buf[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (double v : data.X.row(i)) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << buf << ',';
    }
    out << data.y[i] << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + path.string());
  write_csv(out, data);
}

// ---------------------------------------------------------------------------
// Splitting and scaling

SplitIndices stratified_split_indices(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::invalid_parameter, "split fraction must lie in (0, 1)");
  const auto classes = static_cast<std::size_t>(data.num_classes);
  std::vector<std::vector<std::size_t>> members(classes);
  for (std::size_t i = 0; i < data.size(); ++i) members[static_cast<std::size_t>(data.y[i])].push_back(i);

  std::mt19937_64 rng(seed);
  SplitIndices split;
  for (std::size_t c = 0; c < classes; ++c) {
    auto& idx = members[c];
    if (idx.empty()) continue;
    if (idx.size() < 2)
      throw Error(ErrorKind::stratification_error, "class " + std::to_string(c) + " has fewer than 2 samples");
    std::shuffle(idx.begin(), idx.end(), rng);
    const auto wanted = static_cast<std::size_t>(std::llround(static_cast<double>(idx.size()) * test_fraction));
    const std::size_t n_test = std::clamp<std::size_t>(wanted, 1, idx.size() - 1);
    split.test.insert(split.test.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  const auto split = stratified_split_indices(data, test_fraction, seed);
  return {subset(data, split.train), subset(data, split.test)};
}

FeatureScaler FeatureScaler::fit(const Dataset& train) {
  if (train.size() == 0) throw Error(ErrorKind::invalid_data, "cannot standardize with an empty training set");
  const std::size_t d = train.X.cols();
  const double n = static_cast<double>(train.size());
  FeatureScaler scaler{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t i = 0; i < train.size(); ++i)
    for (std::size_t f = 0; f < d; ++f) scaler.mean[f] += train.X(i, f);
  for (double& m : scaler.mean) m /= n;
  for (std::size_t i = 0; i < train.size(); ++i)
    for (std::size_t f = 0; f < d; ++f) {
      const double diff = train.X(i, f) - scaler.mean[f];
      scaler.sd[f] += diff * diff;
    }
  for (double& s : scaler.sd) s = std::sqrt(s / n);
  return scaler;
}

Dataset FeatureScaler::apply(const Dataset& data) const {
  if (data.X.cols() != mean.size()) throw Error(ErrorKind::invalid_shape, "feature count differs from scaler");
  Dataset out = data;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t f = 0; f < mean.size(); ++f)
      out.X(i, f) = sd[f] > 0.0 ? (out.X(i, f) - mean[f]) / sd[f] : 0.0;
  return out;
}

std::vector<Dataset> standardize(const Dataset& train, std::span<const Dataset> others) {
  const auto scaler = FeatureScaler::fit(train);
  std::vector<Dataset> out;
  out.reserve(others.size() + 1);
  out.push_back(scaler.apply(train));
  for (const auto& other : others) out.push_back(scaler.apply(other));
  return out;
}

}  // namespace ordinal
