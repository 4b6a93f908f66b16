#include "ordinal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ordinal/error.hpp"
#include "ordinal/metrics.hpp"

namespace ordinal {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Grids and registry

std::size_t grid_size(const Grid& grid) {
  std::size_t n = 1;
  for (const auto& [name, values] : grid) n *= values.size();
  return grid.empty() ? 0 : n;
}

std::vector<Hyperparameters> expand_grid(const Grid& grid) {
  std::vector<Hyperparameters> out;
  if (grid.empty()) return out;
  out.emplace_back();
  for (const auto& [name, values] : grid) {
    std::vector<Hyperparameters> next;
    next.reserve(out.size() * values.size());
    for (const auto& partial : out)
      for (double v : values) {
        auto h = partial;
        h[name] = v;
        next.push_back(std::move(h));
      }
    out = std::move(next);
  }
  return out;
}

bool EstimatorConfig::declares(std::string_view name) const {
  if (hyperparameters.contains(std::string(name))) return true;
  return std::any_of(grid.begin(), grid.end(), [&](const auto& entry) { return entry.first == name; });
}

namespace {

const std::vector<double> kLearningRates{1e-4, 1e-3, 1e-2};
const std::vector<double> kEta{0.8, 1.0};

EstimatorConfig entry(std::string method, std::string description, Grid grid) {
  return {std::move(method), std::move(description), {}, std::move(grid)};
}

std::vector<EstimatorConfig> build_registry() {
  return {
      entry("ce_baseline", "softmax head, cross-entropy", {{"learning_rate", kLearningRates}}),
      entry("beta", "softmax head, beta soft-label cross-entropy",
            {{"learning_rate", kLearningRates}, {"eta", kEta}}),
      entry("binomial", "softmax head, binomial soft-label cross-entropy",
            {{"learning_rate", kLearningRates}, {"eta", kEta}}),
      entry("clm", "cumulative link head, cross-entropy", {{"learning_rate", kLearningRates}}),
      // learning-rate order differs from the other methods
      entry("clmwk", "cumulative link head, weighted kappa loss", {{"learning_rate", {1e-4, 1e-2, 1e-3}}}),
      entry("exponential", "softmax head, exponential soft-label cross-entropy",
            {{"learning_rate", kLearningRates}, {"exponent", {1.0, 1.5, 2.0}}, {"eta", kEta}}),
      entry("hybrid_dropout", "softmax head, cross-entropy, hybrid ordinal dropout", {{"learning_rate", kLearningRates}}),
      entry("obdecoc", "binary decomposition head, ECOC template MSE", {{"learning_rate", kLearningRates}}),
      entry("sb", "stick-breaking head, cross-entropy", {{"learning_rate", kLearningRates}}),
      entry("triangular", "softmax head, triangular soft-label cross-entropy",
            {{"learning_rate", kLearningRates}, {"adjacent_probability", {0.01, 0.05, 0.10}}, {"eta", kEta}}),
  };
}

double param(const Hyperparameters& h, const std::string& name, std::optional<double> fallback = std::nullopt) {
  if (const auto it = h.find(name); it != h.end()) return it->second;
  if (fallback) return *fallback;
  throw Error(ErrorKind::config_error, "missing hyperparameter '" + name + "'");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum SeedSalt : std::uint64_t { kSplitSalt = 1, kValidationSalt, kSearchSalt, kModelSalt, kTrainSalt };

}  // namespace

const std::vector<EstimatorConfig>& registry() {
  static const std::vector<EstimatorConfig> methods = build_registry();
  return methods;
}

const EstimatorConfig& registry_entry(std::string_view method) {
  for (const auto& e : registry())
    if (e.method == method) return e;
  throw Error(ErrorKind::config_error, "unknown method '" + std::string(method) + "'");
}

Estimator make_estimator(std::string_view method, const Hyperparameters& hp, int input_dim, int num_classes,
                         const ProtocolConfig& protocol) {
  Estimator est;
  est.spec.input_dim = input_dim;
  est.spec.hidden_dims = protocol.hidden_dims;
  est.spec.activation = protocol.activation;
  est.spec.num_classes = num_classes;
  est.spec.link = protocol.link;
  est.trainer = protocol.trainer;
  est.trainer.learning_rate = param(hp, "learning_rate", protocol.trainer.learning_rate);

  const auto onehot = [&] { return LossSpec{SoftCe{onehot_table(num_classes), 0.0}}; };
  if (method == "ce_baseline") {
    est.loss = onehot();
  } else if (method == "beta") {
    est.loss = SoftCe{beta_table(num_classes, param(hp, "concentration", protocol.beta_concentration)), param(hp, "eta")};
  } else if (method == "binomial") {
    est.loss = SoftCe{binomial_table(num_classes), param(hp, "eta")};
  } else if (method == "exponential") {
    est.loss = SoftCe{exponential_table(num_classes, param(hp, "exponent")), param(hp, "eta")};
  } else if (method == "triangular") {
    est.loss = SoftCe{triangular_table(num_classes, param(hp, "adjacent_probability")), param(hp, "eta")};
  } else if (method == "clm") {
    est.spec.head = HeadKind::clm;
    est.loss = onehot();
  } else if (method == "clmwk") {
    est.spec.head = HeadKind::clm;
    est.loss = WeightedKappa{penalization_matrix(num_classes, PenaltyPower::quadratic)};
  } else if (method == "sb") {
    est.spec.head = HeadKind::stick_breaking;
    est.loss = onehot();
  } else if (method == "obdecoc") {
    est.spec.head = HeadKind::obd;
    est.loss = EcocMse{};
  } else if (method == "hybrid_dropout") {
    est.spec.dropout = protocol.dropout;
    est.loss = onehot();
  } else {
    throw Error(ErrorKind::config_error, "unknown method '" + std::string(method) + "'");
  }
  return est;
}

// ---------------------------------------------------------------------------
// Search

SearchResult random_search(const EstimatorConfig& estimator, const Dataset& train, const Dataset& validation,
                           int budget, std::uint64_t seed, const ProtocolConfig& protocol) {
  if (budget < 1) throw Error(ErrorKind::invalid_config, "search budget must be at least 1");
  auto candidates = expand_grid(estimator.grid);
  if (candidates.empty()) throw Error(ErrorKind::invalid_config, "empty grid for '" + estimator.method + "'");

  std::mt19937_64 rng(mix_seed(seed, kSearchSalt));
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(std::min(candidates.size(), static_cast<std::size_t>(budget)));

  const Dataset& monitor = validation.size() > 0 ? validation : train;
  SearchResult result;
  result.validation_loss = std::numeric_limits<double>::infinity();
  bool have_best = false;
  for (const auto& sampled : candidates) {
    Hyperparameters hp = estimator.hyperparameters;
    for (const auto& [k, v] : sampled) hp[k] = v;
    Estimator est = make_estimator(estimator.method, hp, static_cast<int>(train.num_features()), train.num_classes, protocol);
    est.trainer.seed = mix_seed(seed, kTrainSalt);
    FittedModel model = fit(build_model(est.spec, mix_seed(seed, kModelSalt)), train, validation, est.trainer, est.loss);
    double loss = loss_value(model, monitor.X, monitor.y, est.loss);
    if (!std::isfinite(loss)) loss = std::numeric_limits<double>::infinity();
    result.trials.push_back({hp, loss});
    if (!have_best || loss < result.validation_loss) {
      have_best = true;
      result.validation_loss = loss;
      result.chosen = hp;
      result.model = std::move(model);
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Config

Dataset DatasetSource::load() const {
  if (synthetic) return generate_synthetic(*synthetic);
  return load_csv(csv, csv_options);
}

namespace {

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("field '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw Error(ErrorKind::config_error, "unknown field '" + key + "' in " + where);
}

DatasetSource parse_dataset(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::config_error, "dataset entries must be objects");
  reject_unknown(j, {"name", "synthetic", "csv", "label_column", "categories", "num_classes"}, "dataset");
  DatasetSource src;
  src.name = get_or<std::string>(j, "name", "");
  if (src.name.empty()) throw Error(ErrorKind::config_error, "dataset needs a name");
  if (j.contains("synthetic") == j.contains("csv"))
    throw Error(ErrorKind::config_error, "dataset '" + src.name + "' needs exactly one of 'synthetic' or 'csv'");
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    reject_unknown(s, {"n_samples", "n_features", "num_classes", "noise_sd", "proportions", "seed"}, "synthetic");
    SynthConfig cfg;
    cfg.n_samples = get_or(s, "n_samples", cfg.n_samples);
    cfg.n_features = get_or(s, "n_features", cfg.n_features);
    cfg.num_classes = get_or(s, "num_classes", cfg.num_classes);
    cfg.noise_sd = get_or(s, "noise_sd", cfg.noise_sd);
    cfg.proportions = get_or(s, "proportions", cfg.proportions);
    cfg.seed = get_or(s, "seed", cfg.seed);
    src.synthetic = cfg;
  } else {
    std::filesystem::path path = get_or<std::string>(j, "csv", "");
    src.csv = path.is_relative() && !base_dir.empty() ? base_dir / path : path;
    src.csv_options.label_column = get_or<std::string>(j, "label_column", "");
    src.csv_options.categories = get_or(j, "categories", std::vector<std::string>{});
    if (j.contains("num_classes")) src.csv_options.num_classes = get_or(j, "num_classes", 0);
  }
  return src;
}

EstimatorConfig parse_estimator(const json& j) {
  if (j.is_string()) return registry_entry(j.get<std::string>());
  if (!j.is_object()) throw Error(ErrorKind::config_error, "estimator entries must be names or objects");
  reject_unknown(j, {"method", "grid", "hyperparameters"}, "estimator");
  EstimatorConfig est = registry_entry(get_or<std::string>(j, "method", ""));
  if (j.contains("hyperparameters")) {
    for (const auto& [key, value] : j.at("hyperparameters").items()) {
      if (!est.declares(key) && key != "concentration")
        throw Error(ErrorKind::config_error, "'" + est.method + "' has no hyperparameter '" + key + "'");
      if (!value.is_number()) throw Error(ErrorKind::config_error, "hyperparameter '" + key + "' must be a number");
      est.hyperparameters[key] = value.get<double>();
      std::erase_if(est.grid, [&](const auto& entry) { return entry.first == key; });
    }
  }
  if (j.contains("grid")) {
    for (const auto& [key, values] : j.at("grid").items()) {
      const auto it = std::find_if(est.grid.begin(), est.grid.end(), [&](const auto& e) { return e.first == key; });
      if (it == est.grid.end())
        throw Error(ErrorKind::config_error, "'" + est.method + "' has no grid over '" + key + "'");
      if (!values.is_array() || values.empty())
        throw Error(ErrorKind::config_error, "grid '" + key + "' must be a non-empty array");
      it->second = values.get<std::vector<double>>();
    }
  }
  if (est.grid.empty()) {
    // Everything pinned: a single configuration.
    est.grid.push_back({"learning_rate", {param(est.hyperparameters, "learning_rate")}});
  }
  return est;
}

ProtocolConfig parse_protocol(const json& j) {
  reject_unknown(j,
                 {"seeds", "num_seeds", "budget", "test_fraction", "validation_fraction", "batch_size", "max_epochs",
                  "patience", "optimizer", "hidden_dims", "activation", "link", "dropout_rate", "dropout_mix",
                  "dropout_min_batch", "beta_concentration"},
                 "protocol");
  ProtocolConfig p;
  if (j.contains("seeds") && j.contains("num_seeds"))
    throw Error(ErrorKind::config_error, "give either 'seeds' or 'num_seeds', not both");
  if (j.contains("seeds")) p.seeds = get_or(j, "seeds", p.seeds);
  if (j.contains("num_seeds")) {
    const int n = get_or(j, "num_seeds", 1);
    if (n < 1) throw Error(ErrorKind::config_error, "num_seeds must be positive");
    p.seeds.clear();
    for (int s = 0; s < n; ++s) p.seeds.push_back(static_cast<std::uint64_t>(s));
  }
  if (p.seeds.empty()) throw Error(ErrorKind::config_error, "no seeds");
  p.budget = get_or(j, "budget", p.budget);
  p.test_fraction = get_or(j, "test_fraction", p.test_fraction);
  p.validation_fraction = get_or(j, "validation_fraction", p.validation_fraction);
  p.trainer.batch_size = get_or(j, "batch_size", p.trainer.batch_size);
  p.trainer.max_epochs = get_or(j, "max_epochs", p.trainer.max_epochs);
  p.trainer.patience = get_or(j, "patience", p.trainer.patience);
  p.hidden_dims = get_or(j, "hidden_dims", p.hidden_dims);
  p.dropout.base_rate = get_or(j, "dropout_rate", p.dropout.base_rate);
  p.dropout.mix = get_or(j, "dropout_mix", p.dropout.mix);
  p.dropout.min_batch = get_or(j, "dropout_min_batch", p.dropout.min_batch);
  p.beta_concentration = get_or(j, "beta_concentration", p.beta_concentration);
  try {
    p.trainer.optimizer = parse_optimizer(get_or<std::string>(j, "optimizer", "adam"));
    p.activation = parse_activation(get_or<std::string>(j, "activation", "relu"));
    p.link = parse_link(get_or<std::string>(j, "link", "logit"));
    p.trainer.validate();
    p.dropout.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config_error, e.what());
  }
  if (p.budget < 1) throw Error(ErrorKind::config_error, "budget must be at least 1");
  for (double f : {p.test_fraction, p.validation_fraction})
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::config_error, "split fractions must lie in (0, 1)");
  return p;
}

}  // namespace

BenchmarkConfig parse_benchmark_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config_error, std::string("malformed config: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorKind::config_error, "config must be a JSON object");
  reject_unknown(root, {"datasets", "estimators", "protocol"}, "config");

  BenchmarkConfig cfg;
  if (!root.contains("datasets") || !root.at("datasets").is_array() || root.at("datasets").empty())
    throw Error(ErrorKind::config_error, "config needs a non-empty 'datasets' array");
  for (const auto& d : root.at("datasets")) cfg.datasets.push_back(parse_dataset(d, base_dir));

  const json estimators = root.contains("estimators") ? root.at("estimators") : json("all");
  if (estimators.is_string() && estimators.get<std::string>() == "all") {
    cfg.estimators = registry();
  } else if (estimators.is_array() && !estimators.empty()) {
    for (const auto& e : estimators) cfg.estimators.push_back(parse_estimator(e));
  } else {
    throw Error(ErrorKind::config_error, "'estimators' must be \"all\" or a non-empty array");
  }
  cfg.protocol = root.contains("protocol") ? parse_protocol(root.at("protocol")) : ProtocolConfig{};
  return cfg;
}

BenchmarkConfig load_benchmark_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config_error, "cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_benchmark_config(buffer.str(), path.parent_path());
}

// ---------------------------------------------------------------------------
// Sweep

RunRecord run_cell(const Dataset& data, const std::string& dataset_name, const EstimatorConfig& estimator,
                   std::uint64_t seed, const ProtocolConfig& protocol) {
  RunRecord rec;
  rec.dataset = dataset_name;
  rec.estimator = estimator.method;
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    // Splits depend only on the seed, so every method sees the same partitions.
    auto [rest, test] = stratified_split(data, protocol.test_fraction, mix_seed(seed, kSplitSalt));
    auto [train, validation] = stratified_split(rest, protocol.validation_fraction, mix_seed(seed, kValidationSalt));
    const std::vector<Dataset> others{validation, test};
    auto scaled = standardize(train, others);

    const auto search = random_search(estimator, scaled[0], scaled[1], protocol.budget, seed, protocol);
    const ProbMatrix probs = predict_proba(search.model, scaled[2].X);
    const EvalInput eval = EvalInput::from_probs(scaled[2].y, probs);
    rec.qwk = qwk(eval);
    rec.mae = mae(eval);
    rec.ccr = ccr(eval);
    rec.one_off = one_off(eval);
    rec.amae = amae(eval).value;
    rec.mmae = mmae(eval).value;
    rec.rps = rps(eval);
    try {
      rec.gmsec = gmsec(eval);
    } catch (const Error&) {
      rec.gmsec.reset();
    }

    Labels sorted = train.y;
    std::sort(sorted.begin(), sorted.end());
    const int median = sorted[(sorted.size() - 1) / 2];
    const EvalInput baseline =
        EvalInput::from_labels(test.y, Labels(test.size(), median), data.num_classes);
    rec.baseline_mae = mae(baseline);
    rec.chosen_hyperparameters = search.chosen;
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  rec.time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config, int jobs, const ProgressFn& progress) {
  std::vector<Dataset> datasets;
  for (const auto& src : config.datasets) {
    datasets.push_back(src.load());
    datasets.back().validate();
  }

  struct Cell {
    std::size_t dataset;
    std::size_t estimator;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t e = 0; e < config.estimators.size(); ++e)
      for (auto seed : config.protocol.seeds) cells.push_back({d, e, seed});

  BenchmarkResult result;
  result.runs.resize(cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const Cell& c = cells[i];
      result.runs[i] = run_cell(datasets[c.dataset], config.datasets[c.dataset].name, config.estimators[c.estimator],
                                c.seed, config.protocol);
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(result.runs[i]);
      }
    }
  };

  const auto threads = static_cast<std::size_t>(std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1))));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  result.summary = aggregate(result.runs);
  return result;
}

std::vector<SummaryRow> aggregate(const std::vector<RunRecord>& runs) {
  std::vector<SummaryRow> rows;
  auto find_row = [&](const RunRecord& r) -> SummaryRow& {
    for (auto& row : rows)
      if (row.dataset == r.dataset && row.estimator == r.estimator) return row;
    rows.push_back({r.dataset, r.estimator});
    return rows.back();
  };
  for (const auto& r : runs) {
    auto& row = find_row(r);
    (r.ok ? row.completed : row.failed) += 1;
  }

  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    sd = 0.0;
    if (v.empty()) {
      mean = sd = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    if (v.size() < 2) return;
    for (double x : v) sd += (x - mean) * (x - mean);
    sd = std::sqrt(sd / static_cast<double>(v.size() - 1));
  };

  for (auto& row : rows) {
    std::vector<double> q, m, c, t;
    for (const auto& r : runs) {
      if (!r.ok || r.dataset != row.dataset || r.estimator != row.estimator) continue;
      q.push_back(r.qwk);
      m.push_back(r.mae);
      c.push_back(r.ccr);
      t.push_back(r.time_seconds);
    }
    stats(q, row.qwk_mean, row.qwk_sd);
    stats(m, row.mae_mean, row.mae_sd);
    stats(c, row.ccr_mean, row.ccr_sd);
    stats(t, row.time_mean, row.time_sd);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string real17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_text(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

std::string format_hyperparameters(const Hyperparameters& hyperparameters) {
  std::string out;
  char buf[40];
  for (const auto& [k, v] : hyperparameters) {
    std::snprintf(buf, sizeof buf, "%g", v);
    out += (out.empty() ? "" : ";") + k + "=" + buf;
  }
  return out;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRecord>& runs) {
  out << "dataset,estimator,seed,status,qwk,mae,ccr,one_off,amae,mmae,rps,gmsec,baseline_mae,time_seconds,"
         "hyperparameters,error\n";
  for (const auto& r : runs) {
    out << r.dataset << ',' << r.estimator << ',' << r.seed << ',' << (r.ok ? "ok" : "error") << ',';
    if (r.ok) {
      for (double v : {r.qwk, r.mae, r.ccr, r.one_off, r.amae, r.mmae, r.rps}) out << real17(v) << ',';
      out << (r.gmsec ? real17(*r.gmsec) : "") << ',' << real17(r.baseline_mae) << ',';
    } else {
      out << ",,,,,,,,,";
    }
    out << real17(r.time_seconds) << ',' << format_hyperparameters(r.chosen_hyperparameters) << ','
        << (r.error.empty() ? "" : csv_text(r.error)) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& summary) {
  out << "dataset,estimator,qwk_mean,qwk_sd,mae_mean,mae_sd,ccr_mean,ccr_sd,time_mean,time_sd\n";
  for (const auto& s : summary) {
    out << s.dataset << ',' << s.estimator;
    for (double v : {s.qwk_mean, s.qwk_sd, s.mae_mean, s.mae_sd, s.ccr_mean, s.ccr_sd, s.time_mean, s.time_sd})
      out << ',' << real17(v);
    out << '\n';
  }
}

void write_summary_md(std::ostream& out, const std::vector<SummaryRow>& summary) {
  auto cell = [](double mean, double sd, const char* fmt) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, mean, sd);
    return std::string(buf);
  };
  out << "| Dataset | Estimator | QWK | MAE | CCR | Time (s) | Runs | Failed |\n";
  out << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : summary) {
    out << "| " << s.dataset << " | " << s.estimator << " | " << cell(s.qwk_mean, s.qwk_sd, "%.3f (%.3f)") << " | "
        << cell(s.mae_mean, s.mae_sd, "%.3f (%.3f)") << " | " << cell(s.ccr_mean, s.ccr_sd, "%.3f (%.3f)") << " | "
        << cell(s.time_mean, s.time_sd, "%.2f (%.2f)") << " | " << s.completed << " | " << s.failed << " |\n";
  }
  out << "\nValues are mean (SD) over seeds; failed runs are excluded.\n";
}

void write_outputs(const std::filesystem::path& dir, const BenchmarkResult& result, const BenchmarkConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io_error, "cannot create " + dir.string() + ": " + ec.message());

  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw Error(ErrorKind::io_error, "cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("runs.csv");
    write_runs_csv(out, result.runs);
  }
  {
    auto out = open("summary.csv");
    write_summary_csv(out, result.summary);
  }
  {
    auto out = open("summary.md");
    write_summary_md(out, result.summary);
  }

  const auto& p = config.protocol;
  std::size_t failed = 0;
  for (const auto& r : result.runs) failed += !r.ok;
  json meta = {
      {"protocol",
       {{"seeds", p.seeds},
        {"budget", p.budget},
        {"test_fraction", p.test_fraction},
        {"validation_fraction", p.validation_fraction},
        {"batch_size", p.trainer.batch_size},
        {"max_epochs", p.trainer.max_epochs},
        {"patience", p.trainer.patience},
        {"optimizer", to_string(p.trainer.optimizer)},
        {"hidden_dims", p.hidden_dims},
        {"activation", to_string(p.activation)},
        {"link", to_string(p.link)},
        {"dropout_rate", p.dropout.base_rate},
        {"dropout_mix", p.dropout.mix},
        {"beta_concentration", p.beta_concentration}}},
      {"model_selection",
       {{"strategy", "held-out stratified validation split (no inner k-fold cross-validation)"},
        {"criterion", "each estimator's own training loss evaluated on the validation split"},
        {"final_model", "the winning search fit, which a deterministic refit would reproduce"}}},
      {"runs", result.runs.size()},
      {"failed_runs", failed},
  };
  auto out = open("metadata.json");
  out << meta.dump(2) << '\n';
}

}  // namespace ordinal
