#include "memsvm/bench.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "memsvm/kernel.hpp"
#include "memsvm/rng.hpp"
#include "memsvm/solver.hpp"

namespace memsvm {

namespace {

// Per-purpose stream tags under one config seed.
constexpr std::uint64_t tag_split_seed = 0x5eed01;
constexpr std::uint64_t tag_template_seed = 0x5eed02;
constexpr std::uint64_t tag_program_seed = 0x5eed03;
constexpr std::uint64_t tag_train_read_seed = 0x5eed04;
constexpr std::uint64_t tag_test_read_seed = 0x5eed05;
constexpr std::uint64_t tag_subsample_seed = 0x5eed11;

/// Reruns f with the pipeline stage name prefixed onto any library error.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(std::string(name) + ": " + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string(name) + ": " + e.what());
  }
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw ConfigError("config: bad value '" + value + "' for " + key);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) bad_value(key, value);
    return v;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    bad_value(key, value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  bad_value(key, value);
}

std::vector<double> parse_grid(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::string token;
  std::istringstream ss(value);
  while (std::getline(ss, token, ',')) out.push_back(parse_double(key, trimmed(token)));
  if (out.empty() || value.back() == ',') bad_value(key, value);
  return out;
}

void ensure_out_dir(const std::string& dir) {
  if (dir.empty()) throw ConfigError("config: out_dir is required");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError("config: cannot create out_dir '" + dir + "': " + ec.message());
}

std::ofstream open_report(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("report: cannot write " + path);
  f << std::setprecision(17);
  return f;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Label per score row under the model conventions: binary sign with ties to
/// class 0, otherwise first-max argmax.
VectorXi labels_from_scores(const MatrixXd& scores) {
  VectorXi out(scores.rows());
  for (Index i = 0; i < scores.rows(); ++i) {
    if (scores.cols() == 1) {
      out(i) = scores(i, 0) > 0 ? 1 : 0;
      continue;
    }
    Index best = 0;
    for (Index r = 1; r < scores.cols(); ++r)
      if (scores(i, r) > scores(i, best)) best = r;
    out(i) = int(best);
  }
  return out;
}

/// Mean anchored at the first value, so identical inputs average to
/// themselves bit for bit (the noiseless sweep row relies on this).
double shifted_mean(const std::vector<double>& v) {
  double delta = 0;
  for (double x : v) delta += x - v.front();
  return v.front() + delta / double(v.size());
}

double sample_stddev(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / double(v.size() - 1));
}

void write_results(const std::string& path, const BenchReport& report) {
  auto f = open_report(path);
  f << "memsvm-results 1\n";
  for (const auto& r : report.records)
    f << "record dataset=" << r.dataset << " method=" << r.method
      << " seed_index=" << r.seed_index << " complexity=" << r.complexity
      << " train_accuracy=" << r.train_accuracy << " test_accuracy=" << r.test_accuracy
      << " energy_j=" << r.energy_j << "\n";
  for (const auto& s : report.summaries)
    f << "summary dataset=" << s.dataset << " method=" << s.method << " runs=" << s.runs
      << " complexity=" << s.complexity << " mean_train=" << s.mean_train
      << " mean_test=" << s.mean_test << " stddev_test=" << s.stddev_test
      << " mean_energy_j=" << s.mean_energy_j << "\n";
  f << "end\n";
  if (!f) throw DataError("report: write failed for " + path);
}

void save_first_seed_artifacts(const ExperimentConfig& cfg, const PipelineResult& res) {
  stage("write", [&] {
    save_model(res.artifact, cfg.out_dir + "/model.txt");
    save_crossbar(res.xbar, cfg.out_dir + "/crossbar.txt");
  });
}

}  // namespace

void apply_config_value(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value) {
  if (key == "dataset") cfg.dataset = value;
  else if (key == "label_column") cfg.label_column = Index(parse_int(key, value));
  else if (key == "label_name") cfg.label_name = value;
  else if (key == "header") cfg.header = parse_bool(key, value);
  else if (key == "binary_positive") cfg.binary_positive = value;
  else if (key == "max_samples") cfg.max_samples = Index(parse_int(key, value));
  else if (key == "train_fraction") cfg.train_fraction = parse_double(key, value);
  else if (key == "stratified") cfg.stratified = parse_bool(key, value);
  else if (key == "num_states") cfg.device.num_states = int(parse_int(key, value));
  else if (key == "g_min") cfg.device.g_min = parse_double(key, value);
  else if (key == "g_max") cfg.device.g_max = parse_double(key, value);
  else if (key == "ladder_shape") cfg.device.ladder_shape = ladder_shape_from_name(value);
  else if (key == "e_potentiation") cfg.device.e_potentiation = parse_double(key, value);
  else if (key == "e_depression") cfg.device.e_depression = parse_double(key, value);
  else if (key == "sigma_program") cfg.device.sigma_program = parse_double(key, value);
  else if (key == "sigma_read") cfg.device.sigma_read = parse_double(key, value);
  else if (key == "noise_enabled") cfg.readout.noise_enabled = parse_bool(key, value);
  else if (key == "absolute_value") cfg.readout.absolute_value = parse_bool(key, value);
  else if (key == "num_templates") cfg.num_templates = Index(parse_int(key, value));
  else if (key == "template_source") cfg.template_source = template_source_from_name(value);
  else if (key == "template_file") cfg.template_file = value;
  else if (key == "box") cfg.box = parse_double(key, value);
  else if (key == "tol") cfg.tol = parse_double(key, value);
  else if (key == "max_passes") cfg.max_passes = int(parse_int(key, value));
  else if (key == "gamma") cfg.gamma = parse_double(key, value);
  else if (key == "sigma_grid") cfg.sigma_grid = parse_grid(key, value);
  else if (key == "repeats") cfg.repeats = int(parse_int(key, value));
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "seed") cfg.seed = parse_seed(key, value);
  else if (key == "num_seeds") cfg.num_seeds = int(parse_int(key, value));
  else throw ConfigError("config: unknown key '" + key + "'");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string text = trimmed(line);
    if (text.empty() || text[0] == '#') continue;
    std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: " + path + " line " + std::to_string(lineno) +
                        " has no '='");
    apply_config_value(cfg, trimmed(text.substr(0, eq)), trimmed(text.substr(eq + 1)));
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.dataset.empty()) throw ConfigError("config: dataset is required");
  if (!synthetic_kind_from_name(cfg.dataset) && !std::filesystem::exists(cfg.dataset))
    throw ConfigError("config: dataset '" + cfg.dataset +
                      "' is neither a synthetic kind nor an existing file");
  if (cfg.max_samples < 0) throw ConfigError("config: max_samples must be non-negative");
  if (!(cfg.train_fraction > 0 && cfg.train_fraction < 1))
    throw ConfigError("config: train_fraction must lie in (0, 1)");
  validate(cfg.device);
  if (cfg.num_templates < 1) throw ConfigError("config: num_templates must be at least 1");
  if (cfg.template_source == TemplateSource::file) {
    if (cfg.template_file.empty())
      throw ConfigError("config: template_source=file needs template_file");
    if (!std::filesystem::exists(cfg.template_file))
      throw ConfigError("config: template_file '" + cfg.template_file + "' does not exist");
  }
  if (!(cfg.box > 0)) throw ConfigError("config: box must be positive");
  if (!(cfg.tol > 0)) throw ConfigError("config: tol must be positive");
  if (cfg.max_passes < 1) throw ConfigError("config: max_passes must be at least 1");
  if (cfg.gamma < 0) throw ConfigError("config: gamma must be non-negative");
  for (double s : cfg.sigma_grid)
    if (s < 0) throw ConfigError("config: sigma_grid values must be non-negative");
  if (cfg.repeats < 1) throw ConfigError("config: repeats must be at least 1");
  if (cfg.out_dir.empty()) throw ConfigError("config: out_dir is required");
  if (cfg.num_seeds < 1) throw ConfigError("config: num_seeds must be at least 1");
}

std::string dataset_name(const ExperimentConfig& cfg) {
  std::string name = synthetic_kind_from_name(cfg.dataset)
                         ? cfg.dataset
                         : std::filesystem::path(cfg.dataset).stem().string();
  for (char& ch : name)
    if (std::isspace(static_cast<unsigned char>(ch))) ch = '_';
  return name;
}

SeedPlan seed_plan(std::uint64_t seed, int index) {
  const auto run = std::uint64_t(index);
  SeedPlan plan;
  plan.split = mix_seed(seed, tag_split_seed, run);
  plan.templates = mix_seed(seed, tag_template_seed, run);
  plan.program = mix_seed(seed, tag_program_seed, run);
  plan.train_read = mix_seed(seed, tag_train_read_seed, run);
  plan.test_read = mix_seed(seed, tag_test_read_seed, run);
  return plan;
}

double accuracy_percent(const VectorXi& predicted, const VectorXi& truth) {
  if (predicted.size() != truth.size())
    throw ConfigError("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                      std::to_string(truth.size()) + " labels");
  if (truth.size() == 0) throw ConfigError("accuracy: empty label vector");
  return 100.0 * double((predicted.array() == truth.array()).count()) / double(truth.size());
}

Dataset load_experiment_data(const ExperimentConfig& cfg) {
  return stage("load", [&] {
    validate(cfg);
    Dataset ds;
    if (auto kind = synthetic_kind_from_name(cfg.dataset)) {
      ds = gen_synthetic(*kind, cfg.seed);
    } else if (!cfg.label_name.empty()) {
      ds = load_csv_named_label(cfg.dataset, cfg.label_name);
    } else {
      ds = load_csv(cfg.dataset, cfg.label_column, cfg.header);
    }
    if (!cfg.binary_positive.empty()) ds = to_binary(ds, cfg.binary_positive);
    if (cfg.max_samples > 0)
      ds = subsample_stratified(ds, cfg.max_samples, mix_seed(cfg.seed, tag_subsample_seed));
    return ds;
  });
}

PreparedData prepare_splits(const ExperimentConfig& cfg, const Dataset& full,
                            const SeedPlan& plan) {
  auto parts = stage("split", [&] {
    SplitSpec spec;
    spec.train_fraction = cfg.train_fraction;
    spec.stratified = cfg.stratified;
    spec.seed = plan.split;
    return split(full, spec);
  });
  return stage("normalize", [&] {
    PreparedData out{normalize(parts.first), Dataset{}};
    out.test = apply_normalization(parts.second, out.train.norm);
    return out;
  });
}

PipelineResult run_template_pipeline(const ExperimentConfig& cfg, const PreparedData& data,
                                     const SeedPlan& plan, int seed_index) {
  MatrixXd templates = stage("templates", [&] {
    return choose_templates(cfg.device, data.train.X.cols(), cfg.num_templates, plan.templates,
                            cfg.template_source, data.train.X, cfg.template_file);
  });
  CrossbarArray<double> xbar =
      stage("program", [&] { return program(templates, cfg.device, plan.program); });
  MatrixXd phi_train = stage("features", [&] {
    return phi_features(data.train.X, xbar, cfg.readout, plan.train_read);
  });
  auto training = stage("train", [&] {
    auto out =
        train_multiclass_with_phi(phi_train, data.train.y, data.train.c, xbar.memductance(),
                                  cfg.readout, cfg.box, cfg.tol, cfg.max_passes);
    if (!out.converged)
      throw ConvergenceError("dual solver hit the pass limit (max_passes = " +
                             std::to_string(cfg.max_passes) + ")");
    return out;
  });
  return stage("evaluate", [&] {
    MatrixXd phi_test = phi_features(data.test.X, xbar, cfg.readout, plan.test_read);
    RunRecord rec;
    rec.dataset = dataset_name(cfg);
    rec.method = "template";
    rec.seed_index = seed_index;
    rec.complexity = double(cfg.num_templates);
    rec.train_accuracy =
        accuracy_percent(classify_with_phi(training.model, phi_train), data.train.y);
    rec.test_accuracy =
        accuracy_percent(classify_with_phi(training.model, phi_test), data.test.y);
    rec.energy_j = xbar.energy();
    return PipelineResult{
        ModelArtifact{training.model, data.train.norm, data.train.label_names},
        std::move(xbar), rec, training.support_counts};
  });
}

RunRecord run_traditional_pipeline(const ExperimentConfig& cfg, const PreparedData& data,
                                   int seed_index) {
  return stage("baseline", [&] {
    const Index n = data.train.X.rows();
    const Index c = data.train.c;
    const double gamma = cfg.gamma > 0 ? cfg.gamma : 1.0 / double(data.train.X.cols());
    MatrixXd k_train = rbf_kernel(data.train.X, data.train.X, gamma);
    MatrixXd k_test = rbf_kernel(data.test.X, data.train.X, gamma);

    const Index rows = c == 2 ? 1 : c;
    MatrixXd train_scores(n, rows);
    MatrixXd test_scores(k_test.rows(), rows);
    std::vector<bool> used(std::size_t(n), false);
    for (Index r = 0; r < rows; ++r) {
      const int target = c == 2 ? 1 : int(r);
      VectorXd y_pm(n);
      for (Index i = 0; i < n; ++i) y_pm(i) = data.train.y(i) == target ? 1.0 : -1.0;
      auto dual = train_dual(k_train, y_pm, cfg.box, cfg.tol, cfg.max_passes);
      if (!dual.converged)
        throw ConvergenceError("dual solver hit the pass limit (max_passes = " +
                               std::to_string(cfg.max_passes) + ")");
      VectorXd coeff = dual.alphas.cwiseProduct(y_pm);
      train_scores.col(r) = (k_train * coeff).array() + dual.bias;
      test_scores.col(r) = (k_test * coeff).array() + dual.bias;
      for (Index i = 0; i < n; ++i)
        if (dual.alphas(i) > 1e-12 * cfg.box) used[std::size_t(i)] = true;
    }

    RunRecord rec;
    rec.dataset = dataset_name(cfg);
    rec.method = "traditional";
    rec.seed_index = seed_index;
    rec.complexity = double(std::count(used.begin(), used.end(), true));
    rec.train_accuracy = accuracy_percent(labels_from_scores(train_scores), data.train.y);
    rec.test_accuracy = accuracy_percent(labels_from_scores(test_scores), data.test.y);
    return rec;
  });
}

BenchSummary summarize(const std::vector<RunRecord>& records, const std::string& dataset,
                       const std::string& method) {
  BenchSummary s;
  s.dataset = dataset;
  s.method = method;
  std::vector<double> test, train, complexity, energy;
  for (const auto& r : records) {
    if (r.dataset != dataset || r.method != method) continue;
    test.push_back(r.test_accuracy);
    train.push_back(r.train_accuracy);
    complexity.push_back(r.complexity);
    energy.push_back(r.energy_j);
  }
  s.runs = int(test.size());
  if (test.empty()) return s;
  s.mean_test = shifted_mean(test);
  s.mean_train = shifted_mean(train);
  s.complexity = shifted_mean(complexity);
  s.mean_energy_j = shifted_mean(energy);
  s.stddev_test = sample_stddev(test, s.mean_test);
  return s;
}

std::string format_table(const BenchReport& report) {
  std::ostringstream out;
  out << std::left << std::setw(22) << "dataset" << std::setw(13) << "method" << std::right
      << std::setw(11) << "complexity" << std::setw(10) << "train%" << std::setw(10) << "test%"
      << std::setw(9) << "+/-" << std::setw(13) << "energy(J)" << "\n";
  for (const auto& s : report.summaries) {
    out << std::left << std::setw(22) << s.dataset << std::setw(13) << s.method << std::right
        << std::fixed << std::setprecision(1) << std::setw(11) << s.complexity
        << std::setprecision(2) << std::setw(10) << s.mean_train << std::setw(10) << s.mean_test
        << std::setw(9) << s.stddev_test << std::scientific << std::setprecision(2)
        << std::setw(13) << s.mean_energy_j << "\n";
    out.unsetf(std::ios::floatfield);
  }
  return out.str();
}

BenchReport cmd_run(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(cfg);
  ensure_out_dir(cfg.out_dir);
  const Dataset full = load_experiment_data(cfg);

  BenchReport report;
  for (int i = 0; i < cfg.num_seeds; ++i) {
    const SeedPlan plan = seed_plan(cfg.seed, i);
    PreparedData data = prepare_splits(cfg, full, plan);
    PipelineResult res = run_template_pipeline(cfg, data, plan, i);
    if (i == 0) save_first_seed_artifacts(cfg, res);
    report.records.push_back(res.record);
  }
  report.summaries.push_back(summarize(report.records, dataset_name(cfg), "template"));
  stage("write", [&] { write_results(cfg.out_dir + "/results.txt", report); });
  report.runtime_seconds = seconds_since(t0);
  return report;
}

BenchReport cmd_compare(const ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(cfg);
  ensure_out_dir(cfg.out_dir);
  const Dataset full = load_experiment_data(cfg);

  std::vector<RunRecord> traditional;
  std::vector<RunRecord> templated;
  for (int i = 0; i < cfg.num_seeds; ++i) {
    const SeedPlan plan = seed_plan(cfg.seed, i);
    PreparedData data = prepare_splits(cfg, full, plan);
    traditional.push_back(run_traditional_pipeline(cfg, data, i));
    PipelineResult res = run_template_pipeline(cfg, data, plan, i);
    if (i == 0) save_first_seed_artifacts(cfg, res);
    templated.push_back(res.record);
  }

  BenchReport report;
  report.records = std::move(traditional);
  report.records.insert(report.records.end(), templated.begin(), templated.end());
  report.summaries.push_back(summarize(report.records, dataset_name(cfg), "traditional"));
  report.summaries.push_back(summarize(report.records, dataset_name(cfg), "template"));
  stage("write", [&] { write_results(cfg.out_dir + "/results.txt", report); });
  report.runtime_seconds = seconds_since(t0);
  return report;
}

std::vector<SweepRow> cmd_sweep_noise(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.sigma_grid.empty())
    throw ConfigError("config: sigma_grid needs at least one value");
  ensure_out_dir(cfg.out_dir);
  const Dataset full = load_experiment_data(cfg);
  const SeedPlan base = seed_plan(cfg.seed, 0);
  const PreparedData data = prepare_splits(cfg, full, base);

  std::vector<SweepRow> rows;
  for (double sigma : cfg.sigma_grid) {
    ExperimentConfig noisy = cfg;
    noisy.device.sigma_program = sigma;
    std::vector<double> accuracies;
    for (int r = 0; r < cfg.repeats; ++r) {
      // Fresh device draws per repeat; the data split and the template
      // choice stay pinned to run 0 so only mismatch varies.
      const SeedPlan devices = seed_plan(cfg.seed, r);
      SeedPlan plan = base;
      plan.program = devices.program;
      plan.train_read = devices.train_read;
      plan.test_read = devices.test_read;
      accuracies.push_back(run_template_pipeline(noisy, data, plan, r).record.test_accuracy);
    }
    SweepRow row;
    row.sigma_program = sigma;
    row.repeats = cfg.repeats;
    row.mean_test = shifted_mean(accuracies);
    row.stddev_test = sample_stddev(accuracies, row.mean_test);
    rows.push_back(row);
  }

  stage("write", [&] {
    auto f = open_report(cfg.out_dir + "/sweep.txt");
    f << "# memsvm-sweep 1\n";
    f << "# dataset " << dataset_name(cfg) << ", " << cfg.repeats
      << " device draws per point\n";
    f << "# sigma_program mean_test_accuracy stddev_test_accuracy repeats\n";
    for (const auto& row : rows)
      f << row.sigma_program << " " << row.mean_test << " " << row.stddev_test << " "
        << row.repeats << "\n";
    if (!f) throw DataError("report: write failed for sweep.txt");
  });
  return rows;
}

EnergyReport cmd_energy(const ExperimentConfig& cfg) {
  if (cfg.out_dir.empty()) throw ConfigError("config: out_dir is required");
  const CrossbarArray<double> xbar = load_crossbar(cfg.out_dir + "/crossbar.txt");

  EnergyReport rep;
  rep.total_j = energy_of(xbar.pulse_log(), xbar.params());
  rep.pulses_potentiation = xbar.pulse_log().n_potentiation;
  rep.pulses_depression = xbar.pulse_log().n_depression;
  rep.cells = xbar.rows() * xbar.cols();
  rep.mean_pulses_per_cell =
      double(rep.pulses_potentiation + rep.pulses_depression) / double(rep.cells);

  stage("write", [&] {
    auto f = open_report(cfg.out_dir + "/energy.txt");
    f << "# memsvm-energy 1\n";
    f << "total_j " << rep.total_j << "\n";
    f << "pulses_potentiation " << rep.pulses_potentiation << "\n";
    f << "pulses_depression " << rep.pulses_depression << "\n";
    f << "cells " << rep.cells << "\n";
    f << "mean_pulses_per_cell " << rep.mean_pulses_per_cell << "\n";
    if (!f) throw DataError("report: write failed for energy.txt");
  });
  return rep;
}

MatrixXd decision_regions(const TemplateSvmModel<double>& model, const RegionGrid& grid) {
  model.validate();
  if (model.templates.rows() != 2)
    throw ConfigError("regions: model reads " + std::to_string(model.templates.rows()) +
                      " features, plotting needs exactly 2");
  if (grid.nx < 2 || grid.ny < 2)
    throw ConfigError("regions: grid needs at least 2 points per axis");
  if (!(grid.x_min < grid.x_max) || !(grid.y_min < grid.y_max))
    throw ConfigError("regions: grid bounds must be increasing");

  MatrixXd points(grid.nx * grid.ny, 2);
  Index row = 0;
  for (Index iy = 0; iy < grid.ny; ++iy)
    for (Index ix = 0; ix < grid.nx; ++ix, ++row) {
      points(row, 0) = grid.x_min + double(ix) * (grid.x_max - grid.x_min) / double(grid.nx - 1);
      points(row, 1) = grid.y_min + double(iy) * (grid.y_max - grid.y_min) / double(grid.ny - 1);
    }

  MatrixXd out(points.rows(), 3);
  out.leftCols(2) = points;
  out.col(2) = predict_rows(model, points).cast<double>();
  return out;
}

MatrixXd cmd_regions(const std::string& model_path, const RegionGrid& grid,
                     const std::string& out_dir) {
  const ModelArtifact art = load_model(model_path);
  MatrixXd cells = decision_regions(art.model, grid);
  ensure_out_dir(out_dir);
  stage("write", [&] {
    auto f = open_report(out_dir + "/regions.txt");
    f << "# memsvm-regions 1\n";
    f << "# x y class\n";
    for (Index i = 0; i < cells.rows(); ++i)
      f << cells(i, 0) << " " << cells(i, 1) << " " << int(cells(i, 2)) << "\n";
    if (!f) throw DataError("report: write failed for regions.txt");
  });
  return cells;
}

Dataset cmd_gen_synthetic(const std::string& kind_name, std::uint64_t seed,
                          const std::string& out_path) {
  auto kind = synthetic_kind_from_name(kind_name);
  if (!kind)
    throw ConfigError("config: unknown synthetic kind '" + kind_name +
                      "' (expected two_class_100x2, three_class_100x3, or nine_class_1000x9)");
  Dataset ds = gen_synthetic(*kind, seed);
  save_csv(ds, out_path);
  return ds;
}

}  // namespace memsvm
