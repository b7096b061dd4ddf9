// Benchmark harness behind the CLI: experiment configuration, the
// normalize / choose-templates / program / train / fold / evaluate pipeline,
// and the subcommand entry points that write report artifacts.
//
// Everything an experiment draws at random derives from one config seed
// through seed_plan, so a config fully determines its results files; runtime
// is reported on stdout only and never written to disk.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "memsvm/crossbar.hpp"
#include "memsvm/dataset.hpp"
#include "memsvm/device.hpp"
#include "memsvm/model.hpp"
#include "memsvm/serialize.hpp"

namespace memsvm {

/// Flat experiment description, loadable from a key=value file. `dataset` is
/// either a synthetic kind name or a CSV path; synthetic names win.
struct ExperimentConfig {
  std::string dataset;
  Index label_column = -1;      // -1: last CSV column
  std::string label_name;      // nonempty: select the label column by header name
  bool header = false;
  std::string binary_positive;  // nonempty: collapse labels to {rest, this}
  Index max_samples = 0;        // 0: keep every row; otherwise stratified cap

  double train_fraction = 0.7;
  bool stratified = true;

  DeviceParams<double> device{};
  ReadoutConfig readout{};
  Index num_templates = 10;
  TemplateSource template_source = TemplateSource::ladder_random;
  std::string template_file;

  double box = 1.0;  // SVM C, shared by both arms
  double tol = 1e-3;
  int max_passes = 2000;
  double gamma = 0;  // traditional rbf width; 0 picks 1/d

  std::vector<double> sigma_grid{0, 0.005, 0.01, 0.02, 0.05};
  int repeats = 5;

  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int num_seeds = 1;  // independent split/device draws averaged by run and compare
};

void validate(const ExperimentConfig& cfg);

/// Applies one key=value assignment; unknown keys and unparsable values
/// throw ConfigError. sigma_grid takes comma-separated values.
void apply_config_value(ExperimentConfig& cfg, const std::string& key,
                        const std::string& value);

/// Flat key=value file, '#' comment lines and blank lines allowed.
[[nodiscard]] ExperimentConfig load_config(const std::string& path);

/// Dataset label used in report records: the synthetic kind name or the file
/// stem, with whitespace flattened to '_'.
[[nodiscard]] std::string dataset_name(const ExperimentConfig& cfg);

/// Every random draw of run `index` under one config seed. Repeat runs share
/// nothing; the noise sweep reuses run 0's split and templates and takes only
/// device seeds from later runs.
struct SeedPlan {
  std::uint64_t split = 0;
  std::uint64_t templates = 0;
  std::uint64_t program = 0;
  std::uint64_t train_read = 0;
  std::uint64_t test_read = 0;
};

[[nodiscard]] SeedPlan seed_plan(std::uint64_t seed, int index);

/// One pipeline execution: dataset x method x seed index.
struct RunRecord {
  std::string dataset;
  std::string method;  // "template" or "traditional"
  int seed_index = 0;
  double complexity = 0;      // templates stored, or distinct support vectors
  double train_accuracy = 0;  // percent
  double test_accuracy = 0;   // percent
  double energy_j = 0;        // crossbar programming energy; 0 for traditional
};

/// Aggregate over a method's seed runs (sample stddev; 0 for a single run).
struct BenchSummary {
  std::string dataset;
  std::string method;
  int runs = 0;
  double complexity = 0;
  double mean_train = 0;
  double mean_test = 0;
  double stddev_test = 0;
  double mean_energy_j = 0;
};

struct BenchReport {
  std::vector<RunRecord> records;
  std::vector<BenchSummary> summaries;
  double runtime_seconds = 0;  // stdout only, never serialized
};

[[nodiscard]] BenchSummary summarize(const std::vector<RunRecord>& records,
                                     const std::string& dataset, const std::string& method);

/// Human-readable table of a report's summaries.
[[nodiscard]] std::string format_table(const BenchReport& report);

[[nodiscard]] double accuracy_percent(const VectorXi& predicted, const VectorXi& truth);

/// Raw rows ready for splitting: CSV load or synthetic generation, then the
/// optional binary collapse and stratified cap. Stage name "load" on errors.
[[nodiscard]] Dataset load_experiment_data(const ExperimentConfig& cfg);

/// Stratified split under plan.split, then min-max normalization fitted on
/// train and applied with clamping to test.
struct PreparedData {
  Dataset train;
  Dataset test;
};

[[nodiscard]] PreparedData prepare_splits(const ExperimentConfig& cfg, const Dataset& full,
                                          const SeedPlan& plan);

/// The full template-SVM flow for one seed: choose templates, program the
/// crossbar, read training features, train and fold per class, evaluate train
/// through the training reads and test through fresh reads.
struct PipelineResult {
  ModelArtifact artifact;
  CrossbarArray<double> xbar;
  RunRecord record;
  VectorXi support_counts;
};

[[nodiscard]] PipelineResult run_template_pipeline(const ExperimentConfig& cfg,
                                                   const PreparedData& data,
                                                   const SeedPlan& plan, int seed_index);

/// rbf-kernel one-vs-rest baseline on the same splits; complexity counts the
/// distinct training points acting as support vectors in any class row.
[[nodiscard]] RunRecord run_traditional_pipeline(const ExperimentConfig& cfg,
                                                 const PreparedData& data, int seed_index);

/// Template-SVM runs over num_seeds independent draws. Writes model.txt and
/// crossbar.txt for the first seed plus results.txt under out_dir.
BenchReport cmd_run(const ExperimentConfig& cfg);

/// Both arms on identical splits, same artifacts as cmd_run plus the
/// traditional records.
BenchReport cmd_compare(const ExperimentConfig& cfg);

/// Accuracy versus programming noise: for each sigma_grid value, `repeats`
/// re-programmings of run 0's templates under fresh device seeds, each
/// retrained on its own readout. Writes sweep.txt.
struct SweepRow {
  double sigma_program = 0;
  int repeats = 0;
  double mean_test = 0;
  double stddev_test = 0;
};

std::vector<SweepRow> cmd_sweep_noise(const ExperimentConfig& cfg);

/// Programming-energy report for a saved crossbar.txt under out_dir.
/// Writes energy.txt next to it.
struct EnergyReport {
  double total_j = 0;
  std::int64_t pulses_potentiation = 0;
  std::int64_t pulses_depression = 0;
  Index cells = 0;
  double mean_pulses_per_cell = 0;
};

EnergyReport cmd_energy(const ExperimentConfig& cfg);

/// Rectangular evaluation grid for plotting 2-feature decision regions.
struct RegionGrid {
  double x_min = 0;
  double x_max = 1;
  double y_min = 0;
  double y_max = 1;
  Index nx = 11;
  Index ny = 11;
};

/// (x, y, predicted class) triples, y-major with x varying fastest.
[[nodiscard]] MatrixXd decision_regions(const TemplateSvmModel<double>& model,
                                        const RegionGrid& grid);

/// Loads a saved model and writes regions.txt under out_dir.
MatrixXd cmd_regions(const std::string& model_path, const RegionGrid& grid,
                     const std::string& out_dir);

/// Generates a synthetic dataset and saves it as a labeled CSV.
Dataset cmd_gen_synthetic(const std::string& kind_name, std::uint64_t seed,
                          const std::string& out_path);

}  // namespace memsvm
