// Command-line front end for the crossbar SVM experiments. Each subcommand
// mirrors one library operation; a flat key=value config file can supply any
// flag, and flags given explicitly win over file values.
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "memsvm/bench.hpp"
#include "memsvm/errors.hpp"

namespace {

// Every experiment flag is declared as a string and folded through the same
// key=value parser the config file uses, so wording, validation, and defaults
// live in exactly one place. Only flags the user actually passed are applied,
// which keeps config-file values for everything else.
struct ExperimentFlags {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> given;

  void attach(CLI::App& cmd) {
    cmd.add_option("--config", config_path,
                   "flat key=value config file; explicit flags override its values");
    const std::pair<const char*, const char*> keys[] = {
        {"dataset",
         "CSV path or synthetic kind (two_class_100x2, three_class_100x3, nine_class_1000x9)"},
        {"label_column", "label column index; -1 means the last column"},
        {"label_name", "label column name; requires header=true"},
        {"header", "true if the CSV starts with a header row"},
        {"binary_positive", "collapse labels to this-class-vs-rest before training"},
        {"max_samples", "stratified subsample cap; 0 keeps the full dataset"},
        {"train_fraction", "fraction of rows in the training split"},
        {"stratified", "keep class proportions equal across the split"},
        {"num_states", "conductance states per device"},
        {"g_min", "low end of the conductance range"},
        {"g_max", "high end of the conductance range"},
        {"ladder_shape", "state ladder shape: linear or exponential"},
        {"e_potentiation", "energy per potentiation pulse in joules"},
        {"e_depression", "energy per depression pulse in joules"},
        {"sigma_program", "programming offset stddev as a fraction of the range"},
        {"sigma_read", "read noise stddev as a fraction of the range"},
        {"noise_enabled", "apply read noise during inference"},
        {"absolute_value", "absolute-value readout nonlinearity"},
        {"num_templates", "number of template vectors"},
        {"template_source", "template policy: ladder_random, data_medoids, or file"},
        {"template_file", "template matrix file for template_source=file"},
        {"box", "soft-margin box constraint C"},
        {"tol", "solver KKT tolerance"},
        {"max_passes", "solver sweep budget before giving up"},
        {"gamma", "rbf width for the traditional baseline; 0 means 1/features"},
        {"sigma_grid", "comma-separated sigma_program values for sweep-noise"},
        {"repeats", "device draws per sweep point"},
        {"out_dir", "directory for reports and artifacts"},
        {"seed", "master seed; everything downstream derives from it"},
        {"num_seeds", "independent split seeds averaged per run"},
    };
    for (const auto& [key, help] : keys) {
      CLI::Option* opt = cmd.add_option("--" + std::string(key), values[key], help);
      given.emplace_back(key, opt);
    }
  }

  [[nodiscard]] memsvm::ExperimentConfig build() const {
    memsvm::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = memsvm::load_config(config_path);
    for (const auto& [key, opt] : given)
      if (opt->count() > 0) memsvm::apply_config_value(cfg, key, values.at(key));
    return cfg;
  }
};

void print_report(const memsvm::BenchReport& report, const std::string& out_dir) {
  std::cout << memsvm::format_table(report);
  std::cout << "runtime " << report.runtime_seconds << " s, artifacts in " << out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Template-vector SVM on a simulated memtransistor crossbar"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand(
      "run", "Train, fold, program, and evaluate the template pipeline");
  ExperimentFlags run_flags;
  run_flags.attach(*run);
  run->callback([&run_flags] {
    const memsvm::ExperimentConfig cfg = run_flags.build();
    print_report(memsvm::cmd_run(cfg), cfg.out_dir);
  });

  CLI::App* compare = app.add_subcommand(
      "compare", "Template pipeline and traditional rbf SVM on identical splits");
  ExperimentFlags compare_flags;
  compare_flags.attach(*compare);
  compare->callback([&compare_flags] {
    const memsvm::ExperimentConfig cfg = compare_flags.build();
    print_report(memsvm::cmd_compare(cfg), cfg.out_dir);
  });

  CLI::App* sweep = app.add_subcommand(
      "sweep-noise", "Accuracy vs programming mismatch over sigma_grid");
  ExperimentFlags sweep_flags;
  sweep_flags.attach(*sweep);
  sweep->callback([&sweep_flags] {
    const memsvm::ExperimentConfig cfg = sweep_flags.build();
    const std::vector<memsvm::SweepRow> rows = memsvm::cmd_sweep_noise(cfg);
    std::cout << std::setw(14) << "sigma_program" << std::setw(12) << "mean test%"
              << std::setw(10) << "+/-" << std::setw(9) << "repeats" << "\n";
    std::cout << std::fixed << std::setprecision(4);
    for (const memsvm::SweepRow& row : rows)
      std::cout << std::setw(14) << row.sigma_program << std::setw(12) << row.mean_test
                << std::setw(10) << row.stddev_test << std::setw(9) << row.repeats << "\n";
    std::cout.unsetf(std::ios::fixed);
    std::cout << "table written to " << cfg.out_dir << "/sweep.txt\n";
  });

  CLI::App* energy = app.add_subcommand(
      "energy", "Programming-energy report for a completed run's crossbar");
  ExperimentFlags energy_flags;
  energy_flags.attach(*energy);
  energy->callback([&energy_flags] {
    const memsvm::ExperimentConfig cfg = energy_flags.build();
    const memsvm::EnergyReport report = memsvm::cmd_energy(cfg);
    std::cout << "total " << report.total_j << " J over " << report.cells << " cells\n"
              << "potentiation pulses " << report.pulses_potentiation << "\n"
              << "depression pulses " << report.pulses_depression << "\n"
              << "mean pulses per cell " << report.mean_pulses_per_cell << "\n"
              << "report written to " << cfg.out_dir << "/energy.txt\n";
  });

  CLI::App* regions = app.add_subcommand(
      "regions", "Decision classes on a rectangular grid from a saved 2-d model");
  std::string model_path;
  std::string regions_out = ".";
  memsvm::RegionGrid grid;
  regions->add_option("--model", model_path, "model file written by run or compare")
      ->required();
  regions->add_option("--x_min", grid.x_min, "grid left edge");
  regions->add_option("--x_max", grid.x_max, "grid right edge");
  regions->add_option("--y_min", grid.y_min, "grid bottom edge");
  regions->add_option("--y_max", grid.y_max, "grid top edge");
  regions->add_option("--nx", grid.nx, "grid points along x");
  regions->add_option("--ny", grid.ny, "grid points along y");
  regions->add_option("--out_dir", regions_out, "directory for regions.txt");
  regions->callback([&] {
    const memsvm::MatrixXd points = memsvm::cmd_regions(model_path, grid, regions_out);
    std::cout << points.rows() << " grid points written to " << regions_out
              << "/regions.txt\n";
  });

  CLI::App* gen = app.add_subcommand("gen-synthetic", "Write a synthetic dataset as CSV");
  std::string kind;
  std::string gen_out;
  std::uint64_t gen_seed = 1;
  gen->add_option("kind", kind,
                  "two_class_100x2, three_class_100x3, or nine_class_1000x9")
      ->required();
  gen->add_option("--out", gen_out, "output CSV path")->required();
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->callback([&] {
    const memsvm::Dataset data = memsvm::cmd_gen_synthetic(kind, gen_seed, gen_out);
    std::cout << data.X.rows() << " rows, " << data.X.cols() << " features written to "
              << gen_out << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? memsvm::exit_ok : memsvm::exit_config;
  } catch (const memsvm::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return memsvm::exit_config;
  } catch (const memsvm::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return memsvm::exit_data;
  } catch (const memsvm::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return memsvm::exit_convergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return memsvm::exit_failure;
  }
  return memsvm::exit_ok;
}
