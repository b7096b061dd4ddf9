// Acceptance gate. Each criterion below is a self-contained check with its
// own runtime budget; the binary prints one [PASS]/[FAIL] line per criterion
// and exits nonzero if any selected criterion fails. Run with no arguments
// for all criteria, or pass names (C1 C4 ...) for a subset.
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "memsvm/bench.hpp"
#include "oracles.hpp"

#ifndef MEMSVM_REPO_DIR
#define MEMSVM_REPO_DIR "."
#endif

namespace {

using namespace memsvm;

std::string repo_path(const std::string& rel) {
  return std::string(MEMSVM_REPO_DIR) + "/" + rel;
}

// Work directories land under the system temp dir; leftovers from crashed
// runs are harmless and the OS reclaims them.
std::string fresh_dir(const char* stem) {
  std::string tmpl =
      (std::filesystem::temp_directory_path() / (std::string(stem) + ".XXXXXX")).string();
  std::vector<char> buf(tmpl.begin(), tmpl.end());
  buf.push_back('\0');
  if (!mkdtemp(buf.data())) throw DataError("acceptance: mkdtemp failed");
  return std::string(buf.data());
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream out;
  out << f.rdbuf();
  return out.str();
}

std::string fmt(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Scores of the kernel expansion (sum over training points of coefficient
// times kernel value) against the folded per-template weights, both through
// the same programmed crossbar with noise off. The two differ only in
// floating-point association order.
Outcome fold_identity() {
  double worst = 0.0;
  int instances = 0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Index n = 10 + Index(t % 51);
    const Index d = 2 + Index(t % 7);
    const Index p = 3 + Index(t % 10);
    DeviceParams<double> dev;
    ReadoutConfig readout;
    MatrixXd x = oracles::random_matrix(n, d, 100 + t);
    VectorXd y = oracles::random_labels(n, 200 + t);
    MatrixXd templates = choose_templates(dev, d, p, 300 + t);
    CrossbarArray<double> xbar = program(templates, dev, state_ladder(dev), 400 + t);
    MatrixXd phi = phi_features(x, xbar, readout, 500 + t);
    MatrixXd k = synthesize_kernel(phi, phi);
    DualSolution<double> sol = train_dual(k, y, 1.0, 1e-3, 2000);
    VectorXd coeff = sol.alphas.cwiseProduct(y);
    VectorXd w = fold_weights(coeff, phi);

    MatrixXd probes = oracles::random_matrix(20, d, 600 + t);
    MatrixXd phi_probe = phi_features(probes, xbar, readout, 700 + t);
    VectorXd expanded = synthesize_kernel(phi_probe, phi) * coeff;
    VectorXd folded = phi_probe * w;
    for (Index i = 0; i < probes.rows(); ++i) {
      const double a = expanded(i) + sol.bias, b = folded(i) + sol.bias;
      worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
    }
    ++instances;
  }
  return {worst <= 1e-9,
          fmt(double(instances)) + " trained instances, worst relative gap " + fmt(worst)};
}

// Synthesized Gram matrices are products phi phi^T, so their spectra must be
// nonnegative up to roundoff; an eigen-decomposition is the oracle.
Outcome gram_positivity() {
  double worst_ratio = 0.0;
  for (std::uint64_t t = 0; t < 50; ++t) {
    const Index n = 5 + Index(t % 26);
    const Index d = 2 + Index(t % 7);
    const Index p = 2 + Index(t % 11);
    MatrixXd x = oracles::random_matrix(n, d, 900 + t);
    MatrixXd k;
    if (t % 2 == 0) {
      MatrixXd templates = oracles::random_matrix(d, p, 1000 + t);
      k = synthesize_kernel(x, x, templates);
    } else {
      DeviceParams<double> dev;
      MatrixXd templates = choose_templates(dev, d, p, 1100 + t);
      CrossbarArray<double> xbar = program(templates, dev, state_ladder(dev), 1200 + t);
      k = synthesize_kernel(x, x, xbar, ReadoutConfig{}, 1300 + t);
    }
    const auto [lo, hi] = oracles::eig_min_max(k);
    if (lo < -1e-8 * hi) worst_ratio = std::min(worst_ratio, hi > 0.0 ? lo / hi : lo);
  }
  return {worst_ratio == 0.0, worst_ratio == 0.0
                                  ? "50 Gram matrices, all spectra nonnegative at 1e-8"
                                  : "worst min/max eigenvalue ratio " + fmt(worst_ratio)};
}

// Dual objective against the projected-gradient reference and full KKT
// conditions at the returned bias.
Outcome solver_oracle() {
  double worst_obj = 0.0, worst_kkt = -1e300;
  for (std::uint64_t t = 0; t < 25; ++t) {
    const Index n = 6 + Index(t % 15);
    const Index d = 2 + Index(t % 4);
    MatrixXd x = oracles::random_matrix(n, d, 1400 + t);
    VectorXd y = oracles::random_labels(n, 1500 + t);
    const double c = (t % 3 == 0) ? 0.5 : (t % 3 == 1) ? 1.0 : 10.0;
    MatrixXd k;
    if (t % 3 == 0) {
      MatrixXd templates = oracles::random_matrix(d, 3 + Index(t % 4), 1600 + t);
      k = synthesize_kernel(x, x, templates);
    } else if (t % 3 == 1) {
      k = rbf_kernel(x, x, 1.0 / double(d));
    } else {
      k = linear_kernel(x, x);
    }

    DualSolution<double> sol = train_dual(k, y, c, 1e-5, 20000);
    if (!sol.converged) return {false, "instance " + fmt(double(t)) + " did not converge"};
    const double got = oracles::dual_objective(k, y, sol.alphas);
    const double ref = oracles::qp_oracle(k, y, c).objective;
    worst_obj = std::max(worst_obj, std::abs(got - ref) / (1.0 + std::abs(ref)));
    worst_kkt = std::max(worst_kkt, oracles::kkt_worst_excess(k, y, sol.alphas, sol.bias, c, 1e-3));
  }
  const bool pass = worst_obj <= 1e-4 && worst_kkt <= 0.0;
  return {pass, "25 instances, worst objective gap " + fmt(worst_obj) + ", worst KKT excess " +
                    fmt(worst_kkt)};
}

// Nearest-level programming puts every cell within half a ladder step of its
// target, so a noiseless read deviates from the ideal product by at most
// d * (step/2) * max(x). A one-million-state ladder drives the gap under 1e-5.
Outcome quantization_bound() {
  double worst_slack = 1e300, worst_fine = 0.0;
  for (std::uint64_t t = 0; t < 100; ++t) {
    const Index d = 2 + Index(t % 15);
    const Index p = 2 + Index(t % 15);
    MatrixXd target = oracles::random_matrix(d, p, 1700 + t);
    VectorXd x = oracles::random_matrix(d, 1, 1800 + t).col(0);
    ReadoutConfig readout;

    DeviceParams<double> dev;
    CrossbarArray<double> xbar = program(target, dev, state_ladder(dev), 1900 + t);
    const VectorXd got = read_mvm(xbar, x, readout, 2000 + t);
    const VectorXd ideal = ideal_mvm(target, x, readout.absolute_value);
    const double gap = (got - ideal).cwiseAbs().maxCoeff();
    const double step = dev.range() / double(dev.num_states - 1);
    const double bound = double(d) * (step / 2.0) * x.maxCoeff();
    worst_slack = std::min(worst_slack, bound - gap);

    DeviceParams<double> fine;
    fine.num_states = 1000000;
    CrossbarArray<double> xbar_fine = program(target, fine, state_ladder(fine), 2100 + t);
    const VectorXd got_fine = read_mvm(xbar_fine, x, readout, 2200 + t);
    worst_fine = std::max(worst_fine, (got_fine - ideal).cwiseAbs().maxCoeff());
  }
  const bool pass = worst_slack >= 0.0 && worst_fine < 1e-5;
  return {pass, "100 instances, tightest bound slack " + fmt(worst_slack) +
                    ", worst fine-ladder gap " + fmt(worst_fine)};
}

// Ladder monotonicity, saturation at both ends, k-up/k-down state round
// trips, and the exact pulse-energy arithmetic.
Outcome device_properties() {
  for (LadderShape shape : {LadderShape::linear, LadderShape::exponential}) {
    DeviceParams<double> p;
    p.ladder_shape = shape;
    const VectorXd ladder = state_ladder(p);
    MemtransistorCell<double> cell;
    PulseLog log;
    double prev = effective_memductance(cell, ladder, p);
    for (int k = 1; k < p.num_states; ++k) {
      apply_pulse(cell, Pulse::negative, p, log);
      const double g = effective_memductance(cell, ladder, p);
      if (!(g > prev)) return {false, "pulse response not strictly increasing"};
      prev = g;
    }
    apply_pulse(cell, Pulse::negative, p, log);
    if (cell.state_index != p.num_states - 1 ||
        effective_memductance(cell, ladder, p) != p.g_max)
      return {false, "no saturation at the top state"};

    cell.state_index = 40;
    const int before = cell.state_index;
    for (int k = 0; k < 12; ++k) apply_pulse(cell, Pulse::negative, p, log);
    for (int k = 0; k < 12; ++k) apply_pulse(cell, Pulse::positive, p, log);
    if (cell.state_index != before) return {false, "k-up/k-down round trip drifted"};

    cell.state_index = 0;
    apply_pulse(cell, Pulse::positive, p, log);
    if (cell.state_index != 0 || effective_memductance(cell, ladder, p) != p.g_min)
      return {false, "no saturation at the bottom state"};
  }

  DeviceParams<double> p;
  PulseLog one{1, 0};
  if (energy_of(one, p) != 0.7e-9) return {false, "single potentiation is not 0.7 nJ"};
  PulseLog mixed{3, 2};
  const double expected = 3.0 * 0.7e-9 + 2.0 * 0.5e-12;
  if (energy_of(mixed, p) != expected) return {false, "mixed pulse energy is not exact"};
  if (std::abs(energy_of(mixed, p) - 2.101e-9) > 1e-12 * 2.101e-9)
    return {false, "mixed pulse energy is not 2.101 nJ"};
  return {true, "monotonicity, saturation, round trips, and energy arithmetic hold"};
}

const BenchSummary* find_summary(const BenchReport& report, const std::string& method) {
  for (const BenchSummary& s : report.summaries)
    if (s.method == method) return &s;
  return nullptr;
}

// Mean test accuracy over 5 stratified splits, template arm against its
// floor and the traditional rbf baseline against its reference, per dataset.
Outcome benchmark_bands() {
  struct Band {
    const char* file;
    double template_floor;
    double traditional_ref;
  };
  const Band bands[] = {
      {"statlog_heart.csv", 74.25, 81.48},
      {"pima_diabetes.csv", 68.17, 72.22},
      {"banknote.csv", 83.77, 98.90},
      {"haberman.csv", 66.88, 75.8},
  };
  const std::string out = fresh_dir("memsvm-c6");
  std::string detail;
  bool pass = true;
  for (const Band& band : bands) {
    ExperimentConfig cfg;
    cfg.dataset = repo_path(std::string("data/") + band.file);
    cfg.num_seeds = 5;
    cfg.out_dir = out + "/" + band.file;
    const BenchReport report = cmd_compare(cfg);
    const BenchSummary* tmpl = find_summary(report, "template");
    const BenchSummary* trad = find_summary(report, "traditional");
    if (!tmpl || !trad) return {false, "missing summary rows"};
    const bool tmpl_ok = tmpl->mean_test >= band.template_floor;
    const bool trad_ok = std::abs(trad->mean_test - band.traditional_ref) <= 5.0;
    pass = pass && tmpl_ok && trad_ok;
    if (!detail.empty()) detail += "; ";
    detail += std::string(band.file) + " template " + fmt(tmpl->mean_test) + (tmpl_ok ? "" : " BELOW " + fmt(band.template_floor)) +
              ", traditional " + fmt(trad->mean_test) + (trad_ok ? "" : " OFF " + fmt(band.traditional_ref));
  }
  return {pass, detail};
}

// One-vs-rest template runs on the activity-recognition set, one positive
// class per row of the reference table.
Outcome activity_bands() {
  const std::string path = repo_path("data/arem.csv");
  if (!std::filesystem::exists(path))
    return {false,
            "data/arem.csv missing; run scripts/fetch_data.py to download it (needs network), "
            "then rerun"};
  struct Band {
    const char* activity;
    double floor;
  };
  const Band bands[] = {{"bending", 84.61}, {"lying", 85.99}, {"walking", 84.04}};
  const std::string out = fresh_dir("memsvm-c7");
  std::string detail;
  bool pass = true;
  for (const Band& band : bands) {
    ExperimentConfig cfg;
    cfg.dataset = path;
    cfg.binary_positive = band.activity;
    cfg.max_samples = 4000;
    cfg.num_seeds = 5;
    cfg.out_dir = out + "/" + band.activity;
    const BenchReport report = cmd_run(cfg);
    const BenchSummary* tmpl = find_summary(report, "template");
    if (!tmpl) return {false, "missing summary row"};
    pass = pass && tmpl->mean_test >= band.floor;
    if (!detail.empty()) detail += "; ";
    detail += std::string(band.activity) + " " + fmt(tmpl->mean_test) +
              (tmpl->mean_test >= band.floor ? "" : " BELOW " + fmt(band.floor));
  }
  return {pass, detail};
}

// Template accuracy floors on the three generated blob datasets.
Outcome synthetic_bands() {
  struct Band {
    const char* kind;
    double floor;
  };
  const Band bands[] = {{"two_class_100x2", 95.0}, {"three_class_100x3", 95.0},
                        {"nine_class_1000x9", 90.0}};
  const std::string out = fresh_dir("memsvm-c8");
  std::string detail;
  bool pass = true;
  for (const Band& band : bands) {
    ExperimentConfig cfg;
    cfg.dataset = band.kind;
    cfg.num_seeds = 5;
    cfg.out_dir = out + "/" + band.kind;
    const BenchReport report = cmd_run(cfg);
    const BenchSummary* tmpl = find_summary(report, "template");
    if (!tmpl) return {false, "missing summary row"};
    pass = pass && tmpl->mean_test >= band.floor;
    if (!detail.empty()) detail += "; ";
    detail += std::string(band.kind) + " " + fmt(tmpl->mean_test) +
              (tmpl->mean_test >= band.floor ? "" : " BELOW " + fmt(band.floor));
  }
  return {pass, detail};
}

// Mean accuracy at sigma_program = 0.01 against the noiseless anchor, five
// fresh device draws, full retrain each draw.
Outcome robustness_sweep() {
  ExperimentConfig cfg;
  cfg.dataset = repo_path("data/banknote.csv");
  cfg.sigma_grid = {0.0, 0.01};
  cfg.repeats = 5;
  cfg.out_dir = fresh_dir("memsvm-c9");
  const std::vector<SweepRow> rows = cmd_sweep_noise(cfg);
  const double degradation = rows.at(0).mean_test - rows.at(1).mean_test;
  return {degradation <= 5.0, "degradation " + fmt(degradation) + " pp (clean " +
                                  fmt(rows.at(0).mean_test) + ", noisy " +
                                  fmt(rows.at(1).mean_test) + ")"};
}

// Byte-identical results files from two runs of the same config and seed,
// with every noise source switched on.
Outcome determinism() {
  ExperimentConfig cfg;
  cfg.dataset = repo_path("data/banknote.csv");
  cfg.device.sigma_program = 0.02;
  cfg.device.sigma_read = 0.01;
  cfg.num_seeds = 2;
  const std::string a = fresh_dir("memsvm-c10a");
  const std::string b = fresh_dir("memsvm-c10b");
  cfg.out_dir = a;
  (void)cmd_run(cfg);
  cfg.out_dir = b;
  (void)cmd_run(cfg);
  const std::string ra = slurp(a + "/results.txt"), rb = slurp(b + "/results.txt");
  if (ra.empty()) return {false, "no results file written"};
  return {ra == rb, ra == rb ? "two runs, byte-identical results files"
                             : "results files differ between identical runs"};
}

struct Criterion {
  const char* name;
  const char* title;
  double budget_s;
  Outcome (*check)();
};

const Criterion criteria[] = {
    {"C1", "fold identity", 10.0, fold_identity},
    {"C2", "Gram positivity", 10.0, gram_positivity},
    {"C3", "solver oracle equivalence", 60.0, solver_oracle},
    {"C4", "crossbar quantization bound", 10.0, quantization_bound},
    {"C5", "device ladder properties", 1.0, device_properties},
    {"C6", "benchmark bands", 300.0, benchmark_bands},
    {"C7", "activity-recognition bands", 300.0, activity_bands},
    {"C8", "synthetic bands", 60.0, synthetic_bands},
    {"C9", "robustness sweep", 120.0, robustness_sweep},
    {"C10", "determinism", 60.0, determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<const Criterion*> selected;
  if (argc <= 1) {
    for (const Criterion& c : criteria) selected.push_back(&c);
  } else {
    for (int i = 1; i < argc; ++i) {
      const Criterion* hit = nullptr;
      for (const Criterion& c : criteria)
        if (std::string(argv[i]) == c.name) hit = &c;
      if (!hit) {
        std::cerr << "unknown criterion '" << argv[i] << "' (expected C1..C10)\n";
        return exit_config;
      }
      selected.push_back(hit);
    }
  }

  int failures = 0;
  for (const Criterion* c : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c->check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("unexpected error: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = secs < c->budget_s;
    const bool pass = outcome.pass && in_budget;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << c->name << " " << c->title << ": "
              << outcome.detail;
    if (!in_budget) std::cout << "; OVER BUDGET";
    std::cout << " (" << fmt(secs) << "s, budget " << fmt(c->budget_s) << "s)\n";
  }
  return failures == 0 ? exit_ok : exit_failure;
}
