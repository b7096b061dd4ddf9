#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "memsvm/dataset.hpp"
#include "memsvm/model.hpp"
#include "oracles.hpp"

using namespace memsvm;

namespace {

// Columns of a matrix as sortable tuples, for set comparisons.
std::vector<std::vector<double>> sorted_columns(const MatrixXd& m) {
  std::vector<std::vector<double>> cols;
  for (Index j = 0; j < m.cols(); ++j) {
    std::vector<double> col(m.col(j).data(), m.col(j).data() + m.rows());
    cols.push_back(col);
  }
  std::sort(cols.begin(), cols.end());
  return cols;
}

bool on_ladder(const MatrixXd& m, const VectorXd& ladder) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      Index k = nearest_level(ladder, m(i, j));
      if (m(i, j) != ladder(k)) return false;
    }
  return true;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("both score forms agree through one feature realization") {
    DeviceParams<double> p;
    p.sigma_program = 0.01;
    p.sigma_read = 0.005;
    ReadoutConfig cfg;

    for (std::uint64_t t = 0; t < 5; ++t) {
      const Index n = 20 + Index(t * 10);  // up to 60
      const Index d = 2 + Index(t % 7);
      const Index np = 3 + Index(t % 10);
      MatrixXd x = oracles::random_matrix(n, d, 5000 + t);
      VectorXd y = oracles::random_labels(n, 5100 + t);

      MatrixXd target = oracles::random_matrix(d, np, 5200 + t);
      auto xbar = program(target, p, 5300 + t);
      MatrixXd phi_train = phi_features(x, xbar, cfg, 5400 + t);
      MatrixXd k = synthesize_kernel(phi_train, phi_train);

      auto dual = train_dual(k, y, 1.0, 1e-4, 5000);
      VectorXd coeff = dual.alphas.cwiseProduct(y);
      VectorXd w = fold_weights(coeff, phi_train);
      REQUIRE(w.size() == np);

      for (int probe = 0; probe < 100; ++probe) {
        VectorXd xq =
            oracles::random_matrix(d, 1, 6000 + t * 100 + std::uint64_t(probe)).col(0);
        VectorXd phi_q = phi_features(xq, xbar, cfg, 7000 + t * 100 + std::uint64_t(probe));

        double eq1 = 0.0;  // sum_s coeff_s * K(x_s, x), same phi rows as training
        for (Index s = 0; s < n; ++s) {
          double ks = 0.0;
          for (Index pp = 0; pp < np; ++pp) ks += phi_train(s, pp) * phi_q(pp);
          eq1 += coeff(s) * ks;
        }
        double eq3 = w.dot(phi_q);
        CHECK(std::abs(eq1 - eq3) <= 1e-9 * std::max(1.0, std::abs(eq1)));
      }
    }
  }

  TEST_CASE("a single unit-coefficient support vector folds to its features") {
    MatrixXd templates = oracles::random_matrix(4, 6, 50);
    TrainedSvm<double> svm;
    svm.support_vectors = oracles::random_matrix(1, 4, 51);
    svm.alphas = VectorXd::Ones(1);
    svm.bias = 0.3;
    svm.kernel.kind = KernelKind::templates;

    auto model = fold_weights(svm, templates);
    REQUIRE(model.weights.rows() == 1);
    VectorXd x1 = svm.support_vectors.row(0).transpose();
    VectorXd phi = phi_features(x1, templates);
    CHECK((model.weights.row(0).transpose() - phi).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(model.biases(0) == 0.3);
    CHECK((model.templates - templates).cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("zero coefficients fold to a bias-only scorer") {
    MatrixXd templates = oracles::random_matrix(3, 5, 52);
    TrainedSvm<double> svm;
    svm.support_vectors = MatrixXd::Zero(0, 3);
    svm.alphas = VectorXd::Zero(0);
    svm.bias = -0.2;
    svm.kernel.kind = KernelKind::templates;

    auto model = fold_weights(svm, templates);
    CHECK(model.weights.cwiseAbs().maxCoeff() == 0.0);
    VectorXd x = oracles::random_matrix(3, 1, 53).col(0);
    auto pred = predict(model, x);
    CHECK(pred.scores(0) == -0.2);
    CHECK(pred.label == 0);  // negative score -> lower class
  }

  TEST_CASE("folding rejects models trained on other kernels") {
    MatrixXd templates = oracles::random_matrix(3, 2, 54);
    TrainedSvm<double> svm;
    svm.support_vectors = oracles::random_matrix(2, 3, 55);
    svm.alphas = VectorXd::Ones(2);
    svm.kernel.kind = KernelKind::rbf;
    CHECK_THROWS_AS((void)fold_weights(svm, templates), ConfigError);
  }

  TEST_CASE("prediction ties break toward the lower class index") {
    TemplateSvmModel<double> model;
    model.templates = MatrixXd::Constant(2, 3, 0.5);
    model.weights = MatrixXd::Zero(2, 3);
    model.biases = VectorXd(2);
    model.biases << 0.3, -0.1;
    VectorXd x(2);
    x << 0.4, 0.6;
    CHECK(predict(model, x).label == 0);  // bias-only argmax

    model.biases << 0.5, 0.5;
    CHECK(predict(model, x).label == 0);  // exact tie

    TemplateSvmModel<double> binary;
    binary.templates = model.templates;
    binary.weights = MatrixXd::Zero(1, 3);
    binary.biases = VectorXd::Zero(1);
    CHECK(predict(binary, x).label == 0);  // score 0 -> lower class
    binary.biases(0) = 1e-12;
    CHECK(predict(binary, x).label == 1);

    TemplateSvmModel<double> three;
    three.templates = model.templates;
    three.weights = MatrixXd::Zero(3, 3);
    three.biases = VectorXd::Constant(3, 0.7);
    CHECK(predict(three, x).label == 0);
  }

  TEST_CASE("argmax is invariant to positive scaling") {
    auto ds = normalize(gen_synthetic(SyntheticKind::three_class_100x3, 9));
    DeviceParams<double> p;
    MatrixXd templates = choose_templates(p, 3, 8, 77);
    auto trained = train_multiclass(ds.X, ds.y, ds.c, templates, 1.0, 1e-3, 500);

    TemplateSvmModel<double> scaled = trained.model;
    scaled.weights *= 2.5;
    scaled.biases *= 2.5;
    for (int i = 0; i < 20; ++i) {
      VectorXd x = oracles::random_matrix(3, 1, 8000 + std::uint64_t(i)).col(0);
      CHECK(predict(trained.model, x).label == predict(scaled, x).label);
    }
  }

  TEST_CASE("binary training stores one weight row with negation semantics") {
    {
      auto ds = normalize(gen_synthetic(SyntheticKind::two_class_100x2, 10));
      const MatrixXd& x = ds.X;
      DeviceParams<double> p;
      MatrixXd templates = choose_templates(p, 2, 6, 78);
      auto trained = train_multiclass(ds.X, ds.y, ds.c, templates, 1.0, 1e-3, 500);
      REQUIRE(trained.model.weights.rows() == 1);
      REQUIRE(trained.model.num_classes() == 2);
      CHECK(trained.support_counts.size() == 1);

      // An explicit two-row model with the negated weights scores identically.
      TemplateSvmModel<double> two;
      two.templates = trained.model.templates;
      two.weights = MatrixXd(2, 6);
      two.weights.row(0) = -trained.model.weights.row(0);
      two.weights.row(1) = trained.model.weights.row(0);
      two.biases = VectorXd(2);
      two.biases << -trained.model.biases(0), trained.model.biases(0);

      int agree = 0;
      for (Index i = 0; i < x.rows(); ++i) {
        VectorXd xi = x.row(i).transpose();
        auto a = predict(trained.model, xi);
        auto b = predict(two, xi);
        agree += (a.label == b.label) ? 1 : 0;
      }
      CHECK(agree == int(x.rows()));
    }
  }

  TEST_CASE("multiclass training separates three blobs") {
    auto ds = normalize(gen_synthetic(SyntheticKind::three_class_100x3, 11));
    DeviceParams<double> p;
    MatrixXd templates = choose_templates(p, 3, 10, 79);
    auto trained = train_multiclass(ds.X, ds.y, ds.c, templates, 1.0, 1e-3, 1000);
    CHECK(trained.converged);
    REQUIRE(trained.model.weights.rows() == 3);

    VectorXi got = predict_rows(trained.model, ds.X);
    Index hits = 0;
    for (Index i = 0; i < ds.y.size(); ++i) hits += (got(i) == ds.y(i)) ? 1 : 0;
    CHECK(double(hits) / double(ds.y.size()) >= 0.95);
  }

  TEST_CASE("nine-class scores stay finite with a total argmax") {
    auto ds = normalize(subsample_stratified(
        gen_synthetic(SyntheticKind::nine_class_1000x9, 12), 270, 3));
    DeviceParams<double> p;
    MatrixXd templates = choose_templates(p, 9, 12, 80);
    auto trained = train_multiclass(ds.X, ds.y, ds.c, templates, 1.0, 1e-3, 300);
    REQUIRE(trained.model.weights.rows() == 9);

    MatrixXd phi = phi_features(ds.X, trained.model.templates, trained.model.readout);
    MatrixXd scores = score_with_phi(trained.model, phi);
    CHECK(scores.allFinite());
    VectorXi got = predict_rows(trained.model, ds.X);
    CHECK(got.minCoeff() >= 0);
    CHECK(got.maxCoeff() < 9);
  }

  TEST_CASE("a class missing from training data raises a data error") {
    MatrixXd x = oracles::random_matrix(8, 2, 56);
    VectorXi y = VectorXi::Zero(8);
    for (Index i = 4; i < 8; ++i) y(i) = 2;  // class 1 absent
    DeviceParams<double> p;
    MatrixXd templates = choose_templates(p, 2, 4, 81);
    CHECK_THROWS_AS((void)train_multiclass(x, y, Index(3), templates, 1.0), DataError);
  }

  TEST_CASE("deployed size depends on templates, not on support count") {
    auto ds = normalize(gen_synthetic(SyntheticKind::two_class_100x2, 13));
    DeviceParams<double> p;
    const Index np = 7;
    MatrixXd templates = choose_templates(p, 2, np, 82);

    auto soft = train_multiclass(ds.X, ds.y, ds.c, templates, 0.05, 1e-3, 500);
    auto hard = train_multiclass(ds.X, ds.y, ds.c, templates, 50.0, 1e-3, 2000);
    CHECK(soft.support_counts(0) != hard.support_counts(0));
    for (const auto* m : {&soft.model, &hard.model}) {
      CHECK(m->templates.cols() == np);
      CHECK(m->weights.cols() == np);
      CHECK(m->weights.rows() == 1);
    }
  }

  TEST_CASE("ladder_random templates live on the ladder deterministically") {
    DeviceParams<double> p;
    p.num_states = 2;
    MatrixXd m = choose_templates(p, 5, 1, 83);
    for (Index i = 0; i < 5; ++i) CHECK((m(i, 0) == 0.0 || m(i, 0) == 1.0));

    DeviceParams<double> fine;
    VectorXd ladder = state_ladder(fine);
    MatrixXd a = choose_templates(fine, 6, 9, 84);
    CHECK(on_ladder(a, ladder));
    MatrixXd b = choose_templates(fine, 6, 9, 84);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    MatrixXd other = choose_templates(fine, 6, 9, 85);
    CHECK((a - other).cwiseAbs().maxCoeff() > 0.0);
  }

  TEST_CASE("medoids with P = N snap the training points themselves") {
    DeviceParams<double> p;
    VectorXd ladder = state_ladder(p);
    MatrixXd feats = oracles::random_matrix(6, 2, 57);
    MatrixXd m = choose_templates(p, 2, 6, 86, TemplateSource::data_medoids, feats);
    REQUIRE(m.rows() == 2);
    REQUIRE(m.cols() == 6);
    CHECK(on_ladder(m, ladder));

    MatrixXd snapped(6, 2);
    for (Index i = 0; i < 6; ++i)
      for (Index j = 0; j < 2; ++j)
        snapped(i, j) = ladder(nearest_level(ladder, feats(i, j)));
    CHECK(sorted_columns(m) == sorted_columns(snapped.transpose()));
  }

  TEST_CASE("medoids recover two tight clusters") {
    auto eng = make_engine(58, 0xc1u);
    std::normal_distribution<double> jitter(0.0, 0.02);
    MatrixXd feats(40, 2);
    for (Index i = 0; i < 40; ++i) {
      double c = i < 20 ? 0.2 : 0.8;
      feats(i, 0) = std::clamp(c + jitter(eng), 0.0, 1.0);
      feats(i, 1) = std::clamp(c + jitter(eng), 0.0, 1.0);
    }
    DeviceParams<double> p;
    MatrixXd m = choose_templates(p, 2, 2, 87, TemplateSource::data_medoids, feats);
    std::vector<double> centers = {m(0, 0), m(0, 1)};
    std::sort(centers.begin(), centers.end());
    CHECK(std::abs(centers[0] - 0.2) <= 0.05);
    CHECK(std::abs(centers[1] - 0.8) <= 0.05);
  }

  TEST_CASE("file templates load, snap, and validate dimensions") {
    DeviceParams<double> p;
    VectorXd ladder = state_ladder(p);
    MatrixXd raw = oracles::random_matrix(3, 4, 59);
    const char* path = "templates_tmp.csv";
    save_matrix(raw, path);

    MatrixXd m = choose_templates(p, 3, 4, 0, TemplateSource::file, MatrixXd(), path);
    CHECK(on_ladder(m, ladder));
    for (Index j = 0; j < 4; ++j)
      for (Index i = 0; i < 3; ++i)
        CHECK(std::abs(m(i, j) - raw(i, j)) <= max_ladder_gap(ladder) / 2 + 1e-15);

    CHECK_THROWS_AS(
        (void)choose_templates(p, 5, 4, 0, TemplateSource::file, MatrixXd(), path), DataError);
    CHECK_THROWS_AS(
        (void)choose_templates(p, 3, 9, 0, TemplateSource::file, MatrixXd(), path), DataError);
    std::remove(path);
  }

  TEST_CASE("template selection validates its inputs") {
    DeviceParams<double> p;
    MatrixXd feats = oracles::random_matrix(3, 2, 60);
    CHECK_THROWS_AS((void)choose_templates(p, 2, 0, 0), ConfigError);
    CHECK_THROWS_AS((void)choose_templates(p, 0, 2, 0), ConfigError);
    CHECK_THROWS_AS(
        (void)choose_templates(p, 2, 5, 0, TemplateSource::data_medoids, feats), ConfigError);
    CHECK_THROWS_AS(
        (void)choose_templates(p, 4, 2, 0, TemplateSource::data_medoids, feats), ConfigError);
    CHECK_THROWS_AS(
        (void)choose_templates(p, 2, 2, 0, TemplateSource::data_medoids), ConfigError);
    CHECK_THROWS_AS((void)choose_templates(p, 2, 2, 0, TemplateSource::file), ConfigError);
  }

  TEST_CASE("a quiet crossbar reproduces ideal predictions") {
    auto ds = normalize(gen_synthetic(SyntheticKind::two_class_100x2, 14));
    DeviceParams<double> p;  // zero noise
    MatrixXd templates = choose_templates(p, 2, 6, 88);  // already on the ladder
    auto trained = train_multiclass(ds.X, ds.y, ds.c, templates, 1.0, 1e-3, 500);

    auto xbar = program(templates, p, 1);
    VectorXi ideal = predict_rows(trained.model, ds.X);
    VectorXi hw = predict_rows(trained.model, ds.X, xbar, 2);
    CHECK((ideal - hw).cwiseAbs().maxCoeff() == 0);

    VectorXd x0 = ds.X.row(0).transpose();
    auto one = predict(trained.model, x0, xbar, 3);
    CHECK(one.label == hw(0));
  }

  TEST_CASE("hardware training via a crossbar trains and folds consistently") {
    auto ds = normalize(gen_synthetic(SyntheticKind::two_class_100x2, 15));
    DeviceParams<double> p;
    p.sigma_program = 0.005;
    p.sigma_read = 0.002;
    MatrixXd templates = choose_templates(p, 2, 8, 89);
    auto xbar = program(templates, p, 4);
    auto trained = train_multiclass(ds.X, ds.y, ds.c, xbar, 1.0, 1e-3, 500, ReadoutConfig{}, 5);
    REQUIRE(trained.model.weights.rows() == 1);
    CHECK(trained.model.templates.cols() == 8);

    VectorXi hw = predict_rows(trained.model, ds.X, xbar, 6);
    Index hits = 0;
    for (Index i = 0; i < ds.y.size(); ++i) hits += (hw(i) == ds.y(i)) ? 1 : 0;
    CHECK(double(hits) / double(ds.y.size()) >= 0.9);
  }

  TEST_CASE("template source names round-trip") {
    for (TemplateSource s :
         {TemplateSource::ladder_random, TemplateSource::data_medoids, TemplateSource::file})
      CHECK(template_source_from_name(name_of(s)) == s);
    CHECK_THROWS_AS((void)template_source_from_name("grid"), ConfigError);
  }
}
