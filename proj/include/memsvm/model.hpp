// Template-vector SVM model layer: template selection, weight folding, and
// multiclass prediction.
//
// Folding collapses the dual solution into one weight per template,
// w_p = sum_s alpha_s phi(m_p, x_s), so the deployed model stores P templates
// and rows x P weights no matter how many support vectors training produced.
// Both score forms, sum_s alpha_s K(x_s, x) and sum_p w_p phi(m_p, x), are
// identical by associativity as long as folding reuses the feature rows that
// built the training kernel; train_multiclass_with_phi keeps that pairing.
#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "memsvm/crossbar.hpp"
#include "memsvm/dataset.hpp"
#include "memsvm/device.hpp"
#include "memsvm/errors.hpp"
#include "memsvm/kernel.hpp"
#include "memsvm/rng.hpp"
#include "memsvm/solver.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

enum class TemplateSource { ladder_random, data_medoids, file };

inline const char* name_of(TemplateSource s) {
  switch (s) {
    case TemplateSource::ladder_random: return "ladder_random";
    case TemplateSource::data_medoids: return "data_medoids";
    case TemplateSource::file: return "file";
  }
  return "unknown";
}

inline TemplateSource template_source_from_name(const std::string& name) {
  if (name == "ladder_random") return TemplateSource::ladder_random;
  if (name == "data_medoids") return TemplateSource::data_medoids;
  if (name == "file") return TemplateSource::file;
  throw ConfigError("templates: unknown source '" + name +
                    "' (expected ladder_random, data_medoids, or file)");
}

/// Deployed template-vector model. Binary models keep a single weight row;
/// the implied second class is its negation.
template <typename Scalar = double>
struct TemplateSvmModel {
  Matrix<Scalar> templates;  // d x P
  Matrix<Scalar> weights;    // 1 x P (binary) or c x P
  Vector<Scalar> biases;     // one per weight row
  ReadoutConfig readout{};

  Index num_templates() const { return templates.cols(); }
  Index num_classes() const { return weights.rows() == 1 ? 2 : weights.rows(); }

  void validate() const {
    if (templates.rows() < 1 || templates.cols() < 1)
      throw ConfigError("model: templates must be a nonempty d x P matrix");
    if (weights.rows() < 1) throw ConfigError("model: needs at least one weight row");
    if (weights.cols() != templates.cols())
      throw ConfigError("model: " + std::to_string(weights.cols()) +
                        " weights per row but " + std::to_string(templates.cols()) +
                        " templates");
    if (biases.size() != weights.rows())
      throw ConfigError("model: " + std::to_string(biases.size()) + " biases for " +
                        std::to_string(weights.rows()) + " weight rows");
  }
};

template <typename Scalar = double>
struct Prediction {
  Index label = 0;
  Vector<Scalar> scores;  // one per weight row
};

namespace detail {

inline constexpr std::uint64_t tag_template_draw = 0x7e3a01;
inline constexpr std::uint64_t tag_medoid_init = 0x7e3a02;

template <typename Scalar>
Matrix<Scalar> snap_to_ladder(Matrix<Scalar> m, const Vector<Scalar>& ladder) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = ladder(nearest_level(ladder, m(i, j)));
  return m;
}

/// Lloyd iterations from a seeded draw of P distinct rows; ties in the
/// assignment keep the lower center index, and empty clusters keep their
/// previous center. With P = N every point seeds its own singleton cluster.
template <typename Scalar>
Matrix<Scalar> medoid_centers(Index d, Index p, std::uint64_t seed,
                              const Matrix<Scalar>& features) {
  const Index n = features.rows();
  if (n == 0 || features.cols() != d)
    throw ConfigError("templates: medoids need an N x " + std::to_string(d) +
                      " feature matrix");
  if (p > n)
    throw ConfigError("templates: asked for " + std::to_string(p) + " medoids from " +
                      std::to_string(n) + " rows");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  auto eng = make_engine(seed, tag_medoid_init);
  std::shuffle(order.begin(), order.end(), eng);

  Matrix<Scalar> centers(p, d);
  for (Index r = 0; r < p; ++r) centers.row(r) = features.row(order[std::size_t(r)]);

  std::vector<Index> assign(static_cast<std::size_t>(n), Index(-1));
  for (int iter = 0; iter < 50; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      Scalar best_dist = (features.row(i) - centers.row(0)).squaredNorm();
      for (Index r = 1; r < p; ++r) {
        Scalar dist = (features.row(i) - centers.row(r)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = r;
        }
      }
      if (assign[std::size_t(i)] != best) {
        assign[std::size_t(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    for (Index r = 0; r < p; ++r) {
      Vector<Scalar> mean = Vector<Scalar>::Zero(d);
      Index count = 0;
      for (Index i = 0; i < n; ++i) {
        if (assign[std::size_t(i)] != r) continue;
        mean += features.row(i).transpose();
        ++count;
      }
      if (count > 0) centers.row(r) = (mean / Scalar(count)).transpose();
    }
  }
  return Matrix<Scalar>(centers.transpose());  // d x P
}

template <typename Scalar>
Index classify_scores_row(const TemplateSvmModel<Scalar>& model, const Vector<Scalar>& scores) {
  if (model.weights.rows() == 1) return scores(0) > Scalar(0) ? 1 : 0;
  Index best = 0;
  for (Index r = 1; r < scores.size(); ++r)
    if (scores(r) > scores(best)) best = r;  // strict: ties keep the lower index
  return best;
}

}  // namespace detail

/// d x P template matrix with every entry on the device state ladder.
template <typename Scalar>
Matrix<Scalar> choose_templates(const DeviceParams<Scalar>& params, Index d, Index p,
                                std::uint64_t seed,
                                TemplateSource source = TemplateSource::ladder_random,
                                const Matrix<Scalar>& features = Matrix<Scalar>(),
                                const std::string& path = {}) {
  validate(params);
  if (d < 1) throw ConfigError("templates: need d >= 1");
  if (p < 1) throw ConfigError("templates: need P >= 1");
  Vector<Scalar> ladder = state_ladder(params);

  switch (source) {
    case TemplateSource::ladder_random: {
      auto eng = make_engine(seed, detail::tag_template_draw);
      std::uniform_int_distribution<int> pick(0, params.num_states - 1);
      Matrix<Scalar> m(d, p);
      for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < d; ++i) m(i, j) = ladder(pick(eng));
      return m;
    }
    case TemplateSource::data_medoids:
      return detail::snap_to_ladder(detail::medoid_centers(d, p, seed, features), ladder);
    case TemplateSource::file: {
      if (path.empty()) throw ConfigError("templates: file source needs a path");
      MatrixXd raw = load_matrix(path);
      if (raw.rows() != d || raw.cols() != p)
        throw DataError("templates: " + path + " is " + std::to_string(raw.rows()) + " x " +
                        std::to_string(raw.cols()) + ", expected " + std::to_string(d) + " x " +
                        std::to_string(p));
      return detail::snap_to_ladder(Matrix<Scalar>(raw.cast<Scalar>()), ladder);
    }
  }
  throw ConfigError("templates: unknown source");
}

/// w_p = sum_s coefficients_s * phi_sv(s, p). Pass the same feature rows that
/// built the training kernel; that is what makes both score forms identical.
template <typename Scalar>
Vector<Scalar> fold_weights(const Vector<Scalar>& coefficients, const Matrix<Scalar>& phi_sv) {
  if (coefficients.size() != phi_sv.rows())
    throw ConfigError("fold: " + std::to_string(coefficients.size()) + " coefficients for " +
                      std::to_string(phi_sv.rows()) + " feature rows");
  return phi_sv.transpose() * coefficients;
}

/// Folds a template-kernel binary svm into a one-row model, ideal path.
template <typename Scalar>
TemplateSvmModel<Scalar> fold_weights(const TrainedSvm<Scalar>& svm,
                                      const Matrix<Scalar>& templates,
                                      const ReadoutConfig& cfg = {}) {
  if (svm.kernel.kind != KernelKind::templates)
    throw ConfigError(std::string("fold: svm was trained on a ") + name_of(svm.kernel.kind) +
                      " kernel, not a template kernel");
  TemplateSvmModel<Scalar> model;
  model.templates = templates;
  model.readout = cfg;
  Matrix<Scalar> phi = phi_features(svm.support_vectors, templates, cfg);
  model.weights = fold_weights(svm.alphas, phi).transpose();
  model.biases = Vector<Scalar>::Constant(1, svm.bias);
  return model;
}

/// Hardware-path fold: features come from programmed-crossbar reads, so the
/// weights absorb quantization and the frozen programming offsets. The model
/// keeps the effective memductance as its template matrix.
template <typename Scalar>
TemplateSvmModel<Scalar> fold_weights(const TrainedSvm<Scalar>& svm,
                                      const CrossbarArray<Scalar>& xbar,
                                      const ReadoutConfig& cfg = {}, std::uint64_t seed = 0) {
  if (svm.kernel.kind != KernelKind::templates)
    throw ConfigError(std::string("fold: svm was trained on a ") + name_of(svm.kernel.kind) +
                      " kernel, not a template kernel");
  TemplateSvmModel<Scalar> model;
  model.templates = xbar.memductance();
  model.readout = cfg;
  Matrix<Scalar> phi = phi_features(svm.support_vectors, xbar, cfg, seed);
  model.weights = fold_weights(svm.alphas, phi).transpose();
  model.biases = Vector<Scalar>::Constant(1, svm.bias);
  return model;
}

/// Per-class scores for precomputed feature rows: phi * W^T + b.
template <typename Scalar>
Matrix<Scalar> score_with_phi(const TemplateSvmModel<Scalar>& model,
                              const Matrix<Scalar>& phi_rows) {
  model.validate();
  if (phi_rows.cols() != model.weights.cols())
    throw ConfigError("model: feature width " + std::to_string(phi_rows.cols()) +
                      " does not match " + std::to_string(model.weights.cols()) + " templates");
  Matrix<Scalar> scores = phi_rows * model.weights.transpose();
  scores.rowwise() += model.biases.transpose();
  return scores;
}

template <typename Scalar>
Prediction<Scalar> predict(const TemplateSvmModel<Scalar>& model, const Vector<Scalar>& x) {
  model.validate();
  Vector<Scalar> phi = phi_features(x, model.templates, model.readout);
  Prediction<Scalar> out;
  out.scores = model.weights * phi + model.biases;
  out.label = detail::classify_scores_row(model, out.scores);
  return out;
}

/// Hardware prediction: phi comes from one crossbar read per call.
template <typename Scalar>
Prediction<Scalar> predict(const TemplateSvmModel<Scalar>& model, const Vector<Scalar>& x,
                           const CrossbarArray<Scalar>& xbar, std::uint64_t seed = 0) {
  model.validate();
  if (xbar.cols() != model.weights.cols())
    throw ConfigError("model: crossbar has " + std::to_string(xbar.cols()) + " columns for " +
                      std::to_string(model.weights.cols()) + " weights");
  Vector<Scalar> phi = phi_features(x, xbar, model.readout, seed);
  Prediction<Scalar> out;
  out.scores = model.weights * phi + model.biases;
  out.label = detail::classify_scores_row(model, out.scores);
  return out;
}

template <typename Scalar>
VectorXi classify_with_phi(const TemplateSvmModel<Scalar>& model, const Matrix<Scalar>& phi_rows) {
  Matrix<Scalar> scores = score_with_phi(model, phi_rows);
  VectorXi out(scores.rows());
  for (Index i = 0; i < scores.rows(); ++i) {
    Vector<Scalar> row = scores.row(i).transpose();
    out(i) = int(detail::classify_scores_row(model, row));
  }
  return out;
}

template <typename Scalar>
VectorXi predict_rows(const TemplateSvmModel<Scalar>& model, const Matrix<Scalar>& x_rows) {
  return classify_with_phi(model, phi_features(x_rows, model.templates, model.readout));
}

template <typename Scalar>
VectorXi predict_rows(const TemplateSvmModel<Scalar>& model, const Matrix<Scalar>& x_rows,
                      const CrossbarArray<Scalar>& xbar, std::uint64_t seed = 0) {
  return classify_with_phi(model, phi_features(x_rows, xbar, model.readout, seed));
}

template <typename Scalar = double>
struct MulticlassTraining {
  TemplateSvmModel<Scalar> model;
  bool converged = true;
  VectorXi support_counts;  // per trained row
};

/// One-vs-rest training over a shared synthesized kernel, folding each class
/// into one weight row. Binary problems train the class-1 row only. The
/// feature rows are the single phi realization reused for the kernel, the
/// fold, and nothing else.
template <typename Scalar>
MulticlassTraining<Scalar> train_multiclass_with_phi(const Matrix<Scalar>& phi_train,
                                                     const VectorXi& y, Index c,
                                                     const Matrix<Scalar>& templates,
                                                     const ReadoutConfig& cfg, Scalar box,
                                                     Scalar tol = Scalar(1e-3),
                                                     int max_passes = 200) {
  if (c < 2) throw ConfigError("model: need at least two classes");
  if (y.size() != phi_train.rows())
    throw ConfigError("model: " + std::to_string(y.size()) + " labels for " +
                      std::to_string(phi_train.rows()) + " feature rows");
  if (templates.cols() != phi_train.cols())
    throw ConfigError("model: feature width does not match the template count");

  std::vector<Index> counts(static_cast<std::size_t>(c), 0);
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) < 0 || y(i) >= c)
      throw DataError("model: label " + std::to_string(y(i)) + " outside [0, " +
                      std::to_string(c) + ")");
    ++counts[std::size_t(y(i))];
  }
  for (Index r = 0; r < c; ++r)
    if (counts[std::size_t(r)] == 0)
      throw DataError("model: class " + std::to_string(r) + " absent from training data");

  Matrix<Scalar> k = synthesize_kernel(phi_train, phi_train);
  const Index rows = c == 2 ? 1 : c;

  MulticlassTraining<Scalar> out;
  out.model.templates = templates;
  out.model.readout = cfg;
  out.model.weights.resize(rows, phi_train.cols());
  out.model.biases.resize(rows);
  out.support_counts.resize(rows);
  for (Index r = 0; r < rows; ++r) {
    const int target = c == 2 ? 1 : int(r);
    Vector<Scalar> y_pm(y.size());
    for (Index i = 0; i < y.size(); ++i) y_pm(i) = y(i) == target ? Scalar(1) : Scalar(-1);
    auto dual = train_dual(k, y_pm, box, tol, max_passes);
    Vector<Scalar> coeff = dual.alphas.cwiseProduct(y_pm);
    out.model.weights.row(r) = fold_weights(coeff, phi_train).transpose();
    out.model.biases(r) = dual.bias;
    out.support_counts(r) = int((dual.alphas.array() > Scalar(1e-12) * box).count());
    out.converged = out.converged && dual.converged;
  }
  return out;
}

/// Ideal-path training: features from the plain template matrix.
template <typename Scalar>
MulticlassTraining<Scalar> train_multiclass(const Matrix<Scalar>& x_rows, const VectorXi& y,
                                            Index c, const Matrix<Scalar>& templates, Scalar box,
                                            Scalar tol = Scalar(1e-3), int max_passes = 200,
                                            const ReadoutConfig& cfg = {}) {
  return train_multiclass_with_phi(phi_features(x_rows, templates, cfg), y, c, templates, cfg,
                                   box, tol, max_passes);
}

/// Hardware-path training: features read through the programmed crossbar, so
/// kernel and folded weights are calibrated to the quantized device.
template <typename Scalar>
MulticlassTraining<Scalar> train_multiclass(const Matrix<Scalar>& x_rows, const VectorXi& y,
                                            Index c, const CrossbarArray<Scalar>& xbar,
                                            Scalar box, Scalar tol = Scalar(1e-3),
                                            int max_passes = 200, const ReadoutConfig& cfg = {},
                                            std::uint64_t seed = 0) {
  return train_multiclass_with_phi(phi_features(x_rows, xbar, cfg, seed), y, c,
                                   xbar.memductance(), cfg, box, tol, max_passes);
}

}  // namespace memsvm
