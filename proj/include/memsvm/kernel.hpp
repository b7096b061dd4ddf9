// Kernel synthesis from template features, plus the classic kernels used by
// the traditional-SVM baseline.
//
// The template kernel is K[i][j] = sum_p phi(m_p, a_i) * phi(m_p, b_j) with
// phi(m, x) = |m . x|. phi itself is not positive-definite, but K is a Gram
// matrix of feature rows, so it is PSD whenever both sides share one feature
// evaluation. synthesize_kernel therefore reuses the left features when both
// inputs hold the same rows; this is what keeps noisy-readout Gram matrices
// PSD as well.
#pragma once

#include <cstdint>
#include <string>

#include "memsvm/crossbar.hpp"
#include "memsvm/errors.hpp"
#include "memsvm/rng.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

enum class KernelKind { linear, rbf, templates };

inline const char* name_of(KernelKind kind) {
  switch (kind) {
    case KernelKind::linear: return "linear";
    case KernelKind::rbf: return "rbf";
    case KernelKind::templates: return "templates";
  }
  return "unknown";
}

inline KernelKind kernel_kind_from_name(const std::string& name) {
  if (name == "linear") return KernelKind::linear;
  if (name == "rbf") return KernelKind::rbf;
  if (name == "templates") return KernelKind::templates;
  throw ConfigError("kernel: unknown kind '" + name + "' (expected linear, rbf, or templates)");
}

template <typename Scalar = double>
struct KernelSpec {
  KernelKind kind = KernelKind::rbf;
  Scalar gamma = Scalar(1);  // rbf only
  ReadoutConfig readout{};   // template kernels only

  void validate() const {
    if (kind == KernelKind::rbf && !(gamma > Scalar(0)))
      throw ConfigError("kernel: rbf gamma must be positive");
  }
};

namespace detail {

inline constexpr std::uint64_t tag_phi_lhs = 0xa51deull;
inline constexpr std::uint64_t tag_phi_rhs = 0xb51deull;
inline constexpr std::uint64_t tag_phi_row = 0xf0165ull;

template <typename Scalar>
bool same_rows(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  if (&a == &b) return true;
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

inline void check_phi_width(Index x_width, Index expected) {
  if (x_width != expected)
    throw ConfigError("phi: input has " + std::to_string(x_width) + " features but templates expect " +
                      std::to_string(expected));
}

}  // namespace detail

/// Ideal feature vector [phi(m_1, x), ..., phi(m_P, x)] for a plain template matrix.
template <typename Scalar>
Vector<Scalar> phi_features(const Vector<Scalar>& x, const Matrix<Scalar>& templates,
                            const ReadoutConfig& cfg = {}) {
  detail::check_phi_width(x.size(), templates.rows());
  return ideal_mvm(templates, x, cfg.absolute_value);
}

/// Hardware feature vector: one crossbar read, noise stream taken from seed.
template <typename Scalar>
Vector<Scalar> phi_features(const Vector<Scalar>& x, const CrossbarArray<Scalar>& xbar,
                            const ReadoutConfig& cfg = {}, std::uint64_t seed = 0) {
  return read_mvm(xbar, x, cfg, seed);
}

/// Batch ideal features: row i holds phi_features of row i of x_rows.
template <typename Scalar>
Matrix<Scalar> phi_features(const Matrix<Scalar>& x_rows, const Matrix<Scalar>& templates,
                            const ReadoutConfig& cfg = {}) {
  detail::check_phi_width(x_rows.cols(), templates.rows());
  Matrix<Scalar> phi = x_rows * templates;
  if (cfg.absolute_value) phi = phi.cwiseAbs();
  return phi;
}

/// Batch hardware features: every row is a separate read with its own noise stream.
template <typename Scalar>
Matrix<Scalar> phi_features(const Matrix<Scalar>& x_rows, const CrossbarArray<Scalar>& xbar,
                            const ReadoutConfig& cfg = {}, std::uint64_t seed = 0) {
  detail::check_phi_width(x_rows.cols(), xbar.rows());
  Matrix<Scalar> phi(x_rows.rows(), xbar.cols());
  for (Index i = 0; i < x_rows.rows(); ++i) {
    Vector<Scalar> xi = x_rows.row(i).transpose();
    phi.row(i) =
        read_mvm(xbar, xi, cfg, mix_seed(seed, detail::tag_phi_row, static_cast<std::uint64_t>(i)))
            .transpose();
  }
  return phi;
}

/// Kernel from precomputed feature rows: K = phi_a * phi_b^T.
template <typename Scalar>
Matrix<Scalar> synthesize_kernel(const Matrix<Scalar>& phi_a, const Matrix<Scalar>& phi_b) {
  if (phi_a.cols() != phi_b.cols())
    throw ConfigError("kernel: feature widths differ (" + std::to_string(phi_a.cols()) + " vs " +
                      std::to_string(phi_b.cols()) + ")");
  return phi_a * phi_b.transpose();
}

/// Ideal-path kernel between row sets a and b.
template <typename Scalar>
Matrix<Scalar> synthesize_kernel(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                                 const Matrix<Scalar>& templates, const ReadoutConfig& cfg = {}) {
  Matrix<Scalar> phi_a = phi_features(a, templates, cfg);
  Matrix<Scalar> phi_b = detail::same_rows(a, b) ? phi_a : phi_features(b, templates, cfg);
  return synthesize_kernel(phi_a, phi_b);
}

/// Hardware-path kernel; equal inputs share one feature evaluation so the
/// result stays a true Gram matrix under readout noise.
template <typename Scalar>
Matrix<Scalar> synthesize_kernel(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                                 const CrossbarArray<Scalar>& xbar, const ReadoutConfig& cfg = {},
                                 std::uint64_t seed = 0) {
  Matrix<Scalar> phi_a = phi_features(a, xbar, cfg, mix_seed(seed, detail::tag_phi_lhs));
  Matrix<Scalar> phi_b = detail::same_rows(a, b)
                             ? phi_a
                             : phi_features(b, xbar, cfg, mix_seed(seed, detail::tag_phi_rhs));
  return synthesize_kernel(phi_a, phi_b);
}

template <typename Scalar>
Matrix<Scalar> linear_kernel(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  if (a.cols() != b.cols())
    throw ConfigError("kernel: row widths differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.cols()) + ")");
  return a * b.transpose();
}

template <typename Scalar>
Matrix<Scalar> rbf_kernel(const Matrix<Scalar>& a, const Matrix<Scalar>& b, Scalar gamma) {
  if (!(gamma > Scalar(0))) throw ConfigError("kernel: rbf gamma must be positive");
  if (a.cols() != b.cols())
    throw ConfigError("kernel: row widths differ (" + std::to_string(a.cols()) + " vs " +
                      std::to_string(b.cols()) + ")");
  Vector<Scalar> a_norm = a.rowwise().squaredNorm();
  Vector<Scalar> b_norm = b.rowwise().squaredNorm();
  Matrix<Scalar> sq = Scalar(-2) * (a * b.transpose());
  sq.colwise() += a_norm;
  sq.rowwise() += b_norm.transpose();
  sq = sq.cwiseMax(Scalar(0));  // cancellation guard; true distances are >= 0
  return (-gamma * sq.array()).exp().matrix();
}

/// Dispatch for the closed-form kernels. Template kernels need features or a
/// crossbar, so that kind is rejected here.
template <typename Scalar>
Matrix<Scalar> kernel_matrix(const Matrix<Scalar>& a, const Matrix<Scalar>& b,
                             const KernelSpec<Scalar>& spec) {
  spec.validate();
  switch (spec.kind) {
    case KernelKind::linear: return linear_kernel(a, b);
    case KernelKind::rbf: return rbf_kernel(a, b, spec.gamma);
    case KernelKind::templates: break;
  }
  throw ConfigError("kernel: template kernels are built from features; use synthesize_kernel");
}

}  // namespace memsvm
