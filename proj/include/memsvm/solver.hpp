// Soft-margin SVM dual solver: sequential two-variable updates on the
// maximal KKT-violating pair. Deterministic by construction; no randomized
// heuristics, so identical inputs give identical solutions.
//
// Works in minimization form, (1/2) a^T Q a - 1^T a with Q_ij = y_i y_j
// K(i, j), subject to 0 <= a <= C and y^T a = 0. The cached gradient is
// G = Q a - 1; the pin -y_i G_i equals y_i - f_i without bias, so the spread
// between its extrema over the movable up/low sets bounds every feasible
// bias and closes within tol exactly when the KKT conditions hold at tol.
#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "memsvm/errors.hpp"
#include "memsvm/kernel.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

template <typename Scalar = double>
struct DualSolution {
  Vector<Scalar> alphas;  // size N, each in [0, C]
  Scalar bias = 0;
  bool converged = false;
  int passes = 0;  // sweep-equivalents consumed; one sweep = N pair updates
};

namespace detail {

template <typename Scalar>
class SmoProblem {
 public:
  SmoProblem(const Matrix<Scalar>& k, const Vector<Scalar>& y, Scalar c, Scalar tol)
      : k_(k),
        y_(y),
        c_(c),
        tol_(tol),
        alpha_(Vector<Scalar>::Zero(y.size())),
        grad_(Vector<Scalar>::Constant(y.size(), Scalar(-1))) {}

  DualSolution<Scalar> run(int max_passes) {
    const Index n = y_.size();
    const long long budget = static_cast<long long>(max_passes) * n;
    DualSolution<Scalar> out;
    long long steps = 0;
    while (true) {
      const Pick pick = select_pair();
      if (pick.gap <= tol_) {
        out.converged = true;
        break;
      }
      if (steps >= budget) break;
      take_step(pick.i, pick.j, pick.gap);
      ++steps;
    }
    out.passes = static_cast<int>((steps + n - 1) / n);
    out.alphas = alpha_;
    out.bias = final_bias();
    return out;
  }

 private:
  struct Pick {
    Index i = -1;
    Index j = -1;
    Scalar gap = -std::numeric_limits<Scalar>::infinity();
  };

  bool is_free(Scalar a) const { return a > Scalar(0) && a < c_; }

  // Maximal-violating pair: i takes the largest pin among coordinates whose
  // alpha can still grow along +y (up set), j the smallest among those that
  // can shrink (low set). First extremum wins, so the scan order fixes ties.
  // An empty side or a closed gap means no feasible descent direction exists.
  Pick select_pair() const {
    const Index n = y_.size();
    Pick pick;
    Scalar up = -std::numeric_limits<Scalar>::infinity();
    Scalar low = std::numeric_limits<Scalar>::infinity();
    for (Index t = 0; t < n; ++t) {
      const Scalar pin = -y_(t) * grad_(t);
      const bool plus = y_(t) > Scalar(0);
      if ((plus && alpha_(t) < c_) || (!plus && alpha_(t) > Scalar(0))) {
        if (pin > up) {
          up = pin;
          pick.i = t;
        }
      }
      if ((plus && alpha_(t) > Scalar(0)) || (!plus && alpha_(t) < c_)) {
        if (pin < low) {
          low = pin;
          pick.j = t;
        }
      }
    }
    if (pick.i >= 0 && pick.j >= 0) pick.gap = up - low;
    return pick;
  }

  // Step along the feasible direction a_i += y_i t, a_j -= y_j t (t > 0),
  // which keeps y^T a fixed. The restricted objective falls at rate gap with
  // curvature eta = K_ii + K_jj - 2 K_ij >= 0, so the minimizer is gap / eta
  // capped by the box; near-flat directions take the full capped step. A
  // coordinate that binds the cap lands exactly on its bound and leaves the
  // movable set, so the same pair cannot stall on rounding residue.
  void take_step(Index i, Index j, Scalar gap) {
    const Scalar yi = y_(i), yj = y_(j);
    Scalar eta = k_(i, i) + k_(j, j) - 2 * k_(i, j);
    if (!(eta > Scalar(1e-12))) eta = Scalar(1e-12);
    const Scalar room_i = yi > Scalar(0) ? c_ - alpha_(i) : alpha_(i);
    const Scalar room_j = yj > Scalar(0) ? alpha_(j) : c_ - alpha_(j);
    const Scalar t = std::min(gap / eta, std::min(room_i, room_j));

    Scalar ai = t >= room_i ? (yi > Scalar(0) ? c_ : Scalar(0)) : alpha_(i) + yi * t;
    Scalar aj = t >= room_j ? (yj > Scalar(0) ? Scalar(0) : c_) : alpha_(j) - yj * t;
    ai = std::min(c_, std::max(Scalar(0), ai));
    aj = std::min(c_, std::max(Scalar(0), aj));

    const Scalar di = ai - alpha_(i), dj = aj - alpha_(j);
    grad_ += y_.cwiseProduct(k_.col(i) * (yi * di) + k_.col(j) * (yj * dj));
    alpha_(i) = ai;
    alpha_(j) = aj;
  }

  // KKT-consistent bias from the final iterate. Free support vectors pin it
  // exactly, otherwise any value in [lo, hi] works and the midpoint is taken.
  Scalar final_bias() const {
    const Index n = y_.size();
    Vector<Scalar> g = k_ * alpha_.cwiseProduct(y_);  // f without the bias
    Scalar free_sum = 0;
    Index free_count = 0;
    Scalar lo = -std::numeric_limits<Scalar>::infinity();
    Scalar hi = std::numeric_limits<Scalar>::infinity();
    for (Index i = 0; i < n; ++i) {
      const Scalar pin = y_(i) - g(i);
      if (is_free(alpha_(i))) {
        free_sum += pin;
        ++free_count;
      } else if ((alpha_(i) <= Scalar(0) && y_(i) > Scalar(0)) ||
                 (alpha_(i) >= c_ && y_(i) < Scalar(0))) {
        lo = std::max(lo, pin);
      } else {
        hi = std::min(hi, pin);
      }
    }
    if (free_count > 0) return free_sum / Scalar(free_count);
    if (!std::isfinite(lo)) return hi;
    if (!std::isfinite(hi)) return lo;
    return (lo + hi) / 2;
  }

  const Matrix<Scalar>& k_;
  const Vector<Scalar>& y_;
  Scalar c_, tol_;
  Vector<Scalar> alpha_, grad_;
};

}  // namespace detail

/// Solve the soft-margin dual for kernel matrix k and labels y in {-1, +1}.
/// max_passes caps outer sweeps; hitting the cap returns the best iterate
/// with converged = false.
template <typename Scalar>
DualSolution<Scalar> train_dual(const Matrix<Scalar>& k, const Vector<Scalar>& y, Scalar c,
                                Scalar tol = Scalar(1e-3), int max_passes = 200) {
  if (k.rows() != k.cols())
    throw ConfigError("solver: kernel matrix is " + std::to_string(k.rows()) + "x" +
                      std::to_string(k.cols()) + ", expected square");
  if (y.size() != k.rows())
    throw ConfigError("solver: " + std::to_string(y.size()) + " labels for " +
                      std::to_string(k.rows()) + " kernel rows");
  if (y.size() == 0) throw ConfigError("solver: empty training set");
  for (Index i = 0; i < y.size(); ++i)
    if (y(i) != Scalar(1) && y(i) != Scalar(-1))
      throw ConfigError("solver: label at index " + std::to_string(i) + " is not +-1");
  if (!(c > Scalar(0))) throw ConfigError("solver: box constraint C must be positive");
  if (!(tol > Scalar(0))) throw ConfigError("solver: tolerance must be positive");
  if (max_passes < 0) throw ConfigError("solver: max_passes must be nonnegative");

  // Identical labels force alpha = 0 through y^T alpha = 0; any bias of the
  // right sign is optimal, so the label itself serves as the constant score.
  if ((y.array() == y(0)).all()) {
    DualSolution<Scalar> out;
    out.alphas = Vector<Scalar>::Zero(y.size());
    out.bias = y(0);
    out.converged = true;
    return out;
  }

  detail::SmoProblem<Scalar> prob(k, y, c, tol);
  return prob.run(max_passes);
}

/// Dual objective value, for reporting and cross-checks.
template <typename Scalar>
Scalar dual_objective(const Matrix<Scalar>& k, const Vector<Scalar>& y,
                      const Vector<Scalar>& alphas) {
  Vector<Scalar> ay = alphas.cwiseProduct(y);
  return alphas.sum() - Scalar(0.5) * ay.dot(k * ay);
}

/// Deployed binary SVM: support vectors with label-folded coefficients.
template <typename Scalar = double>
struct TrainedSvm {
  Matrix<Scalar> support_vectors;  // S x d
  Vector<Scalar> alphas;           // S signed coefficients alpha_s * y_s
  Scalar bias = 0;
  KernelSpec<Scalar> kernel{};
  bool converged = true;
};

/// Keep only the support vectors of a dual solution.
template <typename Scalar>
TrainedSvm<Scalar> compact_svm(const Matrix<Scalar>& x_rows, const Vector<Scalar>& y,
                               const DualSolution<Scalar>& dual, Scalar c,
                               const KernelSpec<Scalar>& kernel) {
  if (x_rows.rows() != y.size() || y.size() != dual.alphas.size())
    throw ConfigError("svm: rows, labels, and alphas disagree in length");
  const Scalar cutoff = Scalar(1e-12) * c;
  Index s = 0;
  for (Index i = 0; i < y.size(); ++i)
    if (dual.alphas(i) > cutoff) ++s;

  TrainedSvm<Scalar> svm;
  svm.support_vectors.resize(s, x_rows.cols());
  svm.alphas.resize(s);
  Index at = 0;
  for (Index i = 0; i < y.size(); ++i) {
    if (dual.alphas(i) <= cutoff) continue;
    svm.support_vectors.row(at) = x_rows.row(i);
    svm.alphas(at) = dual.alphas(i) * y(i);
    ++at;
  }
  svm.bias = dual.bias;
  svm.kernel = kernel;
  svm.converged = dual.converged;
  return svm;
}

/// Decision scores f(x) for the closed-form kernels. Template-kernel models
/// evaluate through weight folding instead.
template <typename Scalar>
Vector<Scalar> decision_function(const TrainedSvm<Scalar>& svm, const Matrix<Scalar>& x_rows) {
  if (svm.kernel.kind == KernelKind::templates)
    throw ConfigError("svm: template-kernel models score through fold_weights and predict");
  if (svm.support_vectors.rows() == 0)
    return Vector<Scalar>::Constant(x_rows.rows(), svm.bias);
  Matrix<Scalar> k = kernel_matrix(x_rows, svm.support_vectors, svm.kernel);
  return (k * svm.alphas).array() + svm.bias;
}

}  // namespace memsvm
