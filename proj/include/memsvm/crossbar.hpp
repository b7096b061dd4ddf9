#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <utility>

#include "memsvm/device.hpp"
#include "memsvm/errors.hpp"
#include "memsvm/rng.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

struct ReadoutConfig {
  bool noise_enabled = true;
  bool absolute_value = true;  // signed column sums are an analysis escape hatch
};

namespace detail {
// Stream tags keeping programming and read noise decorrelated per seed.
inline constexpr std::uint64_t tag_program_offsets = 0xc0ffee01;
inline constexpr std::uint64_t tag_read_noise = 0xc0ffee02;
}  // namespace detail

/// Index of the ladder level nearest to v; ties break toward the lower index.
template <typename Scalar>
[[nodiscard]] Index nearest_level(const Vector<Scalar>& ladder, Scalar v) {
  const Scalar* begin = ladder.data();
  const Scalar* end = begin + ladder.size();
  const Scalar* it = std::lower_bound(begin, end, v);
  if (it == begin) return 0;
  if (it == end) return ladder.size() - 1;
  Index hi = it - begin;
  return (v - ladder[hi - 1] <= ladder[hi] - v) ? hi - 1 : hi;
}

template <typename Scalar>
[[nodiscard]] Scalar max_ladder_gap(const Vector<Scalar>& ladder) {
  return (ladder.tail(ladder.size() - 1) - ladder.head(ladder.size() - 1)).maxCoeff();
}

/// A d x P grid of quantized memtransistor cells holding one template matrix,
/// one template vector per column. Cell state is stored as parallel index and
/// offset matrices; `memductance()` is the cached effective value per cell.
/// Immutable once programmed, so concurrent reads are safe.
template <typename Scalar = double>
class CrossbarArray {
 public:
  CrossbarArray(DeviceParams<Scalar> params, Vector<Scalar> ladder, MatrixXi states,
                Matrix<Scalar> offsets, PulseLog log)
      : params_(std::move(params)),
        ladder_(std::move(ladder)),
        states_(std::move(states)),
        offsets_(std::move(offsets)),
        log_(log) {
    validate(params_);
    if (ladder_.size() < 2) throw ConfigError("crossbar: ladder needs at least 2 levels");
    if (states_.rows() != offsets_.rows() || states_.cols() != offsets_.cols())
      throw ConfigError("crossbar: state and offset grids disagree in shape");
    if (states_.size() == 0) throw ConfigError("crossbar: empty cell grid");
    if (states_.minCoeff() < 0 || states_.maxCoeff() >= int(ladder_.size()))
      throw ConfigError("crossbar: state index outside the ladder");
    memductance_.resize(states_.rows(), states_.cols());
    for (Index j = 0; j < states_.cols(); ++j)
      for (Index i = 0; i < states_.rows(); ++i) {
        MemtransistorCell<Scalar> cell{states_(i, j), offsets_(i, j)};
        memductance_(i, j) = effective_memductance(cell, ladder_, params_);
      }
  }

  [[nodiscard]] Index rows() const { return states_.rows(); }
  [[nodiscard]] Index cols() const { return states_.cols(); }
  [[nodiscard]] const DeviceParams<Scalar>& params() const { return params_; }
  [[nodiscard]] const Vector<Scalar>& ladder() const { return ladder_; }
  [[nodiscard]] const MatrixXi& state_indices() const { return states_; }
  [[nodiscard]] const Matrix<Scalar>& offsets() const { return offsets_; }
  [[nodiscard]] const PulseLog& pulse_log() const { return log_; }

  /// Ladder level plus frozen programming offset, clamped to the bounds.
  [[nodiscard]] const Matrix<Scalar>& memductance() const { return memductance_; }

  /// Total programming energy spent so far.
  [[nodiscard]] Scalar energy() const { return energy_of(log_, params_); }

 private:
  DeviceParams<Scalar> params_;
  Vector<Scalar> ladder_;
  MatrixXi states_;
  Matrix<Scalar> offsets_;
  PulseLog log_;
  Matrix<Scalar> memductance_;
};

/// Programs a fresh crossbar: every cell starts at state 0 and is potentiated
/// up to the ladder level nearest its target, one level per pulse, so the
/// pulse log is exactly the sum of final state indices. Programming offsets
/// are drawn once and frozen iff sigma_program > 0.
template <typename Scalar>
[[nodiscard]] CrossbarArray<Scalar> program(const Matrix<Scalar>& target,
                                            const DeviceParams<Scalar>& params,
                                            const Vector<Scalar>& ladder,
                                            std::uint64_t seed) {
  validate(params);
  for (Index j = 0; j < target.cols(); ++j)
    for (Index i = 0; i < target.rows(); ++i)
      if (target(i, j) < params.g_min || target(i, j) > params.g_max) {
        std::ostringstream msg;
        msg << "crossbar: target value " << target(i, j) << " at (" << i << ", " << j
            << ") is outside [" << params.g_min << ", " << params.g_max << "]";
        throw ConfigError(msg.str());
      }

  MatrixXi states(target.rows(), target.cols());
  PulseLog log;
  for (Index j = 0; j < target.cols(); ++j)
    for (Index i = 0; i < target.rows(); ++i) {
      states(i, j) = int(nearest_level(ladder, target(i, j)));
      log.n_potentiation += states(i, j);
    }

  Matrix<Scalar> offsets = Matrix<Scalar>::Zero(target.rows(), target.cols());
  if (params.sigma_program > Scalar(0)) {
    auto eng = make_engine(seed, detail::tag_program_offsets);
    std::normal_distribution<Scalar> dist(Scalar(0), params.sigma_program * params.range());
    for (Index j = 0; j < target.cols(); ++j)
      for (Index i = 0; i < target.rows(); ++i) offsets(i, j) = dist(eng);
  }
  return CrossbarArray<Scalar>(params, ladder, std::move(states), std::move(offsets), log);
}

template <typename Scalar>
[[nodiscard]] CrossbarArray<Scalar> program(const Matrix<Scalar>& target,
                                            const DeviceParams<Scalar>& params,
                                            std::uint64_t seed) {
  return program(target, params, state_ladder(params), seed);
}

/// Column currents |g^T x|, with one fresh Gaussian noise draw per column
/// when enabled. Identical seeds give identical readouts.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> read_mvm(const CrossbarArray<Scalar>& xbar,
                                      const Vector<Scalar>& x, const ReadoutConfig& cfg = {},
                                      std::uint64_t seed = 0) {
  if (x.size() != xbar.rows()) {
    std::ostringstream msg;
    msg << "read_mvm: input has " << x.size() << " entries, crossbar has " << xbar.rows()
        << " rows";
    throw ConfigError(msg.str());
  }
  if ((x.array() < Scalar(0)).any() || (x.array() > Scalar(1)).any())
    throw ConfigError("read_mvm: input entries must lie in [0, 1]");

  Vector<Scalar> out = xbar.memductance().transpose() * x;
  if (cfg.noise_enabled && xbar.params().sigma_read > Scalar(0)) {
    auto eng = make_engine(seed, detail::tag_read_noise);
    std::normal_distribution<Scalar> dist(Scalar(0),
                                          xbar.params().sigma_read * xbar.params().range());
    for (Index p = 0; p < out.size(); ++p) out(p) += dist(eng);
  }
  if (cfg.absolute_value) out = out.cwiseAbs();
  return out;
}

/// Quantization- and noise-free readout |M^T x| of an unprogrammed target.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> ideal_mvm(const Matrix<Scalar>& target, const Vector<Scalar>& x,
                                       bool absolute_value = true) {
  if (x.size() != target.rows()) {
    std::ostringstream msg;
    msg << "ideal_mvm: input has " << x.size() << " entries, matrix has " << target.rows()
        << " rows";
    throw ConfigError(msg.str());
  }
  Vector<Scalar> out = target.transpose() * x;
  if (absolute_value) out = out.cwiseAbs();
  return out;
}

}  // namespace memsvm
