#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "memsvm/errors.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

enum class LadderShape { linear, exponential };

inline const char* name_of(LadderShape s) {
  switch (s) {
    case LadderShape::linear: return "linear";
    case LadderShape::exponential: return "exponential";
  }
  return "unknown";
}

inline LadderShape ladder_shape_from_name(const std::string& name) {
  if (name == "linear") return LadderShape::linear;
  if (name == "exponential") return LadderShape::exponential;
  throw ConfigError("device: unknown ladder shape '" + name +
                    "' (expected linear or exponential)");
}

/// Behavioral parameters of one memtransistor: a ladder of num_states
/// discrete memductance levels spanning [g_min, g_max], per-pulse energies
/// in joules, and noise magnitudes as fractions of (g_max - g_min).
template <typename Scalar = double>
struct DeviceParams {
  int num_states = 86;
  Scalar g_min = Scalar(0);
  Scalar g_max = Scalar(1);
  LadderShape ladder_shape = LadderShape::linear;
  Scalar e_potentiation = Scalar(0.7e-9);
  Scalar e_depression = Scalar(0.5e-12);
  Scalar sigma_program = Scalar(0);
  Scalar sigma_read = Scalar(0);

  [[nodiscard]] Scalar range() const { return g_max - g_min; }
};

template <typename Scalar>
void validate(const DeviceParams<Scalar>& p) {
  if (p.num_states < 2) throw ConfigError("device: num_states must be at least 2");
  if (!(p.g_min < p.g_max)) throw ConfigError("device: g_min must be below g_max");
  if (p.sigma_program < Scalar(0) || p.sigma_read < Scalar(0))
    throw ConfigError("device: sigma_program and sigma_read must be non-negative");
  if (p.e_potentiation < Scalar(0) || p.e_depression < Scalar(0))
    throw ConfigError("device: pulse energies must be non-negative");
}

// Saturation rate of the exponential ladder. Steps shrink as the state index
// grows, mimicking measured potentiation curves that flatten near the top.
inline constexpr double ladder_saturation_rate = 3.0;

/// The device's strictly increasing memductance levels, endpoints included.
template <typename Scalar>
[[nodiscard]] Vector<Scalar> state_ladder(const DeviceParams<Scalar>& p) {
  validate(p);
  const Index n = p.num_states;
  Vector<Scalar> g(n);
  switch (p.ladder_shape) {
    case LadderShape::linear:
      for (Index k = 0; k < n; ++k)
        g[k] = p.g_min + Scalar(k) * p.range() / Scalar(n - 1);
      break;
    case LadderShape::exponential: {
      const Scalar beta = Scalar(ladder_saturation_rate);
      const Scalar denom = Scalar(1) - std::exp(-beta);
      for (Index k = 0; k < n; ++k) {
        Scalar t = Scalar(k) / Scalar(n - 1);
        g[k] = p.g_min + p.range() * (Scalar(1) - std::exp(-beta * t)) / denom;
      }
      break;
    }
  }
  g[0] = p.g_min;
  g[n - 1] = p.g_max;
  return g;
}

/// Measured calibration ladder: single column of strictly increasing values.
[[nodiscard]] inline Vector<double> load_ladder(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("ladder file not readable: " + path);
  std::vector<double> vals;
  double v;
  while (f >> v) vals.push_back(v);
  if (!f.eof()) throw DataError("ladder file has a non-numeric entry: " + path);
  if (vals.size() < 2) throw DataError("ladder file needs at least 2 levels: " + path);
  for (std::size_t k = 0; k + 1 < vals.size(); ++k)
    if (!(vals[k] < vals[k + 1]))
      throw DataError("ladder file values must be strictly increasing: " + path);
  return Eigen::Map<Vector<double>>(vals.data(), Index(vals.size()));
}

/// Gate pulse polarity. Negative pulses potentiate (memductance up),
/// positive pulses depress (memductance down).
enum class Pulse { negative, positive };

struct PulseLog {
  std::int64_t n_potentiation = 0;
  std::int64_t n_depression = 0;

  PulseLog& operator+=(const PulseLog& o) {
    n_potentiation += o.n_potentiation;
    n_depression += o.n_depression;
    return *this;
  }
};

template <typename Scalar = double>
struct MemtransistorCell {
  int state_index = 0;
  Scalar programmed_offset = Scalar(0);  // frozen at programming time
};

/// One gate pulse: moves the state a single step, saturating at the ladder
/// ends. Saturated pulses still spend energy, so the log always counts.
template <typename Scalar>
void apply_pulse(MemtransistorCell<Scalar>& cell, Pulse polarity,
                 const DeviceParams<Scalar>& p, PulseLog& log) {
  if (polarity == Pulse::negative) {
    cell.state_index = std::min(cell.state_index + 1, p.num_states - 1);
    ++log.n_potentiation;
  } else {
    cell.state_index = std::max(cell.state_index - 1, 0);
    ++log.n_depression;
  }
}

template <typename Scalar>
[[nodiscard]] Scalar energy_of(const PulseLog& log, const DeviceParams<Scalar>& p) {
  return Scalar(log.n_potentiation) * p.e_potentiation +
         Scalar(log.n_depression) * p.e_depression;
}

/// Ladder level plus the frozen programming offset, clamped to the bounds.
template <typename Scalar>
[[nodiscard]] Scalar effective_memductance(const MemtransistorCell<Scalar>& cell,
                                           const Vector<Scalar>& ladder,
                                           const DeviceParams<Scalar>& p) {
  return std::clamp(ladder[cell.state_index] + cell.programmed_offset, p.g_min, p.g_max);
}

}  // namespace memsvm
