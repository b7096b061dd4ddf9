#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "memsvm/errors.hpp"
#include "memsvm/types.hpp"

namespace memsvm {

/// Per-feature (min, max) recorded when a training split is normalized;
/// empty vectors mean the features are still raw.
struct Normalization {
  VectorXd min;
  VectorXd max;
};

/// Feature matrix plus contiguous integer labels and their name dictionary
/// (first-seen order). `norm` records how features were scaled, if at all.
struct Dataset {
  MatrixXd X;   // N x d
  VectorXi y;   // values in [0, c)
  Index c = 0;  // class count
  std::vector<std::string> label_names;
  Normalization norm;
};

/// Numeric CSV loader. label_column -1 means the last column; labels map to
/// contiguous class indices in first-seen order. Set header to skip line 1.
[[nodiscard]] Dataset load_csv(const std::string& path, Index label_column = -1,
                               bool header = false);

/// Same, selecting the label column by header name (implies a header line).
[[nodiscard]] Dataset load_csv_named_label(const std::string& path,
                                           const std::string& label_name);

/// Writes features at full precision with the label name in the last column.
void save_csv(const Dataset& ds, const std::string& path);

/// Min-max scales every feature to [0,1] and records (min, max). Constant
/// features map to 0.
[[nodiscard]] Dataset normalize(const Dataset& ds);

/// Applies recorded training bounds to another split, clamping to [0,1].
[[nodiscard]] Dataset apply_normalization(const Dataset& ds, const Normalization& n);

struct SplitSpec {
  double train_fraction = 0.7;
  bool stratified = true;
  std::uint64_t seed = 0;
};

/// Deterministic train/test partition. Stratified splits keep every class
/// present in train; a single-sample class goes to train entirely.
[[nodiscard]] std::pair<Dataset, Dataset> split(const Dataset& ds, const SplitSpec& spec);

enum class SyntheticKind { two_class_100x2, three_class_100x3, nine_class_1000x9 };

[[nodiscard]] std::optional<SyntheticKind> synthetic_kind_from_name(const std::string& name);
[[nodiscard]] std::string name_of(SyntheticKind kind);

// Standard deviation of every generated blob; centers sit at least six of
// these apart, so the classes are separable by construction.
inline constexpr double synthetic_blob_sigma = 0.08;

/// Gaussian blobs, one cluster per class, class k centered on axis k.
[[nodiscard]] Dataset gen_synthetic(SyntheticKind kind, std::uint64_t seed);

/// Collapses labels to {rest = 0, positive_label = 1}.
[[nodiscard]] Dataset to_binary(const Dataset& ds, const std::string& positive_label);

/// Proportional per-class cap on the row count; max_samples <= 0 or >= N
/// returns the dataset unchanged.
[[nodiscard]] Dataset subsample_stratified(const Dataset& ds, Index max_samples,
                                           std::uint64_t seed);

/// Plain numeric grid, one CSV row per matrix row, no labels or header.
[[nodiscard]] MatrixXd load_matrix(const std::string& path);
void save_matrix(const MatrixXd& m, const std::string& path);

}  // namespace memsvm
