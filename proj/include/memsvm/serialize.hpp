// Versioned plain-text artifacts for programmed crossbars and deployed
// models. Values are written at full precision, so a load reproduces the
// saved object bit for bit and repeated saves are byte-identical.
#pragma once

#include <string>
#include <vector>

#include "memsvm/crossbar.hpp"
#include "memsvm/dataset.hpp"
#include "memsvm/model.hpp"

namespace memsvm {

inline constexpr int crossbar_format_version = 1;
inline constexpr int model_format_version = 1;

void save_crossbar(const CrossbarArray<double>& xbar, const std::string& path);
[[nodiscard]] CrossbarArray<double> load_crossbar(const std::string& path);

/// A deployable model: the scoring object plus the preprocessing metadata
/// needed to classify raw feature rows.
struct ModelArtifact {
  TemplateSvmModel<double> model;
  Normalization norm;                    // empty when features were already in [0,1]
  std::vector<std::string> label_names;  // size model.num_classes()
};

void save_model(const ModelArtifact& art, const std::string& path);
[[nodiscard]] ModelArtifact load_model(const std::string& path);

}  // namespace memsvm
