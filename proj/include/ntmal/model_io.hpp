#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>

#include "ntmal/linear_model.hpp"
#include "ntmal/vectorizer.hpp"

namespace ntmal {

inline constexpr int kModelFormatVersion = 1;

/// Everything needed to score a raw trace: the fitted vectorizer and the
/// trained linear model (whose summary must be set).
struct ModelArtifact {
  Vectorizer vectorizer;
  LinearModel model;
  std::size_t n_train = 0;
};

/// Single JSON document; identical artifacts serialize to identical bytes.
std::string serialize_model(const ModelArtifact& artifact);

/// Throws Error(Parse) on malformed input, Error(VersionMismatch) on an
/// unknown format_version.
ModelArtifact deserialize_model(std::string_view json);

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace ntmal
