#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ntmal/trace.hpp"

namespace ntmal {

struct SparseEntry {
  std::uint32_t index;
  double value;

  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

// Entries strictly increasing by index, all < dim, values finite and nonzero.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dim = 0;

  bool empty() const { return entries.empty(); }
  double squared_norm() const;
  double dot(std::span<const double> dense) const;

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

struct FeatureMatrix {
  std::size_t dim = 0;
  std::vector<SparseVector> rows;
  std::vector<std::string> row_ids;
  std::optional<std::vector<Label>> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t nnz() const;
  // +1 malicious / -1 benign; requires labels.
  std::vector<int> signs() const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

/// Header "rows cols nnz" followed by "row<TAB>col<TAB>value" per nonzero.
std::string render_triplets(const FeatureMatrix& matrix);

}  // namespace ntmal
