#include "ntmal/sparse.hpp"

#include "ntmal/error.hpp"
#include "ntmal/format.hpp"

namespace ntmal {

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * e.value;
  return sum;
}

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& e : entries) sum += e.value * dense[e.index];
  return sum;
}

std::size_t FeatureMatrix::nnz() const {
  std::size_t total = 0;
  for (const auto& row : rows) total += row.entries.size();
  return total;
}

std::vector<int> FeatureMatrix::signs() const {
  if (!labels) throw Error(ErrorKind::DegenerateLabels, "feature matrix has no labels");
  std::vector<int> out;
  out.reserve(labels->size());
  for (Label l : *labels) out.push_back(to_sign(l));
  return out;
}

std::string render_triplets(const FeatureMatrix& matrix) {
  std::string out = std::to_string(matrix.size()) + " " + std::to_string(matrix.dim) + " " +
                    std::to_string(matrix.nnz()) + "\n";
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    for (const auto& e : matrix.rows[r].entries) {
      out += std::to_string(r);
      out += '\t';
      out += std::to_string(e.index);
      out += '\t';
      out += format_double(e.value);
      out += '\n';
    }
  }
  return out;
}

}  // namespace ntmal
