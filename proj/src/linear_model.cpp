#include "ntmal/linear_model.hpp"

#include <algorithm>

#include "ntmal/error.hpp"
#include "ntmal/serial.hpp"

namespace ntmal {

namespace {

void check_dim(const LinearModel& model, std::size_t dim) {
  if (dim != model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "vector dim " + std::to_string(dim) +
                                                  " vs model dim " + std::to_string(model.dim()));
  }
}

}  // namespace

double decision_function(const LinearModel& model, const SparseVector& x) {
  check_dim(model, x.dim);
  return x.dot(model.weights) + model.bias;
}

int predict(const LinearModel& model, const SparseVector& x) {
  return decision_function(model, x) >= 0.0 ? 1 : -1;
}

double hinge_loss(double score, int label) { return std::max(0.0, 1.0 - label * score); }

std::vector<double> decision_scores(const LinearModel& model, const FeatureMatrix& matrix) {
  check_dim(model, matrix.dim);
  std::vector<double> scores(matrix.size());
  const auto n = static_cast<std::ptrdiff_t>(matrix.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    scores[i] = matrix.rows[i].dot(model.weights) + model.bias;
  }
  return scores;
}

std::vector<int> predict_all(const LinearModel& model, const FeatureMatrix& matrix) {
  auto scores = decision_scores(model, matrix);
  std::vector<int> out(scores.size());
  std::transform(scores.begin(), scores.end(), out.begin(),
                 [](double s) { return s >= 0.0 ? 1 : -1; });
  return out;
}

namespace serial {

std::vector<double> decision_scores(const LinearModel& model, const FeatureMatrix& matrix) {
  std::vector<double> scores;
  scores.reserve(matrix.size());
  for (const auto& row : matrix.rows) scores.push_back(decision_function(model, row));
  return scores;
}

}  // namespace serial

}  // namespace ntmal
