#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ntmal/sparse.hpp"
#include "ntmal/trainer_config.hpp"

namespace ntmal {

struct TrainingSummary {
  TrainerConfig config;
  // Epochs for SGD, outer sweeps for dual coordinate descent.
  int iterations = 0;
  bool converged = false;

  friend bool operator==(const TrainingSummary&, const TrainingSummary&) = default;
};

/// f(x) = w.x + b over a fixed feature dimension.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  std::optional<TrainingSummary> summary;

  std::size_t dim() const { return weights.size(); }

  friend bool operator==(const LinearModel&, const LinearModel&) = default;
};

/// Throws Error(DimensionMismatch) when x.dim != model.dim().
double decision_function(const LinearModel& model, const SparseVector& x);

/// +1 (malicious) when the score is >= 0, else -1.
int predict(const LinearModel& model, const SparseVector& x);

double hinge_loss(double score, int label);

/// Scores every row; rows are independent so this runs in parallel.
std::vector<double> decision_scores(const LinearModel& model, const FeatureMatrix& matrix);
std::vector<int> predict_all(const LinearModel& model, const FeatureMatrix& matrix);

}  // namespace ntmal
