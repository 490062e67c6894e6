#pragma once

#include <span>
#include <vector>

#include "ntmal/linear_model.hpp"
#include "ntmal/sparse.hpp"
#include "ntmal/trainer_config.hpp"

namespace ntmal {

// Coefficients of the squared and absolute parts of R(w):
//   R(w) = squared/2 * sum w_i^2 + absolute * sum |w_i|
struct PenaltyMix {
  double squared;
  double absolute;
};

PenaltyMix penalty_mix(Penalty penalty, double phi);

double regularizer_value(std::span<const double> w, Penalty penalty, double phi);

/// L2: w_i; L1: sign(w_i)/2; elastic net: phi*w_i + (1-phi)*sign(w_i); sign(0) = 0.
std::vector<double> regularizer_subgradient(std::span<const double> w, Penalty penalty, double phi);

/// 1 / (alpha * (t0 + t)).
double learning_rate(double t, double alpha, double t0);

/// Regularized training error E(w, b) = mean hinge loss + alpha * R(w).
double sgd_objective(std::span<const double> w, double b, const FeatureMatrix& matrix,
                     std::span<const int> labels, double alpha, Penalty penalty, double phi);

struct ObjectiveGradient {
  std::vector<double> weights;
  double bias = 0.0;
};

/// alpha * dR/dw plus the averaged hinge subgradient (zero at and beyond
/// the margin).
ObjectiveGradient sgd_objective_subgradient(std::span<const double> w, double b,
                                            const FeatureMatrix& matrix, std::span<const int> labels,
                                            double alpha, Penalty penalty, double phi);

/// One stochastic step on a dense weight vector:
///   shrink w by (1 - eta*alpha*squared); on a margin violation add
///   eta*label*x to w and eta*label to b; then move every coordinate toward
///   zero by eta*alpha*absolute without crossing it.
/// The bias is never regularized.
void sgd_step(std::vector<double>& w, double& b, const SparseVector& x, int label, double alpha,
              double eta, Penalty penalty, double phi);

/// Plain per-sample SGD on the hinge loss. Rows are visited in a seeded
/// permutation each epoch; the step counter starts at 1. Stops early once an
/// epoch improves the objective by less than tol (relative).
///
/// Weights are kept as scale * v with the absolute-penalty part applied
/// lazily, so a step costs O(nnz(x)) instead of O(dim).
LinearModel train_sgd(const FeatureMatrix& matrix, std::span<const int> labels,
                      const SgdConfig& config);

void check_binary_labels(std::size_t rows, std::span<const int> labels);

}  // namespace ntmal
