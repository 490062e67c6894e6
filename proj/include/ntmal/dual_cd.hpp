#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ntmal/linear_model.hpp"
#include "ntmal/sparse.hpp"
#include "ntmal/trainer_config.hpp"

namespace ntmal {

// Coordinate descent on the L1-loss SVM dual
//   min_a  1/2 a'Qa - e'a   s.t. 0 <= a_i <= C,   Q_ij = y_i y_j x_i.x_j
// Every row is augmented with a constant 1 so the bias is the last weight
// and the equality constraint sum a_i y_i = 0 disappears.

struct DualState {
  std::vector<double> alpha;  // one multiplier per row
  std::vector<double> w;      // sum_i alpha_i y_i [x_i, 1]; size dim + 1
  int outer_iter = 0;
};

DualState initial_dual_state(const FeatureMatrix& matrix);

/// Augmented x_i.w (includes the bias coordinate).
double augmented_dot(const SparseVector& x, std::span<const double> w);

double q_entry(std::size_t i, std::size_t j, const FeatureMatrix& matrix, std::span<const int> labels);

/// 1/2 |w|^2 - sum alpha, equal to 1/2 a'Qa - e'a while w is in sync.
double dual_objective(const DualState& state);

/// Recomputes sum_i alpha_i y_i [x_i, 1] from scratch.
std::vector<double> recover_weights(std::span<const double> alpha, const FeatureMatrix& matrix,
                                    std::span<const int> labels);

/// G_i = y_i w.x_i - 1, projected onto the feasible directions of the box.
double projected_gradient(std::size_t i, const DualState& state, const FeatureMatrix& matrix,
                          std::span<const int> labels, double C);

/// Exact minimization over coordinate i: alpha_i <- clip(alpha_i - G_i/Q_ii, 0, C).
void cd_update(std::size_t i, DualState& state, const FeatureMatrix& matrix,
               std::span<const int> labels, double C);

using DualObserver = std::function<void(std::size_t row, const DualState& state)>;

/// Sweeps rows in a seeded permutation until every projected gradient is
/// below tol or max_outer sweeps have run. Reaching max_outer is reported in
/// the summary (converged = false), not thrown. `observer` sees the state
/// after every coordinate update.
LinearModel train_dual_cd(const FeatureMatrix& matrix, std::span<const int> labels,
                          const DualConfig& config, const DualObserver& observer = {});

/// Same run, returning the final dual state as well.
LinearModel train_dual_cd(const FeatureMatrix& matrix, std::span<const int> labels,
                          const DualConfig& config, DualState& final_state,
                          const DualObserver& observer = {});

}  // namespace ntmal
