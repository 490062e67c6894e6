#include "ntmal/dual_cd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ntmal/error.hpp"
#include "ntmal/sgd.hpp"

namespace ntmal {

DualState initial_dual_state(const FeatureMatrix& matrix) {
  DualState state;
  state.alpha.assign(matrix.size(), 0.0);
  state.w.assign(matrix.dim + 1, 0.0);
  return state;
}

double augmented_dot(const SparseVector& x, std::span<const double> w) {
  return x.dot(w) + w[x.dim];
}

double q_entry(std::size_t i, std::size_t j, const FeatureMatrix& matrix, std::span<const int> labels) {
  const auto& a = matrix.rows[i].entries;
  const auto& b = matrix.rows[j].entries;
  double dot = 1.0;  // augmented coordinate
  for (std::size_t p = 0, q = 0; p < a.size() && q < b.size();) {
    if (a[p].index == b[q].index) {
      dot += a[p++].value * b[q++].value;
    } else if (a[p].index < b[q].index) {
      ++p;
    } else {
      ++q;
    }
  }
  return labels[i] * labels[j] * dot;
}

double dual_objective(const DualState& state) {
  double squares = 0.0;
  for (double wi : state.w) squares += wi * wi;
  return 0.5 * squares - std::accumulate(state.alpha.begin(), state.alpha.end(), 0.0);
}

std::vector<double> recover_weights(std::span<const double> alpha, const FeatureMatrix& matrix,
                                    std::span<const int> labels) {
  std::vector<double> w(matrix.dim + 1, 0.0);
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (alpha[i] == 0.0) continue;
    const double coef = alpha[i] * labels[i];
    for (const auto& e : matrix.rows[i].entries) w[e.index] += coef * e.value;
    w[matrix.dim] += coef;
  }
  return w;
}

namespace {

double gradient(std::size_t i, const DualState& state, const FeatureMatrix& matrix,
                std::span<const int> labels) {
  return labels[i] * augmented_dot(matrix.rows[i], state.w) - 1.0;
}

double project(double g, double alpha, double C) {
  if (alpha <= 0.0 && g >= 0.0) return 0.0;
  if (alpha >= C && g <= 0.0) return 0.0;
  return g;
}

double max_projected_gradient(const DualState& state, const FeatureMatrix& matrix,
                              std::span<const int> labels, double C) {
  double worst = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    worst = std::max(worst, std::abs(projected_gradient(i, state, matrix, labels, C)));
  }
  return worst;
}

}  // namespace

double projected_gradient(std::size_t i, const DualState& state, const FeatureMatrix& matrix,
                          std::span<const int> labels, double C) {
  return project(gradient(i, state, matrix, labels), state.alpha[i], C);
}

void cd_update(std::size_t i, DualState& state, const FeatureMatrix& matrix,
               std::span<const int> labels, double C) {
  const auto& x = matrix.rows[i];
  const double qii = x.squared_norm() + 1.0;
  if (!(qii > 0.0)) return;
  const double g = gradient(i, state, matrix, labels);
  if (project(g, state.alpha[i], C) == 0.0) return;
  const double old_alpha = state.alpha[i];
  const double new_alpha = std::clamp(old_alpha - g / qii, 0.0, C);
  const double delta = (new_alpha - old_alpha) * labels[i];
  if (delta == 0.0) return;
  state.alpha[i] = new_alpha;
  for (const auto& e : x.entries) state.w[e.index] += delta * e.value;
  state.w[matrix.dim] += delta;
}

LinearModel train_dual_cd(const FeatureMatrix& matrix, std::span<const int> labels,
                          const DualConfig& config, const DualObserver& observer) {
  DualState state;
  return train_dual_cd(matrix, labels, config, state, observer);
}

LinearModel train_dual_cd(const FeatureMatrix& matrix, std::span<const int> labels,
                          const DualConfig& config, DualState& state,
                          const DualObserver& observer) {
  config.validate();
  if (labels.size() != matrix.size()) {
    throw Error(ErrorKind::LengthMismatch, "labels length " + std::to_string(labels.size()) +
                                               " vs rows " + std::to_string(matrix.size()));
  }
  check_binary_labels(matrix.size(), labels);

  state = initial_dual_state(matrix);
  std::vector<std::size_t> order(matrix.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  bool converged = false;

  while (state.outer_iter < config.max_outer) {
    std::shuffle(order.begin(), order.end(), rng);
    double sweep_max = 0.0;
    for (std::size_t i : order) {
      sweep_max = std::max(sweep_max, std::abs(projected_gradient(i, state, matrix, labels, config.C)));
      cd_update(i, state, matrix, labels, config.C);
      if (observer) observer(i, state);
    }
    ++state.outer_iter;
    // Gradients seen during the sweep are stale by its end; confirm at the
    // final point before stopping.
    if (sweep_max < config.tol &&
        max_projected_gradient(state, matrix, labels, config.C) < config.tol) {
      converged = true;
      break;
    }
  }

  LinearModel model;
  model.weights.assign(state.w.begin(), state.w.begin() + static_cast<std::ptrdiff_t>(matrix.dim));
  model.bias = state.w[matrix.dim];
  model.summary = TrainingSummary{config, state.outer_iter, converged};
  return model;
}

}  // namespace ntmal
