#include "ntmal/sgd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ntmal/error.hpp"
#include "ntmal/serial.hpp"

namespace ntmal {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// Moves v toward zero by `amount` without crossing it.
double shrink(double v, double amount) {
  if (v > 0.0) return std::max(0.0, v - amount);
  if (v < 0.0) return std::min(0.0, v + amount);
  return v;
}

double relative_improvement(double previous, double current) {
  if (previous == 0.0) return 0.0;
  return (previous - current) / std::abs(previous);
}

// Weights represented as w = scale * v. The absolute penalty is tracked as a
// running total in v units; coordinate j has absorbed `applied[j]` of it.
class LazyWeights {
 public:
  explicit LazyWeights(std::size_t dim) : v_(dim, 0.0), applied_(dim, 0.0) {}

  void sync(const SparseVector& x) {
    for (const auto& e : x.entries) sync(e.index);
  }

  double dot(const SparseVector& x) const {
    double sum = 0.0;
    for (const auto& e : x.entries) sum += e.value * v_[e.index];
    return scale_ * sum;
  }

  void rescale(double factor) {
    scale_ *= factor;
    if (scale_ == 0.0) {
      std::fill(v_.begin(), v_.end(), 0.0);
      reset_penalty();
      scale_ = 1.0;
    } else if (std::abs(scale_) < 1e-9) {
      materialize_into_v();
    }
  }

  void add(const SparseVector& x, double step) {
    const double s = step / scale_;
    for (const auto& e : x.entries) v_[e.index] += s * e.value;
  }

  void accumulate_penalty(double amount) {
    if (amount != 0.0) total_ += amount / std::abs(scale_);
  }

  std::vector<double> weights() const {
    std::vector<double> w(v_.size());
    for (std::size_t j = 0; j < v_.size(); ++j) w[j] = scale_ * shrink(v_[j], total_ - applied_[j]);
    return w;
  }

 private:
  void sync(std::uint32_t j) {
    v_[j] = shrink(v_[j], total_ - applied_[j]);
    applied_[j] = total_;
  }

  void reset_penalty() {
    std::fill(applied_.begin(), applied_.end(), 0.0);
    total_ = 0.0;
  }

  void materialize_into_v() {
    for (std::size_t j = 0; j < v_.size(); ++j) v_[j] = scale_ * shrink(v_[j], total_ - applied_[j]);
    reset_penalty();
    scale_ = 1.0;
  }

  std::vector<double> v_;
  std::vector<double> applied_;
  double scale_ = 1.0;
  double total_ = 0.0;
};

std::vector<std::size_t> identity_order(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

void check_matrix(const FeatureMatrix& matrix, std::span<const int> labels) {
  if (labels.size() != matrix.size()) {
    throw Error(ErrorKind::LengthMismatch, "labels length " + std::to_string(labels.size()) +
                                               " vs rows " + std::to_string(matrix.size()));
  }
  check_binary_labels(matrix.size(), labels);
}

}  // namespace

void check_binary_labels(std::size_t rows, std::span<const int> labels) {
  if (rows == 0) throw Error(ErrorKind::DegenerateLabels, "training set is empty");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == 1) pos = true;
    else if (y == -1) neg = true;
    else throw Error(ErrorKind::DegenerateLabels, "labels must be +1 or -1");
  }
  if (!pos || !neg) throw Error(ErrorKind::DegenerateLabels, "both classes must be present");
}

PenaltyMix penalty_mix(Penalty penalty, double phi) {
  switch (penalty) {
    case Penalty::L1: return {0.0, 0.5};
    case Penalty::L2: return {1.0, 0.0};
    case Penalty::ElasticNet: return {phi, 1.0 - phi};
  }
  return {1.0, 0.0};
}

double regularizer_value(std::span<const double> w, Penalty penalty, double phi) {
  const auto mix = penalty_mix(penalty, phi);
  double squares = 0.0, absolutes = 0.0;
  for (double wi : w) {
    squares += wi * wi;
    absolutes += std::abs(wi);
  }
  return 0.5 * mix.squared * squares + mix.absolute * absolutes;
}

std::vector<double> regularizer_subgradient(std::span<const double> w, Penalty penalty, double phi) {
  const auto mix = penalty_mix(penalty, phi);
  std::vector<double> g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) g[i] = mix.squared * w[i] + mix.absolute * sign(w[i]);
  return g;
}

double learning_rate(double t, double alpha, double t0) { return 1.0 / (alpha * (t0 + t)); }

double sgd_objective(std::span<const double> w, double b, const FeatureMatrix& matrix,
                     std::span<const int> labels, double alpha, Penalty penalty, double phi) {
  double loss = 0.0;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    loss += hinge_loss(matrix.rows[i].dot(w) + b, labels[i]);
  }
  const double mean = matrix.size() ? loss / static_cast<double>(matrix.size()) : 0.0;
  return mean + alpha * regularizer_value(w, penalty, phi);
}

ObjectiveGradient sgd_objective_subgradient(std::span<const double> w, double b,
                                            const FeatureMatrix& matrix, std::span<const int> labels,
                                            double alpha, Penalty penalty, double phi) {
  ObjectiveGradient g;
  g.weights = regularizer_subgradient(w, penalty, phi);
  for (auto& gi : g.weights) gi *= alpha;
  const double inv_n = 1.0 / static_cast<double>(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const int y = labels[i];
    if (y * (matrix.rows[i].dot(w) + b) < 1.0) {
      for (const auto& e : matrix.rows[i].entries) g.weights[e.index] -= inv_n * y * e.value;
      g.bias -= inv_n * y;
    }
  }
  return g;
}

void sgd_step(std::vector<double>& w, double& b, const SparseVector& x, int label, double alpha,
              double eta, Penalty penalty, double phi) {
  const auto mix = penalty_mix(penalty, phi);
  const bool violated = label * (x.dot(w) + b) < 1.0;
  const double factor = 1.0 - eta * alpha * mix.squared;
  for (auto& wi : w) wi *= factor;
  if (violated) {
    for (const auto& e : x.entries) w[e.index] += eta * label * e.value;
    b += eta * label;
  }
  const double amount = eta * alpha * mix.absolute;
  if (amount != 0.0) {
    for (auto& wi : w) wi = shrink(wi, amount);
  }
}

LinearModel train_sgd(const FeatureMatrix& matrix, std::span<const int> labels,
                      const SgdConfig& config) {
  config.validate();
  check_matrix(matrix, labels);
  const auto mix = penalty_mix(config.penalty, config.phi);
  const double t0 = config.effective_t0();

  LazyWeights weights(matrix.dim);
  double bias = 0.0;
  double previous = 1.0;  // E(0, 0): every hinge term is 1, R(0) = 0
  std::mt19937_64 rng(config.seed);
  auto order = identity_order(matrix.size());
  double t = 0.0;
  int epoch = 0;
  bool converged = false;

  while (epoch < config.epochs) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      const auto& x = matrix.rows[i];
      const int y = labels[i];
      t += 1.0;
      const double eta = learning_rate(t, config.alpha, t0);
      weights.sync(x);
      const bool violated = y * (weights.dot(x) + bias) < 1.0;
      weights.rescale(1.0 - eta * config.alpha * mix.squared);
      if (violated) {
        weights.add(x, eta * y);
        bias += eta * y;
      }
      weights.accumulate_penalty(eta * config.alpha * mix.absolute);
      weights.sync(x);
    }
    ++epoch;
    const auto w = weights.weights();
    const double current =
        sgd_objective(w, bias, matrix, labels, config.alpha, config.penalty, config.phi);
    if (relative_improvement(previous, current) < config.tol) {
      converged = true;
      break;
    }
    previous = current;
  }

  LinearModel model;
  model.weights = weights.weights();
  model.bias = bias;
  model.summary = TrainingSummary{config, epoch, converged};
  return model;
}

namespace serial {

LinearModel train_sgd(const FeatureMatrix& matrix, std::span<const int> labels,
                      const SgdConfig& config) {
  config.validate();
  check_matrix(matrix, labels);
  const double t0 = config.effective_t0();
  std::vector<double> w(matrix.dim, 0.0);
  double bias = 0.0;
  double previous = 1.0;
  std::mt19937_64 rng(config.seed);
  auto order = identity_order(matrix.size());
  double t = 0.0;
  int epoch = 0;
  bool converged = false;

  while (epoch < config.epochs) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i : order) {
      t += 1.0;
      sgd_step(w, bias, matrix.rows[i], labels[i], config.alpha,
               learning_rate(t, config.alpha, t0), config.penalty, config.phi);
    }
    ++epoch;
    const double current =
        sgd_objective(w, bias, matrix, labels, config.alpha, config.penalty, config.phi);
    if (relative_improvement(previous, current) < config.tol) {
      converged = true;
      break;
    }
    previous = current;
  }

  LinearModel model;
  model.weights = std::move(w);
  model.bias = bias;
  model.summary = TrainingSummary{config, epoch, converged};
  return model;
}

}  // namespace serial

}  // namespace ntmal
