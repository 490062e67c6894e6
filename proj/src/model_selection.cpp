#include "ntmal/model_selection.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>

#include "ntmal/dual_cd.hpp"
#include "ntmal/error.hpp"
#include "ntmal/evaluation.hpp"
#include "ntmal/format.hpp"
#include "ntmal/serial.hpp"
#include "ntmal/sgd.hpp"

namespace ntmal {

namespace {

std::size_t round_half_up(double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); }

void check_fraction(double f) {
  if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::ConfigInvalid, "train_fraction must be in (0, 1)");
}

void check_grid(const FeatureMatrix& train, const FeatureMatrix& validation, const GridSpec& spec) {
  if (spec.alpha_grid.empty() || spec.tol_grid.empty()) {
    throw Error(ErrorKind::ConfigInvalid, "grids must be non-empty");
  }
  if (!train.labels || !validation.labels) {
    throw Error(ErrorKind::DegenerateLabels, "grid search needs labeled matrices");
  }
  check_binary_labels(validation.size(), validation.signs());
}

std::string cell_name(double alpha, double tol) {
  return "cell alpha=" + format_double(alpha) + " tol=" + format_double(tol);
}

GridCell evaluate_cell(const FeatureMatrix& train, std::span<const int> labels,
                       const FeatureMatrix& validation, const GridSpec& spec, double alpha, double tol) {
  try {
    auto model = train_cell(train, labels, spec, alpha, tol);
    return {alpha, tol, validation_f1(model, validation)};
  } catch (const Error& e) {
    throw Error(e.kind(), cell_name(alpha, tol) + ": " + e.what());
  }
}

GridSearchResult assemble(const GridSpec& spec, std::vector<GridCell> table) {
  GridSearchResult result;
  result.trainer = spec.trainer;
  result.table = std::move(table);
  result.best = result.table.front();
  for (const auto& cell : result.table) {
    const auto& b = result.best;
    if (cell.f1 > b.f1 || (cell.f1 == b.f1 && (cell.alpha < b.alpha ||
                                                (cell.alpha == b.alpha && cell.tol < b.tol)))) {
      result.best = cell;
    }
  }
  return result;
}

}  // namespace

SplitIndices train_test_split_indices(std::span<const Label> labels, const SplitSpec& spec) {
  check_fraction(spec.train_fraction);
  const std::size_t n = labels.size();
  std::mt19937_64 rng(spec.seed);
  std::vector<std::size_t> chosen;

  if (!spec.stratified) {
    const std::size_t n_train = round_half_up(spec.train_fraction * static_cast<double>(n));
    if (n_train == 0 || n_train >= n) {
      throw Error(ErrorKind::InsufficientData, "split leaves one side empty");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    chosen.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  } else {
    std::vector<std::size_t> by_class[2];
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == Label::Malicious].push_back(i);
    for (const auto& members : by_class) {
      if (members.size() < 2) {
        throw Error(ErrorKind::InsufficientData, "each class needs at least 2 traces for a stratified split");
      }
    }
    // Largest-remainder allocation of round(f * n) across the two classes.
    const std::size_t n_train = round_half_up(spec.train_fraction * static_cast<double>(n));
    std::size_t quota[2];
    double remainder[2];
    for (int c = 0; c < 2; ++c) {
      const double exact = spec.train_fraction * static_cast<double>(by_class[c].size());
      quota[c] = static_cast<std::size_t>(std::floor(exact));
      remainder[c] = exact - std::floor(exact);
    }
    std::size_t assigned = quota[0] + quota[1];
    while (assigned < n_train) {
      const int c = remainder[1] >= remainder[0] ? 1 : 0;
      ++quota[c];
      remainder[c] = -1.0;
      ++assigned;
    }
    // Both classes must land on both sides; a clamped class hands the
    // difference to the other so the total stays round(f * n).
    if (n_train < 2 || n_train > n - 2) {
      throw Error(ErrorKind::InsufficientData, "train fraction leaves a class out of one split");
    }
    for (int c = 0; c < 2; ++c) {
      const std::size_t clamped = std::clamp<std::size_t>(quota[c], 1, by_class[c].size() - 1);
      if (clamped != quota[c]) {
        quota[c] = clamped;
        quota[1 - c] = n_train - clamped;
      }
    }
    for (int c = 0; c < 2; ++c) {
      auto members = by_class[c];
      std::shuffle(members.begin(), members.end(), rng);
      chosen.insert(chosen.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
    }
  }

  std::sort(chosen.begin(), chosen.end());
  SplitIndices split;
  split.train = chosen;
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < chosen.size() && chosen[k] == i) ++k;
    else split.test.push_back(i);
  }
  return split;
}

TraceSplit train_test_split(std::span<const SyscallTrace> corpus, const SplitSpec& spec) {
  std::vector<Label> labels;
  labels.reserve(corpus.size());
  for (const auto& trace : corpus) {
    if (!trace.label) throw Error(ErrorKind::InsufficientData, "unlabeled trace " + trace.source_id);
    labels.push_back(*trace.label);
  }
  const auto idx = train_test_split_indices(labels, spec);
  TraceSplit out;
  for (auto i : idx.train) out.train.push_back(corpus[i]);
  for (auto i : idx.test) out.test.push_back(corpus[i]);
  return out;
}

std::vector<double> default_alpha_grid() {
  return {100, 10, 1, 0.1, 0.01, 0.001, 0.0001, 0.00001, 0.000001, 0.0000001};
}

std::vector<double> default_tol_grid() {
  return {100, 10, 1, 0.1, 0.01, 0.001, 0.0001, 0.00005};
}

LinearModel train_cell(const FeatureMatrix& train, std::span<const int> labels,
                       const GridSpec& spec, double alpha, double tol) {
  if (spec.trainer == TrainerKind::Sgd) {
    SgdConfig config = spec.sgd;
    config.alpha = alpha;
    config.tol = tol;
    return train_sgd(train, labels, config);
  }
  DualConfig config = spec.dual;
  config.C = 1.0 / alpha;
  config.tol = tol;
  return train_dual_cd(train, labels, config);
}

double validation_f1(const LinearModel& model, const FeatureMatrix& validation) {
  const auto c = confusion(predict_all(model, validation), validation.signs());
  return f1_score(precision(c), recall(c));
}

GridSearchResult grid_search(const FeatureMatrix& train, const FeatureMatrix& validation,
                             const GridSpec& spec) {
  check_grid(train, validation, spec);
  const auto labels = train.signs();
  check_binary_labels(train.size(), labels);

  const std::size_t n_tol = spec.tol_grid.size();
  const auto cells = static_cast<std::ptrdiff_t>(spec.alpha_grid.size() * n_tol);
  std::vector<GridCell> table(static_cast<std::size_t>(cells));
  std::vector<std::exception_ptr> failures(table.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < cells; ++k) {
    const auto a = static_cast<std::size_t>(k) / n_tol;
    const auto t = static_cast<std::size_t>(k) % n_tol;
    try {
      table[k] = evaluate_cell(train, labels, validation, spec, spec.alpha_grid[a], spec.tol_grid[t]);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return assemble(spec, std::move(table));
}

std::string render_grid_csv(const GridSearchResult& result) {
  std::string out = "alpha,tol,f1\n";
  for (const auto& cell : result.table) {
    out += format_double(cell.alpha) + "," + format_double(cell.tol) + "," + format_double(cell.f1) + "\n";
  }
  return out;
}

namespace serial {

GridSearchResult grid_search(const FeatureMatrix& train, const FeatureMatrix& validation,
                             const GridSpec& spec) {
  check_grid(train, validation, spec);
  const auto labels = train.signs();
  check_binary_labels(train.size(), labels);
  std::vector<GridCell> table;
  for (double alpha : spec.alpha_grid) {
    for (double tol : spec.tol_grid) {
      table.push_back(evaluate_cell(train, labels, validation, spec, alpha, tol));
    }
  }
  return assemble(spec, std::move(table));
}

}  // namespace serial

}  // namespace ntmal
