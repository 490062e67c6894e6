#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ntmal/linear_model.hpp"
#include "ntmal/trace.hpp"
#include "ntmal/trainer_config.hpp"

namespace ntmal {

struct SplitSpec {
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  bool stratified = true;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

/// Train size is round(fraction * n); with stratification each class keeps
/// its proportion to within one item and lands in both parts. Throws
/// Error(InsufficientData) when that is impossible.
SplitIndices train_test_split_indices(std::span<const Label> labels, const SplitSpec& spec);

struct TraceSplit {
  std::vector<SyscallTrace> train;
  std::vector<SyscallTrace> test;
};

/// Every trace must be labeled.
TraceSplit train_test_split(std::span<const SyscallTrace> corpus, const SplitSpec& spec);

std::vector<double> default_alpha_grid();
std::vector<double> default_tol_grid();

struct GridSpec {
  TrainerKind trainer = TrainerKind::Sgd;
  std::vector<double> alpha_grid = default_alpha_grid();
  std::vector<double> tol_grid = default_tol_grid();
  // Base configs; each cell overrides alpha (C = 1/alpha for dual CD) and tol.
  SgdConfig sgd;
  DualConfig dual;
};

struct GridCell {
  double alpha;
  double tol;
  double f1;

  friend bool operator==(const GridCell&, const GridCell&) = default;
};

struct GridSearchResult {
  TrainerKind trainer = TrainerKind::Sgd;
  std::vector<GridCell> table;  // alpha-major, grid order
  GridCell best{};
};

/// Trains the model a single grid cell describes.
LinearModel train_cell(const FeatureMatrix& train, std::span<const int> labels,
                       const GridSpec& spec, double alpha, double tol);

/// Malware-positive F1 of `model` on `validation`.
double validation_f1(const LinearModel& model, const FeatureMatrix& validation);

/// Trains one model per (alpha, tol) on `train`, scores F1 on `validation`.
/// Cells run in parallel; the table is always in grid order. Ties for best
/// go to the smallest alpha, then the smallest tol.
GridSearchResult grid_search(const FeatureMatrix& train, const FeatureMatrix& validation,
                             const GridSpec& spec);

/// "alpha,tol,f1", one row per cell.
std::string render_grid_csv(const GridSearchResult& result);

}  // namespace ntmal
