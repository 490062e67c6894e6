#pragma once

// Single-threaded reference versions of the OpenMP kernels. They follow the
// plainest loop structure available and are kept so tests can check the
// parallel paths bit-for-bit; the benchmark target compares the two.

#include <span>
#include <vector>

#include "ntmal/linear_model.hpp"
#include "ntmal/model_selection.hpp"
#include "ntmal/sgd.hpp"
#include "ntmal/vectorizer.hpp"

namespace ntmal::serial {

Vocabulary build_vocabulary(std::span<const SyscallTrace> corpus, NgramRange range);

FeatureMatrix transform(const Vectorizer& vectorizer, std::span<const SyscallTrace> corpus);

FittedFeatures fit_transform(std::span<const SyscallTrace> corpus, NgramRange range,
                             IdfOptions options = {});

/// Dense SGD applying sgd_step literally at every step (O(dim) per step).
LinearModel train_sgd(const FeatureMatrix& matrix, std::span<const int> labels,
                      const SgdConfig& config);

std::vector<double> decision_scores(const LinearModel& model, const FeatureMatrix& matrix);

GridSearchResult grid_search(const FeatureMatrix& train, const FeatureMatrix& validation,
                             const GridSpec& spec);

}  // namespace ntmal::serial
