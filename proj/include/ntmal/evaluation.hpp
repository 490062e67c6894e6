#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ntmal/linear_model.hpp"
#include "ntmal/vectorizer.hpp"

namespace ntmal {

// Malware (+1) is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const { return tp + fp + tn + fn; }
  double accuracy() const;

  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths);

// Zero denominators give 0.
double precision(const ConfusionCounts& c);
double recall(const ConfusionCounts& c);
double f1_score(double precision, double recall);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

enum class Averaging { Weighted, Macro };

struct EvaluationReport {
  ClassScores benign;
  ClassScores malware;
  ClassScores average;
  ConfusionCounts counts;
  double train_seconds = 0.0;
  double test_seconds = 0.0;
};

EvaluationReport classification_report(std::span<const int> predictions, std::span<const int> truths,
                                       Averaging averaging = Averaging::Weighted);

/// Benign / Malware / Average-Total rows by Precision / Recall / F1-Score.
std::string render_report_table(const EvaluationReport& report);
/// "class,precision,recall,f1,support" with full-precision values.
std::string render_report_csv(const EvaluationReport& report);

struct RocPoint {
  double fpr;
  double tpr;
  double threshold;
};

struct RocCurve {
  std::vector<RocPoint> points;  // descending threshold, (0,0) first, (1,1) last
  double auc = 0.0;
};

/// Thresholds are the distinct observed scores plus a leading +inf; a row
/// is predicted positive when score >= threshold. Throws Error(SingleClass)
/// unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const int> truths);

/// "threshold,fpr,tpr" rows followed by an "auc,<value>" footer.
std::string render_roc_csv(const RocCurve& curve);

struct FeatureWeight {
  double coefficient;
  std::string ngram;
};

/// The k features with the largest signed coefficient, descending (ties by
/// vocabulary index). k beyond the vocabulary size returns every feature.
std::vector<FeatureWeight> top_features(const LinearModel& model, const Vocabulary& vocab,
                                        std::size_t k);

}  // namespace ntmal
