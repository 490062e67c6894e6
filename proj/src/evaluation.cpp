#include "ntmal/evaluation.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>

#include "ntmal/error.hpp"
#include "ntmal/format.hpp"

namespace ntmal {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::LengthMismatch,
                std::to_string(a) + " predictions vs " + std::to_string(b) + " truths");
  }
  if (a == 0) throw Error(ErrorKind::LengthMismatch, "nothing to evaluate");
}

ClassScores scores_for(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassScores s;
  s.precision = ratio(tp, tp + fp);
  s.recall = ratio(tp, tp + fn);
  s.f1 = f1_score(s.precision, s.recall);
  s.support = tp + fn;
  return s;
}

std::string table_row(const std::string& name, const ClassScores& s) {
  std::string row = name;
  row.resize(15, ' ');
  row += format_fixed(s.precision, 2) + "       " + format_fixed(s.recall, 2) + "    " +
         format_fixed(s.f1, 2) + "      " + std::to_string(s.support) + "\n";
  return row;
}

std::string csv_row(const std::string& name, const ClassScores& s) {
  return name + "," + format_double(s.precision) + "," + format_double(s.recall) + "," +
         format_double(s.f1) + "," + std::to_string(s.support) + "\n";
}

}  // namespace

double ConfusionCounts::accuracy() const { return ratio(tp + tn, total()); }

ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> truths) {
  check_lengths(predictions.size(), truths.size());
  ConfusionCounts c;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool pred = predictions[i] > 0;
    const bool truth = truths[i] > 0;
    if (pred && truth) ++c.tp;
    else if (pred) ++c.fp;
    else if (truth) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double precision(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fp); }

double recall(const ConfusionCounts& c) { return ratio(c.tp, c.tp + c.fn); }

double f1_score(double ps, double rs) {
  const double den = ps + rs;
  return den == 0.0 ? 0.0 : 2.0 * ps * rs / den;
}

EvaluationReport classification_report(std::span<const int> predictions, std::span<const int> truths,
                                       Averaging averaging) {
  EvaluationReport r;
  r.counts = confusion(predictions, truths);
  const auto& c = r.counts;
  r.malware = scores_for(c.tp, c.fp, c.fn);
  r.benign = scores_for(c.tn, c.fn, c.fp);

  const std::size_t total = c.total();
  double wb = 0.5, wm = 0.5;
  if (averaging == Averaging::Weighted) {
    wb = ratio(r.benign.support, total);
    wm = ratio(r.malware.support, total);
  }
  r.average.precision = wb * r.benign.precision + wm * r.malware.precision;
  r.average.recall = wb * r.benign.recall + wm * r.malware.recall;
  r.average.f1 = wb * r.benign.f1 + wm * r.malware.f1;
  r.average.support = total;
  return r;
}

std::string render_report_table(const EvaluationReport& report) {
  std::string out = "               Precision  Recall  F1-Score  Support\n";
  out += table_row("Benign", report.benign);
  out += table_row("Malware", report.malware);
  out += table_row("Average/Total", report.average);
  return out;
}

std::string render_report_csv(const EvaluationReport& report) {
  std::string out = "class,precision,recall,f1,support\n";
  out += csv_row("benign", report.benign);
  out += csv_row("malware", report.malware);
  out += csv_row("average", report.average);
  return out;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const int> truths) {
  check_lengths(scores.size(), truths.size());
  std::size_t positives = 0;
  for (int t : truths) positives += t > 0;
  const std::size_t negatives = truths.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw Error(ErrorKind::SingleClass, "ROC needs both classes in the truths");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // Twice the area in units of (1/negatives) x (1/positives), kept integral so
  // the result equals the pairwise-ordering count exactly.
  std::uint64_t doubled_area = 0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    const std::size_t prev_tp = tp, prev_fp = fp;
    while (k < order.size() && scores[order[k]] == threshold) {
      if (truths[order[k]] > 0) ++tp;
      else ++fp;
      ++k;
    }
    doubled_area += static_cast<std::uint64_t>(fp - prev_fp) * (tp + prev_tp);
    curve.points.push_back({ratio(fp, negatives), ratio(tp, positives), threshold});
  }
  curve.auc = static_cast<double>(doubled_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

std::string render_roc_csv(const RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.threshold) + "," + format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  }
  out += "auc," + format_double(curve.auc) + "\n";
  return out;
}

std::vector<FeatureWeight> top_features(const LinearModel& model, const Vocabulary& vocab,
                                        std::size_t k) {
  if (model.dim() != vocab.size()) {
    throw Error(ErrorKind::DimensionMismatch, "model dim " + std::to_string(model.dim()) +
                                                  " vs vocabulary size " + std::to_string(vocab.size()));
  }
  k = std::min(k, vocab.size());
  std::vector<std::size_t> order(vocab.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto by_weight = [&](std::size_t a, std::size_t b) {
    if (model.weights[a] != model.weights[b]) return model.weights[a] > model.weights[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    by_weight);
  std::vector<FeatureWeight> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({model.weights[order[i]], vocab.ngram(order[i])});
  return out;
}

}  // namespace ntmal
