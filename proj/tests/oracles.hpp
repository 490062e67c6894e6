#pragma once

// Independent brute-force references used only by tests. None of these call
// into the library's numerical code paths.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct DenseTfidf {
  std::vector<std::string> keys;             // sorted
  std::vector<std::vector<double>> rows;     // dense, one per document
};

// Enumerate every window, count densely, weight by ln((1+n)/(1+df)),
// divide by the Euclidean norm.
inline DenseTfidf dense_tfidf(const std::vector<std::vector<std::string>>& docs, std::size_t n_min,
                              std::size_t n_max) {
  std::vector<std::map<std::string, double>> counts(docs.size());
  std::map<std::string, int> all;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (std::size_t n = n_min; n <= n_max; ++n) {
      for (std::size_t i = 0; i + n <= docs[d].size(); ++i) {
        std::string key = docs[d][i];
        for (std::size_t k = 1; k < n; ++k) key += " " + docs[d][i + k];
        counts[d][key] += 1.0;
        all[key] = 0;
      }
    }
  }
  DenseTfidf out;
  for (auto& [key, idx] : all) {
    idx = static_cast<int>(out.keys.size());
    out.keys.push_back(key);
  }
  const std::size_t dim = out.keys.size();
  std::vector<double> df(dim, 0.0);
  for (const auto& c : counts) {
    for (const auto& [key, v] : c) df[all[key]] += 1.0;
  }
  for (const auto& c : counts) {
    std::vector<double> row(dim, 0.0);
    for (const auto& [key, v] : c) {
      const int j = all[key];
      row[j] = v * std::log((1.0 + docs.size()) / (1.0 + df[j]));
    }
    double norm = 0.0;
    for (double x : row) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : row) x /= norm;
    }
    out.rows.push_back(row);
  }
  return out;
}

// Pairs (positive, negative) ordered correctly, ties counted as half.
inline double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
  double numerator2 = 0.0;  // twice the count, so ties stay integral
  double pos = 0.0, neg = 0.0;
  for (int t : truths) (t > 0 ? pos : neg) += 1.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (truths[i] <= 0) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (truths[j] > 0) continue;
      if (scores[i] > scores[j]) numerator2 += 2.0;
      else if (scores[i] == scores[j]) numerator2 += 1.0;
    }
  }
  return numerator2 / (2.0 * pos * neg);
}

// Minimum of the convex quadratic 1/2 a'Qa - sum(a) over [0, C]^n (n <= 3).
// Nested ternary scans over the leading coordinates; the last coordinate is
// solved in closed form and clipped. Partial minimization keeps every level
// convex, so each scan is exact up to its iteration count.
class BoxQuadratic {
 public:
  BoxQuadratic(std::vector<std::vector<double>> q, double c) : q_(std::move(q)), c_(c) {}

  double value(const std::vector<double>& a) const {
    double v = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (std::size_t j = 0; j < a.size(); ++j) v += 0.5 * a[i] * q_[i][j] * a[j];
      v -= a[i];
    }
    return v;
  }

  double minimum() const {
    std::vector<double> a(q_.size(), 0.0);
    return scan(0, a);
  }

 private:
  double scan(std::size_t k, std::vector<double>& a) const {
    const std::size_t n = q_.size();
    if (k + 1 == n) {
      double lin = 1.0;
      for (std::size_t j = 0; j + 1 < n; ++j) lin -= q_[k][j] * a[j];
      a[k] = q_[k][k] > 0.0 ? std::clamp(lin / q_[k][k], 0.0, c_) : (lin > 0.0 ? c_ : 0.0);
      return value(a);
    }
    double lo = 0.0, hi = c_;
    auto eval = [&](double x) {
      a[k] = x;
      return scan(k + 1, a);
    };
    for (int it = 0; it < 90; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (eval(m1) <= eval(m2)) hi = m2;
      else lo = m1;
    }
    return eval(0.5 * (lo + hi));
  }

  std::vector<std::vector<double>> q_;
  double c_;
};

// Fine grid scan, then ternary refinement, of a convex 1-D function.
inline double argmin_1d(const std::function<double(double)>& f, double lo, double hi) {
  const int steps = 2000;
  double best_x = lo, best_v = f(lo);
  for (int i = 1; i <= steps; ++i) {
    const double x = lo + (hi - lo) * i / steps;
    const double v = f(x);
    if (v < best_v) best_v = v, best_x = x;
  }
  const double h = (hi - lo) / steps;
  double a = std::max(lo, best_x - h), b = std::min(hi, best_x + h);
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (f(m1) <= f(m2)) b = m2;
    else a = m1;
  }
  return 0.5 * (a + b);
}

}  // namespace oracle
