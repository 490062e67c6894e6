#include "ntmal/vectorizer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ntmal/error.hpp"
#include "ntmal/serial.hpp"

namespace ntmal {

namespace {

// Calls joined by single spaces, with token start offsets, so every n-gram
// is a substring view and needs no allocation.
class JoinedCalls {
 public:
  explicit JoinedCalls(std::span<const std::string> calls) {
    starts_.reserve(calls.size() + 1);
    for (const auto& call : calls) {
      starts_.push_back(text_.size());
      text_ += call;
      text_ += ' ';
    }
    starts_.push_back(text_.size());
  }

  std::size_t length() const { return starts_.size() - 1; }

  std::string_view window(std::size_t first, std::size_t n) const {
    return std::string_view(text_).substr(starts_[first], starts_[first + n] - 1 - starts_[first]);
  }

  template <typename Fn>
  void for_each_ngram(NgramRange range, Fn&& fn) const {
    for (std::size_t n = range.min; n <= range.max; ++n) {
      if (length() < n) break;
      for (std::size_t i = 0; i + n <= length(); ++i) fn(window(i, n));
    }
  }

 private:
  std::string text_;
  std::vector<std::size_t> starts_;
};

void check_range(NgramRange range) {
  if (range.min < 1 || range.max < range.min) {
    throw Error(ErrorKind::ConfigInvalid, "n-gram range must satisfy 1 <= min <= max");
  }
}

std::size_t count_tokens(std::string_view key) {
  return static_cast<std::size_t>(std::count(key.begin(), key.end(), ' ')) + 1;
}

std::optional<std::vector<Label>> collect_labels(std::span<const SyscallTrace> corpus) {
  std::vector<Label> labels;
  labels.reserve(corpus.size());
  for (const auto& trace : corpus) {
    if (!trace.label) return std::nullopt;
    labels.push_back(*trace.label);
  }
  return labels;
}

FeatureMatrix empty_matrix_like(std::span<const SyscallTrace> corpus, std::size_t dim) {
  FeatureMatrix m;
  m.dim = dim;
  m.rows.resize(corpus.size());
  m.row_ids.reserve(corpus.size());
  for (const auto& trace : corpus) m.row_ids.push_back(trace.source_id);
  m.labels = collect_labels(corpus);
  return m;
}

}  // namespace

std::vector<std::string> extract_ngrams(std::span<const std::string> calls, std::size_t n) {
  std::vector<std::string> out;
  if (n == 0 || calls.size() < n) return out;
  JoinedCalls joined(calls);
  out.reserve(calls.size() - n + 1);
  for (std::size_t i = 0; i + n <= calls.size(); ++i) out.emplace_back(joined.window(i, n));
  return out;
}

Vocabulary Vocabulary::from_sorted_keys(std::vector<std::string> keys, NgramRange range) {
  check_range(range);
  Vocabulary vocab;
  vocab.range_ = range;
  vocab.index_.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i > 0 && !(keys[i - 1] < keys[i])) {
      throw Error(ErrorKind::ConfigInvalid, "vocabulary keys must be strictly increasing");
    }
    const auto tokens = count_tokens(keys[i]);
    if (tokens < range.min || tokens > range.max) {
      throw Error(ErrorKind::ConfigInvalid, "vocabulary key outside n-gram range: " + keys[i]);
    }
    vocab.index_.emplace(keys[i], static_cast<std::uint32_t>(i));
  }
  vocab.keys_ = std::move(keys);
  return vocab;
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view ngram) const {
  auto it = index_.find(ngram);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const SyscallTrace> corpus, NgramRange range) {
  check_range(range);
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
  std::vector<JoinedCalls> joined;
  joined.reserve(corpus.size());
  for (const auto& trace : corpus) joined.emplace_back(trace.calls);

  std::vector<std::vector<std::string_view>> per_trace(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    auto& local = per_trace[i];
    joined[i].for_each_ngram(range, [&](std::string_view g) { local.push_back(g); });
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
  }

  std::vector<std::string_view> all;
  for (auto& local : per_trace) all.insert(all.end(), local.begin(), local.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.empty()) {
    throw Error(ErrorKind::EmptyVocabulary, "no trace is long enough for the n-gram range");
  }
  return Vocabulary::from_sorted_keys(std::vector<std::string>(all.begin(), all.end()), range);
}

SparseVector count_vector(const SyscallTrace& trace, const Vocabulary& vocab) {
  SparseVector v;
  v.dim = vocab.size();
  std::vector<std::uint32_t> hits;
  JoinedCalls(trace.calls).for_each_ngram(vocab.range(), [&](std::string_view g) {
    if (auto idx = vocab.index_of(g)) hits.push_back(*idx);
  });
  std::sort(hits.begin(), hits.end());
  for (std::size_t i = 0; i < hits.size();) {
    std::size_t j = i;
    while (j < hits.size() && hits[j] == hits[i]) ++j;
    v.entries.push_back({hits[i], static_cast<double>(j - i)});
    i = j;
  }
  return v;
}

FeatureMatrix count_matrix(std::span<const SyscallTrace> corpus, const Vocabulary& vocab) {
  auto m = empty_matrix_like(corpus, vocab.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) m.rows[i] = count_vector(corpus[i], vocab);
  return m;
}

IdfModel fit_idf(const FeatureMatrix& counts, IdfOptions options) {
  std::vector<std::size_t> df(counts.dim, 0);
  for (const auto& row : counts.rows) {
    for (const auto& e : row.entries) {
      if (e.value != 0.0) ++df[e.index];
    }
  }
  IdfModel model;
  model.n_docs = counts.size();
  model.idf.resize(counts.dim);
  const double numerator = 1.0 + static_cast<double>(model.n_docs);
  for (std::size_t i = 0; i < counts.dim; ++i) {
    model.idf[i] = std::log(numerator / (1.0 + static_cast<double>(df[i])));
    if (options.add_one) model.idf[i] += 1.0;
  }
  return model;
}

SparseVector tfidf_transform(const SparseVector& counts, const IdfModel& idf) {
  if (counts.dim != idf.idf.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "row dim " + std::to_string(counts.dim) + " vs idf length " +
                    std::to_string(idf.idf.size()));
  }
  SparseVector out;
  out.dim = counts.dim;
  out.entries.reserve(counts.entries.size());
  for (const auto& e : counts.entries) {
    const double value = e.value * idf.idf[e.index];
    if (value != 0.0) out.entries.push_back({e.index, value});
  }
  return out;
}

FeatureMatrix tfidf_transform(const FeatureMatrix& counts, const IdfModel& idf) {
  if (counts.dim != idf.idf.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                "matrix dim " + std::to_string(counts.dim) + " vs idf length " +
                    std::to_string(idf.idf.size()));
  }
  FeatureMatrix out;
  out.dim = counts.dim;
  out.row_ids = counts.row_ids;
  out.labels = counts.labels;
  out.rows.reserve(counts.size());
  for (const auto& row : counts.rows) out.rows.push_back(tfidf_transform(row, idf));
  return out;
}

SparseVector l2_normalize(SparseVector v) {
  const double norm = std::sqrt(v.squared_norm());
  if (norm == 0.0) return v;
  for (auto& e : v.entries) e.value /= norm;
  return v;
}

SparseVector Vectorizer::transform(const SyscallTrace& trace) const {
  return l2_normalize(tfidf_transform(count_vector(trace, vocab), idf));
}

FeatureMatrix Vectorizer::transform(std::span<const SyscallTrace> corpus) const {
  auto m = empty_matrix_like(corpus, vocab.size());
  const auto n = static_cast<std::ptrdiff_t>(corpus.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) m.rows[i] = transform(corpus[i]);
  return m;
}

FittedFeatures fit_transform(std::span<const SyscallTrace> corpus, NgramRange range,
                             IdfOptions options) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyVocabulary, "corpus is empty");
  FittedFeatures fitted;
  fitted.vectorizer.vocab = build_vocabulary(corpus, range);
  auto counts = count_matrix(corpus, fitted.vectorizer.vocab);
  fitted.vectorizer.idf = fit_idf(counts, options);

  fitted.matrix = std::move(counts);
  const auto n = static_cast<std::ptrdiff_t>(fitted.matrix.size());
  auto& rows = fitted.matrix.rows;
  const auto& idf = fitted.vectorizer.idf;
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) rows[i] = l2_normalize(tfidf_transform(rows[i], idf));
  return fitted;
}

std::string render_vocabulary(const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += std::to_string(i);
    out += '\t';
    out += vocab.ngram(i);
    out += '\n';
  }
  return out;
}

namespace serial {

Vocabulary build_vocabulary(std::span<const SyscallTrace> corpus, NgramRange range) {
  check_range(range);
  std::set<std::string> keys;
  for (const auto& trace : corpus) {
    for (std::size_t n = range.min; n <= range.max; ++n) {
      for (auto& g : extract_ngrams(trace.calls, n)) keys.insert(std::move(g));
    }
  }
  if (keys.empty()) {
    throw Error(ErrorKind::EmptyVocabulary, "no trace is long enough for the n-gram range");
  }
  return Vocabulary::from_sorted_keys(std::vector<std::string>(keys.begin(), keys.end()), range);
}

FeatureMatrix transform(const Vectorizer& vectorizer, std::span<const SyscallTrace> corpus) {
  auto m = empty_matrix_like(corpus, vectorizer.vocab.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) m.rows[i] = vectorizer.transform(corpus[i]);
  return m;
}

FittedFeatures fit_transform(std::span<const SyscallTrace> corpus, NgramRange range,
                             IdfOptions options) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyVocabulary, "corpus is empty");
  FittedFeatures fitted;
  fitted.vectorizer.vocab = serial::build_vocabulary(corpus, range);
  auto counts = empty_matrix_like(corpus, fitted.vectorizer.vocab.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    counts.rows[i] = count_vector(corpus[i], fitted.vectorizer.vocab);
  }
  fitted.vectorizer.idf = fit_idf(counts, options);
  fitted.matrix = tfidf_transform(counts, fitted.vectorizer.idf);
  for (auto& row : fitted.matrix.rows) row = l2_normalize(std::move(row));
  return fitted;
}

}  // namespace serial

}  // namespace ntmal
