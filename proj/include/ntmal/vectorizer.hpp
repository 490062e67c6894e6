#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ntmal/sparse.hpp"
#include "ntmal/trace.hpp"

namespace ntmal {

struct NgramRange {
  std::size_t min = 8;
  std::size_t max = 10;

  friend bool operator==(const NgramRange&, const NgramRange&) = default;
};

/// Contiguous windows of `n` calls, space-joined, in trace order.
std::vector<std::string> extract_ngrams(std::span<const std::string> calls, std::size_t n);

struct TransparentStringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

/// Bijection n-gram -> [0, size). Keys are sorted lexicographically and the
/// index of a key is its rank.
class Vocabulary {
 public:
  Vocabulary() = default;

  /// Keys must be strictly increasing and have between range.min and
  /// range.max tokens. Throws Error(ConfigInvalid) otherwise.
  static Vocabulary from_sorted_keys(std::vector<std::string> keys, NgramRange range);

  std::optional<std::uint32_t> index_of(std::string_view ngram) const;
  const std::string& ngram(std::size_t index) const { return keys_[index]; }
  std::span<const std::string> keys() const { return keys_; }
  std::size_t size() const { return keys_.size(); }
  NgramRange range() const { return range_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.range_ == b.range_ && a.keys_ == b.keys_;
  }

 private:
  std::vector<std::string> keys_;
  std::unordered_map<std::string, std::uint32_t, TransparentStringHash, std::equal_to<>> index_;
  NgramRange range_;
};

struct IdfModel {
  std::vector<double> idf;
  std::size_t n_docs = 0;

  friend bool operator==(const IdfModel&, const IdfModel&) = default;
};

struct IdfOptions {
  // Adds 1 after the logarithm (the common smoothed variant). Off by default:
  // a feature present in every document then gets weight exactly 0.
  bool add_one = false;
};

/// Union of all n-grams for n in range. Throws Error(EmptyVocabulary) when
/// no trace is long enough, Error(ConfigInvalid) on a bad range.
Vocabulary build_vocabulary(std::span<const SyscallTrace> corpus, NgramRange range);

/// Raw n-gram counts over the vocabulary; unknown n-grams are ignored.
SparseVector count_vector(const SyscallTrace& trace, const Vocabulary& vocab);

FeatureMatrix count_matrix(std::span<const SyscallTrace> corpus, const Vocabulary& vocab);

/// idf[i] = ln((1 + n_docs) / (1 + df_i)).
IdfModel fit_idf(const FeatureMatrix& counts, IdfOptions options = {});

/// Throws Error(DimensionMismatch) when dims differ. Zero products are dropped.
SparseVector tfidf_transform(const SparseVector& counts, const IdfModel& idf);
FeatureMatrix tfidf_transform(const FeatureMatrix& counts, const IdfModel& idf);

/// Divides by the Euclidean norm; an empty vector is returned unchanged.
SparseVector l2_normalize(SparseVector v);

/// Fitted vocabulary + idf. transform() maps traces to unit-norm tf-idf rows.
struct Vectorizer {
  Vocabulary vocab;
  IdfModel idf;

  SparseVector transform(const SyscallTrace& trace) const;
  FeatureMatrix transform(std::span<const SyscallTrace> corpus) const;
};

struct FittedFeatures {
  Vectorizer vectorizer;
  FeatureMatrix matrix;
};

FittedFeatures fit_transform(std::span<const SyscallTrace> corpus, NgramRange range,
                             IdfOptions options = {});

/// One "index<TAB>ngram" line per key.
std::string render_vocabulary(const Vocabulary& vocab);

}  // namespace ntmal
