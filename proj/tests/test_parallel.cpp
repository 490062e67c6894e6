#include <omp.h>

#include "doctest.h"
#include "ntmal/serial.hpp"
#include "ntmal/synthetic_corpus.hpp"

using namespace ntmal;

namespace {

// One core in CI still exercises the threaded code paths with oversubscription.
struct Threads {
  Threads() { omp_set_num_threads(4); }
} const force_threads;

void check_same(const FeatureMatrix& a, const FeatureMatrix& b) {
  CHECK(a.dim == b.dim);
  CHECK(a.row_ids == b.row_ids);
  CHECK(a.labels == b.labels);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    REQUIRE(a.rows[i].entries.size() == b.rows[i].entries.size());
    for (std::size_t k = 0; k < a.rows[i].entries.size(); ++k) {
      CHECK(a.rows[i].entries[k].index == b.rows[i].entries[k].index);
      CHECK(a.rows[i].entries[k].value == b.rows[i].entries[k].value);
    }
  }
}

GeneratedCorpus corpus(std::uint64_t seed, std::size_t n) {
  GeneratorConfig g;
  g.n_traces = n;
  g.seed = seed;
  return generate(g);
}

}  // namespace

TEST_CASE("vocabulary and features match the serial reference") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto c = corpus(seed, 90);
    for (NgramRange range : {NgramRange{8, 10}, NgramRange{1, 3}, NgramRange{2, 2}}) {
      CHECK(build_vocabulary(c.traces, range) == serial::build_vocabulary(c.traces, range));
      for (bool add_one : {false, true}) {
        auto par = fit_transform(c.traces, range, {add_one});
        auto ser = serial::fit_transform(c.traces, range, {add_one});
        CHECK(par.vectorizer.vocab == ser.vectorizer.vocab);
        CHECK(par.vectorizer.idf == ser.vectorizer.idf);
        check_same(par.matrix, ser.matrix);

        auto other = corpus(seed + 100, 30);
        check_same(par.vectorizer.transform(other.traces), serial::transform(ser.vectorizer, other.traces));
      }
    }
  }
}

TEST_CASE("decision scores match the serial reference") {
  auto c = corpus(7, 120);
  auto f = fit_transform(c.traces, {});
  auto labels = f.matrix.signs();
  SgdConfig cfg;
  cfg.epochs = 5;
  auto model = train_sgd(f.matrix, labels, cfg);
  CHECK(decision_scores(model, f.matrix) == serial::decision_scores(model, f.matrix));
  CHECK(predict_all(model, f.matrix).size() == f.matrix.size());
}

TEST_CASE("grid search matches the serial reference bit for bit") {
  auto c = corpus(9, 80);
  auto split = train_test_split(c.traces, {0.75, 9, true});
  auto f = fit_transform(split.train, {});
  auto validation = f.vectorizer.transform(split.test);
  for (auto kind : {TrainerKind::Sgd, TrainerKind::DualCd}) {
    GridSpec spec;
    spec.trainer = kind;
    spec.alpha_grid = {10.0, 1.0, 0.01, 1e-4, 1e-6};
    spec.tol_grid = {1.0, 1e-2, 1e-4};
    auto par = grid_search(f.matrix, validation, spec);
    auto ser = serial::grid_search(f.matrix, validation, spec);
    CHECK(par.table == ser.table);
    CHECK(par.best == ser.best);
  }
}
