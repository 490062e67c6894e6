#include "json.hpp"

#include "doctest.h"
#include "ntmal/dual_cd.hpp"
#include "ntmal/error.hpp"
#include "ntmal/model_io.hpp"
#include "ntmal/sgd.hpp"
#include "ntmal/synthetic_corpus.hpp"
#include "test_support.hpp"

using namespace ntmal;

namespace {

struct Trained {
  GeneratedCorpus corpus;
  ModelArtifact artifact;
};

Trained train(TrainerKind kind) {
  GeneratorConfig g;
  g.n_traces = 40;
  Trained t{generate(g), {}};
  auto features = fit_transform(t.corpus.traces, {8, 9});
  auto labels = features.matrix.signs();
  t.artifact.vectorizer = features.vectorizer;
  t.artifact.n_train = features.matrix.size();
  if (kind == TrainerKind::Sgd) {
    SgdConfig c;
    c.penalty = Penalty::ElasticNet;
    c.alpha = 1.0 / 3.0;  // not exactly representable in decimal
    c.epochs = 7;
    t.artifact.model = train_sgd(features.matrix, labels, c);
  } else {
    DualConfig c;
    c.C = 0.7;
    c.seed = 5;
    t.artifact.model = train_dual_cd(features.matrix, labels, c);
  }
  return t;
}

void expect_kind(ErrorKind kind, const std::string& text) {
  try {
    deserialize_model(text);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

}  // namespace

TEST_CASE("round trip preserves bytes and predictions") {
  for (auto kind : {TrainerKind::Sgd, TrainerKind::DualCd}) {
    CAPTURE(to_string(kind));
    auto t = train(kind);
    const auto text = serialize_model(t.artifact);
    auto back = deserialize_model(text);
    CHECK(serialize_model(back) == text);
    CHECK(back.vectorizer.vocab == t.artifact.vectorizer.vocab);
    CHECK(back.vectorizer.idf == t.artifact.vectorizer.idf);
    CHECK(back.model.weights == t.artifact.model.weights);
    CHECK(back.model.bias == t.artifact.model.bias);
    CHECK(back.n_train == t.artifact.n_train);
    REQUIRE(back.model.summary);
    CHECK(back.model.summary->iterations == t.artifact.model.summary->iterations);
    CHECK(back.model.summary->converged == t.artifact.model.summary->converged);

    const auto original = t.artifact.vectorizer.transform(t.corpus.traces);
    const auto reloaded = back.vectorizer.transform(t.corpus.traces);
    CHECK(decision_scores(t.artifact.model, original) == decision_scores(back.model, reloaded));

    testing::TempDir dir;
    save_model(t.artifact, dir / "m.json");
    CHECK(read_text_file(dir / "m.json") == text);
    CHECK(serialize_model(load_model(dir / "m.json")) == text);
  }
}

TEST_CASE("document layout") {
  auto t = train(TrainerKind::Sgd);
  auto j = nlohmann::json::parse(serialize_model(t.artifact));
  CHECK(j.at("format_version") == kModelFormatVersion);
  CHECK(j.at("trainer").at("kind") == "sgd");
  CHECK(j.at("trainer").at("config").at("alpha").get<double>() == 1.0 / 3.0);
  CHECK(j.at("ngram_range") == nlohmann::json::array({8, 9}));
  CHECK(j.at("vocabulary").size() == t.artifact.vectorizer.vocab.size());
  CHECK(j.at("weights").at("dim") == t.artifact.vectorizer.vocab.size());
}

TEST_CASE("corrupted and foreign documents are rejected") {
  auto t = train(TrainerKind::DualCd);
  const auto text = serialize_model(t.artifact);
  expect_kind(ErrorKind::Parse, text.substr(0, text.size() / 2));
  expect_kind(ErrorKind::Parse, "");
  expect_kind(ErrorKind::Parse, "[1, 2, 3]");

  auto j = nlohmann::ordered_json::parse(text);
  j["format_version"] = 2;
  expect_kind(ErrorKind::VersionMismatch, j.dump());
  j["format_version"] = "1";
  expect_kind(ErrorKind::VersionMismatch, j.dump());

  j = nlohmann::ordered_json::parse(text);
  j.erase("bias");
  expect_kind(ErrorKind::Parse, j.dump());

  j = nlohmann::ordered_json::parse(text);
  j["weights"]["dim"] = 3;
  expect_kind(ErrorKind::Parse, j.dump());

  j = nlohmann::ordered_json::parse(text);
  j["trainer"]["kind"] = "perceptron";
  expect_kind(ErrorKind::Parse, j.dump());

  j = nlohmann::ordered_json::parse(text);
  j["vocabulary"][0] = "zzz";  // breaks the sort order
  expect_kind(ErrorKind::Parse, j.dump());

  try {
    load_model("/nonexistent/model.json");
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Io);
  }
}
