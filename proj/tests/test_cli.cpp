#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "ntmal/cli.hpp"
#include "ntmal/evaluation.hpp"
#include "ntmal/model_io.hpp"
#include "ntmal/sgd.hpp"
#include "ntmal/synthetic_corpus.hpp"
#include "test_support.hpp"

using namespace ntmal;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "ntmal");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

// A small corpus on disk, shared by the train/evaluate cases.
struct Corpus {
  testing::TempDir dir;
  fs::path manifest;
  explicit Corpus(std::size_t n = 60, std::uint64_t seed = 42) {
    auto r = run({"gen-corpus", "--output", dir.path().string(), "--n", std::to_string(n), "--seed",
                  std::to_string(seed), "--min-len", "30", "--max-len", "60"});
    REQUIRE(r.code == 0);
    manifest = dir / "manifest.csv";
  }
};

}  // namespace

TEST_CASE("preprocess") {
  testing::TempDir in, out;
  write_text_file(in / "excerpt.log",
                  "Unload of DLL at 04ED0000\n"
                  "NtQueryPerformanceCounter( Counter=0x4e9f9c8 [3.01683e+009], Freq=null ) => 0 \n"
                  "NtProtectVirtualMemory( ProcessHandle=-1, BaseAddress=0x4e9f9f4 [0x77eae000], Size=0x4e9f9f8\n");
  write_text_file(in / "junk.log", "nothing to see here\n");

  SUBCASE("single file") {
    auto r = run({"preprocess", (in / "excerpt.log").string(), "--output", out.path().string()});
    CHECK(r.code == 0);
    CHECK(read_text_file(out / "excerpt.log") == "ntqueryperformancecounter\nntprotectvirtualmemory\n");
  }
  SUBCASE("mixed directory") {
    auto r = run({"preprocess", in.path().string(), "--output", out.path().string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(out / "excerpt.log"));
    CHECK_FALSE(fs::exists(out / "junk.log"));
    CHECK(r.out.find("processed 1 of 2") != std::string::npos);
    CHECK(r.out.find("junk.log") != std::string::npos);
  }
  SUBCASE("only invalid inputs") {
    auto r = run({"preprocess", (in / "junk.log").string(), "--output", out.path().string()});
    CHECK(r.code != 0);
  }
  SUBCASE("empty directory") {
    testing::TempDir empty;
    auto r = run({"preprocess", empty.path().string(), "--output", out.path().string()});
    CHECK(r.code != 0);
    CHECK(r.err.find("no inputs") != std::string::npos);
  }
}

TEST_CASE("gen-corpus") {
  testing::TempDir a, b;
  auto r1 = run({"gen-corpus", "--output", a.path().string(), "--n", "100", "--fraction", "0.637"});
  auto r2 = run({"gen-corpus", "--output", b.path().string(), "--n", "100", "--fraction", "0.637"});
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  const auto manifest = read_text_file(a / "manifest.csv");
  CHECK(manifest == read_text_file(b / "manifest.csv"));
  std::size_t mal = 0, pos = 0;
  while ((pos = manifest.find(",malicious\n", pos)) != std::string::npos) ++mal, ++pos;
  CHECK(mal == 64);
  for (const auto& e : fs::directory_iterator(a.path())) {
    CHECK(read_text_file(e.path()) == read_text_file(b / e.path().filename().string()));
  }
  auto bad = run({"gen-corpus", "--output", a.path().string(), "--fraction", "1.5"});
  CHECK(bad.code != 0);
  auto bad_n = run({"gen-corpus", "--output", a.path().string(), "--n", "1"});
  CHECK(bad_n.code != 0);
  CHECK(bad_n.err.find("n_traces") != std::string::npos);
}

TEST_CASE("train is deterministic and separates its own corpus") {
  Corpus c;
  testing::TempDir out;
  for (std::string trainer : {"sgd", "dual-cd"}) {
    auto r1 = run({"train", "--manifest", c.manifest.string(), "--trainer", trainer, "--output",
                   (out / "a.json").string(), "--export-features", (out / "features").string()});
    auto r2 = run({"train", "--manifest", c.manifest.string(), "--trainer", trainer, "--output",
                   (out / "b.json").string()});
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(read_text_file(out / "a.json") == read_text_file(out / "b.json"));
    CHECK(r1.out.find("train accuracy: 1.0000") != std::string::npos);
    CHECK(r1.out.find("training time: ") != std::string::npos);
    CHECK(fs::exists(out / "features" / "vocabulary.tsv"));
    CHECK(read_text_file(out / "features" / "features.tsv").rfind("60 ", 0) == 0);
  }

  // Model round trip through the file: load then save gives the same bytes.
  auto artifact = load_model(out / "a.json");
  save_model(artifact, out / "c.json");
  CHECK(read_text_file(out / "a.json") == read_text_file(out / "c.json"));
}

TEST_CASE("train rejects single-class manifests and bad options") {
  Corpus c;
  testing::TempDir out;
  auto manifest = read_manifest(c.manifest);
  CorpusManifest only_malicious;
  for (const auto& e : manifest.entries) {
    if (e.label == Label::Malicious) only_malicious.entries.push_back(e);
  }
  write_text_file(out / "mal.csv", render_manifest(only_malicious));
  auto r = run({"train", "--manifest", (out / "mal.csv").string(), "--output", (out / "m.json").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("DegenerateLabels") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "m.json"));

  CHECK(run({"train", "--manifest", c.manifest.string(), "--output", (out / "m.json").string(), "--trainer",
             "svm"}).code != 0);
  CHECK(run({"train", "--manifest", c.manifest.string(), "--output", (out / "m.json").string(), "--alpha",
             "-1"}).code == 1);
  CHECK(run({"train", "--manifest", c.manifest.string(), "--output", (out / "m.json").string(), "--ngram-min",
             "5", "--ngram-max", "3"}).code == 1);
  CHECK(run({"train", "--manifest", (out / "missing.csv").string(), "--output", (out / "m.json").string()})
            .code == 1);
}

TEST_CASE("train then evaluate reproduces the in-process report") {
  Corpus train_corpus(60, 1), test_corpus(40, 2);
  testing::TempDir out;
  REQUIRE(run({"train", "--manifest", train_corpus.manifest.string(), "--alpha", "0.001", "--epochs", "15",
               "--penalty", "elasticnet", "--output", (out / "m.json").string()})
              .code == 0);
  auto r = run({"evaluate", "--model", (out / "m.json").string(), "--manifest", test_corpus.manifest.string(),
                "--output", (out / "report").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("Average/Total") != std::string::npos);
  CHECK(r.out.find("testing time: ") != std::string::npos);

  // Same pipeline in process.
  auto train = load_corpus(read_manifest(train_corpus.manifest));
  auto test = load_corpus(read_manifest(test_corpus.manifest));
  auto fitted = fit_transform(train, {});
  SgdConfig cfg;
  cfg.alpha = 0.001;
  cfg.epochs = 15;
  cfg.penalty = Penalty::ElasticNet;
  auto model = train_sgd(fitted.matrix, fitted.matrix.signs(), cfg);
  auto matrix = fitted.vectorizer.transform(test);
  auto scores = decision_scores(model, matrix);
  auto report = classification_report(predict_all(model, matrix), matrix.signs());
  CHECK(read_text_file(out / "report" / "report.csv") == render_report_csv(report));
  CHECK(read_text_file(out / "report" / "report.txt") == render_report_table(report));
  CHECK(read_text_file(out / "report" / "roc.csv") == render_roc_csv(roc_curve(scores, matrix.signs())));
  CHECK(read_text_file(out / "report" / "roc.csv").find("\nauc,") != std::string::npos);

  // Scored on its own training data the model is perfect.
  auto self = run({"evaluate", "--model", (out / "m.json").string(), "--manifest",
                   train_corpus.manifest.string(), "--output", (out / "self").string()});
  REQUIRE(self.code == 0);
  CHECK(read_text_file(out / "self" / "report.csv").find("average,1,1,1,60") != std::string::npos);
}

TEST_CASE("evaluate rejects corrupted models without writing output") {
  Corpus c;
  testing::TempDir out;
  write_text_file(out / "bad.json", "{\"format_version\": 7}");
  auto r = run({"evaluate", "--model", (out / "bad.json").string(), "--manifest", c.manifest.string(),
                "--output", (out / "report").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("VersionMismatch") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "report"));

  write_text_file(out / "trunc.json", "{\"format_version\": 1, \"vocab");
  r = run({"evaluate", "--model", (out / "trunc.json").string(), "--manifest", c.manifest.string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("Parse") != std::string::npos);
}

TEST_CASE("grid-search") {
  Corpus c;
  testing::TempDir out;
  auto r = run({"grid-search", "--manifest", c.manifest.string(), "--output", (out / "grid.csv").string()});
  REQUIRE(r.code == 0);
  const auto csv = read_text_file(out / "grid.csv");
  CHECK(count_lines(csv) == 81);
  CHECK(csv.rfind("alpha,tol,f1\n", 0) == 0);
  CHECK(r.out.find("cells: 80") != std::string::npos);
  CHECK(r.out.find("best: alpha=") != std::string::npos);

  REQUIRE(run({"grid-search", "--manifest", c.manifest.string(), "--output", (out / "again.csv").string()}).code ==
          0);
  CHECK(read_text_file(out / "again.csv") == csv);

  auto one = run({"grid-search", "--manifest", c.manifest.string(), "--trainer", "dual-cd", "--alphas", "0.01",
                  "--tols", "0.001", "--output", (out / "one.csv").string()});
  REQUIRE(one.code == 0);
  CHECK(count_lines(read_text_file(out / "one.csv")) == 2);

  CHECK(run({"grid-search", "--manifest", c.manifest.string(), "--alphas", "abc", "--output",
             (out / "x.csv").string()}).code != 0);
}

TEST_CASE("top-features") {
  Corpus c;
  testing::TempDir out;
  REQUIRE(run({"train", "--manifest", c.manifest.string(), "--penalty", "l1", "--alpha", "0.0001", "--output",
               (out / "m.json").string()})
              .code == 0);
  auto r = run({"top-features", "--model", (out / "m.json").string(), "--k", "5", "--output",
                (out / "top.tsv").string()});
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 5);
  CHECK(read_text_file(out / "top.tsv") == r.out);
  bool motif = false;
  for (const auto& m : GeneratorConfig::default_malicious_motifs()) {
    std::string joined;
    for (std::size_t i = 0; i < 8; ++i) joined += (i ? " " : "") + m[i];
    motif = motif || r.out.find(joined) != std::string::npos;
  }
  CHECK(motif);
  // Each line is coefficient<TAB>ngram.
  CHECK(r.out.find('\t') != std::string::npos);

  auto none = run({"top-features", "--model", (out / "m.json").string(), "--k", "0"});
  CHECK(none.code == 0);
  CHECK(none.out.empty());

  const auto vocab = load_model(out / "m.json").vectorizer.vocab.size();
  auto all = run({"top-features", "--model", (out / "m.json").string(), "--k", std::to_string(vocab + 50)});
  CHECK(all.code == 0);
  CHECK(count_lines(all.out) == vocab);
}

TEST_CASE("usage errors") {
  CHECK(run({}).code != 0);
  CHECK(run({"frobnicate"}).code != 0);
  CHECK(run({"train"}).code != 0);
  CHECK(run({"--help"}).code == 0);
}
