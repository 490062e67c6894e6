#include "ntmal/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "ntmal/dual_cd.hpp"
#include "ntmal/error.hpp"
#include "ntmal/evaluation.hpp"
#include "ntmal/format.hpp"
#include "ntmal/model_io.hpp"
#include "ntmal/model_selection.hpp"
#include "ntmal/sgd.hpp"
#include "ntmal/synthetic_corpus.hpp"
#include "ntmal/trace.hpp"
#include "ntmal/vectorizer.hpp"

namespace ntmal::cli {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string millis(double seconds) { return format_fixed(seconds, 3) + "s"; }

struct TrainOptions {
  std::string trainer = "sgd";
  double alpha = 1e-4;
  std::optional<double> tol;
  double c = 1.0;
  std::string penalty = "l2";
  double phi = 0.85;
  int epochs = 20;
  std::optional<double> t0;
  int max_outer = 1000;
  std::size_t ngram_min = 8;
  std::size_t ngram_max = 10;
  std::uint64_t seed = 0;
  bool idf_add_one = false;

  NgramRange range() const { return {ngram_min, ngram_max}; }

  TrainerKind kind() const {
    auto k = parse_trainer_kind(trainer);
    if (!k) throw Error(ErrorKind::ConfigInvalid, "unknown trainer " + trainer);
    return *k;
  }

  SgdConfig sgd() const {
    SgdConfig c;
    auto p = parse_penalty(penalty);
    if (!p) throw Error(ErrorKind::ConfigInvalid, "unknown penalty " + penalty);
    c.penalty = *p;
    c.alpha = alpha;
    c.phi = phi;
    c.epochs = epochs;
    c.t0 = t0;
    c.seed = seed;
    if (tol) c.tol = *tol;
    return c;
  }

  DualConfig dual() const {
    DualConfig d;
    d.C = this->c;
    d.max_outer = max_outer;
    d.seed = seed;
    if (tol) d.tol = *tol;
    return d;
  }
};

void add_model_options(CLI::App* cmd, TrainOptions& o) {
  cmd->add_option("--trainer", o.trainer, "sgd or dual-cd")->check(CLI::IsMember({"sgd", "dual-cd"}));
  cmd->add_option("--penalty", o.penalty, "SGD penalty")->check(CLI::IsMember({"l1", "l2", "elasticnet"}));
  cmd->add_option("--phi", o.phi, "Elastic-net share of the squared term");
  cmd->add_option("--epochs", o.epochs, "SGD epochs");
  cmd->add_option("--t0", o.t0, "SGD learning-rate offset (default max(0, 1/alpha - 1))");
  cmd->add_option("--max-outer", o.max_outer, "Dual CD outer sweeps");
  cmd->add_option("--ngram-min", o.ngram_min, "Smallest n-gram length");
  cmd->add_option("--ngram-max", o.ngram_max, "Largest n-gram length");
  cmd->add_option("--seed", o.seed, "Random seed");
  cmd->add_flag("--idf-add-one", o.idf_add_one, "Add 1 to every idf weight");
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ConfigInvalid, "bad number in list: \"" + item + "\"");
    }
  }
  if (values.empty()) throw Error(ErrorKind::ConfigInvalid, "empty list");
  return values;
}

std::vector<int> signs_of(std::span<const SyscallTrace> traces) {
  std::vector<int> out;
  for (const auto& t : traces) out.push_back(to_sign(t.label.value_or(Label::Benign)));
  return out;
}

LinearModel train_model(const FeatureMatrix& matrix, std::span<const int> labels, const TrainOptions& o) {
  if (o.kind() == TrainerKind::Sgd) return train_sgd(matrix, labels, o.sgd());
  return train_dual_cd(matrix, labels, o.dual());
}

// ---- preprocess ---------------------------------------------------------

int cmd_preprocess(const fs::path& input, const fs::path& output, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> files;
  if (fs::is_directory(input)) {
    for (const auto& entry : fs::directory_iterator(input)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::exists(input)) {
    files.push_back(input);
  }
  if (files.empty()) {
    err << "error: no inputs in " << input.string() << "\n";
    return 1;
  }
  std::error_code ec;
  fs::create_directories(output, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + output.string() + ": " + ec.message());

  std::size_t written = 0;
  std::vector<std::string> failures;
  for (const auto& file : files) {
    try {
      auto trace = parse_trace(read_text_file(file), file.string());
      write_text_file(output / file.filename(), render_processed(trace));
      ++written;
    } catch (const Error& e) {
      failures.push_back(file.string() + ": " + e.what());
    }
  }
  out << "processed " << written << " of " << files.size() << " files into " << output.string() << "\n";
  for (const auto& f : failures) out << "skipped " << f << "\n";
  return written == 0 ? 1 : 0;
}

// ---- gen-corpus ---------------------------------------------------------

int cmd_gen_corpus(const GeneratorConfig& config, const fs::path& output, bool raw, std::ostream& out) {
  auto corpus = generate(config);
  write_corpus(corpus, output, raw);
  const auto mal = malicious_count(config);
  out << "wrote " << corpus.traces.size() << " traces (" << mal << " malicious, "
      << corpus.traces.size() - mal << " benign) and manifest.csv to " << output.string() << "\n";
  return 0;
}

// ---- train --------------------------------------------------------------

int cmd_train(const fs::path& manifest, const TrainOptions& o, const fs::path& output,
              const std::optional<fs::path>& export_dir, std::ostream& out) {
  const auto traces = load_corpus(read_manifest(manifest));
  const auto labels = signs_of(traces);
  check_binary_labels(traces.size(), labels);
  o.kind();

  const auto start = Clock::now();
  auto fitted = fit_transform(traces, o.range(), {o.idf_add_one});
  auto model = train_model(fitted.matrix, labels, o);
  const double train_seconds = seconds_since(start);

  const auto c = confusion(predict_all(model, fitted.matrix), labels);
  ModelArtifact artifact{std::move(fitted.vectorizer), std::move(model), traces.size()};
  save_model(artifact, output);
  if (export_dir) {
    fs::create_directories(*export_dir);
    write_text_file(*export_dir / "vocabulary.tsv", render_vocabulary(artifact.vectorizer.vocab));
    write_text_file(*export_dir / "features.tsv", render_triplets(fitted.matrix));
  }

  const auto& summary = *artifact.model.summary;
  out << "trainer: " << o.trainer << "\n"
      << "documents: " << traces.size() << "\n"
      << "vocabulary: " << artifact.vectorizer.vocab.size() << "\n"
      << "iterations: " << summary.iterations << (summary.converged ? " (converged)" : " (not converged)")
      << "\n"
      << "train accuracy: " << format_fixed(c.accuracy(), 4) << "\n"
      << "training time: " << millis(train_seconds) << "\n"
      << "model: " << output.string() << "\n";
  return 0;
}

// ---- evaluate -----------------------------------------------------------

int cmd_evaluate(const fs::path& model_path, const fs::path& manifest,
                 const std::optional<fs::path>& output, bool macro, std::ostream& out) {
  const auto artifact = load_model(model_path);
  const auto traces = load_corpus(read_manifest(manifest));
  const auto truths = signs_of(traces);

  const auto start = Clock::now();
  const auto matrix = artifact.vectorizer.transform(traces);
  const auto scores = decision_scores(artifact.model, matrix);
  const double test_seconds = seconds_since(start);

  std::vector<int> predictions(scores.size());
  std::transform(scores.begin(), scores.end(), predictions.begin(),
                 [](double s) { return s >= 0.0 ? 1 : -1; });
  auto report = classification_report(predictions, truths, macro ? Averaging::Macro : Averaging::Weighted);
  report.test_seconds = test_seconds;
  const auto roc = roc_curve(scores, truths);

  const auto table = render_report_table(report);
  if (output) {
    fs::create_directories(*output);
    write_text_file(*output / "report.txt", table);
    write_text_file(*output / "report.csv", render_report_csv(report));
    write_text_file(*output / "roc.csv", render_roc_csv(roc));
  }
  out << table << "accuracy: " << format_fixed(report.counts.accuracy(), 4) << "\n"
      << "auc: " << format_fixed(roc.auc, 4) << "\n"
      << "testing time: " << millis(test_seconds) << "\n";
  return 0;
}

// ---- grid-search --------------------------------------------------------

int cmd_grid_search(const fs::path& manifest, const TrainOptions& o, const std::string& alphas,
                    const std::string& tols, double train_fraction, const fs::path& output,
                    std::ostream& out) {
  GridSpec spec;
  spec.trainer = o.kind();
  spec.sgd = o.sgd();
  spec.dual = o.dual();
  if (!alphas.empty()) spec.alpha_grid = parse_list(alphas);
  if (!tols.empty()) spec.tol_grid = parse_list(tols);

  const auto traces = load_corpus(read_manifest(manifest));
  const auto split = train_test_split(traces, {train_fraction, o.seed, true});
  auto fitted = fit_transform(split.train, o.range(), {o.idf_add_one});
  const auto validation = fitted.vectorizer.transform(split.test);

  const auto start = Clock::now();
  const auto result = grid_search(fitted.matrix, validation, spec);
  const double seconds = seconds_since(start);
  write_text_file(output, render_grid_csv(result));

  out << "cells: " << result.table.size() << "\n"
      << "best: alpha=" << format_double(result.best.alpha) << " tol=" << format_double(result.best.tol)
      << " f1=" << format_fixed(result.best.f1, 4) << "\n"
      << "search time: " << millis(seconds) << "\n";
  return 0;
}

// ---- top-features -------------------------------------------------------

int cmd_top_features(const fs::path& model_path, std::size_t k, const std::optional<fs::path>& output,
                     std::ostream& out) {
  const auto artifact = load_model(model_path);
  std::string listing;
  for (const auto& f : top_features(artifact.model, artifact.vectorizer.vocab, k)) {
    listing += format_double(f.coefficient) + "\t" + f.ngram + "\n";
  }
  if (output) write_text_file(*output, listing);
  out << listing;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"System-call trace malware classifier (n-gram tf-idf + linear SVM)", "ntmal"};
  app.require_subcommand(1);

  // preprocess
  fs::path pre_input, pre_output;
  auto* pre = app.add_subcommand("preprocess", "Strip NtTrace logs down to call names");
  pre->add_option("input", pre_input, "Raw trace file or directory")->required();
  pre->add_option("--output", pre_output, "Output directory")->required();

  // gen-corpus
  GeneratorConfig gen;
  fs::path gen_output;
  bool gen_raw = false;
  auto* gc = app.add_subcommand("gen-corpus", "Generate a synthetic labeled corpus");
  gc->add_option("--output", gen_output, "Output directory")->required();
  gc->add_option("--n", gen.n_traces, "Number of traces");
  gc->add_option("--fraction", gen.malicious_fraction, "Malicious fraction")->check(CLI::Range(0.0, 1.0));
  gc->add_option("--min-len", gen.min_length, "Minimum background length");
  gc->add_option("--max-len", gen.max_length, "Maximum background length");
  gc->add_option("--motif-rate", gen.motif_rate, "Mean motif insertions per malicious trace");
  gc->add_option("--skew", gen.background_skew, "Zipf exponent of background call frequencies");
  gc->add_option("--seed", gen.seed, "Random seed");
  gc->add_flag("--raw", gen_raw, "Write NtTrace-style raw lines");

  // train
  TrainOptions train_opts;
  fs::path train_manifest, train_output;
  std::optional<fs::path> export_dir;
  auto* tr = app.add_subcommand("train", "Vectorize a corpus and train a linear SVM");
  tr->add_option("--manifest", train_manifest, "Corpus manifest CSV")->required();
  tr->add_option("--output", train_output, "Model file to write")->required();
  tr->add_option("--alpha", train_opts.alpha, "SGD regularization strength");
  tr->add_option("--tol", train_opts.tol, "Stopping tolerance");
  tr->add_option("--c", train_opts.c, "Dual CD box bound C");
  tr->add_option("--export-features", export_dir, "Directory for vocabulary.tsv and features.tsv");
  add_model_options(tr, train_opts);

  // evaluate
  fs::path eval_model, eval_manifest;
  std::optional<fs::path> eval_output;
  bool eval_macro = false;
  auto* ev = app.add_subcommand("evaluate", "Score a corpus with a trained model");
  ev->add_option("--model", eval_model, "Model file")->required();
  ev->add_option("--manifest", eval_manifest, "Corpus manifest CSV")->required();
  ev->add_option("--output", eval_output, "Directory for report.txt, report.csv, roc.csv");
  ev->add_flag("--macro", eval_macro, "Unweighted average row");

  // grid-search
  TrainOptions grid_opts;
  fs::path grid_manifest, grid_output;
  std::string grid_alphas, grid_tols;
  double grid_fraction = 0.8;
  auto* gs = app.add_subcommand("grid-search", "Exhaustive (alpha, tol) search on a validation split");
  gs->add_option("--manifest", grid_manifest, "Corpus manifest CSV")->required();
  gs->add_option("--output", grid_output, "CSV file for the alpha,tol,f1 table")->required();
  gs->add_option("--alphas", grid_alphas, "Comma-separated alpha grid");
  gs->add_option("--tols", grid_tols, "Comma-separated tol grid");
  gs->add_option("--train-fraction", grid_fraction, "Fraction used for fitting; rest validates");
  add_model_options(gs, grid_opts);

  // top-features
  fs::path top_model;
  std::size_t top_k = 10;
  std::optional<fs::path> top_output;
  auto* tf = app.add_subcommand("top-features", "List the most malware-indicative n-grams");
  tf->add_option("--model", top_model, "Model file")->required();
  tf->add_option("--k", top_k, "Number of features");
  tf->add_option("--output", top_output, "Also write the listing to this file");

  std::vector<char*> argv;
  std::vector<std::string> storage(args.begin(), args.end());
  if (storage.empty()) storage.push_back("ntmal");
  for (auto& a : storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*pre) return cmd_preprocess(pre_input, pre_output, out, err);
    if (*gc) return cmd_gen_corpus(gen, gen_output, gen_raw, out);
    if (*tr) return cmd_train(train_manifest, train_opts, train_output, export_dir, out);
    if (*ev) return cmd_evaluate(eval_model, eval_manifest, eval_output, eval_macro, out);
    if (*gs) {
      return cmd_grid_search(grid_manifest, grid_opts, grid_alphas, grid_tols, grid_fraction, grid_output,
                             out);
    }
    if (*tf) return cmd_top_features(top_model, top_k, top_output, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ntmal::cli
