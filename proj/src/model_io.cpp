#include "ntmal/model_io.hpp"

#include <cmath>

#include "json.hpp"

#include "ntmal/error.hpp"
#include "ntmal/trace.hpp"

namespace ntmal {

using Json = nlohmann::ordered_json;

namespace {

Json config_to_json(const TrainerConfig& config) {
  if (const auto* sgd = std::get_if<SgdConfig>(&config)) {
    Json j;
    j["penalty"] = std::string(to_string(sgd->penalty));
    j["alpha"] = sgd->alpha;
    j["phi"] = sgd->phi;
    j["epochs"] = sgd->epochs;
    j["t0"] = sgd->effective_t0();
    j["seed"] = sgd->seed;
    j["tol"] = sgd->tol;
    return j;
  }
  const auto& dual = std::get<DualConfig>(config);
  Json j;
  j["C"] = dual.C;
  j["tol"] = dual.tol;
  j["max_outer"] = dual.max_outer;
  j["seed"] = dual.seed;
  return j;
}

TrainerConfig config_from_json(TrainerKind kind, const Json& j) {
  if (kind == TrainerKind::Sgd) {
    SgdConfig c;
    auto penalty = parse_penalty(j.at("penalty").get<std::string>());
    if (!penalty) throw Error(ErrorKind::Parse, "unknown penalty in model file");
    c.penalty = *penalty;
    c.alpha = j.at("alpha").get<double>();
    c.phi = j.at("phi").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.t0 = j.at("t0").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.tol = j.at("tol").get<double>();
    return c;
  }
  DualConfig c;
  c.C = j.at("C").get<double>();
  c.tol = j.at("tol").get<double>();
  c.max_outer = j.at("max_outer").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

TrainerKind kind_of(const TrainerConfig& config) {
  return std::holds_alternative<SgdConfig>(config) ? TrainerKind::Sgd : TrainerKind::DualCd;
}

ModelArtifact from_json(const Json& root) {
  if (!root.is_object() || !root.contains("format_version")) {
    throw Error(ErrorKind::Parse, "model file has no format_version");
  }
  const auto& version = root.at("format_version");
  if (!version.is_number_integer() || version.get<int>() != kModelFormatVersion) {
    throw Error(ErrorKind::VersionMismatch,
                "unsupported model format_version " + version.dump() + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }

  ModelArtifact artifact;
  const auto& trainer = root.at("trainer");
  auto kind = parse_trainer_kind(trainer.at("kind").get<std::string>());
  if (!kind) throw Error(ErrorKind::Parse, "unknown trainer kind in model file");

  const auto& range = root.at("ngram_range");
  NgramRange ngrams{range.at(0).get<std::size_t>(), range.at(1).get<std::size_t>()};
  artifact.vectorizer.vocab =
      Vocabulary::from_sorted_keys(root.at("vocabulary").get<std::vector<std::string>>(), ngrams);

  const auto& idf = root.at("idf");
  artifact.vectorizer.idf.n_docs = idf.at("n_docs").get<std::size_t>();
  artifact.vectorizer.idf.idf = idf.at("values").get<std::vector<double>>();

  const auto& weights = root.at("weights");
  const auto dim = weights.at("dim").get<std::size_t>();
  if (dim != artifact.vectorizer.vocab.size() || dim != artifact.vectorizer.idf.idf.size()) {
    throw Error(ErrorKind::Parse, "vocabulary, idf and weight sizes disagree");
  }
  artifact.model.weights.assign(dim, 0.0);
  std::size_t previous = 0;
  bool first = true;
  for (const auto& entry : weights.at("entries")) {
    const auto index = entry.at(0).get<std::size_t>();
    if (index >= dim || (!first && index <= previous)) {
      throw Error(ErrorKind::Parse, "weight entries out of order or range");
    }
    artifact.model.weights[index] = entry.at(1).get<double>();
    previous = index;
    first = false;
  }
  artifact.model.bias = root.at("bias").get<double>();

  const auto& training = root.at("training");
  artifact.model.summary = TrainingSummary{config_from_json(*kind, trainer.at("config")),
                                           training.at("iterations").get<int>(),
                                           training.at("converged").get<bool>()};
  artifact.n_train = training.at("n_train").get<std::size_t>();
  return artifact;
}

}  // namespace

std::string serialize_model(const ModelArtifact& artifact) {
  if (!artifact.model.summary) throw Error(ErrorKind::ConfigInvalid, "model has no training summary");
  const auto& vocab = artifact.vectorizer.vocab;
  const auto& summary = *artifact.model.summary;
  if (vocab.size() != artifact.vectorizer.idf.idf.size() || vocab.size() != artifact.model.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "vocabulary, idf and weight sizes disagree");
  }

  Json root;
  root["format_version"] = kModelFormatVersion;
  root["created_by"] = "ntmal 1.0.0";
  root["trainer"]["kind"] = std::string(to_string(kind_of(summary.config)));
  root["trainer"]["config"] = config_to_json(summary.config);
  root["training"]["iterations"] = summary.iterations;
  root["training"]["converged"] = summary.converged;
  root["training"]["n_train"] = artifact.n_train;
  root["ngram_range"] = Json::array({vocab.range().min, vocab.range().max});
  root["vocabulary"] = Json(std::vector<std::string>(vocab.keys().begin(), vocab.keys().end()));
  root["idf"]["n_docs"] = artifact.vectorizer.idf.n_docs;
  root["idf"]["values"] = artifact.vectorizer.idf.idf;

  Json entries = Json::array();
  for (std::size_t i = 0; i < artifact.model.dim(); ++i) {
    const double w = artifact.model.weights[i];
    if (w != 0.0) entries.push_back(Json::array({i, w}));
  }
  root["weights"]["dim"] = artifact.model.dim();
  root["weights"]["entries"] = std::move(entries);
  root["bias"] = artifact.model.bias;
  return root.dump() + "\n";
}

ModelArtifact deserialize_model(std::string_view json) {
  Json root;
  try {
    root = Json::parse(json);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    return from_json(root);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigInvalid) throw Error(ErrorKind::Parse, e.what());
    throw;
  }
}

void save_model(const ModelArtifact& artifact, const std::filesystem::path& path) {
  write_text_file(path, serialize_model(artifact));
}

ModelArtifact load_model(const std::filesystem::path& path) {
  return deserialize_model(read_text_file(path));
}

}  // namespace ntmal
