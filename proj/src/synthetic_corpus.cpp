#include "ntmal/synthetic_corpus.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ntmal/error.hpp"

namespace ntmal {

namespace {

// splitmix64 finalizer; derives independent per-trace seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<std::string> repeat(const std::vector<std::string>& unit, std::size_t length) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < length; ++i) out.push_back(unit[i % unit.size()]);
  return out;
}

constexpr int kMaxRedraws = 1000;

std::vector<std::string> draw_background(std::mt19937_64& rng, const GeneratorConfig& config) {
  std::uniform_int_distribution<std::size_t> length(config.min_length, config.max_length);
  std::vector<double> weights(config.background_vocab.size());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] = std::pow(static_cast<double>(k + 1), -config.background_skew);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<std::string> calls(length(rng));
  for (auto& call : calls) call = config.background_vocab[pick(rng)];
  return calls;
}

bool contains_any_motif(const std::vector<std::string>& calls, const GeneratorConfig& config) {
  return std::any_of(config.malicious_motifs.begin(), config.malicious_motifs.end(),
                     [&](const auto& motif) { return contains_motif(calls, motif); });
}

std::vector<std::string> benign_calls(std::mt19937_64& rng, const GeneratorConfig& config) {
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    auto calls = draw_background(rng, config);
    if (!contains_any_motif(calls, config)) return calls;
  }
  throw Error(ErrorKind::ConfigInvalid,
              "background_vocab: benign traces keep reproducing a malicious motif");
}

std::vector<std::string> malicious_calls(std::mt19937_64& rng, const GeneratorConfig& config) {
  auto background = draw_background(rng, config);
  std::poisson_distribution<int> count_dist(config.motif_rate);
  const int count = std::max(1, count_dist(rng));
  std::uniform_int_distribution<std::size_t> where(0, background.size());
  std::uniform_int_distribution<std::size_t> which(0, config.malicious_motifs.size() - 1);

  // Insertion points index the background, so motifs are never split.
  std::vector<std::pair<std::size_t, std::size_t>> inserts;
  for (int k = 0; k < count; ++k) {
    const auto pos = where(rng);
    inserts.emplace_back(pos, which(rng));
  }
  std::stable_sort(inserts.begin(), inserts.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::string> calls;
  std::size_t cursor = 0;
  for (const auto& [pos, motif] : inserts) {
    calls.insert(calls.end(), background.begin() + static_cast<std::ptrdiff_t>(cursor),
                 background.begin() + static_cast<std::ptrdiff_t>(pos));
    const auto& m = config.malicious_motifs[motif];
    calls.insert(calls.end(), m.begin(), m.end());
    cursor = pos;
  }
  calls.insert(calls.end(), background.begin() + static_cast<std::ptrdiff_t>(cursor), background.end());
  return calls;
}

std::string trace_file_name(std::size_t index) {
  std::string digits = std::to_string(index);
  return "trace_" + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits + ".txt";
}

// "ntcreatefile" -> "NtCreatefile( Handle=0x0 ) => 0"; parses back to the
// same lowercase name.
std::string raw_line(const std::string& call) {
  return "Nt" + call.substr(2) + "( Handle=0x0 ) => 0\n";
}

}  // namespace

std::vector<std::string> GeneratorConfig::default_background_vocab() {
  return {"ntqueryperformancecounter", "ntprotectvirtualmemory", "ntquerysysteminformation",
          "ntqueryvirtualmemory",      "ntclose",                "ntopenkeyex",
          "ntcreatefile",              "ntcreatesection",        "ntmapviewofsection"};
}

std::vector<std::vector<std::string>> GeneratorConfig::default_malicious_motifs() {
  return {
      repeat({"ntdelayexecution"}, 10),
      repeat({"ntgetcurrentprocessornumber", "ntgetcurrentprocessornumber", "ntalpcsendwaitreceiveport"}, 10),
      repeat({"ntdeviceiocontrolfile", "ntclose", "ntcreateevent"}, 10),
      repeat({"ntqueryinformationthread"}, 10),
      repeat({"ntmapviewofsection", "ntunmapviewofsection"}, 10),
      repeat({"ntsetinformationfile", "ntreadfile"}, 10),
  };
}

void GeneratorConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::ConfigInvalid, field + ": " + why);
  };
  if (n_traces < 2) fail("n_traces", "must be >= 2");
  if (!(malicious_fraction > 0.0 && malicious_fraction < 1.0)) fail("malicious_fraction", "must be in (0, 1)");
  if (min_length < 1 || max_length < min_length) fail("trace_len_range", "need 1 <= min <= max");
  if (background_vocab.empty()) fail("background_vocab", "must not be empty");
  for (const auto& call : background_vocab) {
    if (!is_call_token(call)) fail("background_vocab", "invalid call name \"" + call + "\"");
  }
  if (malicious_motifs.empty()) fail("malicious_motifs", "must not be empty");
  for (const auto& motif : malicious_motifs) {
    if (motif.empty()) fail("malicious_motifs", "motifs must not be empty");
    for (const auto& call : motif) {
      if (!is_call_token(call)) fail("malicious_motifs", "invalid call name \"" + call + "\"");
    }
  }
  if (!(background_skew >= 0.0) || !std::isfinite(background_skew)) fail("background_skew", "must be >= 0");
  if (!(motif_rate > 0.0) || !std::isfinite(motif_rate)) fail("motif_rate", "must be > 0");
}

std::size_t malicious_count(const GeneratorConfig& config) {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(config.n_traces) * config.malicious_fraction + 0.5));
}

bool contains_motif(const std::vector<std::string>& calls, const std::vector<std::string>& motif) {
  return std::search(calls.begin(), calls.end(), motif.begin(), motif.end()) != calls.end();
}

GeneratedCorpus generate(const GeneratorConfig& config) {
  config.validate();
  const std::size_t n = config.n_traces;
  std::vector<Label> labels(n, Label::Benign);
  std::fill_n(labels.begin(), malicious_count(config), Label::Malicious);
  std::mt19937_64 master(config.seed);
  std::shuffle(labels.begin(), labels.end(), master);

  GeneratedCorpus corpus;
  corpus.traces.resize(n);
  std::vector<std::exception_ptr> failures(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      std::mt19937_64 rng(mix_seed(config.seed, static_cast<std::uint64_t>(i)));
      auto& trace = corpus.traces[i];
      trace.source_id = trace_file_name(static_cast<std::size_t>(i));
      trace.label = labels[i];
      trace.calls = labels[i] == Label::Malicious ? malicious_calls(rng, config) : benign_calls(rng, config);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return corpus;
}

void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir, bool raw) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
  CorpusManifest manifest;
  for (const auto& trace : corpus.traces) {
    std::string text;
    if (raw) {
      for (const auto& call : trace.calls) text += raw_line(call);
    } else {
      text = render_processed(trace);
    }
    write_text_file(dir / trace.source_id, text);
    manifest.entries.push_back({trace.source_id, trace.label.value_or(Label::Benign)});
  }
  write_text_file(dir / "manifest.csv", render_manifest(manifest));
}

}  // namespace ntmal
