#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ntmal/trace.hpp"

namespace ntmal {

struct GeneratorConfig {
  std::size_t n_traces = 500;
  double malicious_fraction = 0.637;
  std::size_t min_length = 20;
  std::size_t max_length = 60;
  std::vector<std::string> background_vocab = default_background_vocab();
  std::vector<std::vector<std::string>> malicious_motifs = default_malicious_motifs();
  // Background calls are drawn i.i.d. with weight 1/(k+1)^skew for the k-th
  // entry of background_vocab; 0 draws uniformly. Uniform draws over a
  // handful of calls make almost every 8-gram unique to its trace.
  double background_skew = 6.0;
  // Poisson mean of motif insertions per malicious trace (at least one is
  // always inserted).
  double motif_rate = 3.0;
  std::uint64_t seed = 42;

  static std::vector<std::string> default_background_vocab();
  static std::vector<std::vector<std::string>> default_malicious_motifs();

  /// Throws Error(ConfigInvalid) naming the offending field.
  void validate() const;
};

/// round-half-up(n_traces * malicious_fraction).
std::size_t malicious_count(const GeneratorConfig& config);

struct GeneratedCorpus {
  std::vector<SyscallTrace> traces;  // labeled; source_id is the file name
};

/// Benign traces are i.i.d. background draws that never contain a full
/// motif; malicious traces are background with whole motifs spliced in.
/// Deterministic for a given config.
GeneratedCorpus generate(const GeneratorConfig& config);

/// Writes one file per trace plus "manifest.csv" (relative paths) into
/// `dir`. Processed format by default; `raw` wraps each call as an NtTrace
/// line so the raw parser is exercised.
void write_corpus(const GeneratedCorpus& corpus, const std::filesystem::path& dir, bool raw = false);

/// True when `motif` occurs contiguously in `calls`.
bool contains_motif(const std::vector<std::string>& calls, const std::vector<std::string>& motif);

}  // namespace ntmal
