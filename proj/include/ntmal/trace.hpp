#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ntmal {

enum class Label { Benign, Malicious };

// Malicious is the positive class everywhere: +1 malicious, -1 benign.
constexpr int to_sign(Label label) { return label == Label::Malicious ? 1 : -1; }
constexpr Label from_sign(int sign) { return sign >= 0 ? Label::Malicious : Label::Benign; }

std::string_view to_string(Label label);
std::optional<Label> parse_label(std::string_view text);

/// One program execution: the ordered Native API calls it made.
///
/// Tokens are lowercase, whitespace-free and start with "nt".
struct SyscallTrace {
  std::string source_id;
  std::vector<std::string> calls;
  std::optional<Label> label;
};

struct ManifestEntry {
  std::filesystem::path path;
  Label label;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
};

enum class TraceFormat {
  Raw,        // NtTrace log lines, "NtName( params ) => status"
  Processed,  // one lowercase call name per line
  Auto,       // raw, falling back to processed when no raw call line matched
};

/// Leading call name of an NtTrace log line, lowercased.
///
/// Matches optional leading whitespace, then an identifier of [A-Za-z0-9_]
/// beginning with "Nt", then "(". Parameters and return values are dropped.
/// Lines with non-ASCII or control bytes are rejected.
std::optional<std::string> extract_call_name(std::string_view line);

/// True when `token` is a valid processed call name (lowercase, "nt" prefix).
bool is_call_token(std::string_view token);

/// Throws Error(EmptyTrace) when no call line is found.
SyscallTrace parse_trace(std::string_view text, std::string source_id);

/// Reads the one-name-per-line processed format. Throws Error(EmptyTrace).
SyscallTrace parse_processed_trace(std::string_view text, std::string source_id);

SyscallTrace parse_trace_as(std::string_view text, std::string source_id, TraceFormat format);

/// Processed form: one call per line, LF terminated.
std::string render_processed(const SyscallTrace& trace);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view contents);

/// CSV with header "path,label". Relative paths resolve against the
/// manifest's directory.
CorpusManifest read_manifest(const std::filesystem::path& manifest_path);
CorpusManifest parse_manifest(std::string_view csv, const std::filesystem::path& base_dir);
std::string render_manifest(const CorpusManifest& manifest);

/// One labeled trace per entry, in manifest order. Errors name the file.
std::vector<SyscallTrace> load_corpus(const CorpusManifest& manifest,
                                      TraceFormat format = TraceFormat::Auto);

}  // namespace ntmal
