#include "ntmal/trace.hpp"

#include <exception>
#include <fstream>
#include <set>
#include <sstream>

#include "ntmal/error.hpp"

namespace ntmal {

namespace {

bool is_ident_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

char to_lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

// Bytes outside printable ASCII (tab excepted) make a line undecodable.
bool is_decodable(std::string_view line) {
  for (unsigned char c : line) {
    if (c == '\t') continue;
    if (c < 0x20 || c >= 0x7f) return false;
  }
  return true;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    fn(strip_cr(text.substr(pos, end - pos)));
    pos = end + 1;
  }
}

}  // namespace

std::string_view to_string(Label label) {
  return label == Label::Malicious ? "malicious" : "benign";
}

std::optional<Label> parse_label(std::string_view text) {
  if (text == "malicious") return Label::Malicious;
  if (text == "benign") return Label::Benign;
  return std::nullopt;
}

std::optional<std::string> extract_call_name(std::string_view line) {
  line = strip_cr(line);
  if (!is_decodable(line)) return std::nullopt;
  std::size_t i = 0;
  while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
  if (line.substr(i, 2) != "Nt") return std::nullopt;
  std::size_t end = i;
  while (end < line.size() && is_ident_char(line[end])) ++end;
  if (end >= line.size() || line[end] != '(') return std::nullopt;
  std::string name;
  name.reserve(end - i);
  for (std::size_t k = i; k < end; ++k) name.push_back(to_lower_ascii(line[k]));
  return name;
}

bool is_call_token(std::string_view token) {
  if (token.size() < 2 || token.substr(0, 2) != "nt") return false;
  for (char c : token) {
    if (!is_ident_char(c) || (c >= 'A' && c <= 'Z')) return false;
  }
  return true;
}

SyscallTrace parse_trace(std::string_view text, std::string source_id) {
  SyscallTrace trace{std::move(source_id), {}, std::nullopt};
  for_each_line(text, [&](std::string_view line) {
    if (auto name = extract_call_name(line)) trace.calls.push_back(std::move(*name));
  });
  if (trace.calls.empty()) {
    throw Error(ErrorKind::EmptyTrace, "no system calls found in " + trace.source_id);
  }
  return trace;
}

SyscallTrace parse_processed_trace(std::string_view text, std::string source_id) {
  SyscallTrace trace{std::move(source_id), {}, std::nullopt};
  for_each_line(text, [&](std::string_view line) {
    line = trim(line);
    if (is_call_token(line)) trace.calls.emplace_back(line);
  });
  if (trace.calls.empty()) {
    throw Error(ErrorKind::EmptyTrace, "no system calls found in " + trace.source_id);
  }
  return trace;
}

SyscallTrace parse_trace_as(std::string_view text, std::string source_id, TraceFormat format) {
  switch (format) {
    case TraceFormat::Raw: return parse_trace(text, std::move(source_id));
    case TraceFormat::Processed: return parse_processed_trace(text, std::move(source_id));
    case TraceFormat::Auto: break;
  }
  try {
    return parse_trace(text, source_id);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyTrace) throw;
  }
  return parse_processed_trace(text, std::move(source_id));
}

std::string render_processed(const SyscallTrace& trace) {
  std::string out;
  for (const auto& call : trace.calls) {
    out += call;
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "read failed for " + path.string());
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

CorpusManifest parse_manifest(std::string_view csv, const std::filesystem::path& base_dir) {
  CorpusManifest manifest;
  std::set<std::filesystem::path> seen;
  bool header = true;
  std::size_t line_no = 0;
  for_each_line(csv, [&](std::string_view line) {
    ++line_no;
    if (header) {
      if (trim(line) != "path,label") {
        throw Error(ErrorKind::Parse, "manifest header must be \"path,label\"");
      }
      header = false;
      return;
    }
    if (trim(line).empty()) return;
    // Paths may contain commas; the label never does.
    auto comma = line.rfind(',');
    if (comma == std::string_view::npos) {
      throw Error(ErrorKind::Parse, "manifest line " + std::to_string(line_no) + " has no label");
    }
    auto label = parse_label(trim(line.substr(comma + 1)));
    if (!label) {
      throw Error(ErrorKind::Parse, "manifest line " + std::to_string(line_no) + ": bad label");
    }
    std::filesystem::path path{std::string(trim(line.substr(0, comma)))};
    if (path.relative_path().empty() && !path.is_absolute()) {
      throw Error(ErrorKind::Parse, "manifest line " + std::to_string(line_no) + ": empty path");
    }
    if (path.is_relative()) path = base_dir / path;
    path = path.lexically_normal();
    if (!seen.insert(path).second) {
      throw Error(ErrorKind::Parse, "duplicate manifest path " + path.string());
    }
    manifest.entries.push_back({std::move(path), *label});
  });
  if (header) throw Error(ErrorKind::Parse, "manifest is empty");
  return manifest;
}

CorpusManifest read_manifest(const std::filesystem::path& manifest_path) {
  return parse_manifest(read_text_file(manifest_path), manifest_path.parent_path());
}

std::string render_manifest(const CorpusManifest& manifest) {
  std::string out = "path,label\n";
  for (const auto& entry : manifest.entries) {
    out += entry.path.generic_string();
    out += ',';
    out += to_string(entry.label);
    out += '\n';
  }
  return out;
}

std::vector<SyscallTrace> load_corpus(const CorpusManifest& manifest, TraceFormat format) {
  const auto n = static_cast<std::ptrdiff_t>(manifest.entries.size());
  std::vector<SyscallTrace> traces(manifest.entries.size());
  std::vector<std::exception_ptr> failures(manifest.entries.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& entry = manifest.entries[static_cast<std::size_t>(i)];
    try {
      auto text = read_text_file(entry.path);
      traces[i] = parse_trace_as(text, entry.path.string(), format);
      traces[i].label = entry.label;
    } catch (...) {
      failures[i] = std::current_exception();
    }
  }

  // First failure in manifest order wins, independent of thread timing.
  for (const auto& failure : failures) {
    if (failure) std::rethrow_exception(failure);
  }
  return traces;
}

}  // namespace ntmal
