#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infotriage/errors.hpp"
#include "json.hpp"

namespace infotriage {

class MalformedRecord : public Error {
 public:
  MalformedRecord(std::size_t line_no, const std::string& reason)
      : Error("malformed record at line " + std::to_string(line_no) + ": " + reason),
        line_no_(line_no) {}
  std::size_t line_no() const { return line_no_; }

 private:
  std::size_t line_no_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(std::string id) : Error("duplicate document id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

struct RawDocument {
  std::string id;
  std::string text;
  std::string source;
  std::optional<std::string> timestamp;
  // Opaque pass-through for the evaluate module.
  std::optional<nlohmann::json> gold;
};

struct CleanedText {
  std::string text;
  // char_map[i] is the codepoint index in the raw text that produced text[i].
  std::vector<std::size_t> char_map;
};

struct CleanDocument {
  std::string id;
  std::string text;
  std::vector<std::size_t> char_map;
  std::string raw_text;
  std::string source;
  std::optional<std::string> timestamp;
  std::optional<nlohmann::json> gold;
};

/// Lowercase, strip URLs/emoji/unsupported symbols, keep hashtags and
/// handles, collapse whitespace. Total on any byte string: invalid UTF-8
/// sequences are dropped like any other unsupported character.
CleanedText clean_text(std::string_view raw);

/// True for the characters clean_text may emit.
bool is_retained_char(char c);

/// Half-open byte range of one whitespace-delimited token in cleaned text.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

std::vector<TokenSpan> whitespace_tokens(std::string_view cleaned);

CleanDocument make_clean_document(RawDocument raw);

enum class CorpusFormat { Jsonl, Csv };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);
/// Guess the format from a file extension (".csv" -> Csv, otherwise Jsonl).
CorpusFormat format_from_path(const std::filesystem::path& path);

/// Sealed, immutable document collection. Safe for concurrent readers.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string corpus_id, std::vector<CleanDocument> documents, std::string created_at);

  const std::string& corpus_id() const { return corpus_id_; }
  const std::string& created_at() const { return created_at_; }
  const std::vector<CleanDocument>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }

  const CleanDocument* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }

 private:
  std::string corpus_id_;
  std::string created_at_;
  std::vector<CleanDocument> documents_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct CsvRow {
  std::size_t line_no = 0;
  std::vector<std::string> fields;
};

// RFC 4180 records; LF or CRLF separators, blank lines skipped.
std::vector<CsvRow> parse_csv_rows(std::string_view bytes);

std::vector<RawDocument> parse_records(std::string_view bytes, CorpusFormat format);

/// Content-derived id: identical (format, bytes) always map to the same id.
std::string corpus_id_for(std::string_view bytes, CorpusFormat format);

Corpus ingest_bytes(std::string_view bytes, CorpusFormat format);
Corpus ingest(const std::filesystem::path& path, CorpusFormat format);

std::string read_file(const std::filesystem::path& path);
std::string utc_timestamp();
std::string sha256_hex(std::string_view bytes);

}  // namespace infotriage
