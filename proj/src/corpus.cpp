#include "infotriage/corpus.hpp"

#include <openssl/evp.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace infotriage {
namespace {

enum class CharClass { Drop, Space, Keep };

struct Mapped {
  CharClass cls = CharClass::Drop;
  char ch = 0;
};

Mapped map_ascii(unsigned char c) {
  if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f') {
    return {CharClass::Space, ' '};
  }
  char lowered = static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c);
  if (is_retained_char(lowered)) return {CharClass::Keep, lowered};
  return {};
}

bool is_mark(UChar32 c) {
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_ENCLOSING_MARK || type == U_COMBINING_SPACING_MARK;
}

Mapped map_non_ascii(UChar32 c) {
  if (u_isUWhiteSpace(c)) return {CharClass::Space, ' '};

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfkd = icu::Normalizer2::getNFKDInstance(status);
  if (U_FAILURE(status)) return {};
  icu::UnicodeString decomposed = nfkd->normalize(icu::UnicodeString(c), status);
  if (U_FAILURE(status)) return {};

  // Keep only a single-codepoint ASCII base once combining marks are gone.
  UChar32 base = -1;
  int bases = 0;
  for (int32_t i = 0; i < decomposed.length();) {
    UChar32 cp = decomposed.char32At(i);
    i += U16_LENGTH(cp);
    if (is_mark(cp)) continue;
    base = cp;
    ++bases;
  }
  if (bases != 1 || base < 0 || base > 0x7f) return {};
  return map_ascii(static_cast<unsigned char>(base));
}

Mapped map_codepoint(UChar32 c) {
  if (c < 0) return {};
  if (c <= 0x7f) return map_ascii(static_cast<unsigned char>(c));
  thread_local std::unordered_map<UChar32, Mapped> cache;
  auto it = cache.find(c);
  if (it != cache.end()) return it->second;
  Mapped m = map_non_ascii(c);
  cache.emplace(c, m);
  return m;
}

bool starts_url(std::string_view s, std::size_t i) {
  static constexpr std::array<std::string_view, 3> kPrefixes = {"http://", "https://", "www."};
  for (auto p : kPrefixes) {
    if (s.substr(i, p.size()) == p) return true;
  }
  return false;
}

bool valid_utf8(std::string_view s) {
  int32_t i = 0;
  const auto n = static_cast<int32_t>(s.size());
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(p, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

void set_optional_string(const nlohmann::json& obj, const char* key, std::size_t line,
                         std::optional<std::string>& out) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return;
  if (!it->is_string()) throw MalformedRecord(line, std::string("field '") + key + "' must be a string");
  out = it->get<std::string>();
}

std::vector<RawDocument> parse_jsonl(std::string_view bytes) {
  std::vector<RawDocument> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t nl = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = (nl == std::string_view::npos) ? bytes.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw MalformedRecord(line_no, "not valid JSON");
    }
    if (!obj.is_object()) throw MalformedRecord(line_no, "record is not a JSON object");
    auto id = obj.find("id");
    if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty()) {
      throw MalformedRecord(line_no, "missing or empty string field 'id'");
    }
    auto text = obj.find("text");
    if (text == obj.end() || !text->is_string()) {
      throw MalformedRecord(line_no, "missing string field 'text'");
    }
    RawDocument doc;
    doc.id = id->get<std::string>();
    doc.text = text->get<std::string>();
    std::optional<std::string> source;
    set_optional_string(obj, "source", line_no, source);
    doc.source = source.value_or("");
    set_optional_string(obj, "timestamp", line_no, doc.timestamp);
    if (auto g = obj.find("gold"); g != obj.end()) doc.gold = *g;
    out.push_back(std::move(doc));
  }
  return out;
}

std::vector<RawDocument> parse_csv(std::string_view bytes) {
  std::vector<RawDocument> out;
  auto rows = parse_csv_rows(bytes);
  if (rows.empty()) return out;

  const CsvRow& header = rows.front();
  int id_col = -1, text_col = -1, source_col = -1, ts_col = -1;
  for (std::size_t c = 0; c < header.fields.size(); ++c) {
    const std::string& name = header.fields[c];
    int* slot = name == "id"          ? &id_col
                : name == "text"      ? &text_col
                : name == "source"    ? &source_col
                : name == "timestamp" ? &ts_col
                                      : nullptr;
    if (slot == nullptr) throw MalformedRecord(header.line_no, "unknown header column '" + name + "'");
    if (*slot >= 0) throw MalformedRecord(header.line_no, "repeated header column '" + name + "'");
    *slot = static_cast<int>(c);
  }
  if (id_col < 0 || text_col < 0) {
    throw MalformedRecord(header.line_no, "header row must name columns id and text");
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const CsvRow& row = rows[r];
    if (row.fields.size() != header.fields.size()) {
      throw MalformedRecord(row.line_no, "expected " + std::to_string(header.fields.size()) + " fields, got " +
                                             std::to_string(row.fields.size()));
    }
    for (const auto& f : row.fields) {
      if (!valid_utf8(f)) throw MalformedRecord(row.line_no, "invalid UTF-8");
    }
    RawDocument doc;
    doc.id = row.fields[id_col];
    if (doc.id.empty()) throw MalformedRecord(row.line_no, "empty id");
    doc.text = row.fields[text_col];
    if (source_col >= 0) doc.source = row.fields[source_col];
    if (ts_col >= 0 && !row.fields[ts_col].empty()) doc.timestamp = row.fields[ts_col];
    out.push_back(std::move(doc));
  }
  return out;
}

}  // namespace

// RFC 4180 reader; accepts LF or CRLF record separators.
std::vector<CsvRow> parse_csv_rows(std::string_view bytes) {
  std::vector<CsvRow> rows;
  std::size_t i = 0;
  std::size_t line = 1;
  while (i < bytes.size()) {
    CsvRow row;
    row.line_no = line;
    std::string field;
    bool end_of_record = false;
    while (!end_of_record) {
      field.clear();
      if (i < bytes.size() && bytes[i] == '"') {
        ++i;
        bool closed = false;
        while (i < bytes.size()) {
          char c = bytes[i];
          if (c == '"') {
            if (i + 1 < bytes.size() && bytes[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            closed = true;
            break;
          }
          if (c == '\n') ++line;
          field.push_back(c);
          ++i;
        }
        if (!closed) throw MalformedRecord(row.line_no, "unterminated quoted field");
        if (i < bytes.size() && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
          throw MalformedRecord(line, "unexpected character after closing quote");
        }
      } else {
        while (i < bytes.size() && bytes[i] != ',' && bytes[i] != '\n' && bytes[i] != '\r') {
          if (bytes[i] == '"') throw MalformedRecord(line, "quote inside unquoted field");
          field.push_back(bytes[i++]);
        }
      }
      row.fields.push_back(field);
      if (i >= bytes.size()) {
        end_of_record = true;
      } else if (bytes[i] == ',') {
        ++i;
      } else {
        if (bytes[i] == '\r') ++i;
        if (i < bytes.size() && bytes[i] == '\n') ++i;
        ++line;
        end_of_record = true;
      }
    }
    bool blank = row.fields.size() == 1 && row.fields[0].empty();
    if (!blank) rows.push_back(std::move(row));
  }
  return rows;
}

bool is_retained_char(char c) {
  if ((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')) return true;
  switch (c) {
    case ' ': case '#': case '@': case '\'': case '-': case '.': case ',': case '!': case '?':
    case '%': case '$': case '&': case '/': case '(': case ')': case ':': case ';':
      return true;
    default:
      return false;
  }
}

CleanedText clean_text(std::string_view raw) {
  // Pass 1: per-codepoint normalization and filtering.
  std::string filtered;
  std::vector<std::size_t> filtered_map;
  filtered.reserve(raw.size());
  filtered_map.reserve(raw.size());

  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  const auto n = static_cast<int32_t>(raw.size());
  std::size_t cp_index = 0;
  for (int32_t i = 0; i < n; ++cp_index) {
    UChar32 c;
    U8_NEXT(bytes, i, n, c);
    Mapped m = map_codepoint(c);
    if (m.cls == CharClass::Drop) continue;
    filtered.push_back(m.ch);
    filtered_map.push_back(cp_index);
  }

  // Pass 2: drop URL runs up to the next whitespace.
  std::string unlinked;
  std::vector<std::size_t> unlinked_map;
  unlinked.reserve(filtered.size());
  unlinked_map.reserve(filtered.size());
  for (std::size_t i = 0; i < filtered.size();) {
    if (starts_url(filtered, i)) {
      while (i < filtered.size() && filtered[i] != ' ') ++i;
      continue;
    }
    unlinked.push_back(filtered[i]);
    unlinked_map.push_back(filtered_map[i]);
    ++i;
  }

  // Pass 3: collapse whitespace runs and trim.
  CleanedText out;
  out.text.reserve(unlinked.size());
  out.char_map.reserve(unlinked.size());
  bool pending_space = false;
  std::size_t space_origin = 0;
  for (std::size_t i = 0; i < unlinked.size(); ++i) {
    if (unlinked[i] == ' ') {
      if (!pending_space) space_origin = unlinked_map[i];
      pending_space = true;
      continue;
    }
    if (pending_space && !out.text.empty()) {
      out.text.push_back(' ');
      out.char_map.push_back(space_origin);
    }
    pending_space = false;
    out.text.push_back(unlinked[i]);
    out.char_map.push_back(unlinked_map[i]);
  }
  return out;
}

std::vector<TokenSpan> whitespace_tokens(std::string_view cleaned) {
  std::vector<TokenSpan> tokens;
  std::size_t i = 0;
  while (i < cleaned.size()) {
    while (i < cleaned.size() && cleaned[i] == ' ') ++i;
    if (i >= cleaned.size()) break;
    std::size_t start = i;
    while (i < cleaned.size() && cleaned[i] != ' ') ++i;
    tokens.push_back({start, i});
  }
  return tokens;
}

CleanDocument make_clean_document(RawDocument raw) {
  CleanedText cleaned = clean_text(raw.text);
  CleanDocument doc;
  doc.id = std::move(raw.id);
  doc.text = std::move(cleaned.text);
  doc.char_map = std::move(cleaned.char_map);
  doc.raw_text = std::move(raw.text);
  doc.source = std::move(raw.source);
  doc.timestamp = std::move(raw.timestamp);
  doc.gold = std::move(raw.gold);
  return doc;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl" || name == "json") return CorpusFormat::Jsonl;
  if (name == "csv") return CorpusFormat::Csv;
  throw Error("unknown corpus format '" + std::string(name) + "' (expected jsonl or csv)");
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::Csv ? "csv" : "jsonl";
}

CorpusFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? CorpusFormat::Csv : CorpusFormat::Jsonl;
}

Corpus::Corpus(std::string corpus_id, std::vector<CleanDocument> documents, std::string created_at)
    : corpus_id_(std::move(corpus_id)), created_at_(std::move(created_at)), documents_(std::move(documents)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].id.empty()) throw Error("document id must be non-empty");
    if (!index_.emplace(documents_[i].id, i).second) throw DuplicateId(documents_[i].id);
  }
}

const CleanDocument* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

std::vector<RawDocument> parse_records(std::string_view bytes, CorpusFormat format) {
  return format == CorpusFormat::Csv ? parse_csv(bytes) : parse_jsonl(bytes);
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string corpus_id_for(std::string_view bytes, CorpusFormat format) {
  std::string keyed(to_string(format));
  keyed.push_back('\0');
  keyed.append(bytes);
  return "c" + sha256_hex(keyed).substr(0, 20);
}

Corpus ingest_bytes(std::string_view bytes, CorpusFormat format) {
  std::vector<RawDocument> records = parse_records(bytes, format);
  std::vector<CleanDocument> docs;
  docs.reserve(records.size());
  for (auto& r : records) docs.push_back(make_clean_document(std::move(r)));
  return Corpus(corpus_id_for(bytes, format), std::move(docs), utc_timestamp());
}

Corpus ingest(const std::filesystem::path& path, CorpusFormat format) {
  return ingest_bytes(read_file(path), format);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading '" + path.string() + "'");
  return ss.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace infotriage
