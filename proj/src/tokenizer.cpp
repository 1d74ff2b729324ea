#include "infotriage/tokenizer.hpp"

#include <fstream>

#include "infotriage/corpus.hpp"

namespace infotriage {

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::string unk_token) : tokens_(std::move(tokens)) {
  if (tokens_.empty()) throw VocabularyError("empty vocabulary");
  ids_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!ids_.emplace(tokens_[i], static_cast<TokenId>(i)).second) {
      throw VocabularyError("duplicate token '" + tokens_[i] + "' at id " + std::to_string(i));
    }
  }
  auto require = [&](const std::string& tok) {
    auto it = ids_.find(tok);
    if (it == ids_.end()) throw VocabularyError("missing special token " + tok);
    if (it->second == kPadId) throw VocabularyError("special token " + tok + " cannot occupy the pad slot");
    return it->second;
  };
  unk_id_ = require(unk_token);
  cls_id_ = require("[CLS]");
  sep_id_ = require("[SEP]");
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary '" + path.string() + "'");
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocabulary(std::move(tokens));
}

bool Vocabulary::contains(std::string_view token) const { return ids_.contains(std::string(token)); }

TokenId Vocabulary::id_of(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? unk_id_ : it->second;
}

namespace {

// Appends the pieces of one word, or the unk token when no full segmentation exists.
void segment_word(std::string_view word, const Vocabulary& vocab, std::vector<TokenId>& out) {
  if (word.size() > Vocabulary::kMaxWordChars) {
    out.push_back(vocab.unk_id());
    return;
  }
  const std::size_t mark = out.size();
  std::string candidate;
  std::size_t start = 0;
  while (start < word.size()) {
    std::size_t end = word.size();
    TokenId found = -1;
    while (start < end) {
      candidate.clear();
      if (start > 0) candidate.append(Vocabulary::continuation_prefix());
      candidate.append(word.substr(start, end - start));
      if (vocab.contains(candidate)) {
        found = vocab.id_of(candidate);
        break;
      }
      --end;
    }
    if (found < 0) {
      out.resize(mark);
      out.push_back(vocab.unk_id());
      return;
    }
    out.push_back(found);
    start = end;
  }
}

TokenSequence blank_sequence(const ModelGeometry& geometry, const Vocabulary& vocab) {
  TokenSequence seq;
  seq.ids.assign(geometry.max_tokens, vocab.pad_id());
  seq.segment_ids.assign(geometry.max_tokens, 0);
  return seq;
}

}  // namespace

std::vector<TokenId> wordpiece_ids(std::string_view text, const Vocabulary& vocab) {
  std::vector<TokenId> out;
  for (const TokenSpan& span : whitespace_tokens(text)) {
    segment_word(text.substr(span.start, span.end - span.start), vocab, out);
  }
  return out;
}

std::vector<std::string> wordpiece(std::string_view text, const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (TokenId id : wordpiece_ids(text, vocab)) out.push_back(vocab.token(id));
  return out;
}

TokenSequence encode_single_pieces(const std::vector<TokenId>& pieces, const Vocabulary& vocab,
                                   const ModelGeometry& geometry) {
  if (geometry.max_tokens < 2) throw Error("max_tokens must leave room for [CLS] and [SEP]");
  TokenSequence seq = blank_sequence(geometry, vocab);
  const std::size_t budget = geometry.max_tokens - 2;
  const std::size_t kept = std::min(pieces.size(), budget);
  seq.truncated = pieces.size() > budget;

  std::size_t pos = 0;
  seq.ids[pos++] = vocab.cls_id();
  for (std::size_t i = 0; i < kept; ++i) seq.ids[pos++] = pieces[i];
  seq.ids[pos++] = vocab.sep_id();
  seq.actual_length = pos;
  return seq;
}

TokenSequence encode_pair_pieces(const std::vector<TokenId>& claim, const std::vector<TokenId>& text,
                                 const Vocabulary& vocab, const ModelGeometry& geometry) {
  if (geometry.max_tokens < 3) throw Error("max_tokens must leave room for [CLS] and two [SEP]");
  const std::size_t budget = geometry.max_tokens - 3;
  // The text may shrink but never vanish through truncation.
  const std::size_t claim_budget = text.empty() ? budget : budget - 1;
  if (claim.size() > claim_budget) throw ClaimTooLong(claim.size(), claim_budget);

  TokenSequence seq = blank_sequence(geometry, vocab);
  const std::size_t text_kept = std::min(text.size(), budget - claim.size());
  seq.truncated = text_kept < text.size();

  std::size_t pos = 0;
  seq.ids[pos++] = vocab.cls_id();
  for (TokenId id : claim) seq.ids[pos++] = id;
  seq.ids[pos++] = vocab.sep_id();
  const std::size_t second_start = pos;
  for (std::size_t i = 0; i < text_kept; ++i) seq.ids[pos++] = text[i];
  seq.ids[pos++] = vocab.sep_id();
  for (std::size_t i = second_start; i < pos; ++i) seq.segment_ids[i] = 1;
  seq.actual_length = pos;
  return seq;
}

TokenSequence encode_single(std::string_view text, const Vocabulary& vocab, const ModelGeometry& geometry) {
  return encode_single_pieces(wordpiece_ids(text, vocab), vocab, geometry);
}

TokenSequence encode_pair(std::string_view claim, std::string_view text, const Vocabulary& vocab,
                          const ModelGeometry& geometry) {
  return encode_pair_pieces(wordpiece_ids(claim, vocab), wordpiece_ids(text, vocab), vocab, geometry);
}

}  // namespace infotriage
