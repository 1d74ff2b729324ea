#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "infotriage/errors.hpp"

namespace infotriage {

using TokenId = std::int32_t;

class VocabularyError : public Error {
 public:
  explicit VocabularyError(const std::string& what) : Error("vocabulary: " + what) {}
};

class ClaimTooLong : public Error {
 public:
  ClaimTooLong(std::size_t claim_pieces, std::size_t budget)
      : Error("claim has " + std::to_string(claim_pieces) + " pieces; at most " + std::to_string(budget) +
              " fit while keeping the input text"),
        claim_pieces_(claim_pieces) {}
  std::size_t claim_pieces() const { return claim_pieces_; }

 private:
  std::size_t claim_pieces_;
};

/// Transformer input geometry: sequence length and per-token embedding width.
struct ModelGeometry {
  std::size_t max_tokens = 192;
  std::size_t embed_dim = 768;

  constexpr std::size_t flattened_dim() const { return max_tokens * embed_dim; }
};

inline constexpr ModelGeometry kDefaultGeometry{};
static_assert(kDefaultGeometry.flattened_dim() == 147456);

class Vocabulary {
 public:
  static constexpr TokenId kPadId = 0;
  static constexpr std::size_t kMaxWordChars = 100;

  /// tokens[i] is the token with id i; index 0 is the pad token.
  explicit Vocabulary(std::vector<std::string> tokens, std::string unk_token = "[UNK]");

  /// One token per line, line number = id.
  static Vocabulary load(const std::filesystem::path& path);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(TokenId id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  bool contains(std::string_view token) const;
  TokenId id_of(std::string_view token) const;  // unk id when absent

  TokenId unk_id() const { return unk_id_; }
  TokenId cls_id() const { return cls_id_; }
  TokenId sep_id() const { return sep_id_; }
  TokenId pad_id() const { return kPadId; }
  const std::string& unk_token() const { return tokens_[static_cast<std::size_t>(unk_id_)]; }
  static constexpr std::string_view continuation_prefix() { return "##"; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  TokenId unk_id_ = 0;
  TokenId cls_id_ = 0;
  TokenId sep_id_ = 0;
};

/// Greedy longest-match-first WordPiece over whitespace-separated words.
std::vector<std::string> wordpiece(std::string_view text, const Vocabulary& vocab);
std::vector<TokenId> wordpiece_ids(std::string_view text, const Vocabulary& vocab);

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::uint8_t> segment_ids;
  std::size_t actual_length = 0;
  bool truncated = false;
};

TokenSequence encode_single(std::string_view text, const Vocabulary& vocab,
                            const ModelGeometry& geometry = kDefaultGeometry);

/// [CLS] claim [SEP] text [SEP]; truncation only ever shortens the text.
TokenSequence encode_pair(std::string_view claim, std::string_view text, const Vocabulary& vocab,
                          const ModelGeometry& geometry = kDefaultGeometry);

// Id-level entry points (the string versions run wordpiece_ids first).
TokenSequence encode_single_pieces(const std::vector<TokenId>& pieces, const Vocabulary& vocab,
                                   const ModelGeometry& geometry = kDefaultGeometry);
TokenSequence encode_pair_pieces(const std::vector<TokenId>& claim, const std::vector<TokenId>& text,
                                 const Vocabulary& vocab, const ModelGeometry& geometry = kDefaultGeometry);

}  // namespace infotriage
