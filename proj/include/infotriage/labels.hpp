#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "infotriage/corpus.hpp"

namespace infotriage {

enum class SentimentLabel { Positive, Neutral, Negative };
enum class StanceLabel { Unrelated, Agree, Discuss, Disagree };
// Null marks a token that is not part of any sentiment target.
enum class AspectTag { Null, Positive, Neutral, Negative };

std::string_view to_string(SentimentLabel label);
std::string_view to_string(StanceLabel label);
std::string_view to_string(AspectTag tag);  // Null renders as "O"

std::optional<SentimentLabel> parse_sentiment(std::string_view s);
std::optional<StanceLabel> parse_stance(std::string_view s);
std::optional<AspectTag> parse_aspect_tag(std::string_view s);  // accepts "O" for Null

AspectTag to_aspect_tag(SentimentLabel polarity);
std::optional<SentimentLabel> polarity_of(AspectTag tag);

struct AspectSpan {
  std::size_t start_token = 0;
  std::size_t end_token = 0;  // exclusive
  SentimentLabel polarity = SentimentLabel::Neutral;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
  friend bool operator==(const AspectSpan&, const AspectSpan&) = default;
};

struct AspectTagging {
  std::vector<TokenSpan> tokens;
  std::vector<AspectTag> tags;
  std::vector<AspectSpan> spans;
};

/// Maximal runs of identical non-Null tags, with character offsets from `tokens`.
std::vector<AspectSpan> derive_spans(const std::vector<AspectTag>& tags, const std::vector<TokenSpan>& tokens);

/// Inverse of derive_spans.
std::vector<AspectTag> expand_spans(const std::vector<AspectSpan>& spans, std::size_t token_count);

AspectTagging make_tagging(std::vector<TokenSpan> tokens, std::vector<AspectTag> tags);

}  // namespace infotriage
