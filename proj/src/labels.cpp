#include "infotriage/labels.hpp"

namespace infotriage {

std::string_view to_string(SentimentLabel label) {
  switch (label) {
    case SentimentLabel::Positive: return "positive";
    case SentimentLabel::Neutral: return "neutral";
    case SentimentLabel::Negative: return "negative";
  }
  return "?";
}

std::string_view to_string(StanceLabel label) {
  switch (label) {
    case StanceLabel::Unrelated: return "unrelated";
    case StanceLabel::Agree: return "agree";
    case StanceLabel::Discuss: return "discuss";
    case StanceLabel::Disagree: return "disagree";
  }
  return "?";
}

std::string_view to_string(AspectTag tag) {
  switch (tag) {
    case AspectTag::Null: return "O";
    case AspectTag::Positive: return "positive";
    case AspectTag::Neutral: return "neutral";
    case AspectTag::Negative: return "negative";
  }
  return "?";
}

std::optional<SentimentLabel> parse_sentiment(std::string_view s) {
  if (s == "positive") return SentimentLabel::Positive;
  if (s == "neutral") return SentimentLabel::Neutral;
  if (s == "negative") return SentimentLabel::Negative;
  return std::nullopt;
}

std::optional<StanceLabel> parse_stance(std::string_view s) {
  if (s == "unrelated") return StanceLabel::Unrelated;
  if (s == "agree") return StanceLabel::Agree;
  if (s == "discuss") return StanceLabel::Discuss;
  if (s == "disagree") return StanceLabel::Disagree;
  return std::nullopt;
}

std::optional<AspectTag> parse_aspect_tag(std::string_view s) {
  if (s == "O") return AspectTag::Null;
  if (s == "positive") return AspectTag::Positive;
  if (s == "neutral") return AspectTag::Neutral;
  if (s == "negative") return AspectTag::Negative;
  return std::nullopt;
}

AspectTag to_aspect_tag(SentimentLabel polarity) {
  switch (polarity) {
    case SentimentLabel::Positive: return AspectTag::Positive;
    case SentimentLabel::Neutral: return AspectTag::Neutral;
    case SentimentLabel::Negative: return AspectTag::Negative;
  }
  return AspectTag::Null;
}

std::optional<SentimentLabel> polarity_of(AspectTag tag) {
  switch (tag) {
    case AspectTag::Positive: return SentimentLabel::Positive;
    case AspectTag::Neutral: return SentimentLabel::Neutral;
    case AspectTag::Negative: return SentimentLabel::Negative;
    case AspectTag::Null: break;
  }
  return std::nullopt;
}

std::vector<AspectSpan> derive_spans(const std::vector<AspectTag>& tags, const std::vector<TokenSpan>& tokens) {
  std::vector<AspectSpan> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    auto polarity = polarity_of(tags[i]);
    if (!polarity) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == tags[i]) ++j;
    AspectSpan span{i, j, *polarity, 0, 0};
    if (j <= tokens.size()) {
      span.char_start = tokens[i].start;
      span.char_end = tokens[j - 1].end;
    }
    spans.push_back(span);
    i = j;
  }
  return spans;
}

std::vector<AspectTag> expand_spans(const std::vector<AspectSpan>& spans, std::size_t token_count) {
  std::vector<AspectTag> tags(token_count, AspectTag::Null);
  for (const auto& s : spans) {
    for (std::size_t t = s.start_token; t < s.end_token && t < token_count; ++t) tags[t] = to_aspect_tag(s.polarity);
  }
  return tags;
}

AspectTagging make_tagging(std::vector<TokenSpan> tokens, std::vector<AspectTag> tags) {
  AspectTagging out;
  out.spans = derive_spans(tags, tokens);
  out.tokens = std::move(tokens);
  out.tags = std::move(tags);
  return out;
}

}  // namespace infotriage
