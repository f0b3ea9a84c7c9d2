#include "tweetattack/text.hpp"

#include <algorithm>
#include <fstream>

#include "tweetattack/errors.hpp"

namespace tweetattack {

std::string_view to_string(Sentiment s) {
  switch (s) {
    case Sentiment::Positive:
      return "positive";
    case Sentiment::Negative:
      return "negative";
    case Sentiment::Neutral:
      return "neutral";
  }
  return "unknown";
}

std::optional<Sentiment> parse_sentiment(std::string_view s) {
  const std::string lower = text::to_lower(text::trim(s));
  if (lower == "positive") return Sentiment::Positive;
  if (lower == "negative") return Sentiment::Negative;
  if (lower == "neutral") return Sentiment::Neutral;
  return std::nullopt;
}

namespace text {

// Bytes >= 0x80 belong to multi-byte UTF-8 sequences and are treated as word
// characters so non-ASCII words are never split apart.
bool is_alnum(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

bool is_alpha(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
  });
  return out;
}

static bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.emplace_back(s.substr(start, i - start));
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

bool starts_with_icase(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  return to_lower(s.substr(0, prefix.size())) == to_lower(prefix);
}

bool is_punctuation(std::string_view word) {
  if (word.empty()) return false;
  return std::none_of(word.begin(), word.end(), is_alnum);
}

bool is_lower_alpha_word(std::string_view word) {
  if (word.empty()) return false;
  return std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

TokenParts split_punctuation(std::string_view token) {
  std::size_t b = 0;
  std::size_t e = token.size();
  while (b < e && !is_alnum(token[b])) ++b;
  while (e > b && !is_alnum(token[e - 1])) --e;
  return TokenParts{std::string(token.substr(0, b)), std::string(token.substr(b, e - b)),
                    std::string(token.substr(e))};
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    lines.push_back(line);
  }
  return lines;
}

std::vector<std::pair<std::string, std::string>> read_tsv(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& line : read_lines(path)) {
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ResourceError(path.string() + ": expected key<TAB>value, got '" + line + "'");
    }
    rows.emplace_back(trim(line.substr(0, tab)), trim(line.substr(tab + 1)));
  }
  return rows;
}

}  // namespace text
}  // namespace tweetattack

namespace tweetattack::text {

namespace {
bool space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
}  // namespace

Segmentation segment_words(std::string_view s) {
  Segmentation seg;
  std::string gap;
  std::size_t i = 0;
  while (i < s.size()) {
    if (space(s[i])) {
      gap += s[i++];
      continue;
    }
    const std::size_t start = i;
    if (is_alnum(s[i])) {
      while (i < s.size()) {
        if (is_alnum(s[i])) {
          ++i;
        } else if (s[i] == '\'' && i + 1 < s.size() && is_alnum(s[i + 1])) {
          i += 2;
        } else {
          break;
        }
      }
    } else {
      while (i < s.size() && !space(s[i]) && !is_alnum(s[i])) ++i;
    }
    seg.gaps.push_back(std::move(gap));
    gap.clear();
    seg.words.emplace_back(s.substr(start, i - start));
  }
  seg.gaps.push_back(std::move(gap));
  return seg;
}

std::string Segmentation::render() const {
  std::string out = gaps.empty() ? std::string() : gaps.front();
  for (std::size_t i = 0; i < words.size(); ++i) out += words[i] + gaps[i + 1];
  return out;
}

std::string Segmentation::render_with(std::size_t index, std::string_view replacement) const {
  std::string out = gaps.empty() ? std::string() : gaps.front();
  for (std::size_t i = 0; i < words.size(); ++i) {
    out += i == index ? std::string(replacement) : words[i];
    out += gaps[i + 1];
  }
  return out;
}

}  // namespace tweetattack::text
