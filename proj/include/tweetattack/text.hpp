#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tweetattack {

// Class order is fixed: it is the argmax tie-break order and the layout of
// every probability vector.
enum class Sentiment { Positive = 0, Negative = 1, Neutral = 2 };
inline constexpr int kNumClasses = 3;

std::string_view to_string(Sentiment s);
std::optional<Sentiment> parse_sentiment(std::string_view s);

namespace text {

bool is_alnum(char c);
bool is_alpha(char c);
std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split_whitespace(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// A word made only of non-alphanumeric characters.
bool is_punctuation(std::string_view word);
// Non-empty and every character in [a-z].
bool is_lower_alpha_word(std::string_view word);

// A whitespace token split into leading punctuation, core and trailing
// punctuation. Apostrophes inside the core are kept ("can't").
struct TokenParts {
  std::string leading;
  std::string core;
  std::string trailing;
};
TokenParts split_punctuation(std::string_view token);

// Reads a UTF-8 file. Blank lines and lines starting with '#' are dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);
// key<TAB>value rows, in file order.
std::vector<std::pair<std::string, std::string>> read_tsv(const std::filesystem::path& path);

}  // namespace text
}  // namespace tweetattack

namespace tweetattack::text {

// Text cut into words with the exact separators between them, so a word can
// be swapped and the text rendered back without disturbing anything else.
// A word is a maximal alphanumeric run (internal apostrophes allowed) or a
// maximal run of other non-space characters.
struct Segmentation {
  std::vector<std::string> words;
  std::vector<std::string> gaps;  // gaps.size() == words.size() + 1

  std::string render() const;
  std::string render_with(std::size_t index, std::string_view replacement) const;
};
Segmentation segment_words(std::string_view text);

}  // namespace tweetattack::text
