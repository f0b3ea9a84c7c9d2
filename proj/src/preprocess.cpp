#include "tweetattack/preprocess.hpp"

#include <algorithm>
#include <numeric>

#include "tweetattack/errors.hpp"
#include "tweetattack/text.hpp"

namespace tweetattack::preprocess {

namespace {

void check_keys(const std::unordered_map<std::string, std::string>& table, const char* name) {
  for (const auto& [key, value] : table) {
    const bool bad = key.empty() || key != text::to_lower(key) ||
                     std::any_of(key.begin(), key.end(), [](char c) { return c == ' ' || c == '\t'; });
    if (bad) throw InvalidConfig(std::string(name) + " key must be lowercase without whitespace: '" + key + "'");
  }
}

// "I'm" -> "I am": a leading capital on the source token carries over.
std::string carry_case(const std::string& expansion, std::string_view source) {
  std::string out = expansion;
  if (!source.empty() && source.front() >= 'A' && source.front() <= 'Z' && !out.empty() &&
      out.front() >= 'a' && out.front() <= 'z') {
    out.front() = static_cast<char>(out.front() - 'a' + 'A');
  }
  return out;
}

std::string replace_from_table(std::string_view text,
                               const std::unordered_map<std::string, std::string>& table) {
  auto tokens = text::split_whitespace(text);
  for (auto& token : tokens) {
    auto parts = text::split_punctuation(token);
    if (parts.core.empty()) continue;
    const auto it = table.find(text::to_lower(parts.core));
    if (it == table.end()) continue;
    token = parts.leading + carry_case(it->second, parts.core) + parts.trailing;
  }
  return text::join(tokens, " ");
}

bool is_ascii_alpha(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), text::is_alpha);
}

}  // namespace

PreprocessConfig::PreprocessConfig(std::unordered_map<std::string, std::string> slang,
                                   std::unordered_map<std::string, std::string> contractions,
                                   std::vector<std::string> dictionary, int max_edit_distance)
    : slang_(std::move(slang)),
      contractions_(std::move(contractions)),
      dictionary_(std::move(dictionary)),
      max_edit_distance_(max_edit_distance) {
  validate();
  for (std::size_t i = 0; i < dictionary_.size(); ++i) {
    const auto& w = dictionary_[i];
    // first occurrence keeps the better rank
    if (!rank_.emplace(w, i).second) continue;
    if (by_length_.size() <= w.size()) by_length_.resize(w.size() + 1);
    by_length_[w.size()].push_back(i);
  }
}

void PreprocessConfig::validate() const {
  check_keys(slang_, "slang");
  check_keys(contractions_, "contraction");
  if (max_edit_distance_ < 0) throw InvalidConfig("max_edit_distance must be >= 0");
  for (const auto& w : dictionary_) {
    if (w.empty() || w != text::to_lower(w)) throw InvalidConfig("dictionary words must be lowercase: '" + w + "'");
  }
}

void PreprocessConfig::set_max_edit_distance(int d) {
  if (d < 0) throw InvalidConfig("max_edit_distance must be >= 0");
  max_edit_distance_ = d;
}

bool PreprocessConfig::in_dictionary(std::string_view lower_word) const {
  return rank_.count(std::string(lower_word)) > 0;
}

long PreprocessConfig::rank(std::string_view lower_word) const {
  const auto it = rank_.find(std::string(lower_word));
  return it == rank_.end() ? -1 : static_cast<long>(it->second);
}

int bounded_edit_distance(std::string_view a, std::string_view b, int limit) {
  const auto n = a.size();
  const auto m = b.size();
  if (static_cast<int>(n > m ? n - m : m - n) > limit) return limit + 1;
  std::vector<int> prev(m + 1);
  std::vector<int> cur(m + 1);
  std::iota(prev.begin(), prev.end(), 0);
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    int row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[m], limit + 1);
}

std::string strip_urls(std::string_view text) {
  std::vector<std::string> kept;
  for (auto& token : text::split_whitespace(text)) {
    if (text::starts_with_icase(token, "http://") || text::starts_with_icase(token, "https://") ||
        text::starts_with_icase(token, "www.")) {
      continue;
    }
    kept.push_back(std::move(token));
  }
  return text::join(kept, " ");
}

std::string normalize_slang(std::string_view text, const PreprocessConfig& cfg) {
  return replace_from_table(text, cfg.slang());
}

std::string expand_contractions(std::string_view text, const PreprocessConfig& cfg) {
  return replace_from_table(text, cfg.contractions());
}

std::string correct_spelling(std::string_view text, const PreprocessConfig& cfg) {
  const int limit = cfg.max_edit_distance();
  const auto& dict = cfg.dictionary();
  const auto& buckets = cfg.by_length();
  auto tokens = text::split_whitespace(text);
  for (auto& token : tokens) {
    auto parts = text::split_punctuation(token);
    if (!is_ascii_alpha(parts.core) || parts.core.size() < cfg.min_correction_length) continue;
    const std::string lower = text::to_lower(parts.core);
    if (cfg.in_dictionary(lower) || limit == 0) continue;

    int best_distance = limit + 1;
    std::size_t best_index = dict.size();
    const std::size_t lo = lower.size() > static_cast<std::size_t>(limit) ? lower.size() - limit : 0;
    const std::size_t hi = std::min(lower.size() + limit, buckets.empty() ? 0 : buckets.size() - 1);
    for (std::size_t len = lo; len <= hi && !buckets.empty(); ++len) {
      for (std::size_t idx : buckets[len]) {
        const int d = bounded_edit_distance(lower, dict[idx], std::min(limit, best_distance));
        if (d > limit) continue;
        // ranks are unique after dedup, so file order settles every tie
        if (d < best_distance || (d == best_distance && idx < best_index)) {
          best_distance = d;
          best_index = idx;
        }
      }
    }
    if (best_index < dict.size()) token = parts.leading + dict[best_index] + parts.trailing;
  }
  return text::join(tokens, " ");
}

std::string preprocess(std::string_view text, const PreprocessConfig& cfg) {
  std::string out = text::join(text::split_whitespace(text), " ");
  if (cfg.stages.urls) out = strip_urls(out);
  if (cfg.stages.slang) out = normalize_slang(out, cfg);
  if (cfg.stages.contractions) out = expand_contractions(out, cfg);
  if (cfg.stages.spelling) out = correct_spelling(out, cfg);
  return out;
}

}  // namespace tweetattack::preprocess
