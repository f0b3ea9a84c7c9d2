#include "tweetattack/saliency.hpp"

#include <algorithm>
#include <cmath>

#include "tweetattack/errors.hpp"

namespace tweetattack::saliency {

std::vector<double> word_importance(const std::vector<std::vector<double>>& grads, const model::TokenizedText& tt) {
  if (grads.size() != tt.tokens.size())
    throw AlignmentMismatch("gradient count " + std::to_string(grads.size()) + " != token count " +
                            std::to_string(tt.tokens.size()));
  if (tt.alignment.size() != tt.words.size()) throw AlignmentMismatch("alignment does not cover every word");
  std::vector<double> raw;
  raw.reserve(tt.words.size());
  for (const auto& range : tt.alignment) {
    if (range.end > grads.size() || range.size() == 0) throw AlignmentMismatch("word has no tokens in range");
    double total = 0.0;
    for (std::size_t t = range.begin; t < range.end; ++t) {
      double sq = 0.0;
      for (double g : grads[t]) sq += g * g;
      total += std::sqrt(sq);
    }
    raw.push_back(total / static_cast<double>(range.size()));
  }
  return raw;
}

std::vector<double> normalize_importance(const std::vector<double>& raw) {
  if (raw.empty()) throw EmptyList("cannot normalize an empty score list");
  const double n = static_cast<double>(raw.size());
  double mean = 0.0;
  for (double r : raw) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : raw) var += (r - mean) * (r - mean);
  const double sigma = std::sqrt(var / n);
  std::vector<double> out(raw.size(), 0.0);
  if (sigma < kFlatSigma) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - mean) / sigma;
  return out;
}

std::vector<WordImportance> score_words(const std::vector<std::vector<double>>& grads,
                                        const model::TokenizedText& tt) {
  const auto raw = word_importance(grads, tt);
  if (raw.empty()) return {};
  const auto norm = normalize_importance(raw);
  std::vector<WordImportance> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back({i, tt.words[i], raw[i], norm[i]});
  return out;
}

std::vector<WordImportance> select_important_words(std::vector<WordImportance> scores, const SaliencyConfig& cfg) {
  std::erase_if(scores, [&](const WordImportance& w) {
    if (!(w.normalized >= cfg.theta)) return true;
    if (text::is_punctuation(w.word)) return true;
    return cfg.filter_words.count(text::to_lower(w.word)) > 0;
  });
  std::stable_sort(scores.begin(), scores.end(), [](const WordImportance& a, const WordImportance& b) {
    if (a.normalized != b.normalized) return a.normalized > b.normalized;
    return a.word_index < b.word_index;
  });
  return scores;
}

}  // namespace tweetattack::saliency
