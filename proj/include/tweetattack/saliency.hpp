#pragma once

#include <string>
#include <unordered_set>
#include <vector>

#include "tweetattack/model.hpp"

namespace tweetattack::saliency {

struct WordImportance {
  std::size_t word_index = 0;
  std::string word;
  double raw = 0.0;
  double normalized = 0.0;
};

struct SaliencyConfig {
  double theta = 0.0;  // applied to normalized scores
  std::unordered_set<std::string> filter_words;
};

inline constexpr double kFlatSigma = 1e-12;

// raw(w) = mean over the word's tokens of the L2 norm of each token gradient.
std::vector<double> word_importance(const std::vector<std::vector<double>>& grads, const model::TokenizedText& tt);

// Population z-score; all zeros when sigma < kFlatSigma.
std::vector<double> normalize_importance(const std::vector<double>& raw);

// Both steps, packaged with the words they belong to.
std::vector<WordImportance> score_words(const std::vector<std::vector<double>>& grads,
                                        const model::TokenizedText& tt);

// Keeps normalized >= theta, drops filter words and punctuation, sorts by
// normalized descending with the earlier word first on ties.
std::vector<WordImportance> select_important_words(std::vector<WordImportance> scores, const SaliencyConfig& cfg);

}  // namespace tweetattack::saliency
