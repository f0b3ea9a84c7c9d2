#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "tweetattack/saliency.hpp"

using namespace tweetattack;
using namespace tweetattack::saliency;

namespace {
model::TokenizedText aligned(std::vector<std::size_t> tokens_per_word) {
  model::TokenizedText tt;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < tokens_per_word.size(); ++i) {
    tt.words.push_back("w" + std::to_string(i));
    tt.alignment.push_back({pos, pos + tokens_per_word[i]});
    for (std::size_t k = 0; k < tokens_per_word[i]; ++k) tt.tokens.push_back(0);
    pos += tokens_per_word[i];
  }
  return tt;
}

WordImportance wi(std::size_t i, std::string w, double norm) { return {i, std::move(w), 0.0, norm}; }

std::vector<std::size_t> argsort_desc(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] > v[b]; });
  return idx;
}
}  // namespace

TEST(WordImportance, MeanOfTokenNorms) {
  const auto tt = aligned({2, 1});
  const std::vector<std::vector<double>> grads = {{0.2, 0.0}, {0.0, 0.4}, {0.3, 0.4}};
  const auto raw = word_importance(grads, tt);
  EXPECT_NEAR(raw[0], 0.3, 1e-15);
  EXPECT_NEAR(raw[1], 0.5, 1e-15);
}

TEST(WordImportance, ZeroGradientsAndMismatch) {
  const auto tt = aligned({1, 1});
  EXPECT_EQ(word_importance({{0, 0}, {0, 0}}, tt), (std::vector<double>{0, 0}));
  EXPECT_THROW(word_importance({{0, 0}}, tt), AlignmentMismatch);
}

TEST(NormalizeImportance, Examples) {
  const auto z = normalize_importance({1, 2, 3});
  const double s = std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(z[0], -1.0 / s, 1e-12);
  EXPECT_NEAR(z[1], 0.0, 1e-12);
  EXPECT_NEAR(z[2], 1.0 / s, 1e-12);
  EXPECT_NEAR(z[2], 1.2247448713915890, 1e-12);
  EXPECT_EQ(normalize_importance({5, 5, 5}), (std::vector<double>{0, 0, 0}));
  EXPECT_EQ(normalize_importance({7}), (std::vector<double>{0}));
  EXPECT_THROW(normalize_importance({}), EmptyList);
}

TEST(SelectImportantWords, Examples) {
  SaliencyConfig cfg{0.0, {"the"}};
  auto out = select_important_words({wi(0, "good", 1.2), wi(1, "the", 0.4), wi(2, "bad", -1.6)}, cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].word, "good");

  EXPECT_TRUE(select_important_words({wi(0, "a", -0.5), wi(1, "b", -0.1)}, SaliencyConfig{0.0, {"x"}}).empty());

  out = select_important_words({wi(0, "sad", 0.9), wi(1, "awful", 0.9)}, SaliencyConfig{0.0, {"x"}});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].word, "sad");
  EXPECT_EQ(out[1].word, "awful");
}

TEST(SelectImportantWords, DropsPunctuationAndCaseInsensitiveFilterWords) {
  auto out = select_important_words({wi(0, "!!", 2.0), wi(1, "The", 1.0), wi(2, "sad", 0.5)}, {0.0, {"the"}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].word, "sad");
}

TEST(SaliencyProperties, ZScoreMomentsConstantsAndAffineInvariance) {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + g() % 39;
    std::vector<double> raw(n);
    for (auto& x : raw) x = u(g);
    const auto z = normalize_importance(raw);
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double var = 0.0;
    for (double x : z) var += (x - mean) * (x - mean);
    EXPECT_LT(std::abs(mean), 1e-9);
    EXPECT_LT(std::abs(std::sqrt(var / n) - 1.0), 1e-9);

    const double a = 0.01 + u(g) * 10.0;
    const double b = u(g) * 20.0 - 10.0;
    std::vector<double> moved(n);
    for (std::size_t i = 0; i < n; ++i) moved[i] = a * raw[i] + b;
    EXPECT_EQ(argsort_desc(normalize_importance(moved)), argsort_desc(z));

    const std::vector<double> flat(n, raw[0]);
    for (double x : normalize_importance(flat)) EXPECT_EQ(x, 0.0);
  }
}

TEST(SaliencyProperties, FilterWordsNeverSelectedAndOrderIsTotal) {
  std::mt19937_64 g(3);
  const std::vector<std::string> words = {"the", "sad", "a", "movie", "!", "bad", "of"};
  SaliencyConfig cfg{-0.5, {"the", "a", "of"}};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<WordImportance> scores;
    for (std::size_t i = 0; i < 8; ++i)
      scores.push_back(wi(i, words[g() % words.size()], static_cast<double>(g() % 5) - 2.0));
    const auto out = select_important_words(scores, cfg);
    for (std::size_t k = 0; k < out.size(); ++k) {
      EXPECT_FALSE(cfg.filter_words.count(out[k].word));
      EXPECT_FALSE(text::is_punctuation(out[k].word));
      EXPECT_GE(out[k].normalized, cfg.theta);
      if (k > 0) {
        EXPECT_TRUE(out[k - 1].normalized > out[k].normalized ||
                    (out[k - 1].normalized == out[k].normalized && out[k - 1].word_index < out[k].word_index));
      }
    }
  }
}
