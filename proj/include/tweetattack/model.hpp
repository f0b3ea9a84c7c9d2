#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tweetattack/text.hpp"

namespace tweetattack::model {

using TokenId = std::uint32_t;

// Full-word tokens, subword pieces and one trailing unknown token. Ids are
// laid out as [words | subwords | unk], which is also the row order of the
// embedding table.
class Vocabulary {
 public:
  Vocabulary(std::vector<std::string> words, std::vector<std::string> subwords);
  static Vocabulary load(const std::filesystem::path& words_file, const std::filesystem::path& subwords_file);

  std::size_t size() const { return words_.size() + subwords_.size() + 1; }
  std::size_t word_count() const { return words_.size(); }
  std::size_t subword_count() const { return subwords_.size(); }
  TokenId unknown_id() const { return static_cast<TokenId>(size() - 1); }

  std::optional<TokenId> word_id(std::string_view lower_word) const;
  std::optional<TokenId> subword_id(std::string_view piece) const;
  std::size_t longest_subword() const { return longest_subword_; }
  const std::string& token_text(TokenId id) const;

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::string>& subwords() const { return subwords_; }
  // FNV-1a over both lists; checkpoints pin it.
  std::uint64_t hash() const { return hash_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::string> subwords_;
  std::unordered_map<std::string, TokenId> word_index_;
  std::unordered_map<std::string, TokenId> subword_index_;
  std::size_t longest_subword_ = 0;
  std::uint64_t hash_ = 0;
};

struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
  bool operator==(const TokenRange&) const = default;
};

struct TokenizedText {
  std::vector<std::string> words;  // lowercase
  std::vector<TokenId> tokens;
  std::vector<TokenRange> alignment;  // one contiguous range per word
};

// Lowercases, segments into words and maps each word to tokens: whole-word
// ids first, otherwise greedy longest-match over subword pieces. Runs of
// characters no piece covers collapse into one unknown token.
TokenizedText tokenize(std::string_view text, const Vocabulary& vocab);
TokenizedText tokenize_words(const std::vector<std::string>& words, const Vocabulary& vocab);

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Per-token tanh layer, mean-pooled, then a linear 3-way output:
//   h_t    = tanh(W1^T e_t + b1)
//   logits = W2^T mean_t(h_t) + b2
struct ClassifierParams {
  Matrix embedding;  // |V| x d
  Matrix w1;         // d x h
  std::vector<double> b1;
  Matrix w2;  // h x 3
  std::vector<double> b2;

  std::size_t dim() const { return embedding.cols(); }
  std::size_t hidden() const { return w1.cols(); }
  // Throws InvalidConfig on inconsistent shapes or non-finite entries.
  void validate() const;
  bool operator==(const ClassifierParams&) const = default;
};

struct Dimensions {
  std::size_t dim = 16;
  std::size_t hidden = 8;
};

// Weights uniform in [-0.5/sqrt(d), 0.5/sqrt(d)] from a seeded stream,
// biases zero.
ClassifierParams init_params(std::size_t vocab_rows, Dimensions dims, std::uint64_t seed);

struct Prediction {
  std::array<double, kNumClasses> probs{};
  Sentiment label = Sentiment::Positive;
  double neg_conf = 0.0;
  bool operator==(const Prediction&) const = default;
};

struct QueryCounts {
  std::uint64_t forward = 0;
  std::uint64_t backward = 0;
};

// Each call counts one forward pass when `counts` is given.
Prediction forward(const ClassifierParams& params, const TokenizedText& tt, QueryCounts* counts = nullptr);

inline constexpr double kProbabilityFloor = 1e-12;
double loss(const Prediction& pred, Sentiment target);

struct TokenGradients {
  Prediction prediction;  // from the same forward pass
  double loss = 0.0;
  std::vector<std::vector<double>> per_token;  // dL/d(e_t), one per token occurrence
};

// One forward and one backward pass for cross-entropy at `target`.
TokenGradients token_gradients(const ClassifierParams& params, const TokenizedText& tt, Sentiment target,
                               QueryCounts* counts = nullptr);

struct TrainHyper {
  double lr = 1.0;
  std::size_t epochs = 12;
  std::size_t batch = 8;
  std::uint64_t seed = 42;
};

struct LabeledText {
  TokenizedText text;
  Sentiment label;
};

// Mini-batch SGD on mean cross-entropy. The shuffle stream is derived from
// hyper.seed, so equal inputs give bitwise-equal outputs.
ClassifierParams train(ClassifierParams params, const std::vector<LabeledText>& corpus, const TrainHyper& hyper);

double accuracy(const ClassifierParams& params, const std::vector<LabeledText>& corpus);

void save_checkpoint(const std::filesystem::path& path, const ClassifierParams& params, const Vocabulary& vocab);
ClassifierParams load_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab);

// Running totals across every caller; copies start from zero.
struct QueryMeter {
  std::atomic<std::uint64_t> forward{0};
  std::atomic<std::uint64_t> backward{0};

  QueryMeter() = default;
  QueryMeter(const QueryMeter&) {}
  QueryMeter& operator=(const QueryMeter&) { return *this; }
  void reset() {
    forward = 0;
    backward = 0;
  }
};

// A trained model bound to its vocabulary; the text-level entry point used by
// the attack and the campaign runner.
struct Classifier {
  Vocabulary vocab;
  ClassifierParams params;
  mutable QueryMeter meter;

  TokenizedText tokenize(std::string_view text) const { return model::tokenize(text, vocab); }
  Prediction predict(std::string_view text, QueryCounts* counts = nullptr) const;
  Prediction predict(const TokenizedText& tt, QueryCounts* counts = nullptr) const;
  TokenGradients gradients(const TokenizedText& tt, Sentiment target, QueryCounts* counts = nullptr) const;
};

}  // namespace tweetattack::model
