#include "tweetattack/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "tweetattack/errors.hpp"

namespace tweetattack::similarity {

SimilarityScorer::SimilarityScorer(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidConfig("epsilon must lie in (0,1)");
}

EmbeddingSimilarity::EmbeddingSimilarity(std::shared_ptr<const model::Vocabulary> vocab,
                                         std::shared_ptr<const model::Matrix> embedding, double epsilon)
    : SimilarityScorer(epsilon), vocab_(std::move(vocab)), embedding_(std::move(embedding)) {
  if (!vocab_ || !embedding_) throw InvalidConfig("similarity scorer needs a vocabulary and an embedding table");
  if (embedding_->rows() != vocab_->size()) throw InvalidConfig("embedding rows do not match vocabulary size");
}

std::shared_ptr<EmbeddingSimilarity> EmbeddingSimilarity::sharing(
    const std::shared_ptr<const model::Classifier>& classifier, double epsilon) {
  std::shared_ptr<const model::Vocabulary> vocab(classifier, &classifier->vocab);
  std::shared_ptr<const model::Matrix> table(classifier, &classifier->params.embedding);
  return std::make_shared<EmbeddingSimilarity>(std::move(vocab), std::move(table), epsilon);
}

std::vector<double> EmbeddingSimilarity::sentence_vector(std::string_view text) const {
  const auto tt = model::tokenize(text, *vocab_);
  std::vector<double> v(embedding_->cols(), 0.0);
  if (tt.tokens.empty()) return v;
  for (auto id : tt.tokens) {
    const auto row = embedding_->row(id);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += row[i];
  }
  for (auto& x : v) x /= static_cast<double>(tt.tokens.size());
  return v;
}

double EmbeddingSimilarity::sim(std::string_view a, std::string_view b) const {
  const auto va = sentence_vector(a);
  const auto vb = sentence_vector(b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    dot += va[i] * vb[i];
    na += va[i] * va[i];
    nb += vb[i] * vb[i];
  }
  if (na == 0.0 || nb == 0.0) return a == b ? 1.0 : 0.0;
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, 0.0, 1.0);
}

}  // namespace tweetattack::similarity
