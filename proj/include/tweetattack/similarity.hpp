#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "tweetattack/model.hpp"

namespace tweetattack::similarity {

inline constexpr double kDefaultEpsilon = 0.8;

// Any map from two texts to [0,1]. Implementations must be symmetric and
// safe to call concurrently.
class SimilarityScorer {
 public:
  explicit SimilarityScorer(double epsilon = kDefaultEpsilon);
  virtual ~SimilarityScorer() = default;

  virtual double sim(std::string_view a, std::string_view b) const = 0;
  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

// Mean of token embeddings, compared by cosine clamped at 0. Shares the
// classifier's table unless given its own.
class EmbeddingSimilarity : public SimilarityScorer {
 public:
  EmbeddingSimilarity(std::shared_ptr<const model::Vocabulary> vocab, std::shared_ptr<const model::Matrix> embedding,
                      double epsilon = kDefaultEpsilon);
  static std::shared_ptr<EmbeddingSimilarity> sharing(const std::shared_ptr<const model::Classifier>& classifier,
                                                      double epsilon = kDefaultEpsilon);

  std::vector<double> sentence_vector(std::string_view text) const;
  double sim(std::string_view a, std::string_view b) const override;

 private:
  std::shared_ptr<const model::Vocabulary> vocab_;
  std::shared_ptr<const model::Matrix> embedding_;
};

}  // namespace tweetattack::similarity
