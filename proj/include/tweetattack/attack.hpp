#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "tweetattack/candidates.hpp"
#include "tweetattack/model.hpp"
#include "tweetattack/saliency.hpp"
#include "tweetattack/similarity.hpp"

namespace tweetattack::attack {

enum class Status { SuccessFlip, SuccessConfidence, Failure };
std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view s);
inline bool is_success(Status s) { return s != Status::Failure; }

enum class SimilarityReference { Original, Current };
std::string_view to_string(SimilarityReference r);
std::optional<SimilarityReference> parse_similarity_reference(std::string_view s);

struct AttackConfig {
  double delta = 0.5;
  double epsilon = similarity::kDefaultEpsilon;
  double theta = 0.0;
  std::size_t top_n = 10;
  SimilarityReference similarity_reference = SimilarityReference::Original;

  // Throws InvalidConfig.
  void validate() const;
};

struct Replacement {
  std::size_t word_index = 0;
  std::string original;
  std::string substitute;
  double neg_conf_after = 0.0;
  double similarity_after = 0.0;
};

struct CandidateTrial {
  std::string candidate;
  double similarity = 0.0;
  bool queried = false;  // false when the similarity gate rejected it
  model::Prediction prediction;
};

struct WordAttempt {
  std::size_t word_index = 0;
  std::string word;
  candidates::PosTag pos = candidates::PosTag::Other;
  std::vector<std::string> candidates;  // POS-filtered
  std::vector<CandidateTrial> trials;
  std::optional<std::string> committed;
};

struct AttackOutcome {
  Status status = Status::Failure;
  std::optional<std::string> adversarial_text;
  std::vector<Replacement> replacements;
  std::uint64_t forward_queries = 0;
  std::uint64_t backward_queries = 0;
  model::Prediction original_prediction;
  model::Prediction final_prediction;
  std::vector<saliency::WordImportance> important_words;
  std::vector<WordAttempt> attempts;
  std::size_t word_count = 0;
};

// Everything the attack reads; all of it is shared read-only across workers.
struct AttackContext {
  const model::Classifier& model;
  const similarity::SimilarityScorer& scorer;
  const candidates::SynonymSource& synonyms;
  const candidates::PosTagger& tagger;
  const std::unordered_set<std::string>& filter_words;
};

// The important words of a text and their candidate sets, as the attack sees
// them. Shared with the exhaustive oracle.
struct AttackPlan {
  text::Segmentation segmentation;
  model::TokenizedText tokens;
  model::Prediction prediction;
  std::vector<saliency::WordImportance> important_words;
};

// One gradient query. Throws EmptyInput for texts without tokens.
AttackPlan plan_attack(std::string_view text, const AttackContext& ctx, const AttackConfig& cfg,
                       model::QueryCounts* counts = nullptr);

// True when the prediction is negative with neg_conf >= delta.
bool attackable(const model::Prediction& p, double delta);

// Greedy gradient-guided substitution. Throws NotAttackable when the model
// does not confidently predict negative.
AttackOutcome attack(std::string_view text, const AttackContext& ctx, const AttackConfig& cfg);

// Recomputes the prediction and similarity of the adversarial text from
// scratch and checks the success predicate for the outcome's status.
bool verify(std::string_view original, const AttackOutcome& outcome, const model::Classifier& model,
            const similarity::SimilarityScorer& scorer, const AttackConfig& cfg);
bool verify(std::string_view original, Status status, const std::optional<std::string>& adversarial,
            const model::Classifier& model, const similarity::SimilarityScorer& scorer, const AttackConfig& cfg);

}  // namespace tweetattack::attack
