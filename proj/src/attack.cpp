#include "tweetattack/attack.hpp"

#include <cmath>

#include <spdlog/spdlog.h>

#include "tweetattack/errors.hpp"

namespace tweetattack::attack {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::SuccessFlip: return "SuccessFlip";
    case Status::SuccessConfidence: return "SuccessConfidence";
    case Status::Failure: return "Failure";
  }
  return "Failure";
}

std::optional<Status> parse_status(std::string_view s) {
  for (auto st : {Status::SuccessFlip, Status::SuccessConfidence, Status::Failure})
    if (to_string(st) == s) return st;
  return std::nullopt;
}

std::string_view to_string(SimilarityReference r) {
  return r == SimilarityReference::Original ? "original" : "current";
}

std::optional<SimilarityReference> parse_similarity_reference(std::string_view s) {
  if (s == "original") return SimilarityReference::Original;
  if (s == "current") return SimilarityReference::Current;
  return std::nullopt;
}

void AttackConfig::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidConfig("delta must lie in (0,1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InvalidConfig("epsilon must lie in (0,1)");
  if (!std::isfinite(theta)) throw InvalidConfig("theta must be finite");
  if (top_n < 1) throw InvalidConfig("top_n must be >= 1");
}

bool attackable(const model::Prediction& p, double delta) {
  return p.label == Sentiment::Negative && p.neg_conf >= delta;
}

AttackPlan plan_attack(std::string_view text, const AttackContext& ctx, const AttackConfig& cfg,
                       model::QueryCounts* counts) {
  AttackPlan plan;
  plan.segmentation = text::segment_words(text);
  plan.tokens = model::tokenize_words(plan.segmentation.words, ctx.model.vocab);
  auto grads = ctx.model.gradients(plan.tokens, Sentiment::Negative, counts);
  plan.prediction = grads.prediction;
  saliency::SaliencyConfig scfg{cfg.theta, ctx.filter_words};
  plan.important_words = saliency::select_important_words(saliency::score_words(grads.per_token, plan.tokens), scfg);
  return plan;
}

AttackOutcome attack(std::string_view text, const AttackContext& ctx, const AttackConfig& cfg) {
  cfg.validate();
  model::QueryCounts counts;
  auto plan = plan_attack(text, ctx, cfg, &counts);
  if (!attackable(plan.prediction, cfg.delta))
    throw NotAttackable("model predicts " + std::string(to_string(plan.prediction.label)) +
                        " with neg_conf " + std::to_string(plan.prediction.neg_conf));

  AttackOutcome out;
  out.original_prediction = plan.prediction;
  out.important_words = plan.important_words;
  out.word_count = plan.segmentation.words.size();
  const std::string original = plan.segmentation.render();
  text::Segmentation current = plan.segmentation;

  auto finish = [&](AttackOutcome& o) {
    o.forward_queries = counts.forward;
    o.backward_queries = counts.backward;
    return o;
  };

  for (const auto& iw : plan.important_words) {
    const std::size_t idx = iw.word_index;
    const std::string word = current.words[idx];
    auto cset = candidates::build_candidates(word, ctx.synonyms, ctx.tagger, ctx.filter_words);
    WordAttempt attempt{idx, word, cset.pos, cset.candidates, {}, std::nullopt};
    const std::string reference = cfg.similarity_reference == SimilarityReference::Original ? original
                                                                                            : current.render();
    std::optional<std::size_t> best;  // index into attempt.trials
    for (const auto& cand : cset.candidates) {
      CandidateTrial trial{cand, 0.0, false, {}};
      const std::string x_prime = current.render_with(idx, cand);
      trial.similarity = ctx.scorer.sim(reference, x_prime);
      if (!(trial.similarity > cfg.epsilon)) {
        attempt.trials.push_back(std::move(trial));
        continue;
      }
      trial.queried = true;
      trial.prediction = ctx.model.predict(model::tokenize(x_prime, ctx.model.vocab), &counts);
      attempt.trials.push_back(trial);
      if (trial.prediction.label != Sentiment::Negative) {
        out.replacements.push_back({idx, word, cand, trial.prediction.neg_conf, ctx.scorer.sim(original, x_prime)});
        attempt.committed = cand;
        out.attempts.push_back(std::move(attempt));
        out.status = Status::SuccessFlip;
        out.adversarial_text = x_prime;
        out.final_prediction = trial.prediction;
        return finish(out);
      }
      if (!best || trial.prediction.neg_conf < attempt.trials[*best].prediction.neg_conf)
        best = attempt.trials.size() - 1;
    }
    if (best) {
      const auto& chosen = attempt.trials[*best];
      current.words[idx] = chosen.candidate;
      attempt.committed = chosen.candidate;
      out.replacements.push_back(
          {idx, word, chosen.candidate, chosen.prediction.neg_conf, ctx.scorer.sim(original, current.render())});
    }
    out.attempts.push_back(std::move(attempt));
  }

  const std::string adversarial = current.render();
  out.final_prediction = ctx.model.predict(model::tokenize(adversarial, ctx.model.vocab), &counts);
  if (out.final_prediction.neg_conf < cfg.delta) {
    out.status = Status::SuccessConfidence;
    out.adversarial_text = adversarial;
  } else {
    out.status = Status::Failure;
  }
  return finish(out);
}

bool verify(std::string_view original, Status status, const std::optional<std::string>& adversarial,
            const model::Classifier& model, const similarity::SimilarityScorer& scorer, const AttackConfig& cfg) {
  if (!is_success(status) || !adversarial) return false;
  const auto p = model.predict(*adversarial);
  if (status == Status::SuccessFlip && p.label == Sentiment::Negative) return false;
  if (status == Status::SuccessConfidence && !(p.label == Sentiment::Negative && p.neg_conf < cfg.delta))
    return false;
  return scorer.sim(original, *adversarial) >= cfg.epsilon;
}

bool verify(std::string_view original, const AttackOutcome& outcome, const model::Classifier& model,
            const similarity::SimilarityScorer& scorer, const AttackConfig& cfg) {
  return verify(original, outcome.status, outcome.adversarial_text, model, scorer, cfg);
}

}  // namespace tweetattack::attack
