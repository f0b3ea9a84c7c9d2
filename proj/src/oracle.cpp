#include <algorithm>
#include <limits>

#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"

namespace tweetattack::harness {

namespace {

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return b > std::numeric_limits<std::uint64_t>::max() - a ? std::numeric_limits<std::uint64_t>::max() : a + b;
}

}  // namespace

std::uint64_t count_combinations(const std::vector<std::size_t>& sizes, std::size_t max_r) {
  // e[k] = sum over k-subsets of the product of their sizes
  std::vector<std::uint64_t> e(max_r + 1, 0);
  e[0] = 1;
  for (auto s : sizes) {
    for (std::size_t k = max_r; k >= 1; --k) e[k] = sat_add(e[k], sat_mul(e[k - 1], s));
  }
  std::uint64_t total = 0;
  for (std::size_t k = 1; k <= max_r; ++k) total = sat_add(total, e[k]);
  return total;
}

bool OracleResult::contains(const std::string& text) const {
  auto it = std::lower_bound(valid.begin(), valid.end(), text,
                             [](const OracleHit& h, const std::string& t) { return h.text < t; });
  return it != valid.end() && it->text == text;
}

std::optional<std::size_t> OracleResult::min_replacements() const {
  std::optional<std::size_t> best;
  for (const auto& h : valid)
    if (!best || h.replacements < *best) best = h.replacements;
  return best;
}

OracleResult exhaustive_oracle(std::string_view text, const attack::AttackContext& ctx, const attack::AttackConfig& cfg,
                               std::size_t max_replacements, std::uint64_t budget) {
  cfg.validate();
  auto plan = attack::plan_attack(text, ctx, cfg);
  if (plan.segmentation.words.size() > kOracleMaxWords)
    throw BudgetExceeded("oracle limited to " + std::to_string(kOracleMaxWords) + " words, text has " +
                         std::to_string(plan.segmentation.words.size()));

  struct Slot {
    std::size_t index;
    std::vector<std::string> candidates;
  };
  std::vector<Slot> slots;
  std::vector<std::size_t> sizes;
  for (const auto& iw : plan.important_words) {
    auto cset = candidates::build_candidates(plan.segmentation.words[iw.word_index], ctx.synonyms, ctx.tagger,
                                             ctx.filter_words);
    sizes.push_back(cset.candidates.size());
    slots.push_back({iw.word_index, std::move(cset.candidates)});
  }
  const std::size_t max_r = std::min(max_replacements, slots.size());
  OracleResult result;
  result.combinations = count_combinations(sizes, max_r);
  if (result.combinations > budget)
    throw BudgetExceeded(std::to_string(result.combinations) + " combinations exceed the budget of " +
                         std::to_string(budget));

  const std::string original = plan.segmentation.render();
  // choice[i] = 0 keeps slot i, c > 0 picks candidate c-1
  std::vector<std::size_t> choice(slots.size(), 0);
  auto visit = [&](auto&& self, std::size_t slot, std::size_t used) -> void {
    if (slot == slots.size()) {
      if (used == 0) return;
      text::Segmentation s = plan.segmentation;
      for (std::size_t i = 0; i < slots.size(); ++i)
        if (choice[i] > 0) s.words[slots[i].index] = slots[i].candidates[choice[i] - 1];
      const std::string candidate = s.render();
      const auto p = ctx.model.predict(model::tokenize(candidate, ctx.model.vocab));
      if (p.label == Sentiment::Negative && !(p.neg_conf < cfg.delta)) return;
      const double sim = ctx.scorer.sim(original, candidate);
      if (sim < cfg.epsilon) return;
      result.valid.push_back({candidate, used, p, sim});
      return;
    }
    choice[slot] = 0;
    self(self, slot + 1, used);
    if (used == max_r) return;
    for (std::size_t c = 1; c <= slots[slot].candidates.size(); ++c) {
      choice[slot] = c;
      self(self, slot + 1, used + 1);
    }
    choice[slot] = 0;
  };
  visit(visit, 0, 0);
  std::sort(result.valid.begin(), result.valid.end(), [](const auto& a, const auto& b) { return a.text < b.text; });
  return result;
}

}  // namespace tweetattack::harness
