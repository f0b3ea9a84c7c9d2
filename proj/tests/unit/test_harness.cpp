#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "support.hpp"

using namespace tweetattack;
using namespace tweetattack::harness;
using tweetattack::testing::bundle;
using tweetattack::testing::fixture_dir;

TEST(LoadDataset, ThreeRowFixture) {
  const auto ds = load_dataset(fixture_dir() / "csv" / "three_rows.csv", &bundle().preprocess);
  ASSERT_EQ(ds.documents.size(), 2u);
  EXPECT_EQ(ds.stats.rows, 3u);
  EXPECT_EQ(ds.stats.skipped_empty_text, 1u);
  EXPECT_EQ(ds.documents[0].id, "a1");
  EXPECT_EQ(ds.documents[0].raw_text, "gr8 day, really");
  EXPECT_EQ(ds.documents[0].preprocessed_text, "great day, really");
  EXPECT_EQ(ds.documents[1].raw_text, "so \"sad\"\nhonestly");
  EXPECT_EQ(ds.documents[1].gold_label, Sentiment::Negative);
}

TEST(LoadDataset, Errors) {
  EXPECT_THROW(load_dataset(fixture_dir() / "csv" / "missing_sentiment.csv"), MissingColumn);
  EXPECT_THROW(load_dataset(fixture_dir() / "csv" / "unbalanced.csv"), MalformedCsv);
  EXPECT_THROW(load_dataset(fixture_dir() / "csv" / "nope.csv"), ResourceError);
}

TEST(LoadDataset, UnknownLabelsAreCountedSkips) {
  const auto ds = load_dataset(fixture_dir() / "csv" / "unknown_label.csv");
  EXPECT_EQ(ds.documents.size(), 2u);
  EXPECT_EQ(ds.stats.skipped_unknown_label, 1u);
  EXPECT_EQ(ds.documents[1].raw_text, "bad");  // CRLF stripped
}

TEST(ParseCsv, QuotingRules) {
  std::istringstream in("a,b\r\n\"x,\"\"y\"\"\",\"\"\n\nz,\n");
  const auto rows = parse_csv(in);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (std::vector<std::string>{"x,\"y\"", ""}));
  EXPECT_EQ(rows[2], (std::vector<std::string>{"z", ""}));
}

TEST(ToyCorpus, ShippedFixtureShape) {
  const auto& docs = tweetattack::testing::toy_tweets();
  EXPECT_GE(docs.size(), 35u);
  EXPECT_LE(docs.size(), 50u);
  for (const auto& d : docs) EXPECT_LE(text::segment_words(d.preprocessed_text).words.size(), kOracleMaxWords);
}

namespace {
struct ToyRun {
  candidates::SynonymSource source = candidates::SynonymSource::local(bundle().lexicon);
  std::shared_ptr<similarity::EmbeddingSimilarity> scorer =
      similarity::EmbeddingSimilarity::sharing(tweetattack::testing::toy_classifier());
  attack::AttackContext ctx() const {
    return {*tweetattack::testing::toy_classifier(), *scorer, source, bundle().tagger, bundle().stopwords};
  }
};

std::string jsonl(const std::vector<CampaignRecord>& rs) {
  std::ostringstream out;
  write_jsonl(out, rs);
  return out.str();
}
}  // namespace

TEST(Campaign, ToyCorpusHasAFlipAndIsDeterministic) {
  ToyRun run;
  CampaignConfig cfg;
  const auto a = run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), cfg);
  std::size_t flips = 0;
  for (const auto& r : a) flips += r.status == "SuccessFlip";
  EXPECT_GE(flips, 1u);
  const auto b = run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), cfg);
  EXPECT_EQ(jsonl(a), jsonl(b));
  cfg.workers = 4;
  EXPECT_EQ(jsonl(run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), cfg)), jsonl(a));
}

TEST(Campaign, NothingAttackable) {
  ToyRun run;
  std::vector<Document> docs = {{"n1", "the meeting starts at noon", "the meeting starts at noon", Sentiment::Neutral}};
  const auto records = run_campaign(docs, run.ctx(), {});
  EXPECT_TRUE(records.empty());
  EXPECT_EQ(summarize(records).attempted, 0u);
}

TEST(Campaign, SeededLimitKeepsInputOrder) {
  ToyRun run;
  CampaignConfig cfg;
  cfg.limit = 3;
  const auto a = run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), cfg);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_LT(a[0].id, a[1].id);
  EXPECT_LT(a[1].id, a[2].id);
  EXPECT_EQ(jsonl(a), jsonl(run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), cfg)));
}

TEST(Campaign, PerDocumentErrorsBecomeRecords) {
  ToyRun run;
  // cache mode with an empty in-memory cache and no client: every lookup fails
  run.source = candidates::SynonymSource::datamuse_with_cache(
      nullptr, std::make_shared<candidates::SynonymCache>(std::filesystem::path{}), 10);
  const auto records = run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), {});
  ASSERT_FALSE(records.empty());
  std::size_t errors = 0;
  for (const auto& r : records) {
    if (r.status != kErrorStatus) continue;
    ++errors;
    ASSERT_TRUE(r.error);
    EXPECT_NE(r.error->find("NetworkError"), std::string::npos);
  }
  EXPECT_GT(errors, 0u);
  const auto s = summarize(records);
  EXPECT_EQ(s.errors, errors);
  EXPECT_EQ(s.success_flip + s.success_confidence + s.failures, s.attempted);
}

TEST(Jsonl, RecordsRoundTripByteForByte) {
  ToyRun run;
  const auto records = run_campaign(tweetattack::testing::toy_tweets(), run.ctx(), {});
  ASSERT_FALSE(records.empty());
  for (const auto& r : records) {
    const auto line = to_jsonl_line(r);
    EXPECT_EQ(to_jsonl_line(record_from_json(nlohmann::ordered_json::parse(line))), line);
  }
  std::istringstream in(jsonl(records));
  const auto back = read_jsonl(in);
  EXPECT_EQ(jsonl(back), jsonl(records));
  EXPECT_TRUE(summarize(back) == summarize(records));
}

namespace {
CampaignRecord rec(const std::string& status, std::vector<std::pair<std::string, std::string>> reps,
                   std::size_t words = 4) {
  CampaignRecord r;
  r.status = status;
  r.word_count = words;
  for (std::size_t i = 0; i < reps.size(); ++i) r.replacements.push_back({i, reps[i].first, reps[i].second, 0.1, 0.9});
  r.forward_queries = 3;
  return r;
}
}  // namespace

TEST(Summarize, Examples) {
  auto s = summarize({rec("SuccessFlip", {{"a", "b"}}), rec("SuccessConfidence", {{"a", "b"}, {"c", "d"}, {"e", "f"}})});
  EXPECT_EQ(s.mean_replacements_per_success, 2.0);
  EXPECT_EQ(s.mean_perturbation_ratio, 0.5);

  s = summarize({});
  EXPECT_EQ(s.attempted, 0u);
  EXPECT_FALSE(s.mean_replacements_per_success);
  EXPECT_FALSE(s.mean_forward_queries);
  EXPECT_TRUE(to_json(s)["mean_replacements_per_success"].is_null());

  s = summarize({rec("Failure", {})});
  EXPECT_EQ(s.success_flip + s.success_confidence, 0u);
  EXPECT_EQ(s.failures, 1u);
  EXPECT_EQ(s.mean_forward_queries, 3.0);
}

TEST(FrequencyReport, Examples) {
  auto r1 = rec("SuccessFlip", {{"hate", "dislike"}});
  auto r2 = rec("SuccessFlip", {{"hate", "dislike"}});
  r1.important_words = {{0, "hate", 1, 1}, {1, "work", 1, 1}};
  r2.important_words = {{0, "hate", 1, 1}};
  const auto f = word_frequency_report({r1, r2});
  EXPECT_EQ(f.replaced_originals, (FrequencyTable{{"hate", 2}}));
  EXPECT_EQ(f.substitutes, (FrequencyTable{{"dislike", 2}}));
  EXPECT_EQ(to_csv(f.important_words), "word,count\nhate,2\nwork,1\n");

  auto fail = rec("Failure", {{"sad", "gloomy"}});
  fail.important_words = {{0, "sad", 1, 1}};
  const auto g = word_frequency_report({fail});
  EXPECT_TRUE(g.replaced_originals.empty());
  EXPECT_TRUE(g.substitutes.empty());
  EXPECT_EQ(g.important_words.size(), 1u);

  auto t1 = rec("SuccessFlip", {{"zeta", "b"}, {"alpha", "b"}});
  EXPECT_EQ(to_csv(word_frequency_report({t1}).replaced_originals), "word,count\nalpha,1\nzeta,1\n");
}

TEST(Oracle, CountCombinationsMatchesBruteForce) {
  const std::vector<std::size_t> sizes = {3, 0, 2, 4};
  for (std::size_t max_r = 0; max_r <= 4; ++max_r) {
    std::uint64_t brute = 0;
    for (unsigned mask = 1; mask < 16; ++mask) {
      if (static_cast<std::size_t>(__builtin_popcount(mask)) > max_r) continue;
      std::uint64_t prod = 1;
      for (int i = 0; i < 4; ++i)
        if (mask & (1u << i)) prod *= sizes[i];
      brute += prod;
    }
    EXPECT_EQ(count_combinations(sizes, max_r), brute) << max_r;
  }
}

TEST(Oracle, NoCandidatesGivesEmptySet) {
  const auto w = tweetattack::testing::toy_world(1.5, {});
  const auto r = exhaustive_oracle("movie bad", w.context(), {}, 3);
  EXPECT_TRUE(r.valid.empty());
  EXPECT_EQ(r.combinations, 0u);
}

TEST(Oracle, BudgetIsEnforced) {
  const auto w = tweetattack::testing::toy_world(1.5, {{"bad", {"poor", "meh", "blah"}}});
  EXPECT_THROW(exhaustive_oracle("movie bad", w.context(), {}, 1, 2), BudgetExceeded);
  EXPECT_NO_THROW(exhaustive_oracle("movie bad", w.context(), {}, 1, 3));
}

TEST(Oracle, EveryMemberPassesVerify) {
  ToyRun run;
  const attack::AttackConfig cfg;
  std::size_t members = 0;
  for (const auto& d : tweetattack::testing::toy_tweets()) {
    if (!attack::attackable(run.ctx().model.predict(d.preprocessed_text), cfg.delta)) continue;
    const auto r = exhaustive_oracle(d.preprocessed_text, run.ctx(), cfg, 2);
    for (const auto& h : r.valid) {
      ++members;
      const auto st = h.prediction.label != Sentiment::Negative ? attack::Status::SuccessFlip
                                                                  : attack::Status::SuccessConfidence;
      EXPECT_TRUE(attack::verify(d.preprocessed_text, st, h.text, run.ctx().model, run.ctx().scorer, cfg)) << h.text;
    }
  }
  EXPECT_GT(members, 0u);
}

TEST(Resources, BundleLoadsShippedFiles) {
  const auto& b = bundle();
  EXPECT_GT(b.vocab->word_count(), 100u);
  EXPECT_GT(b.stopwords.size(), 100u);
  EXPECT_TRUE(b.stopwords.count("the"));
  EXPECT_THROW(ResourceBundle::load("/nonexistent/dir"), ResourceError);
}

TEST(Oracle, AgreesWithIndependentEnumeration) {
  ToyRun run;
  const auto ctx = run.ctx();
  const attack::AttackConfig cfg;
  std::size_t compared = 0;
  for (const auto& d : tweetattack::testing::toy_tweets()) {
    if (!attack::attackable(ctx.model.predict(d.preprocessed_text), cfg.delta)) continue;
    const auto plan = attack::plan_attack(d.preprocessed_text, ctx, cfg);
    std::vector<std::size_t> idx;
    std::vector<std::vector<std::string>> options;  // "" keeps the word
    for (const auto& iw : plan.important_words) {
      idx.push_back(iw.word_index);
      auto c = candidates::build_candidates(iw.word, ctx.synonyms, ctx.tagger, ctx.filter_words).candidates;
      c.insert(c.begin(), "");
      options.push_back(std::move(c));
    }
    // mixed-radix counter over all choices
    std::set<std::string> expected;
    std::vector<std::size_t> digit(options.size(), 0);
    while (true) {
      auto seg = text::segment_words(d.preprocessed_text);
      std::size_t used = 0;
      for (std::size_t i = 0; i < digit.size(); ++i)
        if (digit[i] > 0) {
          seg.words[idx[i]] = options[i][digit[i]];
          ++used;
        }
      if (used > 0) {
        const auto text = seg.render();
        const auto p = ctx.model.predict(text);
        const bool success = p.label != Sentiment::Negative || p.neg_conf < cfg.delta;
        if (success && ctx.scorer.sim(d.preprocessed_text, text) >= cfg.epsilon) expected.insert(text);
      }
      std::size_t i = 0;
      while (i < digit.size() && ++digit[i] == options[i].size()) digit[i++] = 0;
      if (i == digit.size()) break;
    }
    const auto r = exhaustive_oracle(d.preprocessed_text, ctx, cfg, idx.size());
    std::set<std::string> got;
    for (const auto& h : r.valid) got.insert(h.text);
    EXPECT_EQ(got, expected) << d.id;
    ++compared;
  }
  EXPECT_GT(compared, 0u);
}
