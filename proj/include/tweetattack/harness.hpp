#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "tweetattack/attack.hpp"
#include "tweetattack/candidates.hpp"
#include "tweetattack/model.hpp"
#include "tweetattack/preprocess.hpp"

namespace tweetattack::harness {

// ---- dataset

struct Document {
  std::string id;
  std::string raw_text;
  std::string preprocessed_text;
  Sentiment gold_label = Sentiment::Neutral;
};

struct LoadStats {
  std::size_t rows = 0;  // data rows after the header
  std::size_t skipped_empty_text = 0;
  std::size_t skipped_unknown_label = 0;
  std::size_t skipped() const { return skipped_empty_text + skipped_unknown_label; }
};

struct Dataset {
  std::vector<Document> documents;
  LoadStats stats;
};

// RFC 4180 rows: quoted fields, doubled quotes, embedded newlines, CRLF.
// Throws MalformedCsv on an unterminated quote.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);

// Needs `text` and `sentiment` columns; `textID` becomes the id when present.
// Texts are preprocessed with `cfg` when given.
Dataset load_dataset(std::istream& in, const preprocess::PreprocessConfig* cfg = nullptr);
Dataset load_dataset(const std::filesystem::path& path, const preprocess::PreprocessConfig* cfg = nullptr);

// ---- shipped resources

std::filesystem::path default_data_dir();

struct ResourceBundle {
  std::filesystem::path data_dir;
  preprocess::PreprocessConfig preprocess;
  std::shared_ptr<const model::Vocabulary> vocab;
  candidates::SynonymLexicon lexicon;
  candidates::PosTagger tagger;
  std::unordered_set<std::string> stopwords;

  static ResourceBundle load(const std::filesystem::path& data_dir);
};

// Tokenized training pairs; documents whose text has no tokens are dropped.
std::vector<model::LabeledText> labeled_corpus(const std::vector<Document>& docs, const model::Vocabulary& vocab);

struct TrainSpec {
  model::Dimensions dims;
  model::TrainHyper hyper;
};

model::Classifier train_classifier(const std::vector<Document>& docs, const model::Vocabulary& vocab,
                                   const TrainSpec& spec);

// ---- campaign

struct ImportantWordRecord {
  std::size_t index = 0;
  std::string word;
  double raw = 0.0;
  double normalized = 0.0;
};

struct CampaignRecord {
  std::string id;
  std::string text;
  std::string preprocessed_text;
  Sentiment gold_label = Sentiment::Neutral;
  std::string status;  // attack::Status name, or "Error"
  std::optional<std::string> error;
  std::optional<std::string> adversarial_text;
  std::vector<attack::Replacement> replacements;
  std::vector<ImportantWordRecord> important_words;
  std::uint64_t forward_queries = 0;
  std::uint64_t backward_queries = 0;
  std::uint64_t candidate_total = 0;  // POS-filtered candidates over attempted words
  std::size_t word_count = 0;
  std::optional<model::Prediction> original_prediction;
  std::optional<model::Prediction> final_prediction;
  nlohmann::ordered_json config;
};

inline constexpr const char* kErrorStatus = "Error";

struct CampaignConfig {
  attack::AttackConfig attack;
  std::uint64_t seed = 42;
  std::optional<std::size_t> limit;  // seeded sample of the attackable set
  std::size_t workers = 1;
};

nlohmann::ordered_json config_json(const CampaignConfig& cfg, candidates::SourceMode mode);

// Attacks every document the model confidently calls negative. Records come
// back in input order whatever the worker count; per-document errors turn
// into "Error" records.
std::vector<CampaignRecord> run_campaign(const std::vector<Document>& docs, const attack::AttackContext& ctx,
                                         const CampaignConfig& cfg);

CampaignRecord make_record(const Document& doc, const attack::AttackOutcome& outcome);

nlohmann::ordered_json to_json(const CampaignRecord& r);
CampaignRecord record_from_json(const nlohmann::ordered_json& j);
std::string to_jsonl_line(const CampaignRecord& r);
void write_jsonl(std::ostream& out, const std::vector<CampaignRecord>& records);
std::vector<CampaignRecord> read_jsonl(std::istream& in);
std::vector<CampaignRecord> read_jsonl(const std::filesystem::path& path);

// ---- metrics

struct CampaignSummary {
  std::size_t attempted = 0;
  std::size_t success_flip = 0;
  std::size_t success_confidence = 0;
  std::size_t failures = 0;  // includes errors
  std::size_t errors = 0;
  std::optional<double> mean_replacements_per_success;
  std::optional<double> mean_perturbation_ratio;
  std::optional<double> mean_forward_queries;  // over non-error records
};

CampaignSummary summarize(const std::vector<CampaignRecord>& records);
nlohmann::ordered_json to_json(const CampaignSummary& s);
bool operator==(const CampaignSummary& a, const CampaignSummary& b);

using FrequencyTable = std::vector<std::pair<std::string, std::size_t>>;

struct FrequencyReport {
  FrequencyTable important_words;       // every attacked document
  FrequencyTable replaced_originals;    // successes only
  FrequencyTable substitutes;           // successes only
};

FrequencyReport word_frequency_report(const std::vector<CampaignRecord>& records);
std::string to_csv(const FrequencyTable& table);

// ---- exhaustive oracle

struct OracleHit {
  std::string text;
  std::size_t replacements = 0;
  model::Prediction prediction;
  double similarity = 0.0;
};

struct OracleResult {
  std::vector<OracleHit> valid;  // sorted by text
  std::uint64_t combinations = 0;
  bool contains(const std::string& text) const;
  std::optional<std::size_t> min_replacements() const;
};

inline constexpr std::uint64_t kOracleBudget = 100000;
inline constexpr std::size_t kOracleMaxWords = 12;

// Number of ways to pick 1..max_r words and one candidate for each.
// Saturates at UINT64_MAX.
std::uint64_t count_combinations(const std::vector<std::size_t>& sizes, std::size_t max_r);

// Every text reachable by substituting up to max_replacements important words
// with one of their candidates that satisfies the full success predicate.
// Throws BudgetExceeded above `budget` combinations or kOracleMaxWords words.
OracleResult exhaustive_oracle(std::string_view text, const attack::AttackContext& ctx, const attack::AttackConfig& cfg,
                               std::size_t max_replacements, std::uint64_t budget = kOracleBudget);

}  // namespace tweetattack::harness
