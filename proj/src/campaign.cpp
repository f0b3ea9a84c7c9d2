#include <algorithm>
#include <atomic>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"
#include "tweetattack/rng.hpp"

namespace tweetattack::harness {

namespace {

constexpr std::uint64_t kSampleStream = 3;

using ojson = nlohmann::ordered_json;

ojson prediction_json(const std::optional<model::Prediction>& p) {
  if (!p) return nullptr;
  return ojson{{"label", to_string(p->label)}, {"neg_conf", p->neg_conf}, {"probs", p->probs}};
}

std::optional<model::Prediction> prediction_from(const ojson& j) {
  if (j.is_null()) return std::nullopt;
  model::Prediction p;
  auto label = parse_sentiment(j.at("label").get<std::string>());
  if (!label) throw MalformedResponse("record has an unknown prediction label");
  p.label = *label;
  p.neg_conf = j.at("neg_conf").get<double>();
  p.probs = j.at("probs").get<std::array<double, kNumClasses>>();
  return p;
}

template <class T>
ojson optional_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

CampaignRecord error_record(const Document& doc, const std::string& message) {
  CampaignRecord r;
  r.id = doc.id;
  r.text = doc.raw_text;
  r.preprocessed_text = doc.preprocessed_text;
  r.gold_label = doc.gold_label;
  r.status = kErrorStatus;
  r.error = message;
  return r;
}

FrequencyTable sorted_table(const std::map<std::string, std::size_t>& counts) {
  FrequencyTable t(counts.begin(), counts.end());
  std::stable_sort(t.begin(), t.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  return t;
}

}  // namespace

ojson config_json(const CampaignConfig& cfg, candidates::SourceMode mode) {
  ojson j;
  j["delta"] = cfg.attack.delta;
  j["epsilon"] = cfg.attack.epsilon;
  j["theta"] = cfg.attack.theta;
  j["top_n"] = cfg.attack.top_n;
  j["similarity_reference"] = to_string(cfg.attack.similarity_reference);
  j["synonyms"] = to_string(mode);
  j["seed"] = cfg.seed;
  j["limit"] = optional_json(cfg.limit);
  return j;
}

CampaignRecord make_record(const Document& doc, const attack::AttackOutcome& outcome) {
  CampaignRecord r;
  r.id = doc.id;
  r.text = doc.raw_text;
  r.preprocessed_text = doc.preprocessed_text;
  r.gold_label = doc.gold_label;
  r.status = to_string(outcome.status);
  r.adversarial_text = outcome.adversarial_text;
  r.replacements = outcome.replacements;
  for (const auto& w : outcome.important_words) r.important_words.push_back({w.word_index, w.word, w.raw, w.normalized});
  r.forward_queries = outcome.forward_queries;
  r.backward_queries = outcome.backward_queries;
  for (const auto& a : outcome.attempts) r.candidate_total += a.candidates.size();
  r.word_count = outcome.word_count;
  r.original_prediction = outcome.original_prediction;
  r.final_prediction = outcome.final_prediction;
  return r;
}

std::vector<CampaignRecord> run_campaign(const std::vector<Document>& docs, const attack::AttackContext& ctx,
                                         const CampaignConfig& cfg) {
  cfg.attack.validate();
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto tt = ctx.model.tokenize(docs[i].preprocessed_text);
    if (tt.tokens.empty()) continue;
    if (attack::attackable(ctx.model.predict(tt), cfg.attack.delta)) selected.push_back(i);
  }
  if (cfg.limit && *cfg.limit < selected.size()) {
    auto gen = rng::stream(cfg.seed, kSampleStream);
    rng::shuffle(selected, gen);
    selected.resize(*cfg.limit);
    std::sort(selected.begin(), selected.end());
  }
  spdlog::info("{} of {} documents are attackable at delta={}", selected.size(), docs.size(), cfg.attack.delta);

  const ojson cfg_json = config_json(cfg, ctx.synonyms.mode());
  std::vector<CampaignRecord> records(selected.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < selected.size(); k = next++) {
      const auto& doc = docs[selected[k]];
      try {
        records[k] = make_record(doc, attack::attack(doc.preprocessed_text, ctx, cfg.attack));
      } catch (const Error& e) {
        records[k] = error_record(doc, e.kind() + ": " + e.what());
      } catch (const std::exception& e) {
        records[k] = error_record(doc, std::string("Exception: ") + e.what());
      }
      records[k].config = cfg_json;
    }
  };
  const std::size_t n_workers = std::max<std::size_t>(1, std::min(cfg.workers, selected.size()));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

ojson to_json(const CampaignRecord& r) {
  ojson j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["preprocessed_text"] = r.preprocessed_text;
  j["gold_label"] = to_string(r.gold_label);
  j["status"] = r.status;
  j["error"] = optional_json(r.error);
  j["adversarial_text"] = optional_json(r.adversarial_text);
  ojson reps = ojson::array();
  for (const auto& x : r.replacements)
    reps.push_back({{"word_index", x.word_index},
                    {"original", x.original},
                    {"substitute", x.substitute},
                    {"neg_conf_after", x.neg_conf_after},
                    {"similarity_after", x.similarity_after}});
  j["replacements"] = std::move(reps);
  ojson iws = ojson::array();
  for (const auto& w : r.important_words)
    iws.push_back({{"index", w.index}, {"word", w.word}, {"raw", w.raw}, {"normalized", w.normalized}});
  j["important_words"] = std::move(iws);
  j["queries"] = {{"forward", r.forward_queries}, {"backward", r.backward_queries}, {"candidates", r.candidate_total}};
  j["word_count"] = r.word_count;
  j["original_prediction"] = prediction_json(r.original_prediction);
  j["final_prediction"] = prediction_json(r.final_prediction);
  j["config"] = r.config.is_null() ? ojson::object() : r.config;
  return j;
}

CampaignRecord record_from_json(const ojson& j) {
  CampaignRecord r;
  r.id = j.at("id").get<std::string>();
  r.text = j.at("text").get<std::string>();
  r.preprocessed_text = j.at("preprocessed_text").get<std::string>();
  auto gold = parse_sentiment(j.at("gold_label").get<std::string>());
  if (!gold) throw MalformedResponse("record " + r.id + " has an unknown gold label");
  r.gold_label = *gold;
  r.status = j.at("status").get<std::string>();
  if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
  if (!j.at("adversarial_text").is_null()) r.adversarial_text = j.at("adversarial_text").get<std::string>();
  for (const auto& x : j.at("replacements"))
    r.replacements.push_back({x.at("word_index").get<std::size_t>(), x.at("original").get<std::string>(),
                              x.at("substitute").get<std::string>(), x.at("neg_conf_after").get<double>(),
                              x.at("similarity_after").get<double>()});
  for (const auto& w : j.at("important_words"))
    r.important_words.push_back({w.at("index").get<std::size_t>(), w.at("word").get<std::string>(),
                                 w.at("raw").get<double>(), w.at("normalized").get<double>()});
  const auto& q = j.at("queries");
  r.forward_queries = q.at("forward").get<std::uint64_t>();
  r.backward_queries = q.at("backward").get<std::uint64_t>();
  r.candidate_total = q.at("candidates").get<std::uint64_t>();
  r.word_count = j.at("word_count").get<std::size_t>();
  r.original_prediction = prediction_from(j.at("original_prediction"));
  r.final_prediction = prediction_from(j.at("final_prediction"));
  r.config = j.at("config");
  return r;
}

std::string to_jsonl_line(const CampaignRecord& r) { return to_json(r).dump(); }

void write_jsonl(std::ostream& out, const std::vector<CampaignRecord>& records) {
  for (const auto& r : records) out << to_jsonl_line(r) << '\n';
}

std::vector<CampaignRecord> read_jsonl(std::istream& in) {
  std::vector<CampaignRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(ojson::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ResourceError("results line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<CampaignRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open results " + path.string());
  return read_jsonl(in);
}

CampaignSummary summarize(const std::vector<CampaignRecord>& records) {
  CampaignSummary s;
  double replacements = 0.0;
  double ratio = 0.0;
  double forwards = 0.0;
  std::size_t counted = 0;
  for (const auto& r : records) {
    ++s.attempted;
    if (r.status == kErrorStatus) {
      ++s.errors;
      ++s.failures;
      continue;
    }
    ++counted;
    forwards += static_cast<double>(r.forward_queries);
    const auto st = attack::parse_status(r.status);
    if (!st || *st == attack::Status::Failure) {
      ++s.failures;
      continue;
    }
    if (*st == attack::Status::SuccessFlip) ++s.success_flip;
    else ++s.success_confidence;
    replacements += static_cast<double>(r.replacements.size());
    if (r.word_count > 0) ratio += static_cast<double>(r.replacements.size()) / static_cast<double>(r.word_count);
  }
  const std::size_t successes = s.success_flip + s.success_confidence;
  if (successes > 0) {
    s.mean_replacements_per_success = replacements / static_cast<double>(successes);
    s.mean_perturbation_ratio = ratio / static_cast<double>(successes);
  }
  if (counted > 0) s.mean_forward_queries = forwards / static_cast<double>(counted);
  return s;
}

ojson to_json(const CampaignSummary& s) {
  ojson j;
  j["attempted"] = s.attempted;
  j["success_flip"] = s.success_flip;
  j["success_confidence"] = s.success_confidence;
  j["failures"] = s.failures;
  j["errors"] = s.errors;
  j["mean_replacements_per_success"] = optional_json(s.mean_replacements_per_success);
  j["mean_perturbation_ratio"] = optional_json(s.mean_perturbation_ratio);
  j["mean_forward_queries"] = optional_json(s.mean_forward_queries);
  return j;
}

bool operator==(const CampaignSummary& a, const CampaignSummary& b) {
  return a.attempted == b.attempted && a.success_flip == b.success_flip &&
         a.success_confidence == b.success_confidence && a.failures == b.failures && a.errors == b.errors &&
         a.mean_replacements_per_success == b.mean_replacements_per_success &&
         a.mean_perturbation_ratio == b.mean_perturbation_ratio && a.mean_forward_queries == b.mean_forward_queries;
}

FrequencyReport word_frequency_report(const std::vector<CampaignRecord>& records) {
  std::map<std::string, std::size_t> a, b, c;
  for (const auto& r : records) {
    if (r.status == kErrorStatus) continue;
    for (const auto& w : r.important_words) ++a[w.word];
    const auto st = attack::parse_status(r.status);
    if (!st || !attack::is_success(*st)) continue;
    for (const auto& x : r.replacements) {
      ++b[x.original];
      ++c[x.substitute];
    }
  }
  return {sorted_table(a), sorted_table(b), sorted_table(c)};
}

std::string to_csv(const FrequencyTable& table) {
  std::ostringstream out;
  out << "word,count\n";
  for (const auto& [w, n] : table) out << w << ',' << n << '\n';
  return out.str();
}

}  // namespace tweetattack::harness
