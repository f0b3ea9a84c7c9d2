// tweetattack: preprocess, train, attack, report and verify from the shell.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "tweetattack/attack.hpp"
#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"

namespace fs = std::filesystem;
using namespace tweetattack;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitVerify = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ResourceError("cannot write " + p.string());
  return out;
}

struct Options {
  std::string data_dir;
  std::string log_level = "warn";

  std::string in, out;

  std::string data, model_path, model_out;
  std::uint64_t seed = 42;
  std::size_t epochs = 12, batch = 8, dim = 16, hidden = 8;
  double lr = 1.0;

  attack::AttackConfig attack;
  std::string synonyms = "local", cache, similarity_reference = "original";
  std::size_t limit = 0, workers = 1;

  std::string results, out_dir;
};

harness::ResourceBundle resources(const Options& o) {
  return harness::ResourceBundle::load(o.data_dir.empty() ? harness::default_data_dir() : fs::path(o.data_dir));
}

int cmd_preprocess(const Options& o) {
  const auto res = resources(o);
  auto out = open_out(o.out);
  if (fs::path(o.in).extension() == ".csv") {
    const auto ds = harness::load_dataset(fs::path(o.in), &res.preprocess);
    out << "id,text,preprocessed_text,sentiment\n";
    for (const auto& d : ds.documents)
      out << csv_field(d.id) << ',' << csv_field(d.raw_text) << ',' << csv_field(d.preprocessed_text) << ','
          << to_string(d.gold_label) << '\n';
    std::cerr << ds.documents.size() << " documents, " << ds.stats.skipped() << " skipped\n";
    return kExitOk;
  }
  for (const auto& line : text::read_lines(o.in)) out << preprocess::preprocess(line, res.preprocess) << '\n';
  return kExitOk;
}

int cmd_train(const Options& o) {
  const auto res = resources(o);
  const auto ds = harness::load_dataset(fs::path(o.data), &res.preprocess);
  harness::TrainSpec spec;
  spec.dims = {o.dim, o.hidden};
  spec.hyper = {o.lr, o.epochs, o.batch, o.seed};
  const auto clf = harness::train_classifier(ds.documents, *res.vocab, spec);
  model::save_checkpoint(o.model_out, clf.params, clf.vocab);
  const auto corpus = harness::labeled_corpus(ds.documents, clf.vocab);
  std::cout << "trained " << corpus.size() << " documents, accuracy " << model::accuracy(clf.params, corpus)
            << ", wrote " << o.model_out << '\n';
  return kExitOk;
}

struct Engine {
  harness::ResourceBundle res;
  std::shared_ptr<const model::Classifier> model;
  std::shared_ptr<similarity::EmbeddingSimilarity> scorer;
};

Engine load_engine(const Options& o, double epsilon) {
  Engine e{resources(o), nullptr, nullptr};
  auto params = model::load_checkpoint(o.model_path, *e.res.vocab);
  e.model = std::make_shared<const model::Classifier>(model::Classifier{*e.res.vocab, std::move(params), {}});
  e.scorer = similarity::EmbeddingSimilarity::sharing(e.model, epsilon);
  return e;
}

candidates::SynonymSource make_source(const Options& o, const harness::ResourceBundle& res) {
  const auto mode = candidates::parse_source_mode(o.synonyms);
  if (!mode) throw UsageError("--synonyms must be local, datamuse or cache");
  switch (*mode) {
    case candidates::SourceMode::Local:
      return candidates::SynonymSource::local(res.lexicon, o.attack.top_n);
    case candidates::SourceMode::Datamuse:
      return candidates::SynonymSource::datamuse(
          std::make_shared<candidates::DatamuseClient>(candidates::make_https_transport()), o.attack.top_n);
    case candidates::SourceMode::DatamuseWithCache: {
      if (o.cache.empty()) throw UsageError("--synonyms cache needs --cache FILE");
      return candidates::SynonymSource::datamuse_with_cache(
          std::make_shared<candidates::DatamuseClient>(candidates::make_https_transport()),
          std::make_shared<candidates::SynonymCache>(o.cache), o.attack.top_n);
    }
  }
  throw UsageError("unknown synonym source");
}

int cmd_attack(const Options& o) {
  harness::CampaignConfig cfg;
  cfg.attack = o.attack;
  auto ref = attack::parse_similarity_reference(o.similarity_reference);
  if (!ref) throw UsageError("--similarity-reference must be original or current");
  cfg.attack.similarity_reference = *ref;
  cfg.attack.validate();
  cfg.seed = o.seed;
  if (o.limit > 0) cfg.limit = o.limit;
  cfg.workers = o.workers;

  auto engine = load_engine(o, cfg.attack.epsilon);
  const auto source = make_source(o, engine.res);
  const auto ds = harness::load_dataset(fs::path(o.data), &engine.res.preprocess);
  attack::AttackContext ctx{*engine.model, *engine.scorer, source, engine.res.tagger, engine.res.stopwords};
  const auto records = harness::run_campaign(ds.documents, ctx, cfg);
  auto out = open_out(o.out);
  harness::write_jsonl(out, records);
  const auto s = harness::summarize(records);
  std::cout << "attempted " << s.attempted << ", flips " << s.success_flip << ", confidence "
            << s.success_confidence << ", failures " << s.failures << " (errors " << s.errors << ")\n";
  return kExitOk;
}

int cmd_report(const Options& o) {
  const auto records = harness::read_jsonl(fs::path(o.results));
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  open_out(dir / "summary.json") << harness::to_json(harness::summarize(records)).dump(2) << '\n';
  const auto freq = harness::word_frequency_report(records);
  open_out(dir / "important_words.csv") << harness::to_csv(freq.important_words);
  open_out(dir / "replaced_words.csv") << harness::to_csv(freq.replaced_originals);
  open_out(dir / "substitute_words.csv") << harness::to_csv(freq.substitutes);
  std::cout << "wrote summary.json and three frequency tables to " << dir.string() << '\n';
  return kExitOk;
}

int cmd_verify(const Options& o) {
  const auto records = harness::read_jsonl(fs::path(o.results));
  std::optional<Engine> engine;
  std::size_t checked = 0;
  std::size_t bad = 0;
  for (const auto& r : records) {
    const auto st = attack::parse_status(r.status);
    if (!st || !attack::is_success(*st)) continue;
    attack::AttackConfig cfg;
    if (r.config.contains("delta")) cfg.delta = r.config["delta"].get<double>();
    if (r.config.contains("epsilon")) cfg.epsilon = r.config["epsilon"].get<double>();
    if (!engine) engine = load_engine(o, cfg.epsilon);
    ++checked;
    if (!attack::verify(r.preprocessed_text, *st, r.adversarial_text, *engine->model, *engine->scorer, cfg)) {
      ++bad;
      std::cerr << "verification failed: " << r.id << '\n';
    }
  }
  std::cout << checked - bad << '/' << checked << " successes verified\n";
  return bad == 0 ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-guided synonym attacks on a tweet sentiment classifier"};
  app.set_config("--config", "", "TOML/INI file mirroring the flags; flags win");
  app.require_subcommand(1);
  Options o;
  app.add_option("--data-dir", o.data_dir, "Directory with lexicons and vocabularies");
  app.add_option("--log-level", o.log_level, "trace|debug|info|warn|error|off")->capture_default_str();

  auto* pre = app.add_subcommand("preprocess", "Normalize tweets (CSV with a text column, or one per line)");
  pre->add_option("--in", o.in)->required();
  pre->add_option("--out", o.out)->required();

  auto* train = app.add_subcommand("train", "Train the classifier and write a checkpoint");
  train->add_option("--data", o.data)->required();
  train->add_option("--model-out", o.model_out)->required();
  train->add_option("--seed", o.seed)->capture_default_str();
  train->add_option("--epochs", o.epochs)->capture_default_str();
  train->add_option("--lr", o.lr)->capture_default_str();
  train->add_option("--batch", o.batch)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--dim", o.dim)->capture_default_str()->check(CLI::PositiveNumber);
  train->add_option("--hidden", o.hidden)->capture_default_str()->check(CLI::PositiveNumber);

  auto* atk = app.add_subcommand("attack", "Run an attack campaign, one JSON line per attacked document");
  atk->add_option("--data", o.data)->required();
  atk->add_option("--model", o.model_path)->required();
  atk->add_option("--delta", o.attack.delta)->capture_default_str();
  atk->add_option("--epsilon", o.attack.epsilon)->capture_default_str();
  atk->add_option("--theta", o.attack.theta)->capture_default_str();
  atk->add_option("--top-n", o.attack.top_n)->capture_default_str()->check(CLI::PositiveNumber);
  atk->add_option("--synonyms", o.synonyms, "local | datamuse | cache")->capture_default_str();
  atk->add_option("--cache", o.cache, "Synonym cache file (JSON lines)");
  atk->add_option("--similarity-reference", o.similarity_reference, "original | current")->capture_default_str();
  atk->add_option("--out", o.out)->required();
  atk->add_option("--seed", o.seed)->capture_default_str();
  atk->add_option("--limit", o.limit, "Attack a seeded sample of this many documents (0 = all)");
  atk->add_option("--workers", o.workers)->capture_default_str()->check(CLI::PositiveNumber);

  auto* rep = app.add_subcommand("report", "Summary metrics and word-frequency tables from a results file");
  rep->add_option("--results", o.results)->required();
  rep->add_option("--out-dir", o.out_dir)->required();

  auto* ver = app.add_subcommand("verify", "Re-check every success in a results file");
  ver->add_option("--results", o.results)->required();
  ver->add_option("--model", o.model_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  spdlog::set_level(spdlog::level::from_str(o.log_level));
  try {
    if (*pre) return cmd_preprocess(o);
    if (*train) return cmd_train(o);
    if (*atk) return cmd_attack(o);
    if (*rep) return cmd_report(o);
    if (*ver) return cmd_verify(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
