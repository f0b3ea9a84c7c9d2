#include <cstdlib>

#include <spdlog/spdlog.h>

#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"

namespace tweetattack::harness {

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("TWEETATTACK_DATA_DIR"); env && *env) return env;
#ifdef TWEETATTACK_DATA_DIR
  return TWEETATTACK_DATA_DIR;
#else
  return "data";
#endif
}

ResourceBundle ResourceBundle::load(const std::filesystem::path& data_dir) {
  if (!std::filesystem::is_directory(data_dir)) throw ResourceError("data directory not found: " + data_dir.string());
  auto table = [&](const char* name) {
    std::unordered_map<std::string, std::string> m;
    for (auto& [k, v] : text::read_tsv(data_dir / name)) m[text::to_lower(k)] = v;
    return m;
  };
  ResourceBundle b;
  b.data_dir = data_dir;
  std::vector<std::string> dictionary;
  for (const auto& w : text::read_lines(data_dir / "dictionary.txt")) dictionary.push_back(text::trim(w));
  try {
    b.preprocess = preprocess::PreprocessConfig(table("slang.tsv"), table("contractions.tsv"), std::move(dictionary));
  } catch (const InvalidConfig& e) {
    throw ResourceError(std::string("preprocessing tables: ") + e.what());
  }
  b.vocab = std::make_shared<const model::Vocabulary>(
      model::Vocabulary::load(data_dir / "vocab_words.txt", data_dir / "vocab_subwords.txt"));
  b.lexicon = candidates::SynonymLexicon::load(data_dir / "lexicon_synonyms.tsv");
  b.tagger = candidates::PosTagger::load(data_dir / "lexicon_pos.tsv");
  for (const auto& w : text::read_lines(data_dir / "stopwords.txt")) b.stopwords.insert(text::to_lower(text::trim(w)));
  if (b.stopwords.empty()) throw ResourceError("stopwords.txt is empty");
  return b;
}

std::vector<model::LabeledText> labeled_corpus(const std::vector<Document>& docs, const model::Vocabulary& vocab) {
  std::vector<model::LabeledText> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    auto tt = model::tokenize(d.preprocessed_text, vocab);
    if (tt.tokens.empty()) continue;
    out.push_back({std::move(tt), d.gold_label});
  }
  return out;
}

model::Classifier train_classifier(const std::vector<Document>& docs, const model::Vocabulary& vocab,
                                   const TrainSpec& spec) {
  const auto corpus = labeled_corpus(docs, vocab);
  auto params = model::init_params(vocab.size(), spec.dims, spec.hyper.seed);
  params = model::train(std::move(params), corpus, spec.hyper);
  spdlog::info("trained on {} documents, training accuracy {:.3f}", corpus.size(), model::accuracy(params, corpus));
  return model::Classifier{vocab, std::move(params), {}};
}

}  // namespace tweetattack::harness
