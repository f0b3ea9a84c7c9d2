#pragma once

#include <cmath>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "tweetattack/attack.hpp"
#include "tweetattack/errors.hpp"
#include "tweetattack/harness.hpp"

namespace tweetattack::testing {

inline std::filesystem::path data_dir() { return TWEETATTACK_DATA_DIR; }
inline std::filesystem::path fixture_dir() { return TWEETATTACK_FIXTURE_DIR; }

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "tweetattack_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline const harness::ResourceBundle& bundle() {
  static const auto b = harness::ResourceBundle::load(data_dir());
  return b;
}

// The pinned toy experiment: toy_train.csv, seed 42, defaults elsewhere.
inline harness::TrainSpec toy_spec() { return {}; }

inline std::shared_ptr<const model::Classifier> toy_classifier() {
  static const auto clf = [] {
    const auto ds = harness::load_dataset(data_dir() / "toy_train.csv", &bundle().preprocess);
    return std::make_shared<const model::Classifier>(
        harness::train_classifier(ds.documents, *bundle().vocab, toy_spec()));
  }();
  return clf;
}

inline const std::vector<harness::Document>& toy_tweets() {
  static const auto docs = harness::load_dataset(data_dir() / "toy_tweets.csv", &bundle().preprocess).documents;
  return docs;
}

inline model::Vocabulary letters_vocab(std::vector<std::string> words) {
  std::vector<std::string> subwords;
  for (char c = 'a'; c <= 'z'; ++c) subwords.emplace_back(1, c);
  return model::Vocabulary(std::move(words), std::move(subwords));
}

inline model::ClassifierParams random_params(std::size_t rows, std::size_t d, std::size_t h, std::mt19937_64& g,
                                             double scale = 0.8) {
  std::uniform_real_distribution<double> u(-scale, scale);
  model::ClassifierParams p;
  p.embedding = model::Matrix(rows, d);
  p.w1 = model::Matrix(d, h);
  p.w2 = model::Matrix(h, kNumClasses);
  for (auto* m : {&p.embedding, &p.w1, &p.w2})
    for (auto& x : m->data()) x = u(g);
  p.b1.resize(h);
  p.b2.resize(kNumClasses);
  for (auto& x : p.b1) x = u(g);
  for (auto& x : p.b2) x = u(g);
  return p;
}

// Central differences of the loss with respect to the embedding of the token
// at position `pos`. Perturbing the embedding row would also move every other
// occurrence of the same id, so the row is detached into a private id first.
inline std::vector<double> fd_occurrence_gradient(const model::ClassifierParams& params, const model::TokenizedText& tt,
                                                  std::size_t pos, Sentiment target, double step = 1e-4) {
  auto p = params;
  const std::size_t fresh = p.embedding.rows();
  model::Matrix grown(fresh + 1, p.dim());
  for (std::size_t r = 0; r < fresh; ++r)
    for (std::size_t c = 0; c < p.dim(); ++c) grown(r, c) = p.embedding(r, c);
  for (std::size_t c = 0; c < p.dim(); ++c) grown(fresh, c) = p.embedding(tt.tokens[pos], c);
  p.embedding = std::move(grown);
  auto t2 = tt;
  t2.tokens[pos] = static_cast<model::TokenId>(fresh);
  std::vector<double> g(p.dim());
  for (std::size_t c = 0; c < p.dim(); ++c) {
    const double orig = p.embedding(fresh, c);
    p.embedding(fresh, c) = orig + step;
    const double up = model::loss(model::forward(p, t2), target);
    p.embedding(fresh, c) = orig - step;
    const double down = model::loss(model::forward(p, t2), target);
    p.embedding(fresh, c) = orig;
    g[c] = (up - down) / (2 * step);
  }
  return g;
}

// Central differences with respect to one shared embedding row.
inline std::vector<double> fd_row_gradient(model::ClassifierParams p, const model::TokenizedText& tt,
                                           model::TokenId row, Sentiment target, double step = 1e-4) {
  std::vector<double> g(p.dim());
  for (std::size_t c = 0; c < p.dim(); ++c) {
    const double orig = p.embedding(row, c);
    p.embedding(row, c) = orig + step;
    const double up = model::loss(model::forward(p, tt), target);
    p.embedding(row, c) = orig - step;
    const double down = model::loss(model::forward(p, tt), target);
    p.embedding(row, c) = orig;
    g[c] = (up - down) / (2 * step);
  }
  return g;
}

inline bool close_rel(double analytic, double numeric, double rel = 1e-4, double floor = 1e-8) {
  const double diff = std::abs(analytic - numeric);
  return diff <= floor || diff <= rel * std::max(std::abs(analytic), std::abs(numeric));
}

// A hand-set three-word world for attack tests. Only the third embedding
// coordinate reaches the classifier (W1 = e3, h = 1); the first two carry
// similarity mass. "movie" sits deep in tanh saturation, so "bad" owns the
// larger gradient.
//   v = mean_t tanh(e_t[2]), logits = (4v, neg_bias - 4v, 0)
struct ToyWorld {
  std::shared_ptr<const model::Classifier> model;
  std::shared_ptr<similarity::EmbeddingSimilarity> scorer;
  candidates::SynonymSource synonyms = candidates::SynonymSource::local({});
  candidates::PosTagger tagger;
  std::unordered_set<std::string> filter_words{"the", "a"};

  attack::AttackContext context() const { return {*model, *scorer, synonyms, tagger, filter_words}; }
};

inline ToyWorld toy_world(double neg_bias, std::unordered_map<std::string, std::vector<std::string>> lexicon,
                          double epsilon = 0.8) {
  auto vocab = letters_vocab({"movie", "bad", "poor", "meh", "blah", "the"});
  model::ClassifierParams p;
  p.embedding = model::Matrix(vocab.size(), 3);
  auto set = [&](const char* w, double a, double b, double c) {
    const auto id = *vocab.word_id(w);
    p.embedding(id, 0) = a;
    p.embedding(id, 1) = b;
    p.embedding(id, 2) = c;
  };
  set("movie", 5, 0, 3);
  set("bad", 0, 5, -2);
  set("poor", 0, 5, 2);
  set("meh", 0, 5, -0.5);
  set("blah", 0, 5, -1);
  set("the", 1, 1, 0);
  p.w1 = model::Matrix(3, 1);
  p.w1(2, 0) = 1.0;
  p.b1 = {0.0};
  p.w2 = model::Matrix(1, 3);
  p.w2(0, 0) = 4.0;
  p.w2(0, 1) = -4.0;
  p.b2 = {0.0, neg_bias, 0.0};
  ToyWorld w;
  w.model = std::make_shared<const model::Classifier>(model::Classifier{std::move(vocab), std::move(p), {}});
  w.scorer = similarity::EmbeddingSimilarity::sharing(w.model, epsilon);
  w.synonyms = candidates::SynonymSource::local(candidates::SynonymLexicon(std::move(lexicon)));
  w.tagger = candidates::PosTagger({{"bad", candidates::PosTag::Adj},
                                    {"poor", candidates::PosTag::Adj},
                                    {"meh", candidates::PosTag::Adj},
                                    {"blah", candidates::PosTag::Adj},
                                    {"movie", candidates::PosTag::Noun}});
  return w;
}

}  // namespace tweetattack::testing
