#include "tweetattack/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "tweetattack/errors.hpp"
#include "tweetattack/rng.hpp"

namespace tweetattack::model {

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

enum StreamTag : std::uint64_t { kInitStream = 1, kShuffleStream = 2 };

// Intermediate values of one forward pass, kept for the backward pass.
struct ForwardTrace {
  std::vector<std::vector<double>> hidden;  // tanh activations per token
  std::vector<double> pooled;
  std::array<double, kNumClasses> logits{};
  Prediction prediction;
};

Prediction from_logits(const std::array<double, kNumClasses>& logits) {
  Prediction p;
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    p.probs[k] = std::exp(logits[k] - peak);
    total += p.probs[k];
  }
  int best = 0;
  for (int k = 0; k < kNumClasses; ++k) {
    p.probs[k] /= total;
    if (p.probs[k] > p.probs[best]) best = k;
  }
  p.label = static_cast<Sentiment>(best);
  p.neg_conf = p.probs[static_cast<int>(Sentiment::Negative)];
  return p;
}

ForwardTrace run_forward(const ClassifierParams& params, const TokenizedText& tt) {
  if (tt.tokens.empty()) throw EmptyInput("forward needs at least one token");
  const std::size_t d = params.dim();
  const std::size_t h = params.hidden();
  ForwardTrace trace;
  trace.hidden.assign(tt.tokens.size(), std::vector<double>(h));
  trace.pooled.assign(h, 0.0);
  for (std::size_t t = 0; t < tt.tokens.size(); ++t) {
    const auto e = params.embedding.row(tt.tokens[t]);
    auto& a = trace.hidden[t];
    for (std::size_t j = 0; j < h; ++j) {
      double z = params.b1[j];
      for (std::size_t i = 0; i < d; ++i) z += params.w1(i, j) * e[i];
      a[j] = std::tanh(z);
      trace.pooled[j] += a[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(tt.tokens.size());
  for (auto& v : trace.pooled) v *= inv;
  for (int k = 0; k < kNumClasses; ++k) {
    double s = params.b2[k];
    for (std::size_t j = 0; j < h; ++j) s += params.w2(j, k) * trace.pooled[j];
    trace.logits[k] = s;
  }
  trace.prediction = from_logits(trace.logits);
  return trace;
}

struct ParamGradients {
  Matrix w1;
  std::vector<double> b1;
  Matrix w2;
  std::vector<double> b2;
  std::vector<std::vector<double>> per_token;
};

// Reverse-mode pass for cross-entropy at `target`:
//   dlogits = p - onehot(target)
//   dpooled = W2 dlogits
//   dz_t    = dpooled / T * (1 - h_t^2)
//   de_t    = W1 dz_t
ParamGradients run_backward(const ClassifierParams& params, const TokenizedText& tt, const ForwardTrace& trace,
                            Sentiment target, bool want_weights) {
  const std::size_t d = params.dim();
  const std::size_t h = params.hidden();
  const std::size_t T = tt.tokens.size();
  std::array<double, kNumClasses> dlogits{};
  for (int k = 0; k < kNumClasses; ++k) dlogits[k] = trace.prediction.probs[k];
  dlogits[static_cast<int>(target)] -= 1.0;

  ParamGradients g;
  if (want_weights) {
    g.w1 = Matrix(d, h);
    g.b1.assign(h, 0.0);
    g.w2 = Matrix(h, kNumClasses);
    g.b2.assign(dlogits.begin(), dlogits.end());
    for (std::size_t j = 0; j < h; ++j)
      for (int k = 0; k < kNumClasses; ++k) g.w2(j, k) = trace.pooled[j] * dlogits[k];
  }
  std::vector<double> dpooled(h, 0.0);
  for (std::size_t j = 0; j < h; ++j)
    for (int k = 0; k < kNumClasses; ++k) dpooled[j] += params.w2(j, k) * dlogits[k];

  const double inv = 1.0 / static_cast<double>(T);
  g.per_token.assign(T, std::vector<double>(d, 0.0));
  std::vector<double> dz(h);
  for (std::size_t t = 0; t < T; ++t) {
    const auto& a = trace.hidden[t];
    for (std::size_t j = 0; j < h; ++j) dz[j] = dpooled[j] * inv * (1.0 - a[j] * a[j]);
    auto& de = g.per_token[t];
    for (std::size_t i = 0; i < d; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < h; ++j) s += params.w1(i, j) * dz[j];
      de[i] = s;
    }
    if (want_weights) {
      const auto e = params.embedding.row(tt.tokens[t]);
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < h; ++j) g.w1(i, j) += e[i] * dz[j];
      for (std::size_t j = 0; j < h; ++j) g.b1[j] += dz[j];
    }
  }
  return g;
}

void append_piece_tokens(std::string_view word, const Vocabulary& vocab, std::vector<TokenId>& out) {
  std::size_t i = 0;
  bool pending_unknown = false;
  while (i < word.size()) {
    std::size_t take = 0;
    TokenId id = 0;
    const std::size_t max_len = std::min(vocab.longest_subword(), word.size() - i);
    for (std::size_t len = max_len; len >= 1; --len) {
      if (auto found = vocab.subword_id(word.substr(i, len))) {
        take = len;
        id = *found;
        break;
      }
    }
    if (take == 0) {
      if (!pending_unknown) out.push_back(vocab.unknown_id());
      pending_unknown = true;
      ++i;
      continue;
    }
    pending_unknown = false;
    out.push_back(id);
    i += take;
  }
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::string> subwords)
    : words_(std::move(words)), subwords_(std::move(subwords)) {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!word_index_.emplace(words_[i], static_cast<TokenId>(i)).second)
      throw InvalidConfig("duplicate word token '" + words_[i] + "'");
  }
  for (std::size_t i = 0; i < subwords_.size(); ++i) {
    if (subwords_[i].empty()) throw InvalidConfig("empty subword piece");
    if (!subword_index_.emplace(subwords_[i], static_cast<TokenId>(words_.size() + i)).second)
      throw InvalidConfig("duplicate subword piece '" + subwords_[i] + "'");
    longest_subword_ = std::max(longest_subword_, subwords_[i].size());
  }
  for (char c = 'a'; c <= 'z'; ++c) {
    if (!subword_index_.count(std::string(1, c)))
      throw InvalidConfig(std::string("subword vocabulary lacks the letter '") + c + "'");
  }
  std::uint64_t h = kFnvOffset;
  for (const auto& w : words_) h = fnv1a(fnv1a(h, w), "\n");
  h = fnv1a(h, std::string_view("\0", 1));
  for (const auto& s : subwords_) h = fnv1a(fnv1a(h, s), "\n");
  hash_ = h;
}

Vocabulary Vocabulary::load(const std::filesystem::path& words_file, const std::filesystem::path& subwords_file) {
  auto strip = [](std::vector<std::string> lines) {
    for (auto& l : lines) l = text::trim(l);
    return lines;
  };
  return Vocabulary(strip(text::read_lines(words_file)), strip(text::read_lines(subwords_file)));
}

std::optional<TokenId> Vocabulary::word_id(std::string_view lower_word) const {
  const auto it = word_index_.find(std::string(lower_word));
  if (it == word_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<TokenId> Vocabulary::subword_id(std::string_view piece) const {
  const auto it = subword_index_.find(std::string(piece));
  if (it == subword_index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token_text(TokenId id) const {
  static const std::string unk = "[UNK]";
  if (id < words_.size()) return words_[id];
  if (id < words_.size() + subwords_.size()) return subwords_[id - words_.size()];
  return unk;
}

TokenizedText tokenize_words(const std::vector<std::string>& words, const Vocabulary& vocab) {
  TokenizedText tt;
  tt.words.reserve(words.size());
  for (const auto& raw : words) {
    std::string w = text::to_lower(raw);
    const std::size_t begin = tt.tokens.size();
    if (auto id = vocab.word_id(w)) {
      tt.tokens.push_back(*id);
    } else {
      append_piece_tokens(w, vocab, tt.tokens);
    }
    tt.alignment.push_back(TokenRange{begin, tt.tokens.size()});
    tt.words.push_back(std::move(w));
  }
  return tt;
}

TokenizedText tokenize(std::string_view text, const Vocabulary& vocab) {
  return tokenize_words(text::segment_words(text).words, vocab);
}

void ClassifierParams::validate() const {
  const std::size_t d = dim();
  const std::size_t h = hidden();
  if (d == 0 || h == 0) throw InvalidConfig("classifier dimensions must be positive");
  if (w1.rows() != d || b1.size() != h || w2.rows() != h || w2.cols() != kNumClasses ||
      b2.size() != static_cast<std::size_t>(kNumClasses)) {
    throw InvalidConfig("classifier parameter shapes are inconsistent");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(embedding.data()) || !finite(w1.data()) || !finite(b1) || !finite(w2.data()) || !finite(b2))
    throw InvalidConfig("classifier parameters contain non-finite values");
}

ClassifierParams init_params(std::size_t vocab_rows, Dimensions dims, std::uint64_t seed) {
  auto gen = rng::stream(seed, kInitStream);
  const double scale = 0.5 / std::sqrt(static_cast<double>(dims.dim));
  auto fill = [&](Matrix& m) {
    for (auto& x : m.data()) x = (2.0 * rng::unit(gen) - 1.0) * scale;
  };
  ClassifierParams p;
  p.embedding = Matrix(vocab_rows, dims.dim);
  p.w1 = Matrix(dims.dim, dims.hidden);
  p.w2 = Matrix(dims.hidden, kNumClasses);
  fill(p.embedding);
  fill(p.w1);
  fill(p.w2);
  p.b1.assign(dims.hidden, 0.0);
  p.b2.assign(kNumClasses, 0.0);
  return p;
}

Prediction forward(const ClassifierParams& params, const TokenizedText& tt, QueryCounts* counts) {
  auto trace = run_forward(params, tt);
  if (counts) ++counts->forward;
  return trace.prediction;
}

double loss(const Prediction& pred, Sentiment target) {
  return -std::log(std::max(pred.probs[static_cast<int>(target)], kProbabilityFloor));
}

TokenGradients token_gradients(const ClassifierParams& params, const TokenizedText& tt, Sentiment target,
                               QueryCounts* counts) {
  auto trace = run_forward(params, tt);
  auto grads = run_backward(params, tt, trace, target, /*want_weights=*/false);
  if (counts) {
    ++counts->forward;
    ++counts->backward;
  }
  TokenGradients out;
  out.prediction = trace.prediction;
  out.loss = loss(trace.prediction, target);
  out.per_token = std::move(grads.per_token);
  return out;
}

ClassifierParams train(ClassifierParams params, const std::vector<LabeledText>& corpus, const TrainHyper& hyper) {
  if (corpus.empty()) throw EmptyCorpus("training corpus is empty");
  if (hyper.batch == 0) throw InvalidConfig("batch size must be >= 1");
  params.validate();
  const std::size_t d = params.dim();
  const std::size_t h = params.hidden();
  auto gen = rng::stream(hyper.seed, kShuffleStream);
  std::vector<std::size_t> order(corpus.size());

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng::shuffle(order, gen);

    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      const std::size_t stop = std::min(order.size(), start + hyper.batch);
      Matrix gw1(d, h);
      std::vector<double> gb1(h, 0.0);
      Matrix gw2(h, kNumClasses);
      std::vector<double> gb2(kNumClasses, 0.0);
      std::map<TokenId, std::vector<double>> gemb;  // ordered: deterministic update order
      std::size_t used = 0;
      for (std::size_t b = start; b < stop; ++b) {
        const auto& ex = corpus[order[b]];
        if (ex.text.tokens.empty()) continue;
        const auto trace = run_forward(params, ex.text);
        const auto g = run_backward(params, ex.text, trace, ex.label, /*want_weights=*/true);
        for (std::size_t k = 0; k < gw1.data().size(); ++k) gw1.data()[k] += g.w1.data()[k];
        for (std::size_t k = 0; k < h; ++k) gb1[k] += g.b1[k];
        for (std::size_t k = 0; k < gw2.data().size(); ++k) gw2.data()[k] += g.w2.data()[k];
        for (int k = 0; k < kNumClasses; ++k) gb2[k] += g.b2[k];
        for (std::size_t t = 0; t < ex.text.tokens.size(); ++t) {
          auto& row = gemb[ex.text.tokens[t]];
          if (row.empty()) row.assign(d, 0.0);
          for (std::size_t i = 0; i < d; ++i) row[i] += g.per_token[t][i];
        }
        ++used;
      }
      if (used == 0) continue;
      const double step = hyper.lr / static_cast<double>(used);
      for (std::size_t k = 0; k < gw1.data().size(); ++k) params.w1.data()[k] -= step * gw1.data()[k];
      for (std::size_t k = 0; k < h; ++k) params.b1[k] -= step * gb1[k];
      for (std::size_t k = 0; k < gw2.data().size(); ++k) params.w2.data()[k] -= step * gw2.data()[k];
      for (int k = 0; k < kNumClasses; ++k) params.b2[k] -= step * gb2[k];
      for (const auto& [id, row] : gemb) {
        auto e = params.embedding.row(id);
        for (std::size_t i = 0; i < d; ++i) e[i] -= step * row[i];
      }
    }
  }
  return params;
}

double accuracy(const ClassifierParams& params, const std::vector<LabeledText>& corpus) {
  if (corpus.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& ex : corpus) {
    if (!ex.text.tokens.empty() && forward(params, ex.text).label == ex.label) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

namespace {

constexpr const char* kCheckpointFormat = "tweetattack-classifier";
constexpr int kCheckpointVersion = 1;

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

Matrix matrix_from(const nlohmann::json& j, std::size_t rows, std::size_t cols, const char* name) {
  if (!j.is_array() || j.size() != rows) throw CheckpointError(std::string(name) + ": wrong row count");
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols) throw CheckpointError(std::string(name) + ": wrong column count");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c].get<double>();
  }
  return m;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xF];
    v >>= 4;
  }
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const ClassifierParams& params, const Vocabulary& vocab) {
  params.validate();
  if (params.embedding.rows() != vocab.size()) throw CheckpointError("embedding rows do not match vocabulary size");
  nlohmann::ordered_json j;
  j["format"] = kCheckpointFormat;
  j["version"] = kCheckpointVersion;
  j["dims"] = {{"embedding", params.dim()}, {"hidden", params.hidden()}, {"classes", kNumClasses}};
  j["vocab"] = {{"words", vocab.word_count()}, {"subwords", vocab.subword_count()}, {"hash", hex64(vocab.hash())}};
  j["embedding"] = matrix_json(params.embedding);
  j["w1"] = matrix_json(params.w1);
  j["b1"] = params.b1;
  j["w2"] = matrix_json(params.w2);
  j["b2"] = params.b2;
  std::ofstream out(path);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << j.dump() << '\n';
}

ClassifierParams load_checkpoint(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw CheckpointError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (j.at("format") != kCheckpointFormat) throw CheckpointError("not a classifier checkpoint");
    if (j.at("version").get<int>() != kCheckpointVersion) throw CheckpointError("unsupported checkpoint version");
    const auto d = j.at("dims").at("embedding").get<std::size_t>();
    const auto h = j.at("dims").at("hidden").get<std::size_t>();
    if (j.at("dims").at("classes").get<int>() != kNumClasses) throw CheckpointError("checkpoint is not 3-class");
    const auto& v = j.at("vocab");
    if (v.at("words").get<std::size_t>() != vocab.word_count() ||
        v.at("subwords").get<std::size_t>() != vocab.subword_count() ||
        v.at("hash").get<std::string>() != hex64(vocab.hash())) {
      throw CheckpointError("checkpoint was trained with a different vocabulary");
    }
    ClassifierParams p;
    p.embedding = matrix_from(j.at("embedding"), vocab.size(), d, "embedding");
    p.w1 = matrix_from(j.at("w1"), d, h, "w1");
    p.b1 = j.at("b1").get<std::vector<double>>();
    p.w2 = matrix_from(j.at("w2"), h, kNumClasses, "w2");
    p.b2 = j.at("b2").get<std::vector<double>>();
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  } catch (const InvalidConfig& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

Prediction Classifier::predict(std::string_view text, QueryCounts* counts) const {
  return predict(tokenize(text), counts);
}

Prediction Classifier::predict(const TokenizedText& tt, QueryCounts* counts) const {
  auto p = forward(params, tt, counts);
  ++meter.forward;
  return p;
}

TokenGradients Classifier::gradients(const TokenizedText& tt, Sentiment target, QueryCounts* counts) const {
  auto g = token_gradients(params, tt, target, counts);
  ++meter.forward;
  ++meter.backward;
  return g;
}

}  // namespace tweetattack::model
