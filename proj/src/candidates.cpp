#include "tweetattack/candidates.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "tweetattack/errors.hpp"
#include "tweetattack/text.hpp"

namespace tweetattack::candidates {

namespace {

constexpr std::pair<PosTag, std::string_view> kTagNames[] = {
    {PosTag::Noun, "NOUN"}, {PosTag::Verb, "VERB"}, {PosTag::Adj, "ADJ"}, {PosTag::Adv, "ADV"}, {PosTag::Other, "OTHER"},
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(PosTag tag) {
  for (const auto& [t, name] : kTagNames)
    if (t == tag) return name;
  return "OTHER";
}

std::optional<PosTag> parse_pos_tag(std::string_view s) {
  const std::string upper = [&] {
    std::string u(s);
    for (auto& c : u) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return u;
  }();
  for (const auto& [t, name] : kTagNames)
    if (name == upper) return t;
  return std::nullopt;
}

PosTagger PosTagger::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, PosTag> lexicon;
  for (const auto& [word, tag] : text::read_tsv(path)) {
    auto parsed = parse_pos_tag(text::trim(tag));
    if (!parsed) throw ResourceError(path.string() + ": unknown POS tag '" + tag + "' for '" + word + "'");
    // first row wins: it is the word's primary tag
    lexicon.emplace(text::to_lower(text::trim(word)), *parsed);
  }
  return PosTagger(std::move(lexicon));
}

PosTag PosTagger::tag(std::string_view word) const {
  const std::string w = text::to_lower(word);
  if (auto it = lexicon_.find(w); it != lexicon_.end()) return it->second;
  if (ends_with(w, "ly")) return PosTag::Adv;
  for (std::string_view s : {"ous", "ful", "ive", "able"})
    if (ends_with(w, s)) return PosTag::Adj;
  for (std::string_view s : {"tion", "ness", "ment"})
    if (ends_with(w, s)) return PosTag::Noun;
  for (std::string_view s : {"ize", "ate"})
    if (ends_with(w, s)) return PosTag::Verb;
  return PosTag::Other;
}

SynonymLexicon SynonymLexicon::load(const std::filesystem::path& path) {
  std::unordered_map<std::string, std::vector<std::string>> rows;
  for (const auto& [word, list] : text::read_tsv(path)) {
    std::vector<std::string> syns;
    std::size_t start = 0;
    while (start <= list.size()) {
      const auto comma = std::min(list.find(',', start), list.size());
      auto item = text::trim(std::string_view(list).substr(start, comma - start));
      if (!item.empty()) syns.push_back(text::to_lower(item));
      start = comma + 1;
    }
    auto& slot = rows[text::to_lower(text::trim(word))];
    slot.insert(slot.end(), syns.begin(), syns.end());
  }
  return SynonymLexicon(std::move(rows));
}

const std::vector<std::string>* SynonymLexicon::find(std::string_view word) const {
  auto it = rows_.find(std::string(word));
  return it == rows_.end() ? nullptr : &it->second;
}

std::vector<std::string> fetch_synonyms_local(std::string_view word, const SynonymLexicon& lexicon, std::size_t n) {
  const auto* row = lexicon.find(text::to_lower(word));
  if (!row) return {};
  return {row->begin(), row->begin() + static_cast<std::ptrdiff_t>(std::min(n, row->size()))};
}

std::vector<std::string> parse_datamuse_response(std::string_view body, std::size_t n) {
  nlohmann::json j = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.is_array()) throw MalformedResponse("Datamuse reply is not a JSON array");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (out.size() >= n) break;
    if (!item.is_object() || !item.contains("word") || !item["word"].is_string()) continue;
    const auto w = item["word"].get<std::string>();
    if (!text::is_lower_alpha_word(w)) continue;
    if (std::find(out.begin(), out.end(), w) != out.end()) continue;
    out.push_back(w);
  }
  return out;
}

std::string datamuse_target(std::string_view word, std::size_t n) {
  return "/words?rel_syn=" + percent_encode(word) + "&max=" + std::to_string(n);
}

DatamuseClient::DatamuseClient(std::shared_ptr<HttpTransport> transport, DatamuseOptions options, Sleeper sleeper)
    : transport_(std::move(transport)), options_(std::move(options)), sleep_(std::move(sleeper)) {
  if (!transport_) throw InvalidConfig("DatamuseClient needs a transport");
  if (options_.max_attempts < 1) throw InvalidConfig("max_attempts must be >= 1");
  if (!sleep_) sleep_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::vector<std::string> DatamuseClient::fetch(std::string_view word, std::size_t n) {
  const std::string target = datamuse_target(word, n);
  std::lock_guard lock(mutex_);
  auto backoff = options_.backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (last_request_) {
      const auto next = *last_request_ + options_.min_interval;
      const auto now = std::chrono::steady_clock::now();
      if (now < next) sleep_(std::chrono::ceil<std::chrono::milliseconds>(next - now));
    }
    last_request_ = std::chrono::steady_clock::now();
    ++requests_;
    try {
      const auto resp = transport_->get(options_.host, target);
      if (resp.status == 200) return parse_datamuse_response(resp.body, n);
      last_error = "HTTP " + std::to_string(resp.status);
    } catch (const NetworkError& e) {
      last_error = e.what();
    }
    spdlog::warn("datamuse {} attempt {}/{} failed: {}", target, attempt, options_.max_attempts, last_error);
    if (attempt < options_.max_attempts) {
      sleep_(backoff);
      backoff *= 2;
    }
  }
  throw NetworkError("Datamuse request " + target + " failed: " + last_error);
}

SynonymCache::SynonymCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      entries_[{j.at("word").get<std::string>(), j.at("n").get<std::size_t>()}] =
          j.at("candidates").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw ResourceError(path_.string() + ":" + std::to_string(lineno) + ": bad cache line: " + e.what());
    }
  }
}

std::optional<std::vector<std::string>> SynonymCache::lookup(const std::string& word, std::size_t n) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find({word, n});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void SynonymCache::store(const std::string& word, std::size_t n, const std::vector<std::string>& candidates) {
  std::lock_guard lock(mutex_);
  entries_[{word, n}] = candidates;
  if (path_.empty()) return;
  nlohmann::ordered_json j;
  j["word"] = word;
  j["n"] = n;
  j["candidates"] = candidates;
  std::ofstream out(path_, std::ios::app);
  if (!out) throw ResourceError("cannot append to cache " + path_.string());
  out << j.dump() << '\n';
}

std::size_t SynonymCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::string_view to_string(SourceMode mode) {
  switch (mode) {
    case SourceMode::Local: return "local";
    case SourceMode::Datamuse: return "datamuse";
    case SourceMode::DatamuseWithCache: return "cache";
  }
  return "local";
}

std::optional<SourceMode> parse_source_mode(std::string_view s) {
  if (s == "local") return SourceMode::Local;
  if (s == "datamuse") return SourceMode::Datamuse;
  if (s == "cache" || s == "datamuse-with-cache") return SourceMode::DatamuseWithCache;
  return std::nullopt;
}

SynonymSource::SynonymSource(SourceMode mode, std::size_t top_n) : mode_(mode), top_n_(top_n) {
  if (top_n_ < 1) throw InvalidConfig("top_n must be >= 1");
}

SynonymSource SynonymSource::local(SynonymLexicon lexicon, std::size_t top_n) {
  SynonymSource s(SourceMode::Local, top_n);
  s.lexicon_ = std::make_shared<const SynonymLexicon>(std::move(lexicon));
  return s;
}

SynonymSource SynonymSource::datamuse(std::shared_ptr<DatamuseClient> client, std::size_t top_n) {
  SynonymSource s(SourceMode::Datamuse, top_n);
  if (!client) throw InvalidConfig("datamuse mode needs a client");
  s.client_ = std::move(client);
  s.memo_ = std::make_shared<SynonymCache>(std::filesystem::path{});
  return s;
}

SynonymSource SynonymSource::datamuse_with_cache(std::shared_ptr<DatamuseClient> client,
                                                 std::shared_ptr<SynonymCache> cache, std::size_t top_n) {
  SynonymSource s(SourceMode::DatamuseWithCache, top_n);
  if (!cache) throw InvalidConfig("cache mode needs a cache");
  s.client_ = std::move(client);
  s.cache_ = std::move(cache);
  return s;
}

std::vector<std::string> SynonymSource::fetch(const std::string& word) const {
  if (mode_ == SourceMode::Local) return fetch_synonyms_local(word, *lexicon_, top_n_);
  auto& store = mode_ == SourceMode::Datamuse ? memo_ : cache_;
  if (auto hit = store->lookup(word, top_n_)) return *hit;
  if (!client_) throw NetworkError("cache miss for '" + word + "' and no network client configured");
  auto fetched = client_->fetch(word, top_n_);
  store->store(word, top_n_, fetched);
  return fetched;
}

CandidateSet filter_by_pos(std::string_view word, PosTag word_pos, const std::vector<std::string>& cands,
                           const PosTagger& tagger) {
  CandidateSet out{std::string(word), word_pos, {}};
  const std::string lower = text::to_lower(word);
  if (word_pos == PosTag::Other && !cands.empty())
    spdlog::debug("'{}' tagged OTHER: POS filter passes all {} candidates", lower, cands.size());
  for (const auto& c : cands) {
    if (text::to_lower(c) == lower) continue;
    if (std::find(out.candidates.begin(), out.candidates.end(), c) != out.candidates.end()) continue;
    if (word_pos != PosTag::Other && tagger.tag(c) != word_pos) continue;
    out.candidates.push_back(c);
  }
  return out;
}

CandidateSet build_candidates(std::string_view word, const SynonymSource& source, const PosTagger& tagger,
                              const std::unordered_set<std::string>& filter_words) {
  const std::string lower = text::to_lower(word);
  auto set = filter_by_pos(lower, tagger.tag(lower), source.fetch(lower), tagger);
  std::erase_if(set.candidates,
                [&](const std::string& c) { return !text::is_lower_alpha_word(c) || filter_words.count(c) > 0; });
  return set;
}

}  // namespace tweetattack::candidates
