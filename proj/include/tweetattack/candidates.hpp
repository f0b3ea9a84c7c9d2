#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace tweetattack::candidates {

enum class PosTag { Noun, Verb, Adj, Adv, Other };
std::string_view to_string(PosTag tag);
std::optional<PosTag> parse_pos_tag(std::string_view s);

// Lexicon lookup, then suffix rules, then OTHER.
class PosTagger {
 public:
  PosTagger() = default;
  explicit PosTagger(std::unordered_map<std::string, PosTag> lexicon) : lexicon_(std::move(lexicon)) {}
  static PosTagger load(const std::filesystem::path& path);

  PosTag tag(std::string_view word) const;
  std::size_t size() const { return lexicon_.size(); }

 private:
  std::unordered_map<std::string, PosTag> lexicon_;
};

class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  explicit SynonymLexicon(std::unordered_map<std::string, std::vector<std::string>> rows) : rows_(std::move(rows)) {}
  // word<TAB>syn1,syn2,...
  static SynonymLexicon load(const std::filesystem::path& path);

  const std::vector<std::string>* find(std::string_view word) const;
  std::size_t size() const { return rows_.size(); }

 private:
  std::unordered_map<std::string, std::vector<std::string>> rows_;
};

std::vector<std::string> fetch_synonyms_local(std::string_view word, const SynonymLexicon& lexicon, std::size_t n);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// GET against a host. Throws NetworkError when no response arrives at all.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& host, const std::string& target) = 0;
};

std::shared_ptr<HttpTransport> make_https_transport(std::chrono::milliseconds timeout = std::chrono::seconds(10));

// Single lowercase alphabetic words from a Datamuse reply, in response order,
// deduplicated and cut to n. Throws MalformedResponse unless the body is a
// JSON array.
std::vector<std::string> parse_datamuse_response(std::string_view body, std::size_t n);

std::string datamuse_target(std::string_view word, std::size_t n);

struct DatamuseOptions {
  std::string host = "api.datamuse.com";
  std::chrono::milliseconds min_interval{100};
  int max_attempts = 3;
  std::chrono::milliseconds backoff{200};  // doubled after each failed attempt
};

// All requests go through one mutex so the rate limit holds across threads.
class DatamuseClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  DatamuseClient(std::shared_ptr<HttpTransport> transport, DatamuseOptions options = {}, Sleeper sleeper = {});

  std::vector<std::string> fetch(std::string_view word, std::size_t n);
  std::uint64_t requests() const { return requests_.load(); }

 private:
  std::shared_ptr<HttpTransport> transport_;
  DatamuseOptions options_;
  Sleeper sleep_;
  std::mutex mutex_;
  std::optional<std::chrono::steady_clock::time_point> last_request_;
  std::atomic<std::uint64_t> requests_{0};
};

// Append-only JSON lines {"word":..,"n":..,"candidates":[..]}. Later lines
// win over earlier ones for the same key.
class SynonymCache {
 public:
  explicit SynonymCache(std::filesystem::path path);

  std::optional<std::vector<std::string>> lookup(const std::string& word, std::size_t n) const;
  void store(const std::string& word, std::size_t n, const std::vector<std::string>& candidates);
  std::size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mutex_;
  std::map<std::pair<std::string, std::size_t>, std::vector<std::string>> entries_;
};

enum class SourceMode { Local, Datamuse, DatamuseWithCache };
std::string_view to_string(SourceMode mode);
// Accepts local | datamuse | cache (and the long name datamuse-with-cache).
std::optional<SourceMode> parse_source_mode(std::string_view s);

class SynonymSource {
 public:
  static SynonymSource local(SynonymLexicon lexicon, std::size_t top_n = 10);
  static SynonymSource datamuse(std::shared_ptr<DatamuseClient> client, std::size_t top_n = 10);
  static SynonymSource datamuse_with_cache(std::shared_ptr<DatamuseClient> client,
                                           std::shared_ptr<SynonymCache> cache, std::size_t top_n = 10);

  SourceMode mode() const { return mode_; }
  std::size_t top_n() const { return top_n_; }
  // Raw synonyms for a lowercase word, at most top_n.
  std::vector<std::string> fetch(const std::string& word) const;
  std::uint64_t network_requests() const { return client_ ? client_->requests() : 0; }

 private:
  SynonymSource(SourceMode mode, std::size_t top_n);

  SourceMode mode_;
  std::size_t top_n_;
  std::shared_ptr<const SynonymLexicon> lexicon_;
  std::shared_ptr<DatamuseClient> client_;
  std::shared_ptr<SynonymCache> cache_;
  // in-memory memo for plain datamuse mode
  std::shared_ptr<SynonymCache> memo_;
};

struct CandidateSet {
  std::string word;
  PosTag pos = PosTag::Other;
  std::vector<std::string> candidates;
};

// Same-POS candidates only (all of them when word_pos is OTHER), minus the
// word itself and repeats.
CandidateSet filter_by_pos(std::string_view word, PosTag word_pos, const std::vector<std::string>& cands,
                           const PosTagger& tagger);

// fetch -> POS filter -> drop filter words and anything that is not a single
// lowercase word.
CandidateSet build_candidates(std::string_view word, const SynonymSource& source, const PosTagger& tagger,
                              const std::unordered_set<std::string>& filter_words);

}  // namespace tweetattack::candidates
