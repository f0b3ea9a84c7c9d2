#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tweetattack::preprocess {

struct Stages {
  bool urls = true;
  bool slang = true;
  bool contractions = true;
  bool spelling = true;
};

// Lookup tables for tweet normalization. All keys are lowercase and free of
// whitespace; `dictionary` is ordered by descending corpus frequency, which is
// also the spelling tie-break order.
class PreprocessConfig {
 public:
  PreprocessConfig() = default;
  PreprocessConfig(std::unordered_map<std::string, std::string> slang,
                   std::unordered_map<std::string, std::string> contractions,
                   std::vector<std::string> dictionary, int max_edit_distance = 1);

  const std::unordered_map<std::string, std::string>& slang() const { return slang_; }
  const std::unordered_map<std::string, std::string>& contractions() const { return contractions_; }
  const std::vector<std::string>& dictionary() const { return dictionary_; }
  bool in_dictionary(std::string_view lower_word) const;
  // Position of the word in the dictionary file, or -1.
  long rank(std::string_view lower_word) const;

  int max_edit_distance() const { return max_edit_distance_; }
  void set_max_edit_distance(int d);
  // Alphabetic tokens shorter than this are never spell-corrected.
  std::size_t min_correction_length = 3;
  Stages stages;

  // Indices into dictionary() grouped by word length.
  const std::vector<std::vector<std::size_t>>& by_length() const { return by_length_; }

 private:
  void validate() const;

  std::unordered_map<std::string, std::string> slang_;
  std::unordered_map<std::string, std::string> contractions_;
  std::vector<std::string> dictionary_;
  std::unordered_map<std::string, std::size_t> rank_;
  std::vector<std::vector<std::size_t>> by_length_;
  int max_edit_distance_ = 1;
};

std::string strip_urls(std::string_view text);
std::string normalize_slang(std::string_view text, const PreprocessConfig& cfg);
std::string expand_contractions(std::string_view text, const PreprocessConfig& cfg);
std::string correct_spelling(std::string_view text, const PreprocessConfig& cfg);

// strip_urls -> normalize_slang -> expand_contractions -> correct_spelling,
// skipping stages disabled in cfg.stages.
std::string preprocess(std::string_view text, const PreprocessConfig& cfg);

// Levenshtein distance, giving up (returning limit + 1) once every cell in a
// row exceeds `limit`.
int bounded_edit_distance(std::string_view a, std::string_view b, int limit);

}  // namespace tweetattack::preprocess
