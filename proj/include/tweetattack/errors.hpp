#pragma once

#include <stdexcept>
#include <string>

namespace tweetattack {

// Base for every error the library raises. `kind()` is the stable name that
// ends up in result records and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define TWEETATTACK_ERROR(Name)                                   \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& what) : Error(#Name, what) {} \
  }

TWEETATTACK_ERROR(EmptyInput);
TWEETATTACK_ERROR(EmptyCorpus);
TWEETATTACK_ERROR(EmptyList);
TWEETATTACK_ERROR(AlignmentMismatch);
TWEETATTACK_ERROR(NetworkError);
TWEETATTACK_ERROR(MalformedResponse);
TWEETATTACK_ERROR(NotAttackable);
TWEETATTACK_ERROR(BudgetExceeded);
TWEETATTACK_ERROR(MissingColumn);
TWEETATTACK_ERROR(MalformedCsv);
TWEETATTACK_ERROR(CheckpointError);
TWEETATTACK_ERROR(ResourceError);
TWEETATTACK_ERROR(InvalidConfig);

#undef TWEETATTACK_ERROR

}  // namespace tweetattack
