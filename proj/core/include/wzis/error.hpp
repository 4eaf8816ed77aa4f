#pragma once

#include <stdexcept>
#include <string>

namespace wzis {

// Error families. Values double as process exit codes, so keep them stable.
enum class ErrorCode : int {
  kConfigError = 2,
  kIoError = 3,
  kNonStochasticRow = 10,
  kNegativeEntry = 11,
  kLengthMismatch = 12,
  kLengthNotDivisible = 13,
  kUnknownCodeword = 20,
  kParseFailure = 21,
  kHeaderMismatch = 22,
  kRankOverflow = 23,
  kBudgetExceeded = 30,
  kTableTooLarge = 31,
  kCapExceeded = 32,
  kCodebookTooLarge = 33,
  kEmptyGrid = 34,
  kInfeasibleDelta = 35,
  kInternal = 70,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace wzis
