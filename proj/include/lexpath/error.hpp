#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexpath {

// Machine-readable failure codes shared by the engine, the interchange layer
// and the HTTP API (error bodies carry code_name()).
enum class ErrorCode {
  kNoStart,
  kUnknownAnswer,
  kWrongBlockKind,
  kUnknownBlock,
  kDuplicateCase,
  kUnknownCase,
  kDuplicateSummary,
  kInvalidSummary,
  kInvalidSchema,
  kSessionComplete,
  kSessionIncomplete,
  kBadIndex,
  kEmptyText,
  kEmptyCorpus,
  kEmptyQuery,
  kBadArgument,
  kParseError,
  kUnsupportedVersion,
  kBrokenReferences,
  kInternal,
};

std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace lexpath
