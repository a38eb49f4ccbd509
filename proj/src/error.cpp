#include "lexpath/error.hpp"

namespace lexpath {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNoStart: return "NO_START";
    case ErrorCode::kUnknownAnswer: return "UNKNOWN_ANSWER";
    case ErrorCode::kWrongBlockKind: return "WRONG_BLOCK_KIND";
    case ErrorCode::kUnknownBlock: return "UNKNOWN_BLOCK";
    case ErrorCode::kDuplicateCase: return "DUPLICATE_CASE";
    case ErrorCode::kUnknownCase: return "UNKNOWN_CASE";
    case ErrorCode::kDuplicateSummary: return "DUPLICATE_SUMMARY";
    case ErrorCode::kInvalidSummary: return "INVALID_SUMMARY";
    case ErrorCode::kInvalidSchema: return "INVALID_SCHEMA";
    case ErrorCode::kSessionComplete: return "SESSION_COMPLETE";
    case ErrorCode::kSessionIncomplete: return "SESSION_INCOMPLETE";
    case ErrorCode::kBadIndex: return "BAD_INDEX";
    case ErrorCode::kEmptyText: return "EMPTY_TEXT";
    case ErrorCode::kEmptyCorpus: return "EMPTY_CORPUS";
    case ErrorCode::kEmptyQuery: return "EMPTY_QUERY";
    case ErrorCode::kBadArgument: return "BAD_ARGUMENT";
    case ErrorCode::kParseError: return "PARSE_ERROR";
    case ErrorCode::kUnsupportedVersion: return "UNSUPPORTED_VERSION";
    case ErrorCode::kBrokenReferences: return "BROKEN_REFERENCES";
    case ErrorCode::kInternal: return "INTERNAL";
  }
  return "INTERNAL";
}

}  // namespace lexpath
