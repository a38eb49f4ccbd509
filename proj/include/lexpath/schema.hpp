#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lexpath {

using BlockId = std::string;

// An edge target; std::nullopt marks a terminal edge.
using Target = std::optional<BlockId>;

struct Answer {
  std::string id;
  std::string label;
  Target next;

  bool operator==(const Answer&) const = default;
};

// A substantive legal test phrased as a question for the end user.
struct CriterionBlock {
  BlockId id;
  std::string title;
  std::string description;  // sanitized HTML fragment
  std::vector<Answer> answers;

  bool operator==(const CriterionBlock&) const = default;
};

struct NextStep {
  std::string title;
  std::string text;  // sanitized HTML fragment

  bool operator==(const NextStep&) const = default;
};

// A legal conclusion, traversed without user interaction. `exits` holds the
// outgoing edges; a deployable schema has at most one.
struct ConclusionBlock {
  BlockId id;
  std::string title;
  std::string explanation;  // sanitized HTML fragment
  std::vector<NextStep> next_steps;
  std::vector<BlockId> exits;

  Target next() const { return exits.empty() ? Target{} : Target{exits.front()}; }

  bool operator==(const ConclusionBlock&) const = default;
};

using Block = std::variant<CriterionBlock, ConclusionBlock>;

enum class BlockKind { kCriterion, kConclusion };

BlockKind kind_of(const Block& block) noexcept;
const BlockId& id_of(const Block& block) noexcept;

struct Schema {
  std::string id;
  std::string version;
  std::string locale;
  std::map<BlockId, Block> blocks;
  BlockId start;

  const Block* find(std::string_view block_id) const;
  const CriterionBlock* criterion(std::string_view block_id) const;
  const ConclusionBlock* conclusion(std::string_view block_id) const;

  bool operator==(const Schema&) const = default;
};

// Every outgoing edge of a block, in answer order. Terminal edges are omitted.
std::vector<BlockId> successors(const Block& block);

struct Finding {
  std::string code;
  BlockId block_id;
  std::string message;

  bool operator==(const Finding&) const = default;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool deployable() const noexcept { return errors.empty(); }
  bool has_error(std::string_view code) const;
  bool has_warning(std::string_view code) const;

  bool operator==(const ValidationReport&) const = default;
};

namespace codes {
inline constexpr std::string_view kCycle = "CYCLE";
inline constexpr std::string_view kDanglingEdge = "DANGLING_EDGE";
inline constexpr std::string_view kNoStart = "NO_START";
inline constexpr std::string_view kBadConclusionFanout = "BAD_CONCLUSION_FANOUT";
inline constexpr std::string_view kEmptyText = "EMPTY_TEXT";
inline constexpr std::string_view kNoAnswers = "NO_ANSWERS";
inline constexpr std::string_view kDuplicateLabel = "DUPLICATE_LABEL";
inline constexpr std::string_view kDuplicateAnswerId = "DUPLICATE_ANSWER_ID";
inline constexpr std::string_view kUnreachable = "UNREACHABLE";
inline constexpr std::string_view kSingleAnswer = "SINGLE_ANSWER";
}  // namespace codes

// Checks the graph discipline of a schema. Findings are sorted by
// (code, block id, message) so the report is a pure function of the schema.
ValidationReport validate_schema(const Schema& schema);

// Blocks reachable from the start block. Dangling edges are ignored.
// Throws Error(kNoStart) when the start block does not exist.
std::set<BlockId> reachable_blocks(const Schema& schema);

// Successor of `at` given the chosen answer (criterion blocks) or no answer
// (conclusion blocks). Returns std::nullopt on a terminal edge.
Target next_block(const Schema& schema, std::string_view at,
                  const std::optional<std::string>& chosen);

}  // namespace lexpath
