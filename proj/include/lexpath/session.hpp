#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lexpath/case_store.hpp"
#include "lexpath/schema.hpp"

namespace lexpath {

struct Step {
  BlockId criterion_id;
  std::string answer_id;

  bool operator==(const Step&) const = default;
};

enum class SessionStatus { kInProgress, kComplete };

// One end user's traversal. `steps` is the user's hypothesis path; the
// conclusion stack and cursor are always the result of replaying it.
struct Session {
  std::string session_id;
  std::string schema_id;
  std::string schema_version;
  std::vector<Step> steps;
  std::vector<BlockId> conclusion_stack;
  SessionStatus status = SessionStatus::kInProgress;
  Target cursor;  // nullopt once the pathway reached a terminal edge

  bool operator==(const Session&) const = default;
};

// What a criterion screen shows: the question plus prior applications.
struct Prompt {
  BlockId criterion_id;
  std::string title;
  std::string description;
  std::vector<Answer> answers;
  std::vector<CaseExample> applied_examples;
  std::vector<CaseExample> not_applied_examples;

  bool operator==(const Prompt&) const = default;
};

struct ConclusionInfo {
  BlockId conclusion_id;
  std::string title;
  std::string explanation;

  bool operator==(const ConclusionInfo&) const = default;
};

struct ReviewedAnswer {
  std::size_t step_index = 0;
  BlockId criterion_id;
  std::string question;
  std::string answer_id;
  std::string answer_label;

  bool operator==(const ReviewedAnswer&) const = default;
};

struct Analysis {
  std::vector<ConclusionInfo> conclusions;
  std::vector<MatchedCase> matched_cases;
  std::vector<NextStep> next_steps;
  std::vector<ReviewedAnswer> answers_review;
  // Matched outcomes describe how past cases were decided, not a prediction.
  bool past_cases_only = true;

  bool operator==(const Analysis&) const = default;
};

using View = std::variant<Prompt, Analysis>;

struct Turn {
  Session session;
  View view;
};

// Starts a traversal at the schema's start block. Throws Error(kInvalidSchema)
// when the schema has validation errors. An empty `session_id` is replaced by
// a fresh random identifier.
Turn start_session(const Schema& schema, const CaseStore& store, std::string session_id = {});

// Applies one answer at the cursor and advances through conclusion blocks to
// the next criterion block or the end of the pathway. The input session is
// never modified; on error nothing changes.
Turn answer(const Session& session, std::string_view answer_id, const Schema& schema,
            const CaseStore& store);

// Replaces the answer at `step_index` and replays the traversal from scratch.
Turn revise_answer(const Session& session, std::size_t step_index, std::string_view new_answer_id,
                   const Schema& schema, const CaseStore& store);

// Replays an answer sequence from the start block.
Turn replay(const Schema& schema, const CaseStore& store, const std::vector<std::string>& answers,
            std::string session_id = {});

Analysis build_analysis(const Session& session, const Schema& schema, const CaseStore& store);

// The screen for a session's current state: a prompt while in progress,
// the analysis once complete.
View current_view(const Session& session, const Schema& schema, const CaseStore& store);

Prompt make_prompt(const CriterionBlock& block, const CaseStore& store);

struct PathRecord {
  std::vector<Step> answers;
  std::vector<BlockId> conclusion_stack;

  bool operator==(const PathRecord&) const = default;
};

// Every start-to-terminal pathway, in depth-first answer order.
std::vector<PathRecord> enumerate_paths(const Schema& schema);

std::string new_session_id();

}  // namespace lexpath
