#include "lexpath/session.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <set>

#include "lexpath/error.hpp"

namespace lexpath {

namespace {

// Walks from the cursor through conclusion blocks until a criterion block
// (returns a prompt) or a terminal edge (returns the analysis).
Turn advance(Session session, const Schema& schema, const CaseStore& store) {
  std::size_t hops = 0;
  while (session.cursor) {
    const Block* block = schema.find(*session.cursor);
    if (!block) throw Error(ErrorCode::kUnknownBlock, "unknown block '" + *session.cursor + "'");
    if (const auto* criterion = std::get_if<CriterionBlock>(block)) {
      Prompt prompt = make_prompt(*criterion, store);
      return Turn{std::move(session), std::move(prompt)};
    }
    if (++hops > schema.blocks.size()) {
      throw Error(ErrorCode::kInternal, "traversal exceeded the block count; schema has a cycle");
    }
    const auto& conclusion = std::get<ConclusionBlock>(*block);
    session.conclusion_stack.push_back(conclusion.id);
    session.cursor = conclusion.next();
  }
  session.status = SessionStatus::kComplete;
  Analysis analysis = build_analysis(session, schema, store);
  return Turn{std::move(session), std::move(analysis)};
}

}  // namespace

std::string new_session_id() {
  thread_local std::mt19937_64 rng{[] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }()};
  std::array<char, 33> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx%016llx",
                static_cast<unsigned long long>(rng()), static_cast<unsigned long long>(rng()));
  return std::string(buf.data(), 32);
}

Prompt make_prompt(const CriterionBlock& block, const CaseStore& store) {
  CriterionExamples examples = store.criterion_examples(block.id);
  return Prompt{block.id,
                block.title,
                block.description,
                block.answers,
                std::move(examples.applied),
                std::move(examples.not_applied)};
}

Turn start_session(const Schema& schema, const CaseStore& store, std::string session_id) {
  const ValidationReport report = validate_schema(schema);
  if (!report.deployable()) {
    const Finding& first = report.errors.front();
    throw Error(ErrorCode::kInvalidSchema, "schema has " + std::to_string(report.errors.size()) +
                                               " validation error(s), first: " + first.code +
                                               " at '" + first.block_id + "'");
  }
  Session session;
  session.session_id = session_id.empty() ? new_session_id() : std::move(session_id);
  session.schema_id = schema.id;
  session.schema_version = schema.version;
  session.cursor = schema.start;
  return advance(std::move(session), schema, store);
}

Turn answer(const Session& session, std::string_view answer_id, const Schema& schema,
            const CaseStore& store) {
  if (session.status == SessionStatus::kComplete || !session.cursor) {
    throw Error(ErrorCode::kSessionComplete, "session '" + session.session_id + "' is complete");
  }
  const CriterionBlock* block = schema.criterion(*session.cursor);
  if (!block) {
    throw Error(ErrorCode::kWrongBlockKind, "cursor '" + *session.cursor + "' is not a criterion block");
  }
  const Answer* chosen = nullptr;
  for (const auto& a : block->answers) {
    if (a.id == answer_id) chosen = &a;
  }
  if (!chosen) {
    throw Error(ErrorCode::kUnknownAnswer, "answer '" + std::string(answer_id) +
                                               "' does not belong to block '" + block->id + "'");
  }

  Session next = session;
  next.steps.push_back(Step{block->id, chosen->id});
  next.cursor = chosen->next;
  return advance(std::move(next), schema, store);
}

Turn replay(const Schema& schema, const CaseStore& store, const std::vector<std::string>& answers,
            std::string session_id) {
  Turn turn = start_session(schema, store, std::move(session_id));
  for (const auto& a : answers) turn = answer(turn.session, a, schema, store);
  return turn;
}

Turn revise_answer(const Session& session, std::size_t step_index, std::string_view new_answer_id,
                   const Schema& schema, const CaseStore& store) {
  if (step_index >= session.steps.size()) {
    throw Error(ErrorCode::kBadIndex, "step index " + std::to_string(step_index) +
                                          " is out of range for " +
                                          std::to_string(session.steps.size()) + " step(s)");
  }
  std::vector<std::string> prefix;
  prefix.reserve(step_index + 1);
  for (std::size_t i = 0; i < step_index; ++i) prefix.push_back(session.steps[i].answer_id);
  Turn turn = replay(schema, store, prefix, session.session_id);
  return answer(turn.session, new_answer_id, schema, store);
}

Analysis build_analysis(const Session& session, const Schema& schema, const CaseStore& store) {
  if (session.status != SessionStatus::kComplete) {
    throw Error(ErrorCode::kSessionIncomplete, "session '" + session.session_id + "' is not complete");
  }
  Analysis analysis;
  std::set<std::string> seen_steps;
  for (const auto& id : session.conclusion_stack) {
    const ConclusionBlock* c = schema.conclusion(id);
    if (!c) throw Error(ErrorCode::kUnknownBlock, "unknown conclusion '" + id + "'");
    analysis.conclusions.push_back(ConclusionInfo{c->id, c->title, c->explanation});
    for (const auto& step : c->next_steps) {
      if (seen_steps.insert(step.title).second) analysis.next_steps.push_back(step);
    }
  }
  analysis.matched_cases = store.outcomes_for(session.conclusion_stack);

  for (std::size_t i = 0; i < session.steps.size(); ++i) {
    const Step& step = session.steps[i];
    const CriterionBlock* c = schema.criterion(step.criterion_id);
    if (!c) throw Error(ErrorCode::kUnknownBlock, "unknown criterion '" + step.criterion_id + "'");
    std::string label;
    for (const auto& a : c->answers) {
      if (a.id == step.answer_id) label = a.label;
    }
    analysis.answers_review.push_back(ReviewedAnswer{i, c->id, c->title, step.answer_id, label});
  }
  return analysis;
}

View current_view(const Session& session, const Schema& schema, const CaseStore& store) {
  if (session.status == SessionStatus::kComplete) return build_analysis(session, schema, store);
  const CriterionBlock* block = session.cursor ? schema.criterion(*session.cursor) : nullptr;
  if (!block) throw Error(ErrorCode::kInternal, "in-progress session is not at a criterion block");
  return make_prompt(*block, store);
}

std::vector<PathRecord> enumerate_paths(const Schema& schema) {
  const ValidationReport report = validate_schema(schema);
  if (!report.deployable()) {
    throw Error(ErrorCode::kInvalidSchema, "cannot enumerate paths of a schema with errors");
  }

  std::vector<PathRecord> out;
  PathRecord current;

  // Recursion depth is bounded by the block count of an acyclic schema.
  auto walk = [&](auto&& self, Target at) -> void {
    std::size_t pushed = 0;
    while (at) {
      const Block& block = schema.blocks.at(*at);
      if (const auto* c = std::get_if<CriterionBlock>(&block)) {
        for (const auto& a : c->answers) {
          current.answers.push_back(Step{c->id, a.id});
          self(self, a.next);
          current.answers.pop_back();
        }
        current.conclusion_stack.resize(current.conclusion_stack.size() - pushed);
        return;
      }
      const auto& k = std::get<ConclusionBlock>(block);
      current.conclusion_stack.push_back(k.id);
      ++pushed;
      at = k.next();
    }
    out.push_back(current);
    current.conclusion_stack.resize(current.conclusion_stack.size() - pushed);
  };
  walk(walk, Target{schema.start});
  return out;
}

}  // namespace lexpath
