#include "lexpath/api_json.hpp"

namespace lexpath::api {

using nlohmann::json;

json to_json(const Target& target) { return target ? json(*target) : json(nullptr); }

json to_json(const CaseRecord& record) {
  json j = {{"case_id", record.case_id},
            {"citation", record.citation},
            {"decision_date", format_date(record.decision_date)},
            {"source_url", record.source_url ? json(*record.source_url) : json(nullptr)}};
  return j;
}

json to_json(const CaseExample& example) {
  return {{"case", to_json(example.record)},
          {"polarity", polarity_name(example.summary.polarity)},
          {"summary", example.summary.summary}};
}

json to_json(const MatchedCase& matched) {
  return {{"case", to_json(matched.record)},
          {"conclusion_id", matched.outcome.conclusion_id},
          {"outcome", matched.outcome.summary}};
}

json to_json(const Session& session) {
  json steps = json::array();
  for (const auto& s : session.steps) {
    steps.push_back({{"criterion_id", s.criterion_id}, {"answer_id", s.answer_id}});
  }
  return {{"session_id", session.session_id},
          {"schema_id", session.schema_id},
          {"schema_version", session.schema_version},
          {"steps", std::move(steps)},
          {"conclusion_stack", session.conclusion_stack},
          {"status", session.status == SessionStatus::kComplete ? "COMPLETE" : "IN_PROGRESS"},
          {"cursor", to_json(session.cursor)}};
}

json to_json(const Prompt& prompt) {
  json answers = json::array();
  for (const auto& a : prompt.answers) answers.push_back({{"id", a.id}, {"label", a.label}});
  return {{"criterion_id", prompt.criterion_id},
          {"title", prompt.title},
          {"description", prompt.description},
          {"answers", std::move(answers)},
          {"applied_examples", to_json(prompt.applied_examples)},
          {"not_applied_examples", to_json(prompt.not_applied_examples)}};
}

json to_json(const Analysis& analysis) {
  json conclusions = json::array();
  for (const auto& c : analysis.conclusions) {
    conclusions.push_back({{"conclusion_id", c.conclusion_id}, {"title", c.title}, {"explanation", c.explanation}});
  }
  json steps = json::array();
  for (const auto& s : analysis.next_steps) steps.push_back({{"title", s.title}, {"text", s.text}});
  json review = json::array();
  for (const auto& r : analysis.answers_review) {
    review.push_back({{"step_index", r.step_index},
                      {"criterion_id", r.criterion_id},
                      {"question", r.question},
                      {"answer_id", r.answer_id},
                      {"answer_label", r.answer_label}});
  }
  return {{"conclusions", std::move(conclusions)},
          {"matched_cases", to_json(analysis.matched_cases)},
          {"next_steps", std::move(steps)},
          {"answers_review", std::move(review)},
          {"past_cases_only", analysis.past_cases_only}};
}

json to_json(const View& view) {
  if (const auto* p = std::get_if<Prompt>(&view)) return {{"prompt", to_json(*p)}};
  return {{"analysis", to_json(std::get<Analysis>(view))}};
}

json to_json(const Turn& turn) {
  json j = to_json(turn.view);
  j["session"] = to_json(turn.session);
  return j;
}

json to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Finding>& findings) {
    json out = json::array();
    for (const auto& f : findings) {
      out.push_back({{"code", f.code}, {"block_id", f.block_id}, {"message", f.message}});
    }
    return out;
  };
  return {{"deployable", report.deployable()},
          {"errors", list(report.errors)},
          {"warnings", list(report.warnings)}};
}

json to_json(const PathRecord& path) {
  json answers = json::array();
  for (const auto& s : path.answers) {
    answers.push_back({{"criterion_id", s.criterion_id}, {"answer_id", s.answer_id}});
  }
  return {{"answers", std::move(answers)}, {"conclusion_stack", path.conclusion_stack}};
}

json to_json(const Suggestion& suggestion) {
  return {{"case_id", suggestion.case_id},
          {"best_sentence", suggestion.best_sentence},
          {"score", suggestion.score}};
}

}  // namespace lexpath::api
