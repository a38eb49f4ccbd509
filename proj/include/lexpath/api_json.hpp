#pragma once

#include <vector>

#include <json.hpp>

#include "lexpath/case_store.hpp"
#include "lexpath/retrieval.hpp"
#include "lexpath/schema.hpp"
#include "lexpath/session.hpp"

// JSON views of engine values, shared by the HTTP API, the CLI and the
// Python bindings.
namespace lexpath::api {

nlohmann::json to_json(const Target& target);
nlohmann::json to_json(const CaseRecord& record);
nlohmann::json to_json(const CaseExample& example);
nlohmann::json to_json(const MatchedCase& matched);
nlohmann::json to_json(const Session& session);
nlohmann::json to_json(const Prompt& prompt);
nlohmann::json to_json(const Analysis& analysis);
nlohmann::json to_json(const View& view);
nlohmann::json to_json(const Turn& turn);
nlohmann::json to_json(const ValidationReport& report);
nlohmann::json to_json(const PathRecord& path);
nlohmann::json to_json(const Suggestion& suggestion);

template <typename T>
nlohmann::json to_json(const std::vector<T>& items) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& item : items) out.push_back(to_json(item));
  return out;
}

}  // namespace lexpath::api
