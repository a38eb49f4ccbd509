#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "lexpath/case_store.hpp"
#include "lexpath/interchange.hpp"
#include "lexpath/session.hpp"
#include "lexpath/session_store.hpp"

namespace httplib {
class Server;
}

namespace lexpath::service {

using Clock = std::function<std::chrono::system_clock::time_point()>;

enum class EventKind { kPageView, kPathwaySelected, kQuestionAnswered, kAnalysisReached, kFeedbackSubmitted };

std::string_view event_kind_name(EventKind kind) noexcept;
std::optional<EventKind> parse_event_kind(std::string_view text) noexcept;

// Payload keys an analytics event may carry. Anything else is refused at
// write time, so the persisted log never holds identifying fields.
inline constexpr std::array<std::string_view, 5> kPayloadAllowList = {
    "answer_id", "block_id", "pathway_id", "referrer_class", "role"};

struct AnalyticsEvent {
  std::string timestamp;  // UTC, YYYY-MM-DDTHH:MM:SSZ
  std::string session_id;
  EventKind kind = EventKind::kPageView;
  std::map<std::string, std::string> payload;

  bool operator==(const AnalyticsEvent&) const = default;
};

struct SurveyAnswers {
  std::optional<bool> understood_situation;
  std::optional<bool> understood_next_steps;
  std::optional<bool> would_recommend;

  bool operator==(const SurveyAnswers&) const = default;
};

struct FeedbackRecord {
  std::string session_id;
  std::map<std::string, int> question_ratings;  // criterion id -> 1..5
  std::string issue_not_covered;
  SurveyAnswers survey;

  bool operator==(const FeedbackRecord&) const = default;
};

struct StatsRow {
  std::string pathway;
  std::string pathway_id;
  std::size_t count = 0;
  int percentage = 0;

  bool operator==(const StatsRow&) const = default;
};

struct PathwayStats {
  std::optional<Date> from;
  std::optional<Date> to;
  std::size_t total = 0;
  std::vector<StatsRow> rows;             // percentage descending, then label
  std::map<std::string, int> role_split;  // role -> percentage

  bool operator==(const PathwayStats&) const = default;
};

// Whole-number percentages that sum to exactly 100 (largest remainder).
std::vector<int> apportion_percentages(const std::vector<std::size_t>& counts);

struct Config {
  std::string bundle_path;
  std::string admin_token;
  std::string event_log_path;
  std::string feedback_log_path;
  // SQLite file for durable sessions; empty keeps them in memory only.
  std::string session_store_path;
  std::chrono::seconds session_ttl{std::chrono::hours(24)};
  Clock clock = [] { return std::chrono::system_clock::now(); };
  ImportOptions import_options;
};

struct Response {
  int status = 200;
  nlohmann::json body;
};

// The HTTP-independent core of the API: every handler takes decoded request
// data and returns a status plus JSON body.
class Service {
 public:
  explicit Service(Config config);

  // Replaces the served snapshot; sessions keep the snapshot they started on.
  void load_bundle(Bundle bundle);
  // Re-reads the bundle from config.bundle_path.
  void reload_from_disk();
  bool has_bundle() const;
  std::shared_ptr<const Bundle> snapshot() const;

  Response create_session();
  Response get_session(const std::string& session_id) const;
  Response submit_answer(const std::string& session_id, const nlohmann::json& body);
  Response revise(const std::string& session_id, std::string_view step_index, const nlohmann::json& body);
  Response record_event(const nlohmann::json& body);
  Response submit_feedback(const nlohmann::json& body);
  Response pathway_stats(const std::optional<std::string>& from, const std::optional<std::string>& to,
                         const std::optional<std::string>& role) const;
  Response feedback_stats() const;
  Response usage_stats() const;
  Response admin_reload(const std::string& token);

  PathwayStats compute_pathway_stats(std::optional<Date> from, std::optional<Date> to,
                                     const std::optional<std::string>& role) const;
  std::vector<AnalyticsEvent> events() const;
  std::vector<FeedbackRecord> feedback() const;
  std::size_t session_count() const;

 private:
  struct SessionEntry {
    std::mutex mutex;
    Session session;
    std::shared_ptr<const Bundle> bundle;
    std::chrono::system_clock::time_point last_write;
  };

  std::shared_ptr<SessionEntry> find_session(const std::string& id) const;
  void append_event(AnalyticsEvent event);
  std::shared_ptr<SessionEntry> restore_session(const std::string& id) const;
  void persist(const SessionEntry& entry);
  void purge_expired();
  std::string now_timestamp() const;
  std::string resolve_pathway_label(const AnalyticsEvent& event) const;
  void replay_event_log();
  void replay_feedback_log();

  Config config_;

  mutable std::mutex bundle_mutex_;
  std::shared_ptr<const Bundle> bundle_;

  mutable std::mutex sessions_mutex_;
  mutable std::unordered_map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::unique_ptr<SessionStore> store_;

  mutable std::mutex events_mutex_;
  std::vector<AnalyticsEvent> events_;

  mutable std::mutex feedback_mutex_;
  std::vector<FeedbackRecord> feedback_;
};

nlohmann::json to_json(const AnalyticsEvent& event);
AnalyticsEvent event_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PathwayStats& stats);

// Registers the /api/v1 routes on an httplib server.
void mount_routes(httplib::Server& server, Service& service);

}  // namespace lexpath::service
