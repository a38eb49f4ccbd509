#include "lexpath/service.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <utility>

#include "lexpath/api_json.hpp"
#include "lexpath/error.hpp"
#include "lexpath/text.hpp"

namespace lexpath::service {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 5> kEventNames = {{
    {EventKind::kPageView, "PAGE_VIEW"},
    {EventKind::kPathwaySelected, "PATHWAY_SELECTED"},
    {EventKind::kQuestionAnswered, "QUESTION_ANSWERED"},
    {EventKind::kAnalysisReached, "ANALYSIS_REACHED"},
    {EventKind::kFeedbackSubmitted, "FEEDBACK_SUBMITTED"},
}};

Response error_response(int status, std::string_view code, std::string message) {
  return {status, {{"error", {{"code", code}, {"message", std::move(message)}}}}};
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownAnswer:
    case ErrorCode::kWrongBlockKind:
      return 422;
    case ErrorCode::kSessionComplete:
      return 409;
    case ErrorCode::kSessionIncomplete:
      return 409;
    case ErrorCode::kBadIndex:
    case ErrorCode::kBadArgument:
    case ErrorCode::kParseError:
      return 400;
    case ErrorCode::kUnknownBlock:
    case ErrorCode::kUnknownCase:
      return 404;
    default:
      return 500;
  }
}

Response engine_error(const Error& e) { return error_response(http_status(e.code()), code_name(e.code()), e.what()); }

bool is_allowed_key(std::string_view key) {
  return std::find(kPayloadAllowList.begin(), kPayloadAllowList.end(), key) != kPayloadAllowList.end();
}

// Rough shape check: something@something.tld, anywhere in the value.
bool looks_like_email(std::string_view value) {
  const auto at = value.find('@');
  if (at == std::string_view::npos || at == 0) return false;
  const auto dot = value.find('.', at + 2);
  return dot != std::string_view::npos && dot + 1 < value.size();
}

std::string format_timestamp(std::chrono::system_clock::time_point tp) {
  using namespace std::chrono;
  const auto secs = floor<seconds>(tp);
  const auto day = floor<days>(secs);
  const hh_mm_ss hms{secs - day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02dZ", static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()), static_cast<int>(hms.seconds().count()));
  return format_date(year_month_day{day}) + buf;
}

std::optional<Date> timestamp_date(const std::string& ts) {
  if (ts.size() < 10) return std::nullopt;
  try {
    return parse_date(std::string_view(ts).substr(0, 10));
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::optional<std::string> string_field(const json& body, const char* key) {
  if (!body.is_object()) return std::nullopt;
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) return std::nullopt;
  return it->get<std::string>();
}

json feedback_to_json(const FeedbackRecord& r) {
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  return {{"session_id", r.session_id},
          {"question_ratings", r.question_ratings},
          {"issue_not_covered", r.issue_not_covered},
          {"survey",
           {{"understood_situation", opt(r.survey.understood_situation)},
            {"understood_next_steps", opt(r.survey.understood_next_steps)},
            {"would_recommend", opt(r.survey.would_recommend)}}}};
}

// Shared by the request decoder and the log replayer. Throws Error.
FeedbackRecord feedback_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kBadArgument, "feedback must be an object");
  FeedbackRecord r;
  for (const auto& [key, value] : j.items()) {
    if (key == "session_id") {
      if (!value.is_string()) throw Error(ErrorCode::kBadArgument, "session_id must be a string");
      r.session_id = value.get<std::string>();
    } else if (key == "question_ratings") {
      if (!value.is_object()) throw Error(ErrorCode::kBadArgument, "question_ratings must be an object");
      for (const auto& [block, rating] : value.items()) {
        if (!rating.is_number_integer() || rating.get<int>() < 1 || rating.get<int>() > 5) {
          throw Error(ErrorCode::kBadArgument, "ratings are integers from 1 to 5");
        }
        r.question_ratings[block] = rating.get<int>();
      }
    } else if (key == "issue_not_covered") {
      if (!value.is_string()) throw Error(ErrorCode::kBadArgument, "issue_not_covered must be a string");
      r.issue_not_covered = text::strip_control(value.get<std::string>());
    } else if (key == "survey") {
      if (!value.is_object()) throw Error(ErrorCode::kBadArgument, "survey must be an object");
      for (const auto& [item, answer] : value.items()) {
        std::optional<bool>* slot = nullptr;
        if (item == "understood_situation") slot = &r.survey.understood_situation;
        if (item == "understood_next_steps") slot = &r.survey.understood_next_steps;
        if (item == "would_recommend") slot = &r.survey.would_recommend;
        if (slot == nullptr) throw Error(ErrorCode::kBadArgument, "unknown survey item " + item);
        if (answer.is_null()) continue;
        if (!answer.is_boolean()) throw Error(ErrorCode::kBadArgument, "survey answers are booleans");
        *slot = answer.get<bool>();
      }
    } else {
      throw Error(ErrorCode::kBadArgument, "unknown feedback field " + key);
    }
  }
  return r;
}

void append_line(const std::string& path, const json& j) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kInternal, "cannot open " + path);
  out << j.dump() << '\n';
  out.flush();
}

template <typename F>
void for_each_line(const std::string& path, F&& fn) {
  if (path.empty()) return;
  std::ifstream in(path, std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      fn(json::parse(line));
    } catch (const std::exception&) {
      // A torn final write after a crash; the rest of the log is intact.
    }
  }
}

int rounded_percent(std::size_t part, std::size_t whole) {
  if (whole == 0) return 0;
  return static_cast<int>((200 * part + whole) / (2 * whole));
}

}  // namespace

std::string_view event_kind_name(EventKind kind) noexcept {
  for (const auto& [k, name] : kEventNames) {
    if (k == kind) return name;
  }
  return "PAGE_VIEW";
}

std::optional<EventKind> parse_event_kind(std::string_view text) noexcept {
  for (const auto& [k, name] : kEventNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

std::vector<int> apportion_percentages(const std::vector<std::size_t>& counts) {
  const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{0});
  std::vector<int> out(counts.size(), 0);
  if (total == 0) return out;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  int assigned = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i] = static_cast<int>(counts[i] * 100 / total);
    assigned += out[i];
    remainders.emplace_back(counts[i] * 100 % total, i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < 100; ++i, ++assigned) ++out[remainders[i].second];
  return out;
}

json to_json(const AnalyticsEvent& event) {
  return {{"timestamp", event.timestamp},
          {"session_id", event.session_id},
          {"event_kind", event_kind_name(event.kind)},
          {"payload", event.payload}};
}

AnalyticsEvent event_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kBadArgument, "event must be an object");
  AnalyticsEvent e;
  for (const auto& [key, value] : j.items()) {
    if (key == "timestamp" || key == "session_id") {
      if (!value.is_string()) throw Error(ErrorCode::kBadArgument, key + " must be a string");
      (key == "timestamp" ? e.timestamp : e.session_id) = value.get<std::string>();
    } else if (key == "event_kind") {
      const auto kind = value.is_string() ? parse_event_kind(value.get<std::string>()) : std::nullopt;
      if (!kind) throw Error(ErrorCode::kBadArgument, "unknown event_kind");
      e.kind = *kind;
    } else if (key == "payload") {
      if (!value.is_object()) throw Error(ErrorCode::kBadArgument, "payload must be an object");
      for (const auto& [pk, pv] : value.items()) {
        if (!is_allowed_key(pk)) throw Error(ErrorCode::kBadArgument, "payload key not allowed: " + pk);
        if (!pv.is_string()) throw Error(ErrorCode::kBadArgument, "payload values must be strings");
        const auto v = pv.get<std::string>();
        if (looks_like_email(v)) throw Error(ErrorCode::kBadArgument, "payload value looks like an email address");
        e.payload[pk] = v;
      }
    } else {
      throw Error(ErrorCode::kBadArgument, "unknown event field " + key);
    }
  }
  return e;
}

json to_json(const PathwayStats& stats) {
  json rows = json::array();
  for (const auto& r : stats.rows) {
    rows.push_back({{"pathway", r.pathway}, {"pathway_id", r.pathway_id}, {"count", r.count},
                    {"percentage", r.percentage}});
  }
  return {{"from", stats.from ? json(format_date(*stats.from)) : json(nullptr)},
          {"to", stats.to ? json(format_date(*stats.to)) : json(nullptr)},
          {"total", stats.total},
          {"rows", std::move(rows)},
          {"role_split", stats.role_split}};
}

Service::Service(Config config) : config_(std::move(config)) {
  if (config_.feedback_log_path.empty() && !config_.event_log_path.empty()) {
    config_.feedback_log_path = config_.event_log_path + ".feedback";
  }
  if (!config_.session_store_path.empty()) store_ = std::make_unique<SessionStore>(config_.session_store_path);
  replay_event_log();
  replay_feedback_log();
  if (!config_.bundle_path.empty()) reload_from_disk();
}

void Service::load_bundle(Bundle bundle) {
  auto next = std::make_shared<const Bundle>(std::move(bundle));
  std::lock_guard lock(bundle_mutex_);
  bundle_ = std::move(next);
}

void Service::reload_from_disk() { load_bundle(load_bundle_file(config_.bundle_path, config_.import_options)); }

bool Service::has_bundle() const { return snapshot() != nullptr; }

std::shared_ptr<const Bundle> Service::snapshot() const {
  std::lock_guard lock(bundle_mutex_);
  return bundle_;
}

std::string Service::now_timestamp() const { return format_timestamp(config_.clock()); }

void Service::append_event(AnalyticsEvent event) {
  if (event.timestamp.empty()) event.timestamp = now_timestamp();
  std::lock_guard lock(events_mutex_);
  append_line(config_.event_log_path, to_json(event));
  events_.push_back(std::move(event));
}

void Service::replay_event_log() {
  for_each_line(config_.event_log_path, [this](const json& j) { events_.push_back(event_from_json(j)); });
}

void Service::replay_feedback_log() {
  for_each_line(config_.feedback_log_path, [this](const json& j) { feedback_.push_back(feedback_from_json(j)); });
}

void Service::purge_expired() {
  const auto now = config_.clock();
  {
    std::lock_guard lock(sessions_mutex_);
    std::erase_if(sessions_, [&](const auto& item) {
      std::lock_guard entry_lock(item.second->mutex);
      return now - item.second->last_write > config_.session_ttl;
    });
  }
  if (store_) store_->erase_older_than(now - config_.session_ttl);
}

void Service::persist(const SessionEntry& entry) {
  if (store_) store_->put(entry.session, entry.last_write);
}

std::shared_ptr<Service::SessionEntry> Service::find_session(const std::string& id) const {
  {
    std::lock_guard lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it != sessions_.end()) return it->second;
  }
  return store_ ? restore_session(id) : nullptr;
}

// A session written by an earlier process is rebuilt by replaying its answers
// on the current bundle. It is dropped when it has expired or no longer
// replays, for instance after the schema was replaced.
std::shared_ptr<Service::SessionEntry> Service::restore_session(const std::string& id) const {
  const auto record = store_->get(id);
  if (!record) return nullptr;
  const auto bundle = snapshot();
  if (config_.clock() - record->last_write > config_.session_ttl) {
    store_->erase(id);
    return nullptr;
  }
  if (!bundle || bundle->schema->id != record->schema_id) return nullptr;
  auto entry = std::make_shared<SessionEntry>();
  try {
    entry->session = replay(*bundle->schema, bundle->store, record->answers, id).session;
  } catch (const Error&) {
    return nullptr;
  }
  entry->bundle = bundle;
  entry->last_write = record->last_write;
  std::lock_guard lock(sessions_mutex_);
  return sessions_.emplace(id, std::move(entry)).first->second;
}

std::size_t Service::session_count() const {
  std::lock_guard lock(sessions_mutex_);
  return sessions_.size();
}

Response Service::create_session() {
  const auto bundle = snapshot();
  if (!bundle) return error_response(503, "NO_BUNDLE", "no bundle is loaded");
  purge_expired();
  Turn turn;
  try {
    turn = start_session(*bundle->schema, bundle->store);
  } catch (const Error& e) {
    return engine_error(e);
  }
  auto entry = std::make_shared<SessionEntry>();
  entry->session = turn.session;
  entry->bundle = bundle;
  entry->last_write = config_.clock();
  persist(*entry);
  {
    std::lock_guard lock(sessions_mutex_);
    sessions_.emplace(turn.session.session_id, entry);
  }
  append_event({{}, turn.session.session_id, EventKind::kPageView, {{"block_id", bundle->schema->start}}});
  if (turn.session.status == SessionStatus::kComplete) {
    append_event({{}, turn.session.session_id, EventKind::kAnalysisReached, {}});
  }
  return {201, api::to_json(turn)};
}

Response Service::get_session(const std::string& session_id) const {
  const auto entry = find_session(session_id);
  if (!entry) return error_response(404, "UNKNOWN_SESSION", "no session " + session_id);
  std::lock_guard lock(entry->mutex);
  const auto& b = *entry->bundle;
  return {200, api::to_json(Turn{entry->session, current_view(entry->session, *b.schema, b.store)})};
}

Response Service::submit_answer(const std::string& session_id, const json& body) {
  const auto answer_id = string_field(body, "answer_id");
  if (!answer_id) return error_response(400, "BAD_ARGUMENT", "answer_id is required");
  const auto entry = find_session(session_id);
  if (!entry) return error_response(404, "UNKNOWN_SESSION", "no session " + session_id);
  Turn turn;
  std::string criterion;
  {
    std::lock_guard lock(entry->mutex);
    const auto& b = *entry->bundle;
    try {
      turn = answer(entry->session, *answer_id, *b.schema, b.store);
    } catch (const Error& e) {
      return engine_error(e);
    }
    criterion = turn.session.steps.back().criterion_id;
    entry->session = turn.session;
    entry->last_write = config_.clock();
    persist(*entry);
  }
  append_event({{}, session_id, EventKind::kQuestionAnswered, {{"block_id", criterion}, {"answer_id", *answer_id}}});
  if (turn.session.status == SessionStatus::kComplete) {
    append_event({{}, session_id, EventKind::kAnalysisReached, {}});
  }
  return {200, api::to_json(turn)};
}

Response Service::revise(const std::string& session_id, std::string_view step_index, const json& body) {
  std::size_t index = 0;
  const auto* end = step_index.data() + step_index.size();
  const auto [ptr, ec] = std::from_chars(step_index.data(), end, index);
  if (ec != std::errc{} || ptr != end || step_index.empty()) {
    return error_response(400, code_name(ErrorCode::kBadIndex), "step index must be a non-negative integer");
  }
  const auto answer_id = string_field(body, "answer_id");
  if (!answer_id) return error_response(400, "BAD_ARGUMENT", "answer_id is required");
  const auto entry = find_session(session_id);
  if (!entry) return error_response(404, "UNKNOWN_SESSION", "no session " + session_id);
  Turn turn;
  {
    std::lock_guard lock(entry->mutex);
    const auto& b = *entry->bundle;
    try {
      turn = revise_answer(entry->session, index, *answer_id, *b.schema, b.store);
    } catch (const Error& e) {
      return engine_error(e);
    }
    entry->session = turn.session;
    entry->last_write = config_.clock();
    persist(*entry);
  }
  append_event({{},
                session_id,
                EventKind::kQuestionAnswered,
                {{"block_id", turn.session.steps[index].criterion_id}, {"answer_id", *answer_id}}});
  if (turn.session.status == SessionStatus::kComplete) {
    append_event({{}, session_id, EventKind::kAnalysisReached, {}});
  }
  return {200, api::to_json(turn)};
}

Response Service::record_event(const json& body) {
  if (!body.is_object()) return error_response(422, "BAD_ARGUMENT", "event must be an object");
  if (body.contains("timestamp")) return error_response(422, "BAD_ARGUMENT", "timestamps are assigned by the server");
  AnalyticsEvent event;
  try {
    event = event_from_json(body);
  } catch (const Error& e) {
    return error_response(422, code_name(e.code()), e.what());
  }
  if (!body.contains("event_kind")) return error_response(422, "BAD_ARGUMENT", "event_kind is required");
  append_event(std::move(event));
  return {202, {{"accepted", true}}};
}

Response Service::submit_feedback(const json& body) {
  FeedbackRecord record;
  try {
    record = feedback_from_json(body);
  } catch (const Error& e) {
    return error_response(422, code_name(e.code()), e.what());
  }
  if (!find_session(record.session_id)) {
    return error_response(404, "UNKNOWN_SESSION", "no session " + record.session_id);
  }
  {
    std::lock_guard lock(feedback_mutex_);
    append_line(config_.feedback_log_path, feedback_to_json(record));
    feedback_.push_back(record);
  }
  append_event({{}, record.session_id, EventKind::kFeedbackSubmitted, {}});
  return {201, {{"accepted", true}}};
}

std::string Service::resolve_pathway_label(const AnalyticsEvent& event) const {
  const auto it = event.payload.find("pathway_id");
  if (it == event.payload.end()) return {};
  if (const auto bundle = snapshot()) {
    for (const auto& [id, block] : bundle->schema->blocks) {
      if (const auto* c = std::get_if<CriterionBlock>(&block)) {
        for (const auto& a : c->answers) {
          if (a.id == it->second) return a.label;
        }
      }
    }
  }
  return it->second;
}

PathwayStats Service::compute_pathway_stats(std::optional<Date> from, std::optional<Date> to,
                                            const std::optional<std::string>& role) const {
  PathwayStats stats;
  stats.from = from;
  stats.to = to;
  std::map<std::string, std::size_t> by_pathway;
  std::map<std::string, std::size_t> by_role;
  for (const auto& e : events()) {
    if (e.kind != EventKind::kPathwaySelected) continue;
    const auto day = timestamp_date(e.timestamp);
    if (!day) continue;
    if ((from && *day < *from) || (to && *day > *to)) continue;
    const auto r = e.payload.find("role");
    if (r != e.payload.end()) ++by_role[r->second];
    if (role && (r == e.payload.end() || r->second != *role)) continue;
    const auto p = e.payload.find("pathway_id");
    if (p == e.payload.end()) continue;
    ++by_pathway[p->second];
  }

  std::vector<std::size_t> counts;
  for (const auto& [id, n] : by_pathway) {
    AnalyticsEvent probe;
    probe.payload["pathway_id"] = id;
    stats.rows.push_back({resolve_pathway_label(probe), id, n, 0});
    counts.push_back(n);
    stats.total += n;
  }
  const auto pct = apportion_percentages(counts);
  for (std::size_t i = 0; i < pct.size(); ++i) stats.rows[i].percentage = pct[i];
  std::sort(stats.rows.begin(), stats.rows.end(), [](const StatsRow& a, const StatsRow& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.pathway < b.pathway;
  });

  std::vector<std::size_t> role_counts;
  for (const auto& [name, n] : by_role) role_counts.push_back(n);
  const auto role_pct = apportion_percentages(role_counts);
  std::size_t i = 0;
  for (const auto& [name, n] : by_role) stats.role_split[name] = role_pct[i++];
  return stats;
}

Response Service::pathway_stats(const std::optional<std::string>& from, const std::optional<std::string>& to,
                                const std::optional<std::string>& role) const {
  std::optional<Date> lo;
  std::optional<Date> hi;
  try {
    if (from) lo = parse_date(*from);
    if (to) hi = parse_date(*to);
  } catch (const Error& e) {
    return error_response(400, "BAD_RANGE", e.what());
  }
  if (lo && hi && *lo > *hi) return error_response(400, "BAD_RANGE", "from is after to");
  return {200, to_json(compute_pathway_stats(lo, hi, role))};
}

Response Service::feedback_stats() const {
  const auto records = feedback();
  json survey = json::object();
  const std::array<std::pair<const char*, std::optional<bool> SurveyAnswers::*>, 3> items = {{
      {"understood_situation", &SurveyAnswers::understood_situation},
      {"understood_next_steps", &SurveyAnswers::understood_next_steps},
      {"would_recommend", &SurveyAnswers::would_recommend},
  }};
  for (const auto& [name, member] : items) {
    std::size_t yes = 0;
    std::size_t answered = 0;
    for (const auto& r : records) {
      const auto& value = r.survey.*member;
      if (!value) continue;
      ++answered;
      if (*value) ++yes;
    }
    survey[name] = {{"yes", yes}, {"responses", answered}, {"yes_percentage", rounded_percent(yes, answered)}};
  }

  std::map<std::string, std::pair<long, std::size_t>> ratings;  // sum, count
  json issues = json::array();
  for (const auto& r : records) {
    for (const auto& [block, value] : r.question_ratings) {
      ratings[block].first += value;
      ++ratings[block].second;
    }
    if (!r.issue_not_covered.empty()) issues.push_back(r.issue_not_covered);
  }
  json question_ratings = json::object();
  for (const auto& [block, acc] : ratings) {
    question_ratings[block] = {{"count", acc.second},
                               {"mean", static_cast<double>(acc.first) / static_cast<double>(acc.second)}};
  }
  return {200,
          {{"responses", records.size()},
           {"survey", std::move(survey)},
           {"question_ratings", std::move(question_ratings)},
           {"issues_not_covered", std::move(issues)}}};
}

Response Service::usage_stats() const {
  std::size_t pages = 0;
  std::vector<std::string> sessions;
  std::map<std::string, std::size_t> kinds;
  for (const auto& e : events()) {
    ++kinds[std::string(event_kind_name(e.kind))];
    if (e.kind != EventKind::kPageView) continue;
    ++pages;
    if (!e.session_id.empty()) sessions.push_back(e.session_id);
  }
  std::sort(sessions.begin(), sessions.end());
  sessions.erase(std::unique(sessions.begin(), sessions.end()), sessions.end());
  return {200, {{"uses", sessions.size()}, {"page_views", pages}, {"events_by_kind", kinds}}};
}

Response Service::admin_reload(const std::string& token) {
  if (config_.admin_token.empty() || token != config_.admin_token) {
    return error_response(403, "FORBIDDEN", "admin token missing or wrong");
  }
  if (config_.bundle_path.empty()) return error_response(503, "NO_BUNDLE", "no bundle path configured");
  try {
    reload_from_disk();
  } catch (const Error& e) {
    return error_response(422, code_name(e.code()), e.what());
  }
  const auto bundle = snapshot();
  return {200, {{"schema_id", bundle->schema->id}, {"schema_version", bundle->schema->version}}};
}

std::vector<AnalyticsEvent> Service::events() const {
  std::lock_guard lock(events_mutex_);
  return events_;
}

std::vector<FeedbackRecord> Service::feedback() const {
  std::lock_guard lock(feedback_mutex_);
  return feedback_;
}

}  // namespace lexpath::service
