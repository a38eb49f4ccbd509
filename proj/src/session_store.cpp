#include "lexpath/session_store.hpp"

#include <sqlite3.h>

#include <json.hpp>

#include "lexpath/error.hpp"

namespace lexpath::service {

namespace {

std::int64_t to_millis(SessionStore::TimePoint t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

SessionStore::TimePoint from_millis(std::int64_t ms) {
  return SessionStore::TimePoint(std::chrono::duration_cast<SessionStore::TimePoint::duration>(
      std::chrono::milliseconds(ms)));
}

// Prepared statement that finalizes itself.
class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) fail();
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, const std::string& v) {
    sqlite3_bind_text(stmt_, i, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Statement& bind(int i, std::int64_t v) {
    sqlite3_bind_int64(stmt_, i, v);
    return *this;
  }

  // True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc != SQLITE_DONE) fail();
    return false;
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }
  std::int64_t integer(int col) const { return sqlite3_column_int64(stmt_, col); }

 private:
  [[noreturn]] void fail() const {
    throw Error(ErrorCode::kParseError, std::string("session store: ") + sqlite3_errmsg(db_));
  }

  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

SessionStore::SessionStore(const std::string& path) {
  if (sqlite3_open_v2(path.c_str(), &db_, SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX,
                      nullptr) != SQLITE_OK) {
    const std::string why = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(ErrorCode::kParseError, "cannot open session store '" + path + "': " + why);
  }
  sqlite3_busy_timeout(db_, 2000);
  const char* ddl =
      "PRAGMA journal_mode=WAL;"
      "CREATE TABLE IF NOT EXISTS sessions ("
      "  session_id TEXT PRIMARY KEY,"
      "  schema_id TEXT NOT NULL,"
      "  schema_version TEXT NOT NULL,"
      "  answers TEXT NOT NULL,"
      "  last_write INTEGER NOT NULL);"
      "CREATE INDEX IF NOT EXISTS sessions_last_write ON sessions(last_write);";
  char* err = nullptr;
  if (sqlite3_exec(db_, ddl, nullptr, nullptr, &err) != SQLITE_OK) {
    const std::string why = err ? err : "unknown error";
    sqlite3_free(err);
    sqlite3_close(db_);
    throw Error(ErrorCode::kParseError, "cannot initialise session store '" + path + "': " + why);
  }
}

SessionStore::~SessionStore() { sqlite3_close(db_); }

void SessionStore::put(const Session& session, TimePoint last_write) {
  nlohmann::json answers = nlohmann::json::array();
  for (const auto& s : session.steps) answers.push_back(s.answer_id);
  std::lock_guard lock(mutex_);
  Statement st(db_,
               "INSERT INTO sessions(session_id, schema_id, schema_version, answers, last_write) "
               "VALUES(?1, ?2, ?3, ?4, ?5) "
               "ON CONFLICT(session_id) DO UPDATE SET schema_id=excluded.schema_id, "
               "schema_version=excluded.schema_version, answers=excluded.answers, last_write=excluded.last_write");
  st.bind(1, session.session_id)
      .bind(2, session.schema_id)
      .bind(3, session.schema_version)
      .bind(4, answers.dump())
      .bind(5, to_millis(last_write));
  st.step();
}

std::optional<SessionStore::Record> SessionStore::get(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT schema_id, schema_version, answers, last_write FROM sessions WHERE session_id = ?1");
  st.bind(1, session_id);
  if (!st.step()) return std::nullopt;
  Record r{session_id, st.text(0), st.text(1), {}, from_millis(st.integer(3))};
  const auto answers = nlohmann::json::parse(st.text(2), nullptr, false);
  if (!answers.is_array()) return std::nullopt;
  for (const auto& a : answers) {
    if (!a.is_string()) return std::nullopt;
    r.answers.push_back(a.get<std::string>());
  }
  return r;
}

void SessionStore::erase(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  Statement(db_, "DELETE FROM sessions WHERE session_id = ?1").bind(1, session_id).step();
}

std::size_t SessionStore::erase_older_than(TimePoint cutoff) {
  std::lock_guard lock(mutex_);
  Statement(db_, "DELETE FROM sessions WHERE last_write < ?1").bind(1, to_millis(cutoff)).step();
  return static_cast<std::size_t>(sqlite3_changes(db_));
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT COUNT(*) FROM sessions");
  st.step();
  return static_cast<std::size_t>(st.integer(0));
}

}  // namespace lexpath::service
