#pragma once

#include <chrono>
#include <cstddef>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "lexpath/session.hpp"

struct sqlite3;

namespace lexpath::service {

// Durable session table in a single SQLite file, keyed by session id. Only
// the answer sequence is stored; the engine state is rebuilt by replay.
class SessionStore {
 public:
  using TimePoint = std::chrono::system_clock::time_point;

  struct Record {
    std::string session_id;
    std::string schema_id;
    std::string schema_version;
    std::vector<std::string> answers;
    TimePoint last_write;
  };

  // Opens or creates the database. Throws Error(kParseError) when it cannot.
  explicit SessionStore(const std::string& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  void put(const Session& session, TimePoint last_write);
  std::optional<Record> get(const std::string& session_id) const;
  void erase(const std::string& session_id);
  // Drops rows last written before `cutoff`; returns how many went.
  std::size_t erase_older_than(TimePoint cutoff);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  sqlite3* db_ = nullptr;
};

}  // namespace lexpath::service
