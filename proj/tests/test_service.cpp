#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include <unistd.h>

#include <gtest/gtest.h>
#include <httplib.h>

#include "lexpath/error.hpp"
#include "lexpath/fixtures.hpp"
#include "lexpath/service.hpp"

using namespace lexpath;
using namespace lexpath::service;
using nlohmann::json;
namespace ids = lexpath::fixtures::ids;
namespace fs = std::filesystem;

namespace {

Bundle lease_bundle() {
  auto schema = fixtures::lease_graph_schema();
  return Bundle{kFormatVersion, {"Lease graph", "en-CA", Date{std::chrono::year{2023}, std::chrono::month{1},
                                                              std::chrono::day{1}}},
                schema, CaseStore(schema), {}};
}

struct FakeClock {
  std::shared_ptr<std::chrono::system_clock::time_point> now =
      std::make_shared<std::chrono::system_clock::time_point>(std::chrono::sys_days{
          std::chrono::year{2022} / std::chrono::month{3} / std::chrono::day{1}});
  Clock fn() const {
    auto p = now;
    return [p] { return *p; };
  }
  void advance(std::chrono::seconds s) { *now += s; }
  void set_day(int y, unsigned m, unsigned d) {
    *now = std::chrono::sys_days{std::chrono::year{y} / std::chrono::month{m} / std::chrono::day{d}};
  }
};

fs::path temp_path(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lexpath_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto p = dir / name;
  fs::remove(p);
  return p;
}

std::string error_code(const Response& r) { return r.body.at("error").at("code").get<std::string>(); }

std::string create(Service& s) {
  const auto r = s.create_session();
  EXPECT_EQ(r.status, 201);
  return r.body["session"]["session_id"].get<std::string>();
}

json pathway_event(const std::string& pathway, const std::string& role) {
  return {{"session_id", "s"}, {"event_kind", "PATHWAY_SELECTED"},
          {"payload", {{"pathway_id", pathway}, {"role", role}}}};
}

}  // namespace

TEST(Percentages, SumToHundred) {
  EXPECT_EQ(apportion_percentages({52, 17, 10, 6, 5, 4, 3, 3}), (std::vector<int>{52, 17, 10, 6, 5, 4, 3, 3}));
  EXPECT_EQ(apportion_percentages({1, 1, 1}), (std::vector<int>{34, 33, 33}));
  EXPECT_EQ(apportion_percentages({}), std::vector<int>{});
  EXPECT_EQ(apportion_percentages({0, 0}), (std::vector<int>{0, 0}));
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> counts(1 + rng() % 12);
    for (auto& c : counts) c = rng() % 50;
    counts[0] += 1;
    const auto pct = apportion_percentages(counts);
    EXPECT_EQ(std::accumulate(pct.begin(), pct.end(), 0), 100);
  }
}

TEST(Sessions, NoBundleIs503) {
  Service s(Config{});
  const auto r = s.create_session();
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(error_code(r), "NO_BUNDLE");
}

TEST(Sessions, CreatePromptsFirstCriterion) {
  Service s(Config{});
  s.load_bundle(lease_bundle());
  const auto r = s.create_session();
  EXPECT_EQ(r.status, 201);
  EXPECT_EQ(r.body["prompt"]["criterion_id"], ids::kFrequentlyLate);
  EXPECT_EQ(r.body["session"]["status"], "IN_PROGRESS");
  ASSERT_EQ(s.events().size(), 1u);
  EXPECT_EQ(s.events()[0].kind, EventKind::kPageView);
}

TEST(Sessions, ParallelCreatesAreDistinct) {
  Service s(Config{});
  s.load_bundle(lease_bundle());
  std::vector<std::string> ids_seen(100);
  std::vector<std::thread> threads;
  for (int t = 0; t < 100; ++t) {
    threads.emplace_back([&, t] { ids_seen[t] = s.create_session().body["session"]["session_id"]; });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(std::set<std::string>(ids_seen.begin(), ids_seen.end()).size(), 100u);
  EXPECT_EQ(s.session_count(), 100u);
}

TEST(Sessions, DemoSequenceReachesTermination) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const auto id = create(s);
  Response r;
  for (const auto& a : fixtures::walkthrough_answers()) {
    r = s.submit_answer(id, {{"answer_id", a}});
    ASSERT_EQ(r.status, 200);
  }
  ASSERT_TRUE(r.body.contains("analysis"));
  EXPECT_EQ(r.body["analysis"]["conclusions"][0]["conclusion_id"], ids::kTerminateFrequentLateness);
  EXPECT_EQ(r.body["session"]["status"], "COMPLETE");

  const auto again = s.submit_answer(id, {{"answer_id", "yes"}});
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(error_code(again), "SESSION_COMPLETE");
}

TEST(Sessions, ErrorMappings) {
  Service s(Config{});
  s.load_bundle(lease_bundle());
  const auto id = create(s);
  EXPECT_EQ(s.submit_answer("nope", {{"answer_id", "yes"}}).status, 404);
  EXPECT_EQ(s.get_session("nope").status, 404);
  const auto bad = s.submit_answer(id, {{"answer_id", "maybe"}});
  EXPECT_EQ(bad.status, 422);
  EXPECT_EQ(error_code(bad), "UNKNOWN_ANSWER");
  EXPECT_EQ(s.submit_answer(id, json::object()).status, 400);
}

TEST(Sessions, FuzzedAnswersOnlyYield422) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const auto id = create(s);
  s.submit_answer(id, {{"answer_id", "landlord"}});
  const auto before = s.get_session(id).body;
  std::mt19937_64 rng(5);
  const std::string alphabet = "abcdefghijklmnopqrstuvwxyz_-0123456789";
  for (int i = 0; i < 300; ++i) {
    std::string junk;
    for (std::size_t n = rng() % 12; n > 0; --n) junk.push_back(alphabet[rng() % alphabet.size()]);
    if (junk.rfind("ll_", 0) == 0) continue;
    EXPECT_EQ(s.submit_answer(id, {{"answer_id", junk}}).status, 422) << junk;
  }
  EXPECT_EQ(s.get_session(id).body, before);
}

TEST(Revise, SwitchesConclusionAndMapsBadIndex) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const auto id = create(s);
  for (const auto& a : fixtures::walkthrough_answers()) s.submit_answer(id, {{"answer_id", a}});
  const auto r = s.revise(id, "4", {{"answer_id", "no"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["analysis"]["conclusions"][0]["conclusion_id"], ids::kNoTermination);
  EXPECT_EQ(r.body["session"]["conclusion_stack"], json::array({ids::kNoTermination}));

  EXPECT_EQ(s.revise(id, "9", {{"answer_id", "no"}}).status, 400);
  EXPECT_EQ(error_code(s.revise(id, "x", {{"answer_id", "no"}})), "BAD_INDEX");
  EXPECT_EQ(s.revise(id, "-1", {{"answer_id", "no"}}).status, 400);
  EXPECT_EQ(s.revise(id, "0", {{"answer_id", "nobody"}}).status, 422);
  EXPECT_EQ(s.revise("ghost", "0", {{"answer_id", "no"}}).status, 404);
}

TEST(Revise, MatchesFreshSession) {
  const auto bundle = fixtures::demo_bundle();
  Service s(Config{});
  s.load_bundle(bundle);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto id = create(s);
    Response r = s.get_session(id);
    std::vector<std::string> taken;
    while (r.body.contains("prompt")) {
      const auto& answers = r.body["prompt"]["answers"];
      taken.push_back(answers[rng() % answers.size()]["id"]);
      r = s.submit_answer(id, {{"answer_id", taken.back()}});
    }
    const std::size_t index = rng() % taken.size();
    const auto& criterion = *bundle.schema->criterion(r.body["session"]["steps"][index]["criterion_id"].get<std::string>());
    const std::string fresh = criterion.answers[rng() % criterion.answers.size()].id;
    const auto revised = s.revise(id, std::to_string(index), {{"answer_id", fresh}});

    const auto other = create(s);
    Response oracle;
    for (std::size_t i = 0; i < index; ++i) oracle = s.submit_answer(other, {{"answer_id", taken[i]}});
    oracle = s.submit_answer(other, {{"answer_id", fresh}});
    auto strip = [](json j) {
      j["session"].erase("session_id");
      return j;
    };
    EXPECT_EQ(strip(revised.body), strip(oracle.body));
  }
}

TEST(Events, AllowListEnforced) {
  Service s(Config{});
  EXPECT_EQ(s.record_event(pathway_event("t_other", "tenant")).status, 202);
  EXPECT_EQ(s.record_event({{"session_id", "s"}, {"event_kind", "PAGE_VIEW"},
                            {"payload", {{"email", "someone@example.org"}}}})
                .status,
            422);
  EXPECT_EQ(s.record_event({{"session_id", "s"}, {"event_kind", "PAGE_VIEW"},
                            {"payload", {{"referrer_class", "someone@example.org"}}}})
                .status,
            422);
  EXPECT_EQ(s.record_event({{"session_id", "s"}, {"event_kind", "MOUSE_MOVE"}}).status, 422);
  EXPECT_EQ(s.record_event({{"session_id", "s"}}).status, 422);
  EXPECT_EQ(s.record_event({{"session_id", "s"}, {"event_kind", "PAGE_VIEW"}, {"ip", "1.2.3.4"}}).status, 422);
  EXPECT_EQ(s.events().size(), 1u);
}

TEST(Events, ThousandEventsCounted) {
  Service s(Config{});
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(s.record_event({{"session_id", "s" + std::to_string(i % 37)}, {"event_kind", "PAGE_VIEW"},
                              {"payload", {{"referrer_class", "search"}}}})
                  .status,
              202);
  }
  const auto usage = s.usage_stats().body;
  EXPECT_EQ(usage["page_views"], 1000);
  EXPECT_EQ(usage["events_by_kind"]["PAGE_VIEW"], 1000);
  EXPECT_EQ(usage["uses"], 37);
}

TEST(Events, PersistedLogReplaysAndHoldsOnlyAllowedKeys) {
  const auto log = temp_path("events.jsonl");
  {
    Config c;
    c.event_log_path = log.string();
    Service s(c);
    s.load_bundle(fixtures::demo_bundle());
    const auto id = create(s);
    s.submit_answer(id, {{"answer_id", "tenant"}});
    s.record_event(pathway_event("t_work", "tenant"));
    s.record_event({{"session_id", id}, {"event_kind", "PAGE_VIEW"}, {"payload", {{"name", "Jane"}}}});
    s.submit_feedback({{"session_id", id}, {"issue_not_covered", "my neighbor is noisy"}});
  }
  std::ifstream in(log);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    const auto j = json::parse(line);
    for (const auto& [k, v] : j["payload"].items()) {
      EXPECT_NE(std::find(kPayloadAllowList.begin(), kPayloadAllowList.end(), k), kPayloadAllowList.end()) << k;
    }
  }
  EXPECT_EQ(lines, 4u);

  Config c;
  c.event_log_path = log.string();
  Service replayed(c);
  EXPECT_EQ(replayed.events().size(), 4u);
  ASSERT_EQ(replayed.feedback().size(), 1u);
  EXPECT_EQ(replayed.feedback()[0].issue_not_covered, "my neighbor is noisy");
}

TEST(Feedback, StoredAndAggregated) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const auto id = create(s);
  const auto r = s.submit_feedback({{"session_id", id},
                                    {"question_ratings", {{ids::kFrequentlyLate, 4}}},
                                    {"issue_not_covered", "my neighbor\x07 is noisy"},
                                    {"survey",
                                     {{"understood_situation", true},
                                      {"understood_next_steps", true},
                                      {"would_recommend", true}}}});
  EXPECT_EQ(r.status, 201);
  const auto stats = s.feedback_stats().body;
  EXPECT_EQ(stats["responses"], 1);
  EXPECT_EQ(stats["survey"]["would_recommend"]["yes_percentage"], 100);
  EXPECT_EQ(stats["issues_not_covered"][0], "my neighbor is noisy");
  EXPECT_EQ(stats["question_ratings"][ids::kFrequentlyLate]["mean"], 4.0);
  EXPECT_EQ(s.events().back().kind, EventKind::kFeedbackSubmitted);

  EXPECT_EQ(s.submit_feedback({{"session_id", "ghost"}}).status, 404);
  EXPECT_EQ(s.submit_feedback({{"session_id", id}, {"question_ratings", {{"x", 9}}}}).status, 422);
  EXPECT_EQ(s.submit_feedback({{"session_id", id}, {"email", "a@b.c"}}).status, 422);
}

TEST(Feedback, SurveyPercentagesFromThirtyFive) {
  Service s(Config{});
  s.load_bundle(lease_bundle());
  for (int i = 0; i < 35; ++i) {
    const auto id = create(s);
    ASSERT_EQ(s.submit_feedback({{"session_id", id},
                                 {"survey",
                                  {{"understood_situation", i < 22},
                                   {"understood_next_steps", i < 23},
                                   {"would_recommend", i < 31}}}})
                  .status,
              201);
  }
  const auto survey = s.feedback_stats().body["survey"];
  EXPECT_EQ(survey["understood_situation"]["yes_percentage"], 63);
  EXPECT_EQ(survey["understood_next_steps"]["yes_percentage"], 66);
  EXPECT_EQ(survey["would_recommend"]["yes_percentage"], 89);
}

TEST(PathwayStats, TenantTable) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const std::vector<std::pair<std::string, int>> counts{{"t_other", 52}, {"t_rent_raise", 17}, {"t_work", 10},
                                                        {"t_leave_early", 6}, {"t_terminate", 5}, {"t_sublet", 4},
                                                        {"t_repairs", 3}, {"t_deposit", 3}};
  for (const auto& [pathway, n] : counts) {
    for (int i = 0; i < n; ++i) ASSERT_EQ(s.record_event(pathway_event(pathway, "tenant")).status, 202);
  }
  const auto stats = s.compute_pathway_stats(std::nullopt, std::nullopt, std::string("tenant"));
  EXPECT_EQ(stats.total, 100u);
  ASSERT_GE(stats.rows.size(), 5u);
  const std::vector<std::pair<std::string, int>> expected{
      {"Other", 52},
      {"My landlord wants to raise my rent", 17},
      {"My landlord wants to conduct work on my apartment", 10},
      {"I would like to leave my apartment before the end of the lease", 6},
      {"I would like to terminate my lease", 5}};
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(stats.rows[i].pathway, expected[i].first);
    EXPECT_EQ(stats.rows[i].percentage, expected[i].second);
  }
  int sum = 0;
  for (const auto& r : stats.rows) sum += r.percentage;
  EXPECT_EQ(sum, 100);
}

TEST(PathwayStats, RoleSplit) {
  Service s(Config{});
  for (int i = 0; i < 65; ++i) s.record_event(pathway_event("tenant", "tenant"));
  for (int i = 0; i < 35; ++i) s.record_event(pathway_event("landlord", "landlord"));
  const auto stats = s.compute_pathway_stats(std::nullopt, std::nullopt, std::nullopt);
  EXPECT_EQ(stats.role_split.at("tenant"), 65);
  EXPECT_EQ(stats.role_split.at("landlord"), 35);
}

TEST(PathwayStats, WindowAndRange) {
  FakeClock clock;
  Config c;
  c.clock = clock.fn();
  Service s(c);
  clock.set_day(2022, 1, 10);
  s.record_event(pathway_event("t_other", "tenant"));
  clock.set_day(2022, 3, 10);
  s.record_event(pathway_event("t_work", "tenant"));
  s.record_event(pathway_event("t_work", "tenant"));

  const auto march = s.pathway_stats(std::string("2022-03-01"), std::string("2022-03-31"), std::nullopt);
  ASSERT_EQ(march.status, 200);
  ASSERT_EQ(march.body["rows"].size(), 1u);
  EXPECT_EQ(march.body["rows"][0]["pathway_id"], "t_work");
  EXPECT_EQ(march.body["rows"][0]["percentage"], 100);

  const auto empty = s.pathway_stats(std::string("2021-01-01"), std::string("2021-12-31"), std::nullopt);
  EXPECT_EQ(empty.status, 200);
  EXPECT_TRUE(empty.body["rows"].empty());

  EXPECT_EQ(s.pathway_stats(std::string("2022-03-31"), std::string("2022-03-01"), std::nullopt).status, 400);
  EXPECT_EQ(s.pathway_stats(std::string("March"), std::nullopt, std::nullopt).status, 400);
}

TEST(Reads, DoNotMutate) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  const auto id = create(s);
  s.record_event(pathway_event("t_other", "tenant"));
  const auto events = s.events().size();
  const auto session = s.get_session(id).body;
  for (int i = 0; i < 5; ++i) {
    s.get_session(id);
    s.pathway_stats(std::nullopt, std::nullopt, std::nullopt);
    s.feedback_stats();
    s.usage_stats();
  }
  EXPECT_EQ(s.events().size(), events);
  EXPECT_EQ(s.get_session(id).body, session);
}

TEST(Reload, TokenGuardAndSnapshotIsolation) {
  const auto path = temp_path("bundle.json");
  {
    std::ofstream out(path, std::ios::binary);
    out << export_bundle(lease_bundle());
  }
  Config c;
  c.bundle_path = path.string();
  c.admin_token = "secret";
  Service s(c);
  ASSERT_TRUE(s.has_bundle());
  const auto old_id = create(s);

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << export_bundle(fixtures::demo_bundle());
  }
  EXPECT_EQ(s.admin_reload("wrong").status, 403);
  EXPECT_EQ(s.admin_reload("").status, 403);
  const auto r = s.admin_reload("secret");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.body["schema_id"], "landlord-tenant-demo");

  // The earlier session keeps answering against its own snapshot.
  const auto old = s.submit_answer(old_id, {{"answer_id", "yes"}});
  EXPECT_EQ(old.status, 200);
  EXPECT_EQ(old.body["prompt"]["criterion_id"], ids::kSeriousPrejudice);
  EXPECT_EQ(s.create_session().body["prompt"]["criterion_id"], ids::kRole);

  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "{ broken";
  }
  EXPECT_EQ(s.admin_reload("secret").status, 422);
  EXPECT_EQ(s.create_session().body["prompt"]["criterion_id"], ids::kRole);
}

TEST(Sessions, ExpireAfterTtl) {
  FakeClock clock;
  Config c;
  c.clock = clock.fn();
  c.session_ttl = std::chrono::hours(24);
  Service s(c);
  s.load_bundle(lease_bundle());
  const auto id = create(s);
  clock.advance(std::chrono::hours(23));
  EXPECT_EQ(s.submit_answer(id, {{"answer_id", "yes"}}).status, 200);
  clock.advance(std::chrono::hours(23));
  create(s);
  EXPECT_EQ(s.get_session(id).status, 200);
  clock.advance(std::chrono::hours(2));
  create(s);
  EXPECT_EQ(s.get_session(id).status, 404);
}

TEST(Sessions, SurviveRestartWithStore) {
  Config c;
  c.session_store_path = temp_path("sessions.db").string();
  std::string id;
  json before;
  {
    Service s(c);
    s.load_bundle(fixtures::demo_bundle());
    id = create(s);
    for (const char* a : {"landlord", "ll_nonpayment", "no"}) ASSERT_EQ(s.submit_answer(id, {{"answer_id", a}}).status, 200);
    before = s.get_session(id).body;
  }
  Service s(c);
  s.load_bundle(fixtures::demo_bundle());
  EXPECT_EQ(s.session_count(), 0u);
  const auto after = s.get_session(id);
  ASSERT_EQ(after.status, 200);
  EXPECT_EQ(after.body, before);
  EXPECT_EQ(s.submit_answer(id, {{"answer_id", "yes"}}).status, 200);
  EXPECT_EQ(s.submit_answer(id, {{"answer_id", "yes"}}).body["session"]["status"], "COMPLETE");
  EXPECT_EQ(s.get_session("never-issued").status, 404);
}

TEST(Sessions, StoredSessionsExpire) {
  FakeClock clock;
  Config c;
  c.clock = clock.fn();
  c.session_store_path = temp_path("expiring.db").string();
  std::string id;
  {
    Service s(c);
    s.load_bundle(lease_bundle());
    id = create(s);
  }
  clock.advance(std::chrono::hours(25));
  Service s(c);
  s.load_bundle(lease_bundle());
  EXPECT_EQ(s.get_session(id).status, 404);
  SessionStore raw(c.session_store_path);
  EXPECT_EQ(raw.size(), 0u);
}

TEST(Sessions, StoredSessionsNeedTheSameSchema) {
  Config c;
  c.session_store_path = temp_path("schema.db").string();
  std::string id;
  {
    Service s(c);
    s.load_bundle(fixtures::demo_bundle());
    id = create(s);
  }
  Service s(c);
  s.load_bundle(lease_bundle());
  EXPECT_EQ(s.get_session(id).status, 404);
}

TEST(SessionStoreTable, PutGetEraseOlderThan) {
  SessionStore store(temp_path("table.db").string());
  const auto t0 = std::chrono::system_clock::time_point{} + std::chrono::hours(1000);
  Session a{"a", "demo", "1", {{"role", "landlord"}, {"landlord_issues", "ll_nonpayment"}}, {}, {}, {}};
  Session b{"b", "demo", "1", {}, {}, {}, {}};
  store.put(a, t0);
  store.put(b, t0 + std::chrono::hours(2));
  const auto got = store.get("a");
  ASSERT_TRUE(got);
  EXPECT_EQ(got->answers, (std::vector<std::string>{"landlord", "ll_nonpayment"}));
  EXPECT_EQ(got->last_write, t0);
  a.steps.pop_back();
  store.put(a, t0 + std::chrono::hours(3));
  EXPECT_EQ(store.get("a")->answers.size(), 1u);
  EXPECT_EQ(store.erase_older_than(t0 + std::chrono::hours(3)), 1u);
  EXPECT_FALSE(store.get("b"));
  EXPECT_EQ(store.size(), 1u);
  EXPECT_THROW(SessionStore("/nonexistent-dir/x/y.db"), Error);
}

TEST(Http, LoopbackRoundTrip) {
  Service s(Config{});
  s.load_bundle(fixtures::demo_bundle());
  httplib::Server server;
  mount_routes(server, s);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread worker([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto created = client.Post("/api/v1/sessions", "", "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  const auto body = json::parse(created->body);
  const std::string id = body["session"]["session_id"];

  auto answered = client.Post("/api/v1/sessions/" + id + "/answers", R"({"answer_id":"landlord"})", "application/json");
  ASSERT_TRUE(answered);
  EXPECT_EQ(answered->status, 200);
  EXPECT_EQ(json::parse(answered->body)["prompt"]["criterion_id"], ids::kLandlordIssues);

  auto bad = client.Post("/api/v1/sessions/" + id + "/answers", R"({"answer_id":"dragon"})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 422);
  EXPECT_EQ(json::parse(bad->body)["error"]["code"], "UNKNOWN_ANSWER");

  auto revised = client.Patch("/api/v1/sessions/" + id + "/answers/0", R"({"answer_id":"tenant"})", "application/json");
  ASSERT_TRUE(revised);
  EXPECT_EQ(revised->status, 200);

  auto malformed = client.Post("/api/v1/events", "{oops", "application/json");
  ASSERT_TRUE(malformed);
  EXPECT_EQ(malformed->status, 400);

  auto event = client.Post("/api/v1/events", pathway_event("t_other", "tenant").dump(), "application/json");
  ASSERT_TRUE(event);
  EXPECT_EQ(event->status, 202);

  auto stats = client.Get("/api/v1/stats/pathways?role=tenant");
  ASSERT_TRUE(stats);
  EXPECT_EQ(stats->status, 200);
  EXPECT_EQ(json::parse(stats->body)["rows"][0]["pathway"], "Other");

  auto forbidden = client.Post("/api/v1/admin/reload", "", "application/json");
  ASSERT_TRUE(forbidden);
  EXPECT_EQ(forbidden->status, 403);

  server.stop();
  worker.join();
}
