#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "lexpath/case_store.hpp"
#include "lexpath/error.hpp"
#include "lexpath/fixtures.hpp"

using namespace lexpath;
namespace ids = lexpath::fixtures::ids;
using std::chrono::year;
using std::chrono::month;
using std::chrono::day;

namespace {

Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

CaseRecord record(const std::string& id, Date date) { return {id, "Citation " + id, date, std::nullopt, std::nullopt}; }

template <typename F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(format_date(parse_date("2021-07-01")), "2021-07-01");
  EXPECT_EQ(code_of([] { parse_date("2021-02-30"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_date("2021-7-1"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_date("yesterday"); }), ErrorCode::kParseError);
}

TEST(CaseStore, AddCase) {
  CaseStore store(fixtures::lease_graph_schema());
  store.add_case(record("C1", ymd(2020, 1, 1)));
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(code_of([&] { store.add_case(record("C1", ymd(2021, 1, 1))); }), ErrorCode::kDuplicateCase);
  EXPECT_EQ(store.size(), 1u);
}

TEST(CaseStore, FiftyCasesRetrievable) {
  CaseStore store(fixtures::lease_graph_schema());
  std::set<std::string> added;
  for (int i = 0; i < 50; ++i) {
    const std::string id = "K" + std::to_string(1000 + i * 7);
    store.add_case(record(id, ymd(2010 + i % 10, 1 + i % 12, 1 + i % 28)));
    added.insert(id);
  }
  EXPECT_EQ(store.size(), 50u);
  std::set<std::string> found;
  for (const auto& id : added) {
    ASSERT_NE(store.find_case(id), nullptr);
    found.insert(store.find_case(id)->case_id);
  }
  EXPECT_EQ(found, added);
}

TEST(CaseStore, LinkCriterionSummaries) {
  CaseStore store(fixtures::lease_graph_schema());
  store.add_case(record("A", ymd(2019, 1, 1)));
  store.add_case(record("B", ymd(2018, 1, 1)));
  store.link_criterion_summary({"A", ids::kFrequentlyLate, Polarity::kApplied, "Late 7 times in 12 months."});
  store.link_criterion_summary({"B", ids::kFrequentlyLate, Polarity::kNotApplied, "Late 2 times in 3 months."});
  const auto ex = store.criterion_examples(ids::kFrequentlyLate);
  ASSERT_EQ(ex.applied.size(), 1u);
  ASSERT_EQ(ex.not_applied.size(), 1u);
  EXPECT_EQ(ex.applied[0].record.case_id, "A");
  EXPECT_EQ(ex.not_applied[0].summary.summary, "Late 2 times in 3 months.");

  EXPECT_EQ(code_of([&] {
              store.link_criterion_summary({"A", ids::kNoTermination, Polarity::kApplied, "x"});
            }),
            ErrorCode::kWrongBlockKind);
  EXPECT_EQ(code_of([&] {
              store.link_criterion_summary({"Z", ids::kFrequentlyLate, Polarity::kApplied, "x"});
            }),
            ErrorCode::kUnknownCase);
  EXPECT_EQ(code_of([&] { store.link_criterion_summary({"A", "ghost", Polarity::kApplied, "x"}); }),
            ErrorCode::kUnknownBlock);
  EXPECT_EQ(code_of([&] {
              store.link_criterion_summary({"A", ids::kFrequentlyLate, Polarity::kNotApplied, "second"});
            }),
            ErrorCode::kDuplicateSummary);
  EXPECT_EQ(code_of([&] {
              store.link_criterion_summary({"B", ids::kSeriousPrejudice, Polarity::kApplied, ""});
            }),
            ErrorCode::kInvalidSummary);
  EXPECT_EQ(code_of([&] {
              store.link_criterion_summary(
                  {"B", ids::kSeriousPrejudice, Polarity::kApplied, std::string(kMaxSummaryLength + 1, 'x')});
            }),
            ErrorCode::kInvalidSummary);
}

TEST(CaseStore, LinkOutcomeSummaries) {
  CaseStore store(fixtures::lease_graph_schema());
  store.add_case(record("A", ymd(2019, 1, 1)));
  store.add_case(record("B", ymd(2020, 1, 1)));
  store.link_outcome_summary({"A", ids::kTerminateFrequentLateness, "The lease was terminated."});
  store.link_outcome_summary({"B", ids::kTerminateFrequentLateness, "The judge ordered the tenant to pay their rent."});
  const auto matched = store.outcomes_for({ids::kTerminateFrequentLateness});
  ASSERT_EQ(matched.size(), 2u);
  EXPECT_EQ(matched[0].record.case_id, "B");
  EXPECT_EQ(matched[1].outcome.summary, "The lease was terminated.");
  EXPECT_EQ(code_of([&] { store.link_outcome_summary({"A", ids::kFrequentlyLate, "x"}); }),
            ErrorCode::kWrongBlockKind);
}

TEST(CaseStore, EmptyQueries) {
  CaseStore store(fixtures::lease_graph_schema());
  const auto ex = store.criterion_examples(ids::kSeriousPrejudice);
  EXPECT_TRUE(ex.applied.empty());
  EXPECT_TRUE(ex.not_applied.empty());
  EXPECT_TRUE(store.outcomes_for({}).empty());
  EXPECT_EQ(code_of([&] { store.criterion_examples("ghost"); }), ErrorCode::kUnknownBlock);
  EXPECT_EQ(code_of([&] { store.outcomes_for({"ghost"}); }), ErrorCode::kUnknownBlock);
}

TEST(CaseStore, CapKeepsNewestByFullSortPrefix) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    CaseStore store(fixtures::lease_graph_schema());
    std::vector<CaseExample> applied;
    std::vector<CaseExample> not_applied;
    const int n = 3 + static_cast<int>(rng() % 15);
    for (int i = 0; i < n; ++i) {
      const std::string id = "C" + std::to_string(rng() % 1000) + "_" + std::to_string(i);
      // Few distinct dates so ties are common.
      const auto rec = record(id, ymd(2015 + static_cast<int>(rng() % 3), 1 + rng() % 2, 1));
      store.add_case(rec);
      const auto pol = rng() % 2 ? Polarity::kApplied : Polarity::kNotApplied;
      CriterionSummary s{id, ids::kFrequentlyLate, pol, "summary " + id};
      store.link_criterion_summary(s);
      (pol == Polarity::kApplied ? applied : not_applied).push_back({rec, s});
    }
    auto expect = [](std::vector<CaseExample> all) {
      std::sort(all.begin(), all.end(), [](const CaseExample& a, const CaseExample& b) {
        if (a.record.decision_date != b.record.decision_date) return a.record.decision_date > b.record.decision_date;
        return a.record.case_id < b.record.case_id;
      });
      if (all.size() > 5) all.resize(5);
      return all;
    };
    const auto got = store.criterion_examples(ids::kFrequentlyLate);
    EXPECT_EQ(got.applied, expect(applied));
    EXPECT_EQ(got.not_applied, expect(not_applied));
  }
}

TEST(CaseStore, EightAppliedGivesFiveNewest) {
  CaseStore store(fixtures::lease_graph_schema());
  for (int i = 0; i < 8; ++i) {
    const std::string id = "C" + std::to_string(i);
    store.add_case(record(id, ymd(2010 + i, 6, 1)));
    store.link_criterion_summary({id, ids::kFrequentlyLate, Polarity::kApplied, "s"});
  }
  const auto got = store.criterion_examples(ids::kFrequentlyLate);
  ASSERT_EQ(got.applied.size(), 5u);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(got.applied[i].record.case_id, "C" + std::to_string(7 - i));
  EXPECT_TRUE(got.not_applied.empty());
}

TEST(CaseStore, OutcomesMatchLinearScan) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto bundle = fixtures::generate_synthetic(seed, 12, 40);
    const auto& store = bundle.store;
    std::vector<BlockId> conclusions;
    for (const auto& [id, block] : bundle.schema->blocks) {
      if (kind_of(block) == BlockKind::kConclusion) conclusions.push_back(id);
    }
    std::mt19937_64 rng(seed);
    std::shuffle(conclusions.begin(), conclusions.end(), rng);
    if (conclusions.size() > 3) conclusions.resize(3);

    std::vector<std::pair<std::string, std::string>> oracle;
    for (const auto& [block, list] : store.outcome_summaries()) {
      for (const auto& s : list) {
        if (std::find(conclusions.begin(), conclusions.end(), s.conclusion_id) != conclusions.end()) {
          oracle.emplace_back(s.case_id, s.conclusion_id);
        }
      }
    }
    std::vector<std::pair<std::string, std::string>> got;
    const auto matched = store.outcomes_for(conclusions);
    for (const auto& m : matched) got.emplace_back(m.record.case_id, m.outcome.conclusion_id);

    // Grouping by query order, newest first within a group.
    for (std::size_t i = 1; i < matched.size(); ++i) {
      const auto pos = [&](const BlockId& b) { return std::find(conclusions.begin(), conclusions.end(), b); };
      const auto a = pos(matched[i - 1].outcome.conclusion_id);
      const auto b = pos(matched[i].outcome.conclusion_id);
      ASSERT_LE(a, b);
      if (a == b) ASSERT_GE(matched[i - 1].record.decision_date, matched[i].record.decision_date);
    }
    std::sort(oracle.begin(), oracle.end());
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle) << "seed " << seed;
  }
}

TEST(CaseStore, OutcomesMonotoneAndDeduplicated) {
  const auto bundle = fixtures::generate_synthetic(5, 12, 40);
  std::vector<BlockId> conclusions;
  for (const auto& [id, block] : bundle.schema->blocks) {
    if (kind_of(block) == BlockKind::kConclusion) conclusions.push_back(id);
  }
  ASSERT_GE(conclusions.size(), 2u);
  auto pairs = [&](const std::vector<BlockId>& q) {
    std::set<std::pair<std::string, std::string>> out;
    for (const auto& m : bundle.store.outcomes_for(q)) out.emplace(m.record.case_id, m.outcome.conclusion_id);
    return out;
  };
  const std::vector<BlockId> x{conclusions[0]};
  const auto small = pairs(x);
  const auto big = pairs(conclusions);
  EXPECT_TRUE(std::includes(big.begin(), big.end(), small.begin(), small.end()));

  const std::vector<BlockId> repeated{conclusions[0], conclusions[0]};
  EXPECT_EQ(bundle.store.outcomes_for(repeated).size(), bundle.store.outcomes_for(x).size());
}

TEST(CaseStore, ReferentialIntegrityOnRandomStores) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto bundle = fixtures::generate_synthetic(seed, 20, 50);
    const auto& store = bundle.store;
    for (const auto& [block, list] : store.criterion_summaries()) {
      ASSERT_NE(bundle.schema->criterion(block), nullptr);
      for (const auto& s : list) {
        ASSERT_NE(store.find_case(s.case_id), nullptr);
        ASSERT_EQ(s.criterion_id, block);
      }
      const auto ex = store.criterion_examples(block);
      for (const auto& e : ex.applied) EXPECT_EQ(e.summary.polarity, Polarity::kApplied);
      for (const auto& e : ex.not_applied) EXPECT_EQ(e.summary.polarity, Polarity::kNotApplied);
    }
    for (const auto& [block, list] : store.outcome_summaries()) {
      ASSERT_NE(bundle.schema->conclusion(block), nullptr);
      for (const auto& s : list) ASSERT_NE(store.find_case(s.case_id), nullptr);
    }
  }
}
