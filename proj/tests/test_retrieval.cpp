#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <unordered_map>

#include <gtest/gtest.h>

#include "lexpath/error.hpp"
#include "lexpath/fixtures.hpp"
#include "lexpath/retrieval.hpp"
#include "lexpath/text.hpp"

using namespace lexpath;

namespace {

template <typename F>
ErrorCode code_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

// Straight-line restatement of the default encoder, written without sharing
// any code with the library beyond text normalization.
std::vector<double> reference_embed(const std::string& sentence) {
  const std::string padded = " " + text::normalize(sentence) + " ";
  std::vector<std::string> chars;
  for (std::size_t i = 0; i < padded.size();) {
    const unsigned char c = static_cast<unsigned char>(padded[i]);
    const std::size_t len = c < 0x80 ? 1 : c < 0xE0 ? 2 : c < 0xF0 ? 3 : 4;
    chars.push_back(padded.substr(i, len));
    i += len;
  }
  std::unordered_map<std::string, double> counts;
  for (std::size_t n = 3; n <= 5; ++n) {
    for (std::size_t i = 0; i + n <= chars.size(); ++i) {
      std::string gram;
      for (std::size_t j = i; j < i + n; ++j) gram += chars[j];
      counts[gram] += 1.0;
    }
  }
  std::vector<double> v(256, 0.0);
  for (const auto& [gram, count] : counts) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : gram) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    std::uint64_t z = h ^ HashedNgramEncoder::kDefaultSeed;
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
    const double w = 1.0 + std::log(count);
    v[z % 256] += (z >> 63) ? -w : w;
  }
  double norm = 0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return v;
}

double plain_dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

std::vector<CorpusCase> tiny_corpus() {
  return {{"A", "Case A", "2020-01-01", {"The tenant was frequently late with the rent.", "The lease was terminated."}},
          {"B", "Case B", "2021-01-01", {"The landlord suffered serious prejudice.", ""}},
          {"C", "Case C", "2019-01-01", {"Repairs to the heating were ordered."}}};
}

}  // namespace

TEST(Embed, DeterministicAndNormalized) {
  const auto a = embed("Frequently late rent");
  const auto b = embed("Frequently late rent");
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.dims(), 256u);
  EXPECT_NEAR(cosine(a.values, a.values), 1.0, 1e-6);
  EXPECT_NEAR(std::sqrt(plain_dot(a.values, a.values)), 1.0, 1e-6);
}

TEST(Embed, AccentFoldingIsInvisible) {
  EXPECT_EQ(embed("prejudice"), embed("préjudice"));
  EXPECT_EQ(embed("PRÉJUDICE  sérieux"), embed("prejudice serieux"));
}

TEST(Embed, EmptyTextRejected) {
  EXPECT_EQ(code_of([] { embed(""); }), ErrorCode::kEmptyText);
  EXPECT_EQ(code_of([] { embed(" \t\n"); }), ErrorCode::kEmptyText);
}

TEST(Embed, MatchesReferenceImplementation) {
  auto corpus = fixtures::synthetic_corpus(5, 100, 10);
  std::vector<std::string> sentences;
  for (const auto& c : corpus) sentences.insert(sentences.end(), c.sentences.begin(), c.sentences.end());
  sentences.push_back("Le locataire a été en retard à répétition.");
  ASSERT_GE(sentences.size(), 1000u);

  std::vector<SentenceVector> ours;
  std::vector<std::vector<double>> theirs;
  for (const auto& s : sentences) {
    ours.push_back(embed(s));
    theirs.push_back(reference_embed(s));
  }
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (std::size_t d = 0; d < 256; ++d) ASSERT_NEAR(ours[i].values[d], theirs[i][d], 1e-12);
    const std::size_t j = (i * 7919 + 13) % sentences.size();
    ASSERT_NEAR(cosine(ours[i].values, ours[j].values), plain_dot(theirs[i], theirs[j]), 1e-9);
  }
}

TEST(BuildIndex, CountsAndSkipsBlanks) {
  const std::vector<CorpusCase> one{{"X", "x", "2020-01-01", {"First sentence here.", "Second one here.", "Third."}}};
  EXPECT_EQ(RetrievalIndex::build(one).size(), 3u);
  const auto index = RetrievalIndex::build(tiny_corpus());
  EXPECT_EQ(index.size(), 4u);
  EXPECT_EQ(index.case_count(), 3u);
  EXPECT_EQ(code_of([] { RetrievalIndex::build({}); }), ErrorCode::kEmptyCorpus);
}

TEST(BuildIndex, TenThousandSentencesAllPresent) {
  const auto corpus = fixtures::synthetic_corpus(1, 1000, 10);
  const auto index = RetrievalIndex::build(corpus);
  EXPECT_EQ(index.size(), 10000u);
  std::set<std::string> cases;
  for (const auto& e : index.entries()) cases.insert(e.case_id);
  EXPECT_EQ(cases.size(), 1000u);
}

TEST(SuggestCases, VerbatimQueryRanksFirst) {
  const auto index = RetrievalIndex::build(tiny_corpus());
  const auto s = index.suggest_cases("The landlord suffered serious prejudice.");
  ASSERT_FALSE(s.empty());
  EXPECT_EQ(s[0].case_id, "B");
  EXPECT_NEAR(s[0].score, 1.0, 1e-6);
  EXPECT_EQ(s[0].best_sentence, "The landlord suffered serious prejudice.");
}

TEST(SuggestCases, SaturatesAtCaseCount) {
  const auto index = RetrievalIndex::build(tiny_corpus());
  const auto s = index.suggest_cases("rent", 100);
  EXPECT_EQ(s.size(), 3u);
  std::set<std::string> ids;
  for (const auto& x : s) ids.insert(x.case_id);
  EXPECT_EQ(ids.size(), 3u);
}

TEST(SuggestCases, ArgumentErrors) {
  const auto index = RetrievalIndex::build(tiny_corpus());
  EXPECT_EQ(code_of([&] { index.suggest_cases("   "); }), ErrorCode::kEmptyQuery);
  EXPECT_EQ(code_of([&] { index.exact_topk(""); }), ErrorCode::kEmptyQuery);
  EXPECT_EQ(code_of([&] { index.suggest_cases("rent", 0); }), ErrorCode::kBadArgument);
}

TEST(ExactTopk, SingleCase) {
  const std::vector<CorpusCase> one{{"ONLY", "x", "2020-01-01", {"A sentence about rent."}}};
  const auto s = RetrievalIndex::build(one).exact_topk("rent", 1);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].case_id, "ONLY");
}

TEST(SuggestCases, RecallAndDominanceOnTwoThousandSentences) {
  const auto corpus = fixtures::synthetic_corpus(2, 400, 5);
  const auto index = RetrievalIndex::build(corpus);
  const auto queries = fixtures::synthetic_queries(2, 20);
  double recall = 0;
  for (const auto& q : queries) {
    const auto approx = index.suggest_cases(q, 100);
    const auto exact = index.exact_topk(q, 100);
    ASSERT_EQ(approx.size(), exact.size());
    std::set<std::string> truth;
    for (const auto& s : exact) truth.insert(s.case_id);
    std::size_t hit = 0;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < approx.size(); ++i) {
      hit += truth.count(approx[i].case_id);
      EXPECT_TRUE(seen.insert(approx[i].case_id).second);
      EXPECT_LE(approx[i].score, exact[i].score + 1e-12);
      EXPECT_GE(approx[i].score, -1.0 - 1e-9);
      EXPECT_LE(approx[i].score, 1.0 + 1e-9);
      if (i) {
        EXPECT_TRUE(approx[i - 1].score > approx[i].score ||
                    (approx[i - 1].score == approx[i].score && approx[i - 1].case_id < approx[i].case_id));
      }
    }
    recall += static_cast<double>(hit) / static_cast<double>(exact.size());
  }
  recall /= static_cast<double>(queries.size());
  EXPECT_GE(recall, 0.95);
}

TEST(SuggestCases, RepeatableQueries) {
  const auto index = RetrievalIndex::build(fixtures::synthetic_corpus(3, 200, 5));
  const auto a = index.suggest_cases("tenant frequently late", 50);
  index.suggest_cases("landlord repairs heating", 50);
  EXPECT_EQ(index.suggest_cases("tenant frequently late", 50), a);
}

TEST(BuildIndex, DeterministicPerSeed) {
  const auto corpus = fixtures::synthetic_corpus(4, 150, 4);
  const auto a = RetrievalIndex::build(corpus);
  const auto b = RetrievalIndex::build(corpus);
  for (const auto& q : fixtures::synthetic_queries(4, 5)) EXPECT_EQ(a.suggest_cases(q, 30), b.suggest_cases(q, 30));
}
