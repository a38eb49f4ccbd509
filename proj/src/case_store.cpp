#include "lexpath/case_store.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <set>
#include <tuple>

#include "lexpath/error.hpp"

namespace lexpath {

namespace {

int parse_field(std::string_view text, std::size_t pos, std::size_t len) {
  int value = 0;
  const char* first = text.data() + pos;
  const char* last = first + len;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw Error(ErrorCode::kParseError, "malformed date '" + std::string(text) + "'");
  }
  return value;
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

void check_summary_text(const std::string& text) {
  if (blank(text)) throw Error(ErrorCode::kInvalidSummary, "summary text is empty");
  if (text.size() > kMaxSummaryLength) {
    throw Error(ErrorCode::kInvalidSummary,
                "summary exceeds " + std::to_string(kMaxSummaryLength) + " characters");
  }
}

template <typename Summary>
void insert_sorted(std::vector<Summary>& bucket, Summary summary) {
  auto it = std::lower_bound(bucket.begin(), bucket.end(), summary.case_id,
                             [](const Summary& s, const std::string& id) { return s.case_id < id; });
  if (it != bucket.end() && it->case_id == summary.case_id) {
    throw Error(ErrorCode::kDuplicateSummary,
                "case '" + summary.case_id + "' already has a summary on this block");
  }
  bucket.insert(it, std::move(summary));
}

}  // namespace

Date parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
    throw Error(ErrorCode::kParseError, "malformed date '" + std::string(text) + "'");
  }
  const Date date{std::chrono::year{parse_field(text, 0, 4)},
                  std::chrono::month{static_cast<unsigned>(parse_field(text, 5, 2))},
                  std::chrono::day{static_cast<unsigned>(parse_field(text, 8, 2))}};
  if (!date.ok()) throw Error(ErrorCode::kParseError, "invalid date '" + std::string(text) + "'");
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

std::string_view polarity_name(Polarity p) noexcept {
  return p == Polarity::kApplied ? "APPLIED" : "NOT_APPLIED";
}

Polarity parse_polarity(std::string_view text) {
  if (text == "APPLIED") return Polarity::kApplied;
  if (text == "NOT_APPLIED") return Polarity::kNotApplied;
  throw Error(ErrorCode::kParseError, "unknown polarity '" + std::string(text) + "'");
}

CaseStore::CaseStore(std::shared_ptr<const Schema> schema) : schema_(std::move(schema)) {
  if (!schema_) throw Error(ErrorCode::kBadArgument, "case store requires a schema");
}

void CaseStore::add_case(CaseRecord record) {
  if (record.case_id.empty()) throw Error(ErrorCode::kBadArgument, "case id is empty");
  if (!record.decision_date.ok()) {
    throw Error(ErrorCode::kBadArgument, "case '" + record.case_id + "' has an invalid date");
  }
  if (cases_.count(record.case_id)) {
    throw Error(ErrorCode::kDuplicateCase, "case '" + record.case_id + "' already exists");
  }
  const std::string key = record.case_id;
  cases_.emplace(key, std::move(record));
}

void CaseStore::link_criterion_summary(CriterionSummary summary) {
  if (!cases_.count(summary.case_id)) {
    throw Error(ErrorCode::kUnknownCase, "unknown case '" + summary.case_id + "'");
  }
  const Block* block = schema_->find(summary.criterion_id);
  if (!block) throw Error(ErrorCode::kUnknownBlock, "unknown block '" + summary.criterion_id + "'");
  if (kind_of(*block) != BlockKind::kCriterion) {
    throw Error(ErrorCode::kWrongBlockKind, "'" + summary.criterion_id + "' is not a criterion block");
  }
  check_summary_text(summary.summary);
  auto& bucket = criterion_summaries_[summary.criterion_id];
  insert_sorted(bucket, std::move(summary));
}

void CaseStore::link_outcome_summary(OutcomeSummary summary) {
  if (!cases_.count(summary.case_id)) {
    throw Error(ErrorCode::kUnknownCase, "unknown case '" + summary.case_id + "'");
  }
  const Block* block = schema_->find(summary.conclusion_id);
  if (!block) throw Error(ErrorCode::kUnknownBlock, "unknown block '" + summary.conclusion_id + "'");
  if (kind_of(*block) != BlockKind::kConclusion) {
    throw Error(ErrorCode::kWrongBlockKind,
                "'" + summary.conclusion_id + "' is not a conclusion block");
  }
  check_summary_text(summary.summary);
  auto& bucket = outcome_summaries_[summary.conclusion_id];
  insert_sorted(bucket, std::move(summary));
}

const CaseRecord* CaseStore::find_case(std::string_view case_id) const {
  auto it = cases_.find(std::string(case_id));
  return it == cases_.end() ? nullptr : &it->second;
}

CriterionExamples CaseStore::criterion_examples(std::string_view criterion_id,
                                                std::size_t cap) const {
  const Block* block = schema_->find(criterion_id);
  if (!block) {
    throw Error(ErrorCode::kUnknownBlock, "unknown block '" + std::string(criterion_id) + "'");
  }
  if (kind_of(*block) != BlockKind::kCriterion) {
    throw Error(ErrorCode::kWrongBlockKind,
                "'" + std::string(criterion_id) + "' is not a criterion block");
  }

  CriterionExamples out;
  auto it = criterion_summaries_.find(std::string(criterion_id));
  if (it == criterion_summaries_.end()) return out;

  for (const auto& s : it->second) {
    auto& list = s.polarity == Polarity::kApplied ? out.applied : out.not_applied;
    list.push_back(CaseExample{cases_.at(s.case_id), s});
  }
  auto newest_first = [](const CaseExample& a, const CaseExample& b) {
    if (a.record.decision_date != b.record.decision_date) {
      return a.record.decision_date > b.record.decision_date;
    }
    return a.record.case_id < b.record.case_id;
  };
  for (auto* list : {&out.applied, &out.not_applied}) {
    std::sort(list->begin(), list->end(), newest_first);
    if (list->size() > cap) list->resize(cap);
  }
  return out;
}

std::vector<MatchedCase> CaseStore::outcomes_for(const std::vector<BlockId>& conclusion_ids) const {
  for (const auto& id : conclusion_ids) {
    const Block* block = schema_->find(id);
    if (!block) throw Error(ErrorCode::kUnknownBlock, "unknown block '" + id + "'");
    if (kind_of(*block) != BlockKind::kConclusion) {
      throw Error(ErrorCode::kWrongBlockKind, "'" + id + "' is not a conclusion block");
    }
  }

  std::vector<MatchedCase> out;
  std::set<BlockId> done;
  for (const auto& id : conclusion_ids) {
    if (!done.insert(id).second) continue;
    auto it = outcome_summaries_.find(id);
    if (it == outcome_summaries_.end()) continue;
    const std::size_t first = out.size();
    for (const auto& s : it->second) out.push_back(MatchedCase{cases_.at(s.case_id), s});
    std::sort(out.begin() + static_cast<std::ptrdiff_t>(first), out.end(),
              [](const MatchedCase& a, const MatchedCase& b) {
                if (a.record.decision_date != b.record.decision_date) {
                  return a.record.decision_date > b.record.decision_date;
                }
                return a.record.case_id < b.record.case_id;
              });
  }
  return out;
}

bool CaseStore::operator==(const CaseStore& other) const {
  return cases_ == other.cases_ && criterion_summaries_ == other.criterion_summaries_ &&
         outcome_summaries_ == other.outcome_summaries_;
}

}  // namespace lexpath
