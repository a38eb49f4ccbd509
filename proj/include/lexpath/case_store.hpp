#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexpath/schema.hpp"

namespace lexpath {

using Date = std::chrono::year_month_day;

// ISO 8601 calendar date (YYYY-MM-DD). Throws Error(kParseError) on malformed
// or impossible dates.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

inline constexpr std::size_t kMaxSummaryLength = 1000;
inline constexpr std::size_t kExamplesPerPolarity = 5;

struct CaseRecord {
  std::string case_id;
  std::string citation;
  Date decision_date;
  std::optional<std::string> source_url;
  std::optional<std::string> full_text_ref;

  bool operator==(const CaseRecord&) const = default;
};

enum class Polarity { kApplied, kNotApplied };

std::string_view polarity_name(Polarity p) noexcept;
Polarity parse_polarity(std::string_view text);

struct CriterionSummary {
  std::string case_id;
  BlockId criterion_id;
  Polarity polarity = Polarity::kApplied;
  std::string summary;

  bool operator==(const CriterionSummary&) const = default;
};

struct OutcomeSummary {
  std::string case_id;
  BlockId conclusion_id;
  std::string summary;

  bool operator==(const OutcomeSummary&) const = default;
};

struct CaseExample {
  CaseRecord record;
  CriterionSummary summary;

  bool operator==(const CaseExample&) const = default;
};

struct CriterionExamples {
  std::vector<CaseExample> applied;
  std::vector<CaseExample> not_applied;

  bool operator==(const CriterionExamples&) const = default;
};

struct MatchedCase {
  CaseRecord record;
  OutcomeSummary outcome;

  bool operator==(const MatchedCase&) const = default;
};

// Annotated prior cases bound to one schema. Summaries are kept sorted by
// case id within each block, and a case contributes at most one summary per
// block. The store is a value: copies share only the immutable schema.
class CaseStore {
 public:
  explicit CaseStore(std::shared_ptr<const Schema> schema);

  const Schema& schema() const noexcept { return *schema_; }
  const std::shared_ptr<const Schema>& schema_ptr() const noexcept { return schema_; }

  void add_case(CaseRecord record);
  void link_criterion_summary(CriterionSummary summary);
  void link_outcome_summary(OutcomeSummary summary);

  const CaseRecord* find_case(std::string_view case_id) const;
  std::size_t size() const noexcept { return cases_.size(); }

  const std::map<std::string, CaseRecord>& cases() const noexcept { return cases_; }
  const std::map<BlockId, std::vector<CriterionSummary>>& criterion_summaries() const noexcept {
    return criterion_summaries_;
  }
  const std::map<BlockId, std::vector<OutcomeSummary>>& outcome_summaries() const noexcept {
    return outcome_summaries_;
  }

  // Up to `cap` summaries per polarity, newest decision first, ties by case id.
  CriterionExamples criterion_examples(std::string_view criterion_id,
                                       std::size_t cap = kExamplesPerPolarity) const;

  // Outcome summaries attached to the given conclusions, grouped in query
  // order and newest first within a conclusion. Repeated (case, conclusion)
  // pairs appear once.
  std::vector<MatchedCase> outcomes_for(const std::vector<BlockId>& conclusion_ids) const;

  // Field-level equality on the annotations. The bound schemas are not compared.
  bool operator==(const CaseStore& other) const;

 private:
  std::shared_ptr<const Schema> schema_;
  std::map<std::string, CaseRecord> cases_;
  std::map<BlockId, std::vector<CriterionSummary>> criterion_summaries_;
  std::map<BlockId, std::vector<OutcomeSummary>> outcome_summaries_;
};

}  // namespace lexpath
