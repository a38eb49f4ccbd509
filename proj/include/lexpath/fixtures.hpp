#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "lexpath/interchange.hpp"
#include "lexpath/retrieval.hpp"
#include "lexpath/schema.hpp"

namespace lexpath::fixtures {

// Block ids of the lease-termination pathway shared by the demo bundle and
// the four-block graph.
namespace ids {
inline constexpr const char* kRole = "role";
inline constexpr const char* kLandlordIssues = "landlord_issues";
inline constexpr const char* kTenantIssues = "tenant_issues";
inline constexpr const char* kLateThreeWeeks = "late_three_weeks";
inline constexpr const char* kFrequentlyLate = "frequently_late";
inline constexpr const char* kSeriousPrejudice = "serious_prejudice";
inline constexpr const char* kTerminateFrequentLateness = "terminate_frequent_lateness";
inline constexpr const char* kTerminateThreeWeeks = "terminate_three_weeks";
inline constexpr const char* kNoTermination = "no_termination";
inline constexpr const char* kOtherIssue = "other_issue";
inline constexpr const char* kNotInDemo = "not_in_demo";
}  // namespace ids

// Four blocks: frequently late? -> serious prejudice? -> terminate; both
// "No" answers lead to the shared no-termination conclusion.
std::shared_ptr<const Schema> lease_graph_schema();

// The landlord/tenant demonstration: role and issue triage, the three-weeks
// criterion, the four-block pathway, and annotated synthetic cases.
Bundle demo_bundle();

// Answer ids for the landlord walkthrough ending in lease termination.
std::vector<std::string> walkthrough_answers();

// Random acyclic schema whose blocks are all reachable and whose criterion
// blocks all have at least two answers, annotated with `n_cases` cases that
// each follow one random pathway. Deterministic per seed.
Bundle generate_synthetic(std::uint64_t seed, std::size_t n_blocks, std::size_t n_cases);

// Same generator with exact block-kind counts.
Bundle generate_with_kinds(std::uint64_t seed, std::size_t n_criteria, std::size_t n_conclusions,
                           std::size_t n_cases);

// Synthetic bundle at the size of the deployed landlord-tenant tool.
inline constexpr std::size_t kDeployedCriteria = 127;
inline constexpr std::size_t kDeployedConclusions = 146;
Bundle deployed_scale_bundle(std::uint64_t seed = 2021);

// Small hand-written corpus for the demo bundle's cases plus two unrelated ones.
std::vector<CorpusCase> demo_corpus();

// Synthetic case corpus of legal-register sentences.
std::vector<CorpusCase> synthetic_corpus(std::uint64_t seed, std::size_t n_cases,
                                         std::size_t sentences_per_case);

// Query strings drawn from the corpus vocabulary (not copies of sentences).
std::vector<std::string> synthetic_queries(std::uint64_t seed, std::size_t n);

}  // namespace lexpath::fixtures
