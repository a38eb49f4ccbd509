#include "lexpath/fixtures.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <random>

namespace lexpath::fixtures {

namespace {

using namespace std::chrono;

Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

std::vector<NextStep> termination_steps() {
  return {
      {"Try to reach an agreement",
       "<p>Talk to your tenant. Knowing how similar cases were decided can help you negotiate a "
       "payment plan.</p>"},
      {"Speak to a lawyer",
       "<p>A lawyer or a legal clinic can assess your file and represent you.</p>"},
      {"File an application at the housing tribunal",
       "<p>You can ask the <a href=\"https://www.tal.gouv.qc.ca\">Tribunal administratif du "
       "logement</a> to resiliate the lease. Bring proof of every late payment.</p>"},
  };
}

CriterionBlock frequently_late_block() {
  return CriterionBlock{
      ids::kFrequentlyLate,
      "Is the tenant frequently late in paying the rent?",
      "<p>The Civil Code does not define <em>frequently</em>. The tribunal looks at how many times "
      "the rent was paid late and over what period. Compare your situation with the decisions "
      "below.</p>",
      {Answer{"yes", "Yes", BlockId(ids::kSeriousPrejudice)},
       Answer{"no", "No", BlockId(ids::kNoTermination)}}};
}

CriterionBlock serious_prejudice_block() {
  return CriterionBlock{
      ids::kSeriousPrejudice,
      "Do the late payments cause you serious prejudice?",
      "<p>Serious prejudice is a concrete harm to the landlord, for example being unable to meet "
      "your own obligations because the rent arrives late.</p>",
      {Answer{"yes", "Yes", BlockId(ids::kTerminateFrequentLateness)},
       Answer{"no", "No", BlockId(ids::kNoTermination)}}};
}

ConclusionBlock terminate_frequent_block() {
  return ConclusionBlock{
      ids::kTerminateFrequentLateness,
      "The lease can be terminated due to frequent lateness of rent",
      "<p>Article 1971 of the <strong>Civil Code of Qu\xc3\xa9" "bec</strong> lets a landlord obtain "
      "the resiliation of the lease when the tenant is frequently late in paying the rent and the "
      "landlord suffers serious prejudice as a result. Your answers indicate that both conditions "
      "may be met.</p><p>Under article 1973, the tribunal may instead order the tenant to pay on "
      "time.</p>",
      termination_steps(),
      {}};
}

ConclusionBlock no_termination_block() {
  return ConclusionBlock{
      ids::kNoTermination,
      "The lease probably cannot be terminated under article 1971",
      "<p>Resiliation for late payment requires either rent more than three weeks late, or "
      "frequent lateness that causes serious prejudice. Based on your answers, these conditions "
      "may not be met.</p>",
      {{"Ask the tribunal to order timely payment",
        "<p>Under article 1973 the tribunal can order the tenant to pay the rent on the due "
        "date.</p>"},
       {"Speak to a lawyer",
        "<p>A lawyer or a legal clinic can assess your file and represent you.</p>"}},
      {}};
}

ConclusionBlock terminate_three_weeks_block() {
  return ConclusionBlock{
      ids::kTerminateThreeWeeks,
      "The lease can be terminated because the rent is more than three weeks late",
      "<p>Article 1971 of the <strong>Civil Code of Qu\xc3\xa9" "bec</strong> lets a landlord obtain "
      "the resiliation of the lease when the tenant is more than three weeks late in paying the "
      "rent.</p>",
      termination_steps(),
      {}};
}

void put(Schema& schema, Block block) {
  const BlockId id = id_of(block);
  schema.blocks.emplace(id, std::move(block));
}

// --- random generation ------------------------------------------------------

std::string pad_id(char prefix, std::size_t i, std::size_t n) {
  const int width = n <= 10 ? 1 : n <= 100 ? 2 : n <= 1000 ? 3 : 6;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

constexpr std::array<const char*, 24> kWords = {
    "lease",  "tenant",  "landlord", "rent",     "payment", "notice",  "repairs",  "deposit",
    "damage", "tribunal", "judge",   "month",    "late",    "serious", "prejudice", "dwelling",
    "work",   "increase", "claim",   "evidence", "agreement", "occupancy", "heating", "noise"};

std::string phrase(std::mt19937_64& rng, std::size_t words) {
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out.push_back(' ');
    out += kWords[rng() % kWords.size()];
  }
  return out;
}

Schema random_schema(std::mt19937_64& rng, std::vector<BlockKind> kinds) {
  const std::size_t n = kinds.size();
  Schema schema;
  schema.id = "synthetic";
  schema.version = "1.0.0";
  schema.locale = "en-CA";

  std::vector<BlockId> names(n);
  for (std::size_t i = 0; i < n; ++i) names[i] = pad_id('B', i, n);
  schema.start = names[0];

  // slots[i] holds one entry per outgoing edge; nullopt until assigned.
  std::vector<std::vector<Target>> slots(n);
  std::vector<std::vector<bool>> used(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = kinds[i] == BlockKind::kCriterion ? 2 + rng() % 2 : 1;
    slots[i].assign(count, std::nullopt);
    used[i].assign(count, false);
  }

  // Spanning tree: every block j > 0 gets a parent among blocks 0..j-1.
  for (std::size_t j = 1; j < n; ++j) {
    std::vector<std::pair<std::size_t, std::size_t>> free;
    for (std::size_t i = 0; i < j; ++i) {
      for (std::size_t s = 0; s < slots[i].size(); ++s) {
        if (!used[i][s]) free.emplace_back(i, s);
      }
    }
    if (free.empty()) {
      std::vector<std::size_t> criteria;
      for (std::size_t i = 0; i < j; ++i) {
        if (kinds[i] == BlockKind::kCriterion) criteria.push_back(i);
      }
      const std::size_t i = criteria[rng() % criteria.size()];
      slots[i].emplace_back(std::nullopt);
      used[i].push_back(false);
      free.emplace_back(i, slots[i].size() - 1);
    }
    const auto [i, s] = free[rng() % free.size()];
    slots[i][s] = names[j];
    used[i][s] = true;
  }

  // Remaining slots point forward or terminate.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < slots[i].size(); ++s) {
      if (used[i][s]) continue;
      const bool terminal = i + 1 == n || rng() % 100 < 35;
      if (!terminal) slots[i][s] = names[i + 1 + rng() % (n - i - 1)];
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (kinds[i] == BlockKind::kCriterion) {
      CriterionBlock c{names[i], "Does the " + phrase(rng, 3) + " apply?",
                       "<p>Explanation of " + phrase(rng, 4) + ".</p>", {}};
      for (std::size_t s = 0; s < slots[i].size(); ++s) {
        const std::string label = slots[i].size() == 2 ? (s == 0 ? "Yes" : "No")
                                                       : "Option " + std::to_string(s + 1);
        c.answers.push_back(Answer{"a" + std::to_string(s), label, slots[i][s]});
      }
      put(schema, std::move(c));
    } else {
      ConclusionBlock k{names[i], "Conclusion about " + phrase(rng, 2),
                        "<p>The " + phrase(rng, 3) + " leads to this conclusion.</p>", {}, {}};
      const std::size_t steps = rng() % 3;
      for (std::size_t s = 0; s < steps; ++s) {
        // Shared titles across conclusions exercise next-step deduplication.
        k.next_steps.push_back(NextStep{"Step " + std::to_string(rng() % 4), "<p>" + phrase(rng, 5) + "</p>"});
      }
      if (slots[i][0]) k.exits.push_back(*slots[i][0]);
      put(schema, std::move(k));
    }
  }
  return schema;
}

void annotate(std::mt19937_64& rng, const std::shared_ptr<const Schema>& schema, CaseStore& store,
              std::size_t n_cases) {
  const sys_days first{ymd(2010, 1, 1)};
  for (std::size_t c = 0; c < n_cases; ++c) {
    const std::string case_id = pad_id('C', c, std::max<std::size_t>(n_cases, 1000));
    // Narrow date range so ties on decision date occur.
    const Date date{first + days{static_cast<int>(rng() % 400) * 9}};
    CaseRecord record{case_id, "Synthetic case " + case_id, date, std::nullopt, std::nullopt};
    if (rng() % 3 == 0) record.source_url = "https://example.org/cases/" + case_id;
    store.add_case(std::move(record));

    // Each case follows one pathway through the schema.
    Target at = schema->start;
    while (at) {
      const Block& block = schema->blocks.at(*at);
      if (const auto* crit = std::get_if<CriterionBlock>(&block)) {
        const std::size_t pick = rng() % crit->answers.size();
        if (rng() % 10 < 7) {
          const Polarity polarity = (pick == 0) != (rng() % 10 == 0) ? Polarity::kApplied : Polarity::kNotApplied;
          store.link_criterion_summary(
              CriterionSummary{case_id, crit->id, polarity, "The judge considered " + phrase(rng, 6) + "."});
        }
        at = crit->answers[pick].next;
      } else {
        const auto& k = std::get<ConclusionBlock>(block);
        if (rng() % 10 < 8) {
          store.link_outcome_summary(OutcomeSummary{case_id, k.id, "The judge ordered " + phrase(rng, 4) + "."});
        }
        at = k.next();
      }
    }
  }
}

Bundle assemble(std::mt19937_64& rng, Schema schema, std::size_t n_cases) {
  auto shared = std::make_shared<const Schema>(std::move(schema));
  CaseStore store(shared);
  annotate(rng, shared, store, n_cases);
  return Bundle{kFormatVersion, BundleMetadata{"Synthetic bundle", "en-CA", ymd(2023, 5, 5)}, shared,
                std::move(store), {}};
}

}  // namespace

std::shared_ptr<const Schema> lease_graph_schema() {
  Schema schema;
  schema.id = "lease-termination-late-rent";
  schema.version = "1.0.0";
  schema.locale = "en-CA";
  schema.start = ids::kFrequentlyLate;
  put(schema, frequently_late_block());
  put(schema, serious_prejudice_block());
  put(schema, terminate_frequent_block());
  put(schema, no_termination_block());
  return std::make_shared<const Schema>(std::move(schema));
}

std::vector<std::string> walkthrough_answers() {
  return {"landlord", "ll_nonpayment", "no", "yes", "yes"};
}

Bundle demo_bundle() {
  Schema schema;
  schema.id = "landlord-tenant-demo";
  schema.version = "1.0.0";
  schema.locale = "en-CA";
  schema.start = ids::kRole;

  put(schema, CriterionBlock{
                  ids::kRole,
                  "Are you a landlord or a tenant?",
                  "<p>A <strong>landlord</strong> rents out a dwelling. A <strong>tenant</strong> "
                  "rents a dwelling to live in it.</p>",
                  {Answer{"landlord", "Landlord", BlockId(ids::kLandlordIssues)},
                   Answer{"tenant", "Tenant", BlockId(ids::kTenantIssues)}}});

  put(schema, CriterionBlock{
                  ids::kLandlordIssues,
                  "Which situation best describes your issue?",
                  "<p>Choose the situation closest to yours.</p>",
                  {Answer{"ll_nonpayment", "My tenant does not pay their rent", BlockId(ids::kLateThreeWeeks)},
                   Answer{"ll_late", "My tenant is late in paying their rent", BlockId(ids::kLateThreeWeeks)},
                   Answer{"ll_abandoned", "My tenant has abandoned their apartment", BlockId(ids::kNotInDemo)},
                   Answer{"ll_leave_early",
                          "My tenant wants to leave their apartment before the end of the lease",
                          BlockId(ids::kNotInDemo)},
                   Answer{"ll_other", "Other", BlockId(ids::kOtherIssue)}}});

  put(schema, CriterionBlock{
                  ids::kTenantIssues,
                  "Which situation best describes your issue?",
                  "<p>Choose the situation closest to yours.</p>",
                  {Answer{"t_other", "Other", BlockId(ids::kOtherIssue)},
                   Answer{"t_rent_raise", "My landlord wants to raise my rent", BlockId(ids::kNotInDemo)},
                   Answer{"t_work", "My landlord wants to conduct work on my apartment", BlockId(ids::kNotInDemo)},
                   Answer{"t_leave_early", "I would like to leave my apartment before the end of the lease",
                          BlockId(ids::kNotInDemo)},
                   Answer{"t_terminate", "I would like to terminate my lease", BlockId(ids::kNotInDemo)},
                   Answer{"t_sublet", "I would like to sublet my apartment", BlockId(ids::kNotInDemo)},
                   Answer{"t_repairs", "My apartment needs repairs", BlockId(ids::kNotInDemo)},
                   Answer{"t_deposit", "My landlord asks for a deposit", BlockId(ids::kNotInDemo)}}});

  put(schema, CriterionBlock{
                  ids::kLateThreeWeeks,
                  "Is the tenant currently more than three weeks late in paying the rent?",
                  "<p>Count from the day the rent was due under the lease.</p>",
                  {Answer{"yes", "Yes", BlockId(ids::kTerminateThreeWeeks)},
                   Answer{"no", "No", BlockId(ids::kFrequentlyLate)}}});

  put(schema, frequently_late_block());
  put(schema, serious_prejudice_block());
  put(schema, terminate_frequent_block());
  put(schema, terminate_three_weeks_block());
  put(schema, no_termination_block());

  put(schema, ConclusionBlock{
                  ids::kOtherIssue,
                  "Your situation is not covered yet",
                  "<p>This tool does not cover your situation yet. Tell us what your issue is so "
                  "that we can consider adding it.</p>",
                  {{"Tell us about your issue", "<p>Use the feedback form to describe your issue.</p>"}},
                  {}});
  put(schema, ConclusionBlock{
                  ids::kNotInDemo,
                  "This pathway is not part of the demonstration",
                  "<p>The full tool covers this situation. The demonstration only encodes the "
                  "late-rent pathway.</p>",
                  {{"Tell us about your issue", "<p>Use the feedback form to describe your issue.</p>"}},
                  {}});

  auto shared = std::make_shared<const Schema>(std::move(schema));
  CaseStore store(shared);

  store.add_case({"TAL-2018-0207", "Synthetic landlord v. tenant (2018)", ymd(2018, 5, 21), std::nullopt, std::nullopt});
  store.add_case({"TAL-2019-0114", "Synthetic landlord v. tenant (2019)", ymd(2019, 3, 14),
                  std::string("https://example.org/decisions/TAL-2019-0114"), std::nullopt});
  store.add_case({"TAL-2020-0392", "Synthetic landlord v. tenant (2020)", ymd(2020, 9, 2), std::nullopt, std::nullopt});
  store.add_case({"TAL-2021-0531", "Synthetic landlord v. tenant (2021)", ymd(2021, 11, 8), std::nullopt, std::nullopt});
  store.add_case({"TAL-2022-0058", "Synthetic landlord v. tenant (2022)", ymd(2022, 2, 17), std::nullopt, std::nullopt});

  using P = Polarity;
  store.link_criterion_summary({"TAL-2019-0114", ids::kFrequentlyLate, P::kApplied,
                                "The tenant paid late 7 times in 12 months; the judge found the tenant frequently late."});
  store.link_criterion_summary({"TAL-2020-0392", ids::kFrequentlyLate, P::kApplied,
                                "The tenant paid late 10 times in 11 months; the judge found the tenant frequently late."});
  store.link_criterion_summary({"TAL-2018-0207", ids::kFrequentlyLate, P::kNotApplied,
                                "The tenant paid late 2 times in 3 months; the judge found this was not frequent lateness."});
  store.link_criterion_summary({"TAL-2019-0114", ids::kSeriousPrejudice, P::kApplied,
                                "The landlord could not cover the mortgage payment on the building for a month."});
  store.link_criterion_summary({"TAL-2022-0058", ids::kSeriousPrejudice, P::kNotApplied,
                                "The landlord showed no concrete consequence of the late payments."});
  store.link_criterion_summary({"TAL-2021-0531", ids::kLateThreeWeeks, P::kApplied,
                                "Two full months of rent were unpaid on the day of the hearing."});

  store.link_outcome_summary({"TAL-2019-0114", ids::kTerminateFrequentLateness, "The lease was terminated."});
  store.link_outcome_summary({"TAL-2020-0392", ids::kTerminateFrequentLateness,
                              "The judge ordered the tenant to pay their rent."});
  store.link_outcome_summary({"TAL-2018-0207", ids::kNoTermination, "The lease was not terminated."});
  store.link_outcome_summary({"TAL-2022-0058", ids::kNoTermination,
                              "The judge ordered the tenant to pay the rent on the first day of each month."});
  store.link_outcome_summary({"TAL-2021-0531", ids::kTerminateThreeWeeks,
                              "The lease was terminated and the tenant was ordered to pay the rent owed."});

  return Bundle{kFormatVersion, BundleMetadata{"Late rent demonstration", "en-CA", ymd(2023, 5, 5)}, shared,
                std::move(store), {}};
}

Bundle generate_synthetic(std::uint64_t seed, std::size_t n_blocks, std::size_t n_cases) {
  std::mt19937_64 rng(seed);
  std::vector<BlockKind> kinds(std::max<std::size_t>(n_blocks, 1), BlockKind::kConclusion);
  if (kinds.size() > 1) {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      kinds[i] = rng() % 100 < 60 ? BlockKind::kCriterion : BlockKind::kConclusion;
    }
    // The first criterion may sit behind a conclusion; make sure one exists.
    if (rng() % 100 < 15) {
      kinds[0] = BlockKind::kConclusion;
      kinds[1] = BlockKind::kCriterion;
    } else {
      kinds[0] = BlockKind::kCriterion;
    }
  }
  Schema schema = random_schema(rng, std::move(kinds));
  return assemble(rng, std::move(schema), n_cases);
}

Bundle generate_with_kinds(std::uint64_t seed, std::size_t n_criteria, std::size_t n_conclusions,
                           std::size_t n_cases) {
  std::mt19937_64 rng(seed);
  std::vector<BlockKind> kinds;
  kinds.insert(kinds.end(), n_criteria, BlockKind::kCriterion);
  kinds.insert(kinds.end(), n_conclusions, BlockKind::kConclusion);
  if (n_criteria > 0) {
    std::shuffle(kinds.begin() + 1, kinds.end(), rng);
  }
  Schema schema = random_schema(rng, std::move(kinds));
  return assemble(rng, std::move(schema), n_cases);
}

Bundle deployed_scale_bundle(std::uint64_t seed) {
  return generate_with_kinds(seed, kDeployedCriteria, kDeployedConclusions, 400);
}

namespace {

constexpr std::array<const char*, 60> kCorpusWords = {
    "the",      "tenant",    "landlord",  "lease",     "rent",      "paid",      "late",
    "months",   "tribunal",  "judge",     "found",     "serious",   "prejudice", "frequently",
    "payment",  "dwelling",  "repairs",   "notice",    "evidence",  "hearing",   "damages",
    "ordered",  "terminate", "resiliation", "mortgage", "heating",  "winter",    "noise",
    "neighbour", "deposit",  "increase",  "work",      "apartment", "sublet",    "assignment",
    "owed",     "arrears",   "claim",     "reasonable", "delay",    "obligation", "article",
    "code",     "civil",     "quebec",    "application", "decision", "witness",   "testimony",
    "insurance", "pests",    "bedbugs",   "infestation", "diligent", "collaborated", "renovation",
    "eviction", "renewal",   "refused",   "inspection"};

std::string corpus_sentence(std::mt19937_64& rng) {
  const std::size_t words = 6 + rng() % 9;
  std::string out;
  for (std::size_t i = 0; i < words; ++i) {
    if (i) out.push_back(' ');
    out += kCorpusWords[rng() % kCorpusWords.size()];
  }
  out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out + ".";
}

}  // namespace

std::vector<CorpusCase> synthetic_corpus(std::uint64_t seed, std::size_t n_cases,
                                         std::size_t sentences_per_case) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusCase> corpus;
  corpus.reserve(n_cases);
  for (std::size_t c = 0; c < n_cases; ++c) {
    CorpusCase cc;
    cc.case_id = pad_id('K', c, std::max<std::size_t>(n_cases, 10000));
    cc.citation = "Synthetic decision " + cc.case_id;
    cc.decision_date = format_date(Date{sys_days{ymd(2012, 1, 1)} + days{static_cast<int>(rng() % 4000)}});
    for (std::size_t s = 0; s < sentences_per_case; ++s) cc.sentences.push_back(corpus_sentence(rng));
    corpus.push_back(std::move(cc));
  }
  return corpus;
}

std::vector<std::string> synthetic_queries(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed ^ 0x51ed270b2d3f4a1cULL);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t words = 3 + rng() % 5;
    std::string q = "Is the";
    for (std::size_t w = 0; w < words; ++w) q += std::string(" ") + kCorpusWords[rng() % kCorpusWords.size()];
    out.push_back(q + "?");
  }
  return out;
}

std::vector<CorpusCase> demo_corpus() {
  return {
      {"TAL-2018-0207", "Synthetic landlord v. tenant (2018)", "2018-05-21",
       {"The tenant paid the rent late twice in three months.",
        "The landlord asked the tribunal to terminate the lease.",
        "The tribunal found that two late payments were not frequent lateness."}},
      {"TAL-2019-0114", "Synthetic landlord v. tenant (2019)", "2019-03-14",
       {"The tenant was late in paying the rent seven times in twelve months.",
        "The landlord could not cover the mortgage payment on the building.",
        "The tribunal terminated the lease for frequent late payment."}},
      {"TAL-2020-0392", "Synthetic landlord v. tenant (2020)", "2020-09-02",
       {"Rent was paid late ten times over eleven months.",
        "The judge ordered the tenant to pay the rent on time each month."}},
      {"TAL-2021-0531", "Synthetic landlord v. tenant (2021)", "2021-11-08",
       {"Two full months of rent were unpaid on the day of the hearing.",
        "The tenant was more than three weeks late in paying the rent."}},
      {"TAL-2022-0058", "Synthetic landlord v. tenant (2022)", "2022-02-17",
       {"The landlord showed no concrete consequence of the late payments.",
        "The tribunal refused to terminate the lease."}},
      {"TAL-2022-0311", "Synthetic tenant v. landlord (2022)", "2022-08-30",
       {"The heating did not work for most of the winter.",
        "The tribunal ordered the landlord to carry out the repairs and reduced the rent."}},
      {"TAL-2023-0017", "Synthetic tenant v. landlord (2023)", "2023-01-12",
       {"The landlord sent a notice of rent increase after the deadline.",
        "The tribunal fixed the rent at the amount of the previous lease."}},
  };
}

}  // namespace lexpath::fixtures
