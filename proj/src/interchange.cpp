#include "lexpath/interchange.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexpath/error.hpp"
#include "lexpath/text.hpp"

namespace lexpath {

using nlohmann::json;

namespace {

// Upgrades a document of version N to N + 1. Empty until a second format
// version exists.
const std::map<int, std::function<json(json)>>& migrations() {
  static const std::map<int, std::function<json(json)>> table;
  return table;
}

json target_json(const Target& t) { return t ? json(*t) : json(nullptr); }

json block_json(const Block& block) {
  if (const auto* c = std::get_if<CriterionBlock>(&block)) {
    json answers = json::array();
    for (const auto& a : c->answers) {
      answers.push_back({{"id", a.id}, {"label", a.label}, {"next", target_json(a.next)}});
    }
    return {{"id", c->id},
            {"kind", "criterion"},
            {"title", c->title},
            {"description", c->description},
            {"answers", std::move(answers)}};
  }
  const auto& k = std::get<ConclusionBlock>(block);
  json steps = json::array();
  for (const auto& s : k.next_steps) steps.push_back({{"title", s.title}, {"text", s.text}});
  json next = k.exits.size() > 1 ? json(k.exits) : target_json(k.next());
  return {{"id", k.id},
          {"kind", "conclusion"},
          {"title", k.title},
          {"explanation", k.explanation},
          {"next_steps", std::move(steps)},
          {"next", std::move(next)}};
}

void check_references(const Schema& schema, const CaseStore& store) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kBrokenReferences, what); };
  for (const auto& [block_id, list] : store.criterion_summaries()) {
    const Block* b = schema.find(block_id);
    if (!b || kind_of(*b) != BlockKind::kCriterion) {
      fail("criterion summaries reference '" + block_id + "', not a criterion block");
    }
    for (const auto& s : list) {
      if (!store.find_case(s.case_id)) fail("summary references unknown case '" + s.case_id + "'");
    }
  }
  for (const auto& [block_id, list] : store.outcome_summaries()) {
    const Block* b = schema.find(block_id);
    if (!b || kind_of(*b) != BlockKind::kConclusion) {
      fail("outcome summaries reference '" + block_id + "', not a conclusion block");
    }
    for (const auto& s : list) {
      if (!store.find_case(s.case_id)) fail("summary references unknown case '" + s.case_id + "'");
    }
  }
}

// --- parsing ---------------------------------------------------------------

class Reader {
 public:
  explicit Reader(ImportOptions options) : options_(options) {}

  // Checks the keys of `obj` against `known`; unknown keys are rejected or
  // recorded under `pointer`.
  void keys(const json& obj, const std::string& pointer, std::initializer_list<std::string_view> known) {
    if (!obj.is_object()) throw Error(ErrorCode::kParseError, pointer + " must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (std::find(known.begin(), known.end(), key) != known.end()) continue;
      const std::string at = pointer + "/" + escape(key);
      if (options_.strict) throw Error(ErrorCode::kParseError, "unknown field " + at);
      extras[at] = value.dump();
    }
  }

  static std::string str(const json& obj, const char* key, const std::string& pointer) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
      throw Error(ErrorCode::kParseError, pointer + "/" + key + " must be a string");
    }
    return it->get<std::string>();
  }

  static std::optional<std::string> opt_str(const json& obj, const char* key, const std::string& pointer) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(ErrorCode::kParseError, pointer + "/" + key + " must be a string");
    return it->get<std::string>();
  }

  static const json& arr(const json& obj, const char* key, const std::string& pointer) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_array()) {
      throw Error(ErrorCode::kParseError, pointer + "/" + key + " must be an array");
    }
    return *it;
  }

  static Target target(const json& obj, const std::string& pointer) {
    auto it = obj.find("next");
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw Error(ErrorCode::kParseError, pointer + "/next must be a string or null");
    return it->get<std::string>();
  }

  static std::string escape(std::string_view key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out.push_back(c);
    }
    return out;
  }

  std::map<std::string, std::string> extras;

 private:
  ImportOptions options_;
};

Block parse_block(Reader& r, const json& j, const std::string& p) {
  const std::string kind = Reader::str(j, "kind", p);
  if (kind == "criterion") {
    r.keys(j, p, {"id", "kind", "title", "description", "answers"});
    CriterionBlock c;
    c.id = Reader::str(j, "id", p);
    c.title = Reader::str(j, "title", p);
    c.description = text::sanitize_html(Reader::opt_str(j, "description", p).value_or(""));
    const json& answers = Reader::arr(j, "answers", p);
    for (std::size_t i = 0; i < answers.size(); ++i) {
      const std::string ap = p + "/answers/" + std::to_string(i);
      r.keys(answers[i], ap, {"id", "label", "next"});
      c.answers.push_back(
          Answer{Reader::str(answers[i], "id", ap), Reader::str(answers[i], "label", ap), Reader::target(answers[i], ap)});
    }
    return c;
  }
  if (kind == "conclusion") {
    r.keys(j, p, {"id", "kind", "title", "explanation", "next_steps", "next"});
    ConclusionBlock k;
    k.id = Reader::str(j, "id", p);
    k.title = Reader::str(j, "title", p);
    k.explanation = text::sanitize_html(Reader::str(j, "explanation", p));
    if (j.contains("next_steps")) {
      const json& steps = Reader::arr(j, "next_steps", p);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string sp = p + "/next_steps/" + std::to_string(i);
        r.keys(steps[i], sp, {"title", "text"});
        k.next_steps.push_back(NextStep{Reader::str(steps[i], "title", sp),
                                        text::sanitize_html(Reader::opt_str(steps[i], "text", sp).value_or(""))});
      }
    }
    auto next = j.find("next");
    if (next != j.end() && next->is_array()) {
      for (const auto& e : *next) {
        if (!e.is_string()) throw Error(ErrorCode::kParseError, p + "/next entries must be strings");
        k.exits.push_back(e.get<std::string>());
      }
    } else if (auto t = Reader::target(j, p)) {
      k.exits.push_back(*t);
    }
    return k;
  }
  throw Error(ErrorCode::kParseError, p + "/kind must be 'criterion' or 'conclusion'");
}

// Recorded extras use document positions; rewrite the array index under
// `prefix` to the canonical (sorted) position used on export.
std::map<std::string, std::string> reindex_extras(
    const std::map<std::string, std::string>& extras, const std::string& prefix,
    const std::map<std::size_t, std::size_t>& remap) {
  std::map<std::string, std::string> out;
  for (const auto& [pointer, value] : extras) {
    if (pointer.rfind(prefix, 0) != 0) {
      out[pointer] = value;
      continue;
    }
    const auto rest = pointer.substr(prefix.size());
    const auto slash = rest.find('/');
    const std::size_t index = std::stoul(rest.substr(0, slash));
    const std::string tail = slash == std::string::npos ? "" : rest.substr(slash);
    out[prefix + std::to_string(remap.at(index)) + tail] = value;
  }
  return out;
}

template <typename Key>
std::map<std::size_t, std::size_t> sorted_positions(const std::vector<Key>& keys) {
  std::vector<std::size_t> order(keys.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  std::map<std::size_t, std::size_t> remap;
  for (std::size_t pos = 0; pos < order.size(); ++pos) remap[order[pos]] = pos;
  return remap;
}

json parse_json(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

// Parses and migrates a bundle document up to the current format version.
json migrated_document(std::string_view document) {
  json doc = parse_json(document);
  if (!doc.is_object()) throw Error(ErrorCode::kParseError, "document must be a JSON object");

  auto version_it = doc.find("format_version");
  if (version_it == doc.end() || !version_it->is_number_integer()) {
    throw Error(ErrorCode::kParseError, "format_version must be an integer");
  }
  int version = version_it->get<int>();
  while (version != kFormatVersion) {
    auto step = migrations().find(version);
    if (version > kFormatVersion || step == migrations().end()) {
      throw Error(ErrorCode::kUnsupportedVersion, "unsupported format_version " + std::to_string(version));
    }
    doc = step->second(std::move(doc));
    version = doc.at("format_version").get<int>();
  }

  return doc;
}

std::shared_ptr<Schema> read_schema(Reader& r, const json& doc) {
  auto schema_it = doc.find("schema");
  if (schema_it == doc.end()) throw Error(ErrorCode::kParseError, "/schema is missing");
  const json& js = *schema_it;
  r.keys(js, "/schema", {"id", "version", "locale", "start", "blocks"});
  auto schema = std::make_shared<Schema>();
  schema->id = Reader::str(js, "id", "/schema");
  schema->version = Reader::str(js, "version", "/schema");
  schema->locale = Reader::str(js, "locale", "/schema");
  schema->start = Reader::str(js, "start", "/schema");

  const json& blocks = Reader::arr(js, "blocks", "/schema");
  std::vector<BlockId> block_ids;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    Block block = parse_block(r, blocks[i], "/schema/blocks/" + std::to_string(i));
    const BlockId id = id_of(block);
    if (!schema->blocks.emplace(id, std::move(block)).second) {
      throw Error(ErrorCode::kParseError, "duplicate block id '" + id + "'");
    }
    block_ids.push_back(id);
  }
  r.extras = reindex_extras(r.extras, "/schema/blocks/", sorted_positions(block_ids));
  return schema;
}

}  // namespace

bool Bundle::operator==(const Bundle& other) const {
  const bool schemas_equal = schema && other.schema ? *schema == *other.schema : schema == other.schema;
  return format_version == other.format_version && metadata == other.metadata && schemas_equal &&
         store == other.store && extra_fields == other.extra_fields;
}

std::string export_bundle(const Schema& schema, const CaseStore& store, const BundleMetadata& metadata,
                          const std::map<std::string, std::string>& extra_fields) {
  const ValidationReport report = validate_schema(schema);
  if (!report.deployable()) {
    throw Error(ErrorCode::kInvalidSchema, "cannot export a schema with " +
                                               std::to_string(report.errors.size()) + " error(s)");
  }
  check_references(schema, store);

  json blocks = json::array();
  for (const auto& [id, block] : schema.blocks) blocks.push_back(block_json(block));

  json cases = json::array();
  for (const auto& [id, c] : store.cases()) {
    json jc = {{"case_id", c.case_id}, {"citation", c.citation}, {"decision_date", format_date(c.decision_date)}};
    if (c.source_url) jc["source_url"] = *c.source_url;
    if (c.full_text_ref) jc["full_text_ref"] = *c.full_text_ref;
    cases.push_back(std::move(jc));
  }

  json criterion_summaries = json::array();
  for (const auto& [block_id, list] : store.criterion_summaries()) {
    for (const auto& s : list) {
      criterion_summaries.push_back({{"case_id", s.case_id},
                                     {"criterion_id", s.criterion_id},
                                     {"polarity", polarity_name(s.polarity)},
                                     {"summary", s.summary}});
    }
  }
  json outcome_summaries = json::array();
  for (const auto& [block_id, list] : store.outcome_summaries()) {
    for (const auto& s : list) {
      outcome_summaries.push_back(
          {{"case_id", s.case_id}, {"conclusion_id", s.conclusion_id}, {"summary", s.summary}});
    }
  }

  json doc = {
      {"format_version", kFormatVersion},
      {"metadata",
       {{"title", metadata.title}, {"locale", metadata.locale}, {"published_date", format_date(metadata.published_date)}}},
      {"schema",
       {{"id", schema.id},
        {"version", schema.version},
        {"locale", schema.locale},
        {"start", schema.start},
        {"blocks", std::move(blocks)}}},
      {"cases", std::move(cases)},
      {"criterion_summaries", std::move(criterion_summaries)},
      {"outcome_summaries", std::move(outcome_summaries)},
  };

  for (const auto& [pointer, value] : extra_fields) {
    const json::json_pointer ptr(pointer);
    if (doc.contains(ptr.parent_pointer()) && doc.at(ptr.parent_pointer()).is_object()) {
      doc[ptr] = json::parse(value);
    }
  }
  return doc.dump(2) + "\n";
}

std::string export_bundle(const Bundle& bundle) {
  if (!bundle.schema) throw Error(ErrorCode::kInvalidSchema, "bundle has no schema");
  return export_bundle(*bundle.schema, bundle.store, bundle.metadata, bundle.extra_fields);
}

Bundle import_bundle(std::string_view document, ImportOptions options) {
  json doc = migrated_document(document);

  Reader r(options);
  try {
    r.keys(doc, "", {"format_version", "metadata", "schema", "cases", "criterion_summaries", "outcome_summaries"});

    auto meta_it = doc.find("metadata");
    if (meta_it == doc.end()) throw Error(ErrorCode::kParseError, "/metadata is missing");
    r.keys(*meta_it, "/metadata", {"title", "locale", "published_date"});
    BundleMetadata metadata{Reader::str(*meta_it, "title", "/metadata"), Reader::str(*meta_it, "locale", "/metadata"),
                            parse_date(Reader::str(*meta_it, "published_date", "/metadata"))};

    auto schema = read_schema(r, doc);

    const ValidationReport report = validate_schema(*schema);
    if (!report.deployable()) {
      const Finding& f = report.errors.front();
      throw Error(ErrorCode::kInvalidSchema, "schema has " + std::to_string(report.errors.size()) +
                                                 " validation error(s), first: " + f.code + " at '" + f.block_id + "'");
    }

    CaseStore store(schema);
    auto store_op = [](auto&& fn) {
      try {
        fn();
      } catch (const Error& e) {
        const bool broken = e.code() == ErrorCode::kUnknownCase || e.code() == ErrorCode::kUnknownBlock ||
                            e.code() == ErrorCode::kWrongBlockKind;
        throw Error(broken ? ErrorCode::kBrokenReferences : ErrorCode::kParseError, e.what());
      }
    };

    std::vector<std::string> case_ids;
    std::vector<std::pair<BlockId, std::string>> criterion_keys;
    std::vector<std::pair<BlockId, std::string>> outcome_keys;
    if (doc.contains("cases")) {
      const json& cases = Reader::arr(doc, "cases", "");
      for (std::size_t i = 0; i < cases.size(); ++i) {
        const std::string p = "/cases/" + std::to_string(i);
        r.keys(cases[i], p, {"case_id", "citation", "decision_date", "source_url", "full_text_ref"});
        CaseRecord rec{Reader::str(cases[i], "case_id", p), Reader::str(cases[i], "citation", p),
                       parse_date(Reader::str(cases[i], "decision_date", p)), Reader::opt_str(cases[i], "source_url", p),
                       Reader::opt_str(cases[i], "full_text_ref", p)};
        case_ids.push_back(rec.case_id);
        store_op([&] { store.add_case(std::move(rec)); });
      }
    }
    if (doc.contains("criterion_summaries")) {
      const json& list = Reader::arr(doc, "criterion_summaries", "");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "/criterion_summaries/" + std::to_string(i);
        r.keys(list[i], p, {"case_id", "criterion_id", "polarity", "summary"});
        CriterionSummary s{Reader::str(list[i], "case_id", p), Reader::str(list[i], "criterion_id", p),
                           parse_polarity(Reader::str(list[i], "polarity", p)), Reader::str(list[i], "summary", p)};
        criterion_keys.emplace_back(s.criterion_id, s.case_id);
        store_op([&] { store.link_criterion_summary(std::move(s)); });
      }
    }
    if (doc.contains("outcome_summaries")) {
      const json& list = Reader::arr(doc, "outcome_summaries", "");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string p = "/outcome_summaries/" + std::to_string(i);
        r.keys(list[i], p, {"case_id", "conclusion_id", "summary"});
        OutcomeSummary s{Reader::str(list[i], "case_id", p), Reader::str(list[i], "conclusion_id", p),
                         Reader::str(list[i], "summary", p)};
        outcome_keys.emplace_back(s.conclusion_id, s.case_id);
        store_op([&] { store.link_outcome_summary(std::move(s)); });
      }
    }
    r.extras = reindex_extras(r.extras, "/cases/", sorted_positions(case_ids));
    r.extras = reindex_extras(r.extras, "/criterion_summaries/", sorted_positions(criterion_keys));
    r.extras = reindex_extras(r.extras, "/outcome_summaries/", sorted_positions(outcome_keys));

    return Bundle{kFormatVersion, std::move(metadata), std::move(schema), std::move(store), std::move(r.extras)};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

Schema read_schema_unchecked(std::string_view document, ImportOptions options) {
  json doc = migrated_document(document);
  Reader r(options);
  try {
    return *read_schema(r, doc);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Bundle load_bundle_file(const std::string& path, ImportOptions options) {
  return import_bundle(read_file(path), options);
}

std::vector<CorpusCase> read_corpus(std::istream& in) {
  std::vector<CorpusCase> corpus;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no);
    try {
      const json j = json::parse(line);
      CorpusCase c;
      c.case_id = Reader::str(j, "case_id", where);
      c.citation = Reader::opt_str(j, "citation", where).value_or("");
      c.decision_date = Reader::opt_str(j, "date", where).value_or("");
      if (j.contains("sentences")) {
        for (const auto& s : Reader::arr(j, "sentences", where)) c.sentences.push_back(s.get<std::string>());
      } else if (auto body = Reader::opt_str(j, "text", where)) {
        c.sentences = text::segment_sentences(*body);
      }
      if (!seen.insert(c.case_id).second) {
        throw Error(ErrorCode::kParseError, where + ": duplicate case '" + c.case_id + "'");
      }
      corpus.push_back(std::move(c));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, where + ": " + e.what());
    }
  }
  return corpus;
}

std::vector<CorpusCase> load_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParseError, "cannot open '" + path + "'");
  return read_corpus(in);
}

std::string write_corpus(const std::vector<CorpusCase>& corpus) {
  std::string out;
  for (const auto& c : corpus) {
    const json j = {{"case_id", c.case_id}, {"citation", c.citation}, {"date", c.decision_date}, {"sentences", c.sentences}};
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace lexpath
