#pragma once

#include <istream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lexpath/case_store.hpp"
#include "lexpath/retrieval.hpp"
#include "lexpath/schema.hpp"

namespace lexpath {

inline constexpr int kFormatVersion = 1;

struct BundleMetadata {
  std::string title;
  std::string locale;
  Date published_date;

  bool operator==(const BundleMetadata&) const = default;
};

// Schema plus case annotations, the unit that authoring hands to serving.
struct Bundle {
  int format_version = kFormatVersion;
  BundleMetadata metadata;
  std::shared_ptr<const Schema> schema;
  CaseStore store;
  // Fields the importer did not recognise (lenient mode), keyed by JSON
  // pointer into the canonical document, value as serialized JSON.
  std::map<std::string, std::string> extra_fields;

  bool operator==(const Bundle& other) const;
};

struct ImportOptions {
  // Strict imports reject unknown fields; lenient ones keep them verbatim.
  bool strict = false;
};

// Canonical document: sorted keys, two-space indentation, UTF-8, trailing
// newline. Throws Error(kInvalidSchema) or Error(kBrokenReferences).
std::string export_bundle(const Schema& schema, const CaseStore& store,
                          const BundleMetadata& metadata,
                          const std::map<std::string, std::string>& extra_fields = {});
std::string export_bundle(const Bundle& bundle);

// Parses, migrates and re-validates a document. Throws Error with kParseError,
// kUnsupportedVersion, kInvalidSchema or kBrokenReferences.
Bundle import_bundle(std::string_view document, ImportOptions options = {});

// The schema part of a document without the validation gate, for authoring
// reports on schemas that are not deployable yet. Throws kParseError or
// kUnsupportedVersion.
Schema read_schema_unchecked(std::string_view document, ImportOptions options = {});

// Whole file contents. Throws Error(kParseError) when it cannot be opened.
std::string read_file(const std::string& path);

Bundle load_bundle_file(const std::string& path, ImportOptions options = {});

// Retrieval corpus, one JSON object per line:
//   {"case_id", "citation", "date", "sentences": [...]}  or  {..., "text": "..."}
// where free text is segmented into sentences.
std::vector<CorpusCase> read_corpus(std::istream& in);
std::vector<CorpusCase> load_corpus_file(const std::string& path);
std::string write_corpus(const std::vector<CorpusCase>& corpus);

}  // namespace lexpath
