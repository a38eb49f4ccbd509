// lexpath: authoring and serving companion for reasoning-schema bundles.
//
//   lexpath validate BUNDLE [--format json] [--strict]
//   lexpath paths BUNDLE [--format json]
//   lexpath suggest BUNDLE CORPUS BLOCK_ID [--k 100] [--seed 42] [--exact]
//   lexpath serve [BUNDLE] [--addr HOST:PORT]
//   lexpath export (--demo | --demo-corpus | --synthetic | --corpus) [-o FILE]
//
// Exit status: 0 success, 1 domain errors, 2 I/O or parse errors.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <pthread.h>

#include "lexpath/api_json.hpp"
#include "lexpath/error.hpp"
#include "lexpath/fixtures.hpp"
#include "lexpath/interchange.hpp"
#include "lexpath/service.hpp"
#include "lexpath/session.hpp"

using namespace lexpath;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kDomainError = 1;
constexpr int kInputError = 2;

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kParseError:
    case ErrorCode::kUnsupportedVersion:
      return kInputError;
    default:
      return kDomainError;
  }
}

int report_error(const Error& e) {
  std::cerr << "lexpath: " << code_name(e.code()) << ": " << e.what() << '\n';
  return exit_code_for(e);
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

int cmd_validate(const std::string& path, bool as_json, bool strict) {
  const Schema schema = read_schema_unchecked(read_file(path), ImportOptions{strict});
  const auto report = validate_schema(schema);
  if (as_json) {
    json out = api::to_json(report);
    out["blocks"] = schema.blocks.size();
    std::cout << out.dump(2) << '\n';
  } else {
    for (const auto& f : report.errors) std::cout << "error   " << f.code << "  " << f.block_id << "  " << f.message << '\n';
    for (const auto& f : report.warnings) {
      std::cout << "warning " << f.code << "  " << f.block_id << "  " << f.message << '\n';
    }
    std::cout << schema.blocks.size() << " blocks, " << report.errors.size() << " error(s), "
              << report.warnings.size() << " warning(s)\n";
  }
  if (!report.deployable()) return kDomainError;
  // The schema is fine; the rest of the document still has to load.
  load_bundle_file(path, ImportOptions{strict});
  return kOk;
}

std::vector<BlockId> uncovered_conclusions(const Bundle& bundle) {
  std::vector<BlockId> out;
  for (const auto& [id, block] : bundle.schema->blocks) {
    if (kind_of(block) != BlockKind::kConclusion) continue;
    const auto it = bundle.store.outcome_summaries().find(id);
    if (it == bundle.store.outcome_summaries().end() || it->second.empty()) out.push_back(id);
  }
  return out;
}

int cmd_paths(const std::string& path, bool as_json, bool strict) {
  const Bundle bundle = load_bundle_file(path, ImportOptions{strict});
  const auto paths = enumerate_paths(*bundle.schema);
  const auto uncovered = uncovered_conclusions(bundle);
  if (as_json) {
    std::cout << json{{"paths", api::to_json(paths)}, {"uncovered_conclusions", uncovered}}.dump(2) << '\n';
    return kOk;
  }
  for (const auto& p : paths) {
    std::string answers;
    for (const auto& s : p.answers) answers += (answers.empty() ? "" : " > ") + s.criterion_id + "=" + s.answer_id;
    std::string stack;
    for (const auto& c : p.conclusion_stack) stack += (stack.empty() ? "" : ", ") + c;
    std::cout << (answers.empty() ? "(no answers)" : answers) << "  =>  [" << stack << "]\n";
  }
  std::cout << paths.size() << " path(s)\n";
  for (const auto& id : uncovered) std::cout << "uncovered conclusion: " << id << '\n';
  return kOk;
}

int cmd_suggest(const std::string& bundle_path, const std::string& corpus_path, const std::string& block_id,
                std::size_t k, std::uint64_t seed, bool exact, bool as_json) {
  const Bundle bundle = load_bundle_file(bundle_path);
  const Block* block = bundle.schema->find(block_id);
  if (!block) throw Error(ErrorCode::kUnknownBlock, "no block '" + block_id + "'");
  const std::string query =
      std::visit([](const auto& b) -> std::string { return b.title; }, *block);
  AnnParams params;
  params.seed = seed;
  const auto index = RetrievalIndex::build(load_corpus_file(corpus_path), params);
  const auto rows = exact ? index.exact_topk(query, k) : index.suggest_cases(query, k);
  if (as_json) {
    std::cout << json{{"query", query}, {"suggestions", api::to_json(rows)}}.dump(2) << '\n';
    return kOk;
  }
  std::cout << "query: " << query << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", rows[i].score);
    std::cout << (i + 1) << '\t' << score << '\t' << rows[i].case_id << '\t' << rows[i].best_sentence << '\n';
  }
  return kOk;
}

int cmd_serve(const std::string& bundle_path, const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw Error(ErrorCode::kBadArgument, "address must be HOST:PORT");
  const std::string host = addr.substr(0, colon);
  const int port = std::stoi(addr.substr(colon + 1));

  service::Config config;
  config.bundle_path = bundle_path;
  config.admin_token = env_or("LEXPATH_ADMIN_TOKEN", "");
  config.event_log_path = env_or("LEXPATH_EVENT_LOG_PATH", "");
  config.session_store_path = env_or("LEXPATH_SESSION_STORE_PATH", "");
  service::Service svc(config);

  // Block termination signals before the server spawns its workers so only
  // the waiter thread sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  service::mount_routes(server, svc);
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::kParseError, "cannot listen on " + addr);

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  waiter.detach();

  std::cout << "listening on " << host << ':' << bound << std::endl;
  server.listen_after_bind();
  return kOk;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write '" + path + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-schema authoring and serving tool"};
  app.require_subcommand(1);
  std::string format = "text";
  bool strict = false;

  auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
  };

  std::string bundle_path;
  auto* validate = app.add_subcommand("validate", "Check a bundle's schema and references");
  validate->add_option("bundle", bundle_path, "Bundle document")->required();
  validate->add_flag("--strict", strict, "Reject unknown fields");
  add_format(validate);

  auto* paths = app.add_subcommand("paths", "List every pathway and conclusions without outcome summaries");
  paths->add_option("bundle", bundle_path, "Bundle document")->required();
  paths->add_flag("--strict", strict, "Reject unknown fields");
  add_format(paths);

  std::string corpus_path;
  std::string block_id;
  std::size_t k = kDefaultSuggestions;
  std::uint64_t seed = AnnParams{}.seed;
  bool exact = false;
  auto* suggest = app.add_subcommand("suggest", "Rank corpus cases by similarity to a block title");
  suggest->add_option("bundle", bundle_path, "Bundle document")->required();
  suggest->add_option("corpus", corpus_path, "Corpus, one JSON case per line")->required();
  suggest->add_option("block_id", block_id, "Block whose title is the query")->required();
  suggest->add_option("--k", k, "Number of cases")->check(CLI::PositiveNumber);
  suggest->add_option("--seed", seed, "Index construction seed");
  suggest->add_flag("--exact", exact, "Use the exhaustive scan");
  add_format(suggest);

  std::string addr;
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
  serve->add_option("bundle", bundle_path, "Bundle document (default: $LEXPATH_BUNDLE_PATH)");
  serve->add_option("--addr", addr, "HOST:PORT (default: $LEXPATH_LISTEN_ADDR or 127.0.0.1:8080)");

  std::string output;
  bool demo = false;
  bool demo_corpus = false;
  bool synthetic = false;
  bool corpus = false;
  std::size_t blocks = 10;
  std::size_t cases = 20;
  std::size_t sentences = 10;
  auto* exp = app.add_subcommand("export", "Write a fixture document");
  auto* demo_flag = exp->add_flag("--demo", demo, "The landlord/tenant demonstration bundle");
  auto* demo_corpus_flag = exp->add_flag("--demo-corpus", demo_corpus, "The demonstration corpus");
  auto* synthetic_flag = exp->add_flag("--synthetic", synthetic, "A generated bundle");
  auto* corpus_flag = exp->add_flag("--corpus", corpus, "A generated corpus");
  demo_flag->excludes(demo_corpus_flag)->excludes(synthetic_flag)->excludes(corpus_flag);
  demo_corpus_flag->excludes(synthetic_flag)->excludes(corpus_flag);
  synthetic_flag->excludes(corpus_flag);
  exp->add_option("--seed", seed, "Generator seed");
  exp->add_option("--blocks", blocks, "Blocks in a generated bundle")->check(CLI::PositiveNumber);
  exp->add_option("--cases", cases, "Cases in a generated bundle or corpus");
  exp->add_option("--sentences", sentences, "Sentences per generated corpus case");
  exp->add_option("-o,--output", output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInputError;
  }

  const bool as_json = format == "json";
  try {
    if (*validate) return cmd_validate(bundle_path, as_json, strict);
    if (*paths) return cmd_paths(bundle_path, as_json, strict);
    if (*suggest) return cmd_suggest(bundle_path, corpus_path, block_id, k, seed, exact, as_json);
    if (*serve) {
      if (bundle_path.empty()) bundle_path = env_or("LEXPATH_BUNDLE_PATH", "");
      if (bundle_path.empty()) {
        std::cerr << "lexpath: no bundle given and LEXPATH_BUNDLE_PATH is unset\n";
        return kInputError;
      }
      if (addr.empty()) addr = env_or("LEXPATH_LISTEN_ADDR", "127.0.0.1:8080");
      return cmd_serve(bundle_path, addr);
    }
    if (*exp) {
      if (demo) {
        write_output(output, export_bundle(fixtures::demo_bundle()));
      } else if (demo_corpus) {
        write_output(output, write_corpus(fixtures::demo_corpus()));
      } else if (synthetic) {
        write_output(output, export_bundle(fixtures::generate_synthetic(seed, blocks, cases)));
      } else if (corpus) {
        write_output(output, write_corpus(fixtures::synthetic_corpus(seed, cases, sentences)));
      } else {
        std::cerr << "lexpath: export needs one of --demo, --demo-corpus, --synthetic, --corpus\n";
        return kInputError;
      }
      return kOk;
    }
  } catch (const Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "lexpath: " << e.what() << '\n';
    return kInputError;
  }
  return kOk;
}
