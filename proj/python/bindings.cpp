// Python entry points. Documents cross the boundary as JSON text; the
// package in lexpath/__init__.py decodes them.

#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lexpath/api_json.hpp"
#include "lexpath/error.hpp"
#include "lexpath/fixtures.hpp"
#include "lexpath/interchange.hpp"
#include "lexpath/retrieval.hpp"
#include "lexpath/service.hpp"
#include "lexpath/session.hpp"

namespace py = pybind11;
using namespace lexpath;
using nlohmann::json;

namespace {

py::tuple reply(const service::Response& r) { return py::make_tuple(r.status, r.body.dump()); }

std::optional<std::string> opt(const py::object& o) {
  return o.is_none() ? std::nullopt : std::optional<std::string>(o.cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_lexpath, m) {
  static py::exception<Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object value = py::make_tuple(std::string(code_name(e.code())), e.what());
      PyErr_SetObject(error.ptr(), value.ptr());
    }
  });

  m.def(
      "validate",
      [](const std::string& document, bool strict) {
        const Schema schema = read_schema_unchecked(document, ImportOptions{strict});
        return api::to_json(validate_schema(schema)).dump();
      },
      py::arg("document"), py::arg("strict") = false);

  m.def(
      "canonicalize",
      [](const std::string& document, bool strict) { return export_bundle(import_bundle(document, {strict})); },
      py::arg("document"), py::arg("strict") = false);

  m.def("paths", [](const std::string& document) {
    const Bundle bundle = import_bundle(document);
    return api::to_json(enumerate_paths(*bundle.schema)).dump();
  });

  m.def("replay", [](const std::string& document, const std::vector<std::string>& answers) {
    const Bundle bundle = import_bundle(document);
    return api::to_json(replay(*bundle.schema, bundle.store, answers)).dump();
  });

  m.def(
      "suggest",
      [](const std::string& corpus_jsonl, const std::string& query, std::size_t k, bool exact, std::uint64_t seed) {
        std::istringstream in(corpus_jsonl);
        const auto corpus = read_corpus(in);
        py::gil_scoped_release release;
        AnnParams params;
        params.seed = seed;
        const auto index = RetrievalIndex::build(corpus, params);
        return api::to_json(exact ? index.exact_topk(query, k) : index.suggest_cases(query, k)).dump();
      },
      py::arg("corpus"), py::arg("query"), py::arg("k") = kDefaultSuggestions, py::arg("exact") = false,
      py::arg("seed") = AnnParams{}.seed);

  m.def("demo_bundle", [] { return export_bundle(fixtures::demo_bundle()); });
  m.def("demo_corpus", [] { return write_corpus(fixtures::demo_corpus()); });
  m.def("walkthrough_answers", &fixtures::walkthrough_answers);
  m.def("synthetic_bundle", [](std::uint64_t seed, std::size_t blocks, std::size_t cases) {
    return export_bundle(fixtures::generate_synthetic(seed, blocks, cases));
  });
  m.def("synthetic_corpus", [](std::uint64_t seed, std::size_t cases, std::size_t sentences) {
    return write_corpus(fixtures::synthetic_corpus(seed, cases, sentences));
  });
  m.def("apportion_percentages", &service::apportion_percentages);

  py::class_<service::Service>(m, "Service")
      .def(py::init([](const std::string& admin_token, const std::string& event_log_path) {
             service::Config config;
             config.admin_token = admin_token;
             config.event_log_path = event_log_path;
             return std::make_unique<service::Service>(config);
           }),
           py::arg("admin_token") = "", py::arg("event_log_path") = "")
      .def("load_bundle", [](service::Service& s, const std::string& document) { s.load_bundle(import_bundle(document)); })
      .def("has_bundle", &service::Service::has_bundle)
      .def("create_session", [](service::Service& s) { return reply(s.create_session()); })
      .def("get_session", [](const service::Service& s, const std::string& id) { return reply(s.get_session(id)); })
      .def("submit_answer",
           [](service::Service& s, const std::string& id, const std::string& body) {
             return reply(s.submit_answer(id, json::parse(body)));
           })
      .def("revise",
           [](service::Service& s, const std::string& id, const std::string& index, const std::string& body) {
             return reply(s.revise(id, index, json::parse(body)));
           })
      .def("record_event",
           [](service::Service& s, const std::string& body) { return reply(s.record_event(json::parse(body))); })
      .def("submit_feedback",
           [](service::Service& s, const std::string& body) { return reply(s.submit_feedback(json::parse(body))); })
      .def(
          "pathway_stats",
          [](const service::Service& s, py::object from, py::object to, py::object role) {
            return reply(s.pathway_stats(opt(from), opt(to), opt(role)));
          },
          py::arg("from_") = py::none(), py::arg("to") = py::none(), py::arg("role") = py::none())
      .def("feedback_stats", [](const service::Service& s) { return reply(s.feedback_stats()); })
      .def("usage_stats", [](const service::Service& s) { return reply(s.usage_stats()); })
      .def("admin_reload", [](service::Service& s, const std::string& token) { return reply(s.admin_reload(token)); });
}
