#include <httplib.h>

#include "lexpath/service.hpp"

namespace lexpath::service {

namespace {

void send(httplib::Response& res, const Response& out) {
  res.status = out.status;
  res.set_content(out.body.dump(), "application/json");
}

std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return nlohmann::json::object();
  auto parsed = nlohmann::json::parse(req.body, nullptr, false);
  if (parsed.is_discarded()) {
    send(res, {400, {{"error", {{"code", "PARSE_ERROR"}, {"message", "request body is not valid JSON"}}}}});
    return std::nullopt;
  }
  return parsed;
}

std::optional<std::string> query(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

void mount_routes(httplib::Server& server, Service& service) {
  server.Post("/api/v1/sessions", [&](const httplib::Request&, httplib::Response& res) {
    send(res, service.create_session());
  });
  server.Get(R"(/api/v1/sessions/([0-9A-Za-z_-]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_session(req.matches[1]));
  });
  server.Post(R"(/api/v1/sessions/([0-9A-Za-z_-]+)/answers)",
              [&](const httplib::Request& req, httplib::Response& res) {
                if (auto body = parse_body(req, res)) send(res, service.submit_answer(req.matches[1], *body));
              });
  server.Patch(R"(/api/v1/sessions/([0-9A-Za-z_-]+)/answers/([^/]+))",
               [&](const httplib::Request& req, httplib::Response& res) {
                 if (auto body = parse_body(req, res)) {
                   send(res, service.revise(req.matches[1], std::string(req.matches[2]), *body));
                 }
               });
  server.Post("/api/v1/events", [&](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service.record_event(*body));
  });
  server.Post("/api/v1/feedback", [&](const httplib::Request& req, httplib::Response& res) {
    if (auto body = parse_body(req, res)) send(res, service.submit_feedback(*body));
  });
  server.Get("/api/v1/stats/pathways", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.pathway_stats(query(req, "from"), query(req, "to"), query(req, "role")));
  });
  server.Get("/api/v1/stats/feedback", [&](const httplib::Request&, httplib::Response& res) {
    send(res, service.feedback_stats());
  });
  server.Get("/api/v1/stats/usage", [&](const httplib::Request&, httplib::Response& res) {
    send(res, service.usage_stats());
  });
  server.Post("/api/v1/admin/reload", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.admin_reload(req.get_header_value("X-Admin-Token")));
  });
  server.Get("/api/v1/health", [&](const httplib::Request&, httplib::Response& res) {
    send(res, {200, {{"status", "ok"}, {"bundle_loaded", service.has_bundle()}}});
  });
}

}  // namespace lexpath::service
