#include "ekichabi/http_server.hpp"

#include "ekichabi/snapshot.hpp"
#include "httplib.h"
#include "json.hpp"

namespace ekichabi {
namespace {

using nlohmann::json;

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

bool is_json(const httplib::Request& req) {
  return req.get_header_value("Content-Type").rfind("application/json", 0) == 0;
}

// Reads a USSD request from form fields or a JSON object.
std::optional<GatewayRequest> parse_ussd(const httplib::Request& req) {
  GatewayRequest r;
  if (is_json(req)) {
    auto body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) return std::nullopt;
    auto field = [&](const char* key) {
      auto it = body.find(key);
      return it != body.end() && it->is_string() ? it->get<std::string>() : std::string();
    };
    r.session_id = field("sessionId");
    r.service_code = field("serviceCode");
    r.msisdn_raw = field("phoneNumber");
    r.text = field("text");
  } else {
    r.session_id = req.get_param_value("sessionId");
    r.service_code = req.get_param_value("serviceCode");
    r.msisdn_raw = req.get_param_value("phoneNumber");
    r.text = req.get_param_value("text");
  }
  return r;
}

}  // namespace

struct HttpServer::Impl {
  GatewayService& gateway;
  SyncService& sync;
  HttpOptions options;
  httplib::Server server;
  int port = -1;

  Impl(GatewayService& g, SyncService& s, HttpOptions o)
      : gateway(g), sync(s), options(std::move(o)) {
    routes();
  }

  bool admin_ok(const httplib::Request& req, httplib::Response& res) const {
    if (options.admin_token.empty() ||
        req.get_header_value("X-Admin-Token") == options.admin_token) {
      return true;
    }
    reply_json(res, 403, {{"error", "admin token required"}});
    return false;
  }

  void routes() {
    server.Post("/ussd", [this](const httplib::Request& req, httplib::Response& res) {
      auto r = parse_ussd(req);
      if (!r) {
        res.status = 400;
        res.set_content("malformed request body", "text/plain");
        return;
      }
      auto out = gateway.handle_request(*r);
      res.status = out.status;
      res.set_content(out.body, "text/plain; charset=utf-8");
    });

    server.Post("/admin/whitelist", [this](const httplib::Request& req, httplib::Response& res) {
      if (!admin_ok(req, res)) return;
      auto w = Whitelist::parse(req.body);
      const json body = {{"size", w.size()}, {"rejected", w.rejected()}};
      gateway.reload_whitelist(std::move(w));
      reply_json(res, 200, body);
    });

    server.Post("/admin/snapshot", [this](const httplib::Request& req, httplib::Response& res) {
      if (!admin_ok(req, res)) return;
      try {
        reply_json(res, 200, {{"version", gateway.reload_directory(req.body)}});
      } catch (const SnapshotError& e) {
        reply_json(res, 400, {{"error", e.what()}, {"kind", to_string(e.kind())}});
      } catch (const std::exception& e) {
        reply_json(res, 400, {{"error", e.what()}});
      }
    });

    server.Get("/directory/version", [this](const httplib::Request&, httplib::Response& res) {
      auto v = sync.serve_version();
      reply_json(res, 200, {{"version", v.version}, {"count", v.count}});
    });

    server.Get("/directory/snapshot", [this](const httplib::Request& req, httplib::Response& res) {
      auto c = gateway.catalog();
      const std::string etag = "\"" + c->version + "\"";
      res.set_header("ETag", etag);
      if (req.get_header_value("If-None-Match") == etag) {
        res.status = 304;
        return;
      }
      res.set_content(c->snapshot, "application/octet-stream");
    });

    server.Post("/auth", [this](const httplib::Request& req, httplib::Response& res) {
      auto body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object() || !body.contains("phone") ||
          !body["phone"].is_string()) {
        reply_json(res, 400, {{"error", "expected {\"phone\": ...}"}});
        return;
      }
      auto a = sync.authorize(body["phone"].get<std::string>());
      json out = {{"authorized", a.authorized}, {"attempts", a.attempts}};
      if (!a.msisdn.empty()) out["msisdn"] = a.msisdn;
      if (!a.reason.empty()) out["reason"] = a.reason;
      reply_json(res, 200, out);
    });

    server.Post("/logs", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string phone = req.get_header_value("X-Device-Phone");
      if (phone.empty()) {
        reply_json(res, 400, {{"error", "missing X-Device-Phone"}});
        return;
      }
      auto r = sync.ingest_logs(phone, req.body);
      if (!r.ok) {
        json out = {{"error", r.error}};
        if (r.record) out["record"] = *r.record;
        reply_json(res, r.error == "unauthorized" ? 403 : 400, out);
        return;
      }
      reply_json(res, 200, {{"accepted", r.accepted}, {"duplicate", r.duplicate}});
    });

    server.Get("/metrics", [this](const httplib::Request&, httplib::Response& res) {
      auto s = gateway.stats();
      json out = {{"requests", s.requests},     {"refused", s.refused},
                  {"malformed", s.malformed},   {"errors", s.errors},
                  {"restarts", s.restarts},     {"sessions", gateway.sessions().size()},
                  {"hits_written", gateway.hits().written()},
                  {"hits_dropped", gateway.hits().dropped()},
                  {"version", gateway.version()}};
      if (auto* c = gateway.cache()) {
        out["cache"] = {{"size", c->size()}, {"hits", c->hits()}, {"misses", c->misses()}};
      }
      reply_json(res, 200, out);
    });

    if (options.ui_dir) {
      if (!server.set_mount_point("/", options.ui_dir->string())) {
        throw std::runtime_error("cannot serve UI directory " + options.ui_dir->string());
      }
    }
  }
};

HttpServer::HttpServer(GatewayService& gateway, SyncService& sync, HttpOptions options)
    : impl_(std::make_unique<Impl>(gateway, sync, std::move(options))) {}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  if (impl_->options.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(impl_->options.host);
  } else if (impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) {
    impl_->port = impl_->options.port;
  }
  if (impl_->port < 0) {
    throw std::runtime_error("cannot bind " + impl_->options.host + ":" +
                             std::to_string(impl_->options.port));
  }
  return impl_->port;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace ekichabi
