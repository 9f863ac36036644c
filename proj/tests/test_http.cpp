#include <thread>

#include "doctest.h"
#include "ekichabi/http_server.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/sync.hpp"
#include "ekichabi/usage_log.hpp"
#include "httplib.h"
#include "json.hpp"
#include "support.hpp"

using namespace ekichabi;
using nlohmann::json;

namespace {

struct Server {
  std::shared_ptr<MemorySink> actions = std::make_shared<MemorySink>();
  GatewayService gateway{testing::fixture_catalog(), Whitelist::parse("255700000001\n")};
  SyncService sync{gateway, actions};
  HttpServer http;
  int port;
  std::thread thread;

  explicit Server(std::string token = {})
      : http(gateway, sync, HttpOptions{"127.0.0.1", 0, std::nullopt, std::move(token)}),
        port(http.bind()),
        thread([this] { http.serve(); }) {
    for (int i = 0; i < 200 && !http.running(); ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  ~Server() {
    http.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST_CASE("http: ussd form and json") {
  Server s;
  auto c = s.client();
  httplib::Params p = {{"sessionId", "h1"}, {"serviceCode", "*149*26#"},
                       {"phoneNumber", "+255700000001"}, {"text", ""}};
  auto r = c.Post("/ussd", p);
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->body.rfind("CON Karibu eKichabi", 0) == 0);
  p = {{"sessionId", "h1"}, {"serviceCode", "*149*26#"}, {"phoneNumber", "+255700000001"},
       {"text", "1"}};
  r = c.Post("/ussd", p);
  CHECK(r->body.rfind("CON Select sector", 0) == 0);

  const json j = {{"sessionId", "h1"}, {"phoneNumber", "255700000001"}, {"text", "1*1"}};
  r = c.Post("/ussd", j.dump(), "application/json");
  CHECK(r->body.rfind("CON Select subsector", 0) == 0);

  r = c.Post("/ussd", "{oops", "application/json");
  CHECK(r->status == 400);
  r = c.Post("/ussd", httplib::Params{{"sessionId", "x"}});
  CHECK(r->status == 400);
  r = c.Post("/ussd", httplib::Params{{"sessionId", "x"}, {"phoneNumber", "255711111111"}});
  CHECK(r->body.rfind("END ", 0) == 0);
}

TEST_CASE("http: directory version and snapshot") {
  Server s;
  auto c = s.client();
  auto v = c.Get("/directory/version");
  REQUIRE(v);
  const json vj = json::parse(v->body);
  CHECK(vj["version"] == testing::fixture_catalog()->version);
  CHECK(vj["count"] == 50);
  auto snap = c.Get("/directory/snapshot");
  REQUIRE(snap);
  CHECK(snap->status == 200);
  CHECK(snap->body == testing::fixture_catalog()->snapshot);
  CHECK(snap->get_header_value("ETag") == "\"" + testing::fixture_catalog()->version + "\"");
  CHECK(decode_snapshot(snap->body) == testing::fixture_directory());
  auto same = c.Get("/directory/snapshot",
                    httplib::Headers{{"If-None-Match", snap->get_header_value("ETag")}});
  CHECK(same->status == 304);
}

TEST_CASE("http: auth and log upload") {
  Server s;
  auto c = s.client();
  auto a = c.Post("/auth", R"({"phone":"0700000001"})", "application/json");
  REQUIRE(a);
  json aj = json::parse(a->body);
  CHECK(aj["authorized"] == true);
  CHECK(aj["msisdn"] == "255700000001");
  CHECK(aj["attempts"] == 1);
  a = c.Post("/auth", R"({"phone":"0700000005"})", "application/json");
  aj = json::parse(a->body);
  CHECK(aj["authorized"] == false);
  CHECK(aj["reason"] == "not enrolled");
  CHECK(c.Post("/auth", "nope", "application/json")->status == 400);

  LogBatch b;
  b.msisdn = "255700000001";
  b.base_ts = 1'700'000'000;
  b.records = {{Action::Call, 0, 4, {}, ""}};
  const std::string bytes = encode_batch(b);
  httplib::Headers h = {{"X-Device-Phone", "255700000001"}};
  auto up = c.Post("/logs", h, bytes, "application/octet-stream");
  REQUIRE(up);
  CHECK(up->status == 200);
  CHECK(json::parse(up->body)["accepted"] == 1);
  up = c.Post("/logs", h, bytes, "application/octet-stream");
  CHECK(json::parse(up->body)["duplicate"] == true);

  auto denied = c.Post("/logs", httplib::Headers{{"X-Device-Phone", "255700000009"}}, bytes,
                       "application/octet-stream");
  CHECK(denied->status == 403);
  auto cut = c.Post("/logs", h, bytes.substr(0, bytes.size() - 1), "application/octet-stream");
  CHECK(cut->status == 400);
  CHECK(json::parse(cut->body)["record"] == 0);
  CHECK(c.Post("/logs", bytes, "application/octet-stream")->status == 400);
  CHECK(s.actions->lines().size() == 1);
}

TEST_CASE("http: admin endpoints") {
  Server s("secret");
  auto c = s.client();
  CHECK(c.Post("/admin/whitelist", "255711111111\n", "text/plain")->status == 403);
  httplib::Headers h = {{"X-Admin-Token", "secret"}};
  auto w = c.Post("/admin/whitelist", h, "255711111111\nbad\n", "text/plain");
  REQUIRE(w);
  CHECK(json::parse(w->body)["size"] == 1);
  CHECK(json::parse(w->body)["rejected"] == 1);
  CHECK(s.gateway.whitelisted("255711111111"));

  auto bad = c.Post("/admin/snapshot", h, "EKD9", "application/octet-stream");
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["kind"] == "bad magic");
  const std::string snap = encode_snapshot(generate_synthetic(3, 20));
  auto ok = c.Post("/admin/snapshot", h, snap, "application/octet-stream");
  CHECK(ok->status == 200);
  CHECK(json::parse(ok->body)["version"] == snapshot_version(snap));

  auto m = c.Get("/metrics");
  REQUIRE(m);
  const json mj = json::parse(m->body);
  CHECK(mj["version"] == snapshot_version(snap));
  CHECK(mj.contains("cache"));
}
