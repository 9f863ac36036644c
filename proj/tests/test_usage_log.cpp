#include <random>

#include "doctest.h"
#include "ekichabi/gateway.hpp"
#include "ekichabi/sync.hpp"
#include "ekichabi/usage_log.hpp"
#include "support.hpp"

using namespace ekichabi;

namespace {

UsageLogRecord random_record(std::mt19937_64& rng) {
  UsageLogRecord r;
  r.action = static_cast<Action>(1 + rng() % kActionCount);
  r.dt = rng() % 3 == 0 ? rng() % 100000 : rng() % 120;
  if (carries_business(r.action)) {
    r.business = static_cast<BusinessId>(1 + rng() % 20000);
  } else if (r.action == Action::FilterSearch) {
    for (std::size_t n = 1 + rng() % kMaxLoggedFacets; n; --n) {
      const std::uint8_t tag = static_cast<std::uint8_t>(1 + rng() % 5);
      r.facets.push_back({tag, tag == 1 ? 1 + rng() % 6 : rng() % 5000});
    }
  } else {
    for (std::size_t n = 1 + rng() % kMaxLoggedQuery; n; --n) {
      r.query.push_back(static_cast<char>('a' + rng() % 26));
    }
  }
  return r;
}

LogBatch random_batch(std::mt19937_64& rng, std::size_t n) {
  LogBatch b;
  b.msisdn = "255700000001";
  b.base_ts = static_cast<std::uint32_t>(1'600'000'000 + rng() % 100'000'000);
  for (auto& v : b.version) v = static_cast<std::uint8_t>(rng());
  for (std::size_t i = 0; i < n; ++i) b.records.push_back(random_record(rng));
  return b;
}

LogError::Kind error_of(std::string_view bytes, std::size_t* record = nullptr) {
  try {
    decode_batch(bytes);
  } catch (const LogError& e) {
    if (record) *record = e.record();
    return e.kind();
  }
  FAIL("expected LogError");
  return LogError::Kind::BadPayload;
}

}  // namespace

TEST_CASE("record encoding is tag, delta, payload") {
  UsageLogRecord r;
  r.action = Action::OpenDetail;
  r.dt = 3;
  r.business = 42;
  CHECK(encode_record(r) == std::string("\x05\x03\x2A", 3));

  UsageLogRecord q;
  q.action = Action::TextSearch;
  q.dt = 200;
  q.query = "duka";
  CHECK(encode_record(q) == std::string("\x07\xC8\x01\x04" "duka", 8));

  UsageLogRecord f;
  f.action = Action::FilterSearch;
  f.dt = 0;
  f.facets = {{1, 2}, {3, 7}};
  CHECK(encode_record(f) == std::string("\x06\x00\x02\x01\x02\x03\x07", 7));
}

TEST_CASE("batch header layout") {
  LogBatch b;
  b.msisdn = "255712345678";
  b.base_ts = 0x01020304;
  b.version = {1, 2, 3, 4, 5, 6, 7, 8};
  const std::string bytes = encode_batch(b);
  CHECK(bytes.size() == kLogHeaderSize + 1);
  CHECK(bytes.substr(0, 4) == "EKL1");
  CHECK(bytes.substr(4, 12) == "255712345678");
  CHECK(bytes.substr(16, 4) == std::string("\x04\x03\x02\x01", 4));
  CHECK(bytes.substr(20, 8) == std::string("\x01\x02\x03\x04\x05\x06\x07\x08", 8));
  CHECK(bytes.back() == '\0');
  CHECK(decode_batch(bytes) == b);
}

TEST_CASE("encode rejects invalid records") {
  UsageLogRecord q;
  q.action = Action::TextSearch;
  q.query = std::string(33, 'a');
  CHECK_THROWS_AS(encode_record(q), LogError);
  UsageLogRecord f;
  f.action = Action::FilterSearch;
  f.facets = {{9, 1}};
  CHECK_THROWS_AS(encode_record(f), LogError);
  LogBatch b;
  b.msisdn = "0712";
  CHECK_THROWS_AS(encode_batch(b), LogError);
}

TEST_CASE("random batches round trip") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 300; ++i) {
    const LogBatch b = random_batch(rng, rng() % 60);
    const std::string bytes = encode_batch(b);
    CHECK(bytes.size() == encoded_size(b));
    CHECK(decode_batch(bytes) == b);
  }
}

TEST_CASE("streaming decoder accepts any chunking") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    const LogBatch b = random_batch(rng, 1 + rng() % 40);
    const std::string bytes = encode_batch(b);
    BatchDecoder d;
    std::size_t at = 0;
    while (at < bytes.size()) {
      const std::size_t n = std::min<std::size_t>(1 + rng() % 9, bytes.size() - at);
      d.feed(std::string_view(bytes).substr(at, n));
      at += n;
      if (at >= kLogHeaderSize + 1) CHECK(d.header_done());
    }
    CHECK(d.records_decoded() == b.records.size());
    CHECK(d.finish() == b);
  }
}

TEST_CASE("decode error kinds") {
  std::mt19937_64 rng(4);
  LogBatch b = random_batch(rng, 0);
  for (int i = 0; i < 4; ++i) {
    UsageLogRecord r;
    r.action = Action::Call;
    r.dt = 1;
    r.business = 100 + i;
    b.records.push_back(r);
  }
  const std::string good = encode_batch(b);
  const std::size_t body = kLogHeaderSize + 1;  // count 4 is one byte

  std::string bad = good;
  bad[0] = 'X';
  CHECK(error_of(bad) == LogError::Kind::BadMagic);
  bad = good;
  bad[6] = 'a';
  std::size_t rec = 0;
  CHECK(error_of(bad, &rec) == LogError::Kind::BadHeader);
  CHECK(rec == LogError::kHeader);
  CHECK(error_of(good.substr(0, 10)) == LogError::Kind::Truncated);

  // each record is 3 bytes; cut in the middle of record 2
  CHECK(error_of(good.substr(0, body + 7), &rec) == LogError::Kind::Truncated);
  CHECK(rec == 2);
  bad = good;
  bad[body + 3] = 9;
  CHECK(error_of(bad, &rec) == LogError::Kind::BadTag);
  CHECK(rec == 1);
  bad = good;
  bad[body + 3] = 0;
  CHECK(error_of(bad) == LogError::Kind::BadTag);
  CHECK(error_of(good + "z") == LogError::Kind::TrailingBytes);

  LogBatch q = random_batch(rng, 0);
  q.records.push_back({Action::TextSearch, 0, 0, {}, "abc"});
  std::string over = encode_batch(q);
  over[body + 2] = 40;
  over += std::string(37, 'a');
  CHECK(error_of(over, &rec) == LogError::Kind::OversizeQuery);
  CHECK(rec == 0);

  LogBatch f = random_batch(rng, 0);
  f.records.push_back({Action::FilterSearch, 0, 0, {{1, 2}}, ""});
  std::string badf = encode_batch(f);
  badf[body + 3] = 8;  // facet tag
  CHECK(error_of(badf) == LogError::Kind::BadPayload);
}

TEST_CASE("record times accumulate deltas") {
  LogBatch b;
  b.msisdn = "255700000001";
  b.base_ts = 1000;
  b.records = {{Action::Call, 0, 1, {}, ""}, {Action::Call, 5, 1, {}, ""},
               {Action::Call, 10, 1, {}, ""}};
  CHECK(record_times(b) == std::vector<std::int64_t>{1000, 1005, 1015});
}

TEST_CASE("payload rendering") {
  const std::vector<std::string> pool = {"Bukoba", "Kanazi"};
  CHECK(render_payload({Action::OpenDetail, 0, 42, {}, ""}) == "business=42");
  CHECK(render_payload({Action::FilterSearch, 0, 0, {{3, 0}, {1, 2}}, ""}, &pool) ==
        "district=Bukoba;sector=2");
  CHECK(render_payload({Action::FilterSearch, 0, 0, {{4, 7}}, ""}, &pool) == "village=#7");
  CHECK(render_payload({Action::TextSearch, 0, 0, {}, "duka"}) == "query=duka");
  CHECK(parse_action_name("add_contact") == Action::AddContact);
  CHECK_FALSE(parse_action_name("share").has_value());
}

TEST_CASE("sync service: auth and idempotent ingest") {
  auto actions = std::make_shared<MemorySink>();
  GatewayService gw(testing::fixture_catalog(), Whitelist::parse("255700000001\n"));
  SyncService sync(gw, actions);

  CHECK(sync.serve_version().version == testing::fixture_catalog()->version);
  CHECK(sync.serve_version().count == 50);
  CHECK(sync.serve_snapshot() == testing::fixture_catalog()->snapshot);

  const AuthResult ok = sync.authorize("0700000001");
  CHECK(ok.authorized);
  CHECK(ok.msisdn == "255700000001");
  CHECK(ok.attempts == 1);
  const AuthResult no = sync.authorize("0700000009");
  CHECK_FALSE(no.authorized);
  CHECK(no.reason == "not enrolled");
  CHECK(sync.authorize("0700000009").attempts == 2);
  CHECK(sync.authorize("12").reason == "invalid format");

  LogBatch b;
  b.msisdn = "255700000001";
  b.base_ts = 1'700'000'000;
  b.records = {{Action::OpenDetail, 0, 3, {}, ""}, {Action::TextSearch, 4, 0, {}, "duka"}};
  const std::string bytes = encode_batch(b);
  const IngestResult first = sync.ingest_logs("255700000001", bytes);
  CHECK(first.ok);
  CHECK(first.accepted == 2);
  CHECK_FALSE(first.duplicate);
  const IngestResult again = sync.ingest_logs("255700000001", bytes);
  CHECK(again.ok);
  CHECK(again.duplicate);
  CHECK(again.accepted == 0);
  const auto lines = actions->lines();
  REQUIRE(lines.size() == 2);
  CHECK(parse_action(lines[0]) == ActionRecord{1'700'000'000, "255700000001", "open_detail",
                                               "business=3"});
  CHECK(parse_action(lines[1])->payload == "query=duka");

  CHECK_FALSE(sync.ingest_logs("255700000009", bytes).ok);
  CHECK_FALSE(sync.ingest_logs("255700000001", bytes.substr(0, bytes.size() - 1)).ok);
  LogBatch other = b;
  other.msisdn = "255700000002";
  CHECK_FALSE(sync.ingest_logs("255700000001", encode_batch(other)).ok);
  CHECK(actions->lines().size() == 2);
}
