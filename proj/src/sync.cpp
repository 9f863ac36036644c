#include "ekichabi/sync.hpp"

#include "ekichabi/phone.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/text.hpp"
#include "ekichabi/varint.hpp"

namespace ekichabi {

std::string format_action(const ActionRecord& r) {
  return std::to_string(r.ts) + '\t' + escape_field(r.msisdn) + '\t' + escape_field(r.action) +
         '\t' + escape_field(r.payload);
}

std::optional<ActionRecord> parse_action(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split(line, '\t');
  if (fields.size() != 4) return std::nullopt;
  ActionRecord r;
  try {
    std::size_t used = 0;
    r.ts = std::stoll(fields[0], &used);
    if (used != fields[0].size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  auto msisdn = unescape_field(fields[1]);
  auto action = unescape_field(fields[2]);
  auto payload = unescape_field(fields[3]);
  if (!msisdn || !action || !payload || !parse_action_name(*action)) return std::nullopt;
  r.msisdn = std::move(*msisdn);
  r.action = std::move(*action);
  r.payload = std::move(*payload);
  return r;
}

SyncService::SyncService(GatewayService& gateway, std::shared_ptr<LineSink> actions)
    : gateway_(gateway), actions_(std::move(actions)) {}

VersionInfo SyncService::serve_version() const {
  auto c = gateway_.catalog();
  return {c->version, c->directory->size()};
}

std::string SyncService::serve_snapshot() const { return gateway_.catalog()->snapshot; }

std::uint32_t SyncService::attempts(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = attempts_.find(key);
  return it == attempts_.end() ? 0 : it->second;
}

AuthResult SyncService::authorize(std::string_view phone_raw) {
  AuthResult r;
  auto n = try_normalize_msisdn(phone_raw);
  {
    std::lock_guard lock(mu_);
    r.attempts = ++attempts_[n ? *n : std::string(phone_raw)];
  }
  if (!n) {
    r.reason = "invalid format";
    return r;
  }
  r.msisdn = *n;
  r.authorized = gateway_.whitelisted(*n);
  if (!r.authorized) r.reason = "not enrolled";
  return r;
}

IngestResult SyncService::ingest_logs(std::string_view phone_raw, std::string_view bytes) {
  IngestResult out;
  auto n = try_normalize_msisdn(phone_raw);
  if (!n || !gateway_.whitelisted(*n)) {
    out.error = "unauthorized";
    return out;
  }
  LogBatch batch;
  try {
    batch = decode_batch(bytes);
  } catch (const LogError& e) {
    out.error = std::string(to_string(e.kind())) + ": " + e.what();
    if (e.record() != LogError::kHeader) out.record = e.record();
    return out;
  }
  if (batch.msisdn != *n) {
    out.error = "batch belongs to another device";
    return out;
  }

  std::string key = batch.msisdn + ':' + std::to_string(batch.base_ts) + ':' +
                    std::to_string(batch.records.size());
  if (!batch.records.empty()) key += ':' + to_hex(as_bytes(encode_record(batch.records[0])));

  auto catalog = gateway_.catalog();
  const bool same_version = to_hex(batch.version) == catalog->version;
  const auto times = record_times(batch);

  std::lock_guard lock(mu_);
  out.ok = true;
  if (!ingested_.insert(key).second) {
    out.duplicate = true;
    return out;
  }
  for (std::size_t i = 0; i < batch.records.size(); ++i) {
    const auto& r = batch.records[i];
    ActionRecord a{times[i], batch.msisdn, action_name(r.action),
                   render_payload(r, same_version ? &catalog->pool : nullptr)};
    actions_->write(format_action(a));
  }
  actions_->flush();
  out.accepted = batch.records.size();
  return out;
}

}  // namespace ekichabi
