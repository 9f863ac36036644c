#pragma once

/// @file ekichabi/sync.hpp
/// @brief Server side of offline-client sync: directory version and
/// snapshot, phone authorization, usage-log ingestion.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "ekichabi/gateway.hpp"
#include "ekichabi/usage_log.hpp"

namespace ekichabi {

struct VersionInfo {
  std::string version;
  std::size_t count = 0;
};

struct AuthResult {
  bool authorized = false;
  std::string msisdn;   // canonical, empty when the number is invalid
  std::string reason;   // set when refused
  std::uint32_t attempts = 0;
};

struct IngestResult {
  bool ok = false;
  std::size_t accepted = 0;
  bool duplicate = false;
  std::string error;
  std::optional<std::size_t> record;  // offending record for decode failures
};

/// One line of the action store: expanded form of a usage-log record.
struct ActionRecord {
  std::int64_t ts = 0;
  std::string msisdn;
  std::string action;
  std::string payload;
  bool operator==(const ActionRecord&) const = default;
};

/// Tab-separated ts, msisdn, action, payload, escaped as in the hit log.
std::string format_action(const ActionRecord& r);
std::optional<ActionRecord> parse_action(std::string_view line);

class SyncService {
 public:
  /// Shares the directory and whitelist of `gateway`; expanded actions go to
  /// `actions`.
  SyncService(GatewayService& gateway, std::shared_ptr<LineSink> actions);

  VersionInfo serve_version() const;
  std::string serve_snapshot() const;

  AuthResult authorize(std::string_view phone_raw);

  IngestResult ingest_logs(std::string_view phone_raw, std::string_view bytes);

  std::uint32_t attempts(const std::string& key) const;

 private:
  GatewayService& gateway_;
  std::shared_ptr<LineSink> actions_;
  mutable std::mutex mu_;
  std::map<std::string, std::uint32_t> attempts_;
  std::set<std::string> ingested_;
};

}  // namespace ekichabi
