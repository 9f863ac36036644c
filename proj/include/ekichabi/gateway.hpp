#pragma once

/// @file ekichabi/gateway.hpp
/// @brief USSD gateway front end: whitelist, session store, screen cache and
/// hit log around the session machine.
///
/// Requests follow the usual aggregator convention: `text` carries every
/// input of the session joined by '*', and the reply body starts with
/// "CON " (expects more input) or "END " (session over). Only the newest
/// segment is fed to the session machine; the stored state is authoritative.

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ekichabi/catalog.hpp"
#include "ekichabi/lru_cache.hpp"
#include "ekichabi/navigator.hpp"
#include "ekichabi/strings.hpp"

namespace ekichabi {

inline constexpr std::int64_t kSessionTtlSeconds = 180;

struct GatewayRequest {
  std::string session_id;
  std::string service_code;
  std::string msisdn_raw;
  std::string text;
};

struct GatewayResponse {
  int status = 200;   // 400 for malformed requests
  std::string body;   // "CON ..." / "END ..." or an error message
};

std::int64_t unix_now();

// ---- whitelist -------------------------------------------------------------

class Whitelist {
 public:
  Whitelist() = default;

  /// One raw number per line; blank lines and '#' comments are ignored.
  /// Lines that do not normalize are counted in rejected() and skipped.
  static Whitelist parse(std::string_view text);
  static Whitelist from_file(const std::filesystem::path& path);

  bool contains(std::string_view canonical) const { return numbers_.count(std::string(canonical)) > 0; }
  void add(std::string_view raw);
  std::size_t size() const { return numbers_.size(); }
  std::size_t rejected() const { return rejected_; }

 private:
  std::set<std::string> numbers_;
  std::size_t rejected_ = 0;
};

// ---- session store ---------------------------------------------------------

class SessionStore {
 public:
  virtual ~SessionStore() = default;
  /// nullopt if absent or idle for more than the TTL (expired entries are
  /// dropped on access).
  virtual std::optional<std::string> get(const std::string& session_id, std::int64_t now) = 0;
  virtual void put(const std::string& session_id, std::string state, std::int64_t now) = 0;
  virtual void erase(const std::string& session_id) = 0;
  /// Drops every expired entry; returns how many were dropped.
  virtual std::size_t expire(std::int64_t now) = 0;
  virtual std::size_t size() const = 0;
};

class InMemorySessionStore final : public SessionStore {
 public:
  explicit InMemorySessionStore(std::int64_t ttl_seconds = kSessionTtlSeconds)
      : ttl_(ttl_seconds) {}

  std::optional<std::string> get(const std::string& session_id, std::int64_t now) override;
  void put(const std::string& session_id, std::string state, std::int64_t now) override;
  void erase(const std::string& session_id) override;
  std::size_t expire(std::int64_t now) override;
  std::size_t size() const override;

 private:
  struct Entry {
    std::string state;
    std::int64_t last_active;
  };
  std::int64_t ttl_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
};

// ---- screen cache ----------------------------------------------------------

class ScreenCache final : public ScreenMemo {
 public:
  explicit ScreenCache(std::size_t capacity) : lru_(capacity) {}

  std::optional<Screen> lookup(const std::string& key) override { return lru_.get(key); }
  void store(const std::string& key, const Screen& screen) override { lru_.put(key, screen); }

  void clear() { lru_.clear(); }
  std::size_t size() const { return lru_.size(); }
  std::size_t capacity() const { return lru_.capacity(); }
  std::size_t hits() const { return lru_.hits(); }
  std::size_t misses() const { return lru_.misses(); }

 private:
  LruCache<std::string, Screen> lru_;
};

// ---- hit log ---------------------------------------------------------------

/// Destination for newline-delimited records.
class LineSink {
 public:
  virtual ~LineSink() = default;
  /// Returns false when the line could not be written.
  virtual bool write(std::string_view line) = 0;
  virtual bool flush() = 0;
};

class FileSink final : public LineSink {
 public:
  /// Appends to `path`. An unopenable path gives a sink whose writes fail.
  explicit FileSink(const std::filesystem::path& path);
  bool write(std::string_view line) override;
  bool flush() override;

 private:
  std::ofstream out_;
};

class MemorySink final : public LineSink {
 public:
  bool write(std::string_view line) override;
  bool flush() override { return true; }
  std::vector<std::string> lines() const;
  /// Makes every later write fail; for exercising the drop counter.
  void set_broken(bool broken) { broken_ = broken; }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> lines_;
  std::atomic<bool> broken_ = false;
};

class NullSink final : public LineSink {
 public:
  bool write(std::string_view) override { return true; }
  bool flush() override { return true; }
};

struct HitRecord {
  std::int64_t ts = 0;
  std::string session_id;
  std::string msisdn;
  std::string node;   // node tag of the screen served, "X" for refusals
  std::string input;  // newest input segment, "" for the opening request
  bool operator==(const HitRecord&) const = default;
};

/// Tab-separated, with '\\', tab, CR and LF escaped as \\ \t \r \n.
std::string format_hit(const HitRecord& r);
/// nullopt for a line that is not a hit record.
std::optional<HitRecord> parse_hit(std::string_view line);

std::string escape_field(std::string_view s);
std::optional<std::string> unescape_field(std::string_view s);

class HitLog {
 public:
  explicit HitLog(std::shared_ptr<LineSink> sink, std::size_t flush_every = 100);
  ~HitLog();

  /// Never throws; a failed write only bumps dropped().
  void append(const HitRecord& r);
  void flush();

  std::uint64_t written() const { return written_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  std::mutex mu_;
  std::shared_ptr<LineSink> sink_;
  std::size_t flush_every_;
  std::size_t pending_ = 0;
  std::atomic<std::uint64_t> written_ = 0;
  std::atomic<std::uint64_t> dropped_ = 0;
};

// ---- disclaimer flags ------------------------------------------------------

/// Which numbers have seen the disclaimer. With a path, flags are loaded at
/// construction and appended as they are set.
class DisclaimerStore {
 public:
  DisclaimerStore() = default;
  explicit DisclaimerStore(std::filesystem::path path);

  bool seen(const std::string& msisdn) const;
  void mark(const std::string& msisdn);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::set<std::string> seen_;
  std::optional<std::filesystem::path> path_;
};

// ---- service ---------------------------------------------------------------

struct GatewayOptions {
  /// false: linear-scan search and no screen cache (the benchmark baseline).
  bool cache = true;
  std::size_t cache_capacity = 20000;
  std::int64_t ttl_seconds = kSessionTtlSeconds;
  Strings strings;
};

struct GatewayStats {
  std::uint64_t requests = 0;
  std::uint64_t refused = 0;
  std::uint64_t malformed = 0;
  std::uint64_t errors = 0;
  std::uint64_t restarts = 0;  // sessions started because state was missing or expired
};

class GatewayService {
 public:
  GatewayService(std::shared_ptr<const Catalog> catalog, Whitelist whitelist,
                 GatewayOptions options = {},
                 std::shared_ptr<SessionStore> sessions = nullptr,
                 std::shared_ptr<HitLog> hits = nullptr,
                 std::shared_ptr<DisclaimerStore> disclaimers = nullptr);

  GatewayResponse handle_request(const GatewayRequest& r);
  GatewayResponse handle_request(const GatewayRequest& r, std::int64_t now);

  /// Swaps in a new directory. Throws SnapshotError and keeps the old one
  /// when the bytes are invalid. Clears the screen cache either way on
  /// success.
  std::string reload_directory(std::string_view snapshot);
  void reload_whitelist(Whitelist w);

  std::shared_ptr<const Catalog> catalog() const { return catalog_.get(); }
  std::string version() const { return catalog()->version; }
  bool whitelisted(std::string_view raw) const;

  const ScreenCache* cache() const { return cache_.get(); }
  SessionStore& sessions() { return *sessions_; }
  HitLog& hits() { return *hits_; }
  DisclaimerStore& disclaimers() { return *disclaimers_; }
  const Strings& strings() const { return options_.strings; }
  GatewayStats stats() const;

 private:
  static constexpr std::size_t kStripes = 64;

  std::mutex& stripe(const std::string& session_id);

  CatalogHolder catalog_;
  mutable std::mutex whitelist_mu_;
  Whitelist whitelist_;
  GatewayOptions options_;
  std::shared_ptr<SessionStore> sessions_;
  std::shared_ptr<HitLog> hits_;
  std::shared_ptr<DisclaimerStore> disclaimers_;
  std::unique_ptr<ScreenCache> cache_;
  std::array<std::mutex, kStripes> stripes_;

  std::atomic<std::uint64_t> requests_ = 0, refused_ = 0, malformed_ = 0, errors_ = 0,
                             restarts_ = 0;
};

}  // namespace ekichabi
