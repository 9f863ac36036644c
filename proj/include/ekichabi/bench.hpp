#pragma once

/// @file ekichabi/bench.hpp
/// @brief Seeded random USSD walks driven through the gateway in process.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ekichabi/catalog.hpp"
#include "ekichabi/gateway.hpp"
#include "json.hpp"

namespace ekichabi {

enum class BenchMode { On, Off, Both };

const char* to_string(BenchMode m);
std::optional<BenchMode> parse_bench_mode(std::string_view s);

struct WalkOptions {
  std::size_t walks = 1000;
  std::uint64_t seed = 1;
  std::size_t max_steps = 40;
  std::size_t users = 64;  // distinct phone numbers the walks are spread over
  bool keep_transcript = false;
};

struct LatencyStats {
  std::size_t requests = 0;
  double p50_ms = 0;
  double p95_ms = 0;
  double max_ms = 0;
  double mean_ms = 0;
};

/// Nearest-rank percentile of `samples` (need not be sorted); 0 when empty.
double percentile(std::vector<double> samples, double p);
LatencyStats summarize(const std::vector<double>& samples_ms);

struct WalkRun {
  std::string mode;
  std::size_t walks = 0;
  LatencyStats latency;
  std::uint64_t transcript_hash = 0;  // FNV-1a over every response
  std::size_t max_screen_chars = 0;   // body after the CON/END prefix
  std::size_t screens_over_limit = 0;
  std::size_t max_session_chars = 0;
  std::size_t details_reached = 0;
  std::vector<std::string> transcript;  // when keep_transcript
};

/// Runs `o.walks` random navigations against a fresh gateway for `catalog`
/// with the screen cache and indexed search on or off. Throws
/// std::invalid_argument for walks == 0.
WalkRun run_walks(std::shared_ptr<const Catalog> catalog, bool cache, const WalkOptions& o);

struct BenchResult {
  std::vector<WalkRun> runs;
  std::optional<double> speedup;  // off p50 / on p50, mode both only
  std::optional<bool> identical;  // transcripts equal, mode both only
};

BenchResult run_bench(std::shared_ptr<const Catalog> catalog, BenchMode mode,
                      const WalkOptions& o);

nlohmann::json to_json(const BenchResult& r);

}  // namespace ekichabi
