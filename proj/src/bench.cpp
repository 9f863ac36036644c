#include "ekichabi/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "ekichabi/text.hpp"

namespace ekichabi {
namespace {

constexpr std::int64_t kClockStart = 1'700'000'000;

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string to_hex_u64(std::uint64_t v) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) out[i] = kHex[v & 0xF];
  return out;
}

std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

std::vector<std::uint32_t> shown_ordinals(std::string_view body) {
  std::vector<std::uint32_t> out;
  for (const auto& line : split(body, '\n')) {
    std::size_t i = 0;
    std::uint32_t v = 0;
    while (i < line.size() && line[i] >= '0' && line[i] <= '9' && i < 7) {
      v = v * 10 + static_cast<std::uint32_t>(line[i] - '0');
      ++i;
    }
    if (i == 0 || i >= line.size() || line[i] != '.') continue;
    if (v == 0 || (v >= 96 && v <= 99)) continue;
    out.push_back(v);
  }
  return out;
}

bool shows(std::string_view body, std::string_view code) {
  for (const auto& line : split(body, '\n')) {
    if (line.size() > code.size() && line.compare(0, code.size(), code) == 0 &&
        line[code.size()] == '.') {
      return true;
    }
  }
  return false;
}

// One random edit: substitute, insert, delete or swap neighbours.
std::string misspell(std::mt19937_64& rng, const std::string& word) {
  std::u32string w = decode_utf8(word);
  const char32_t letter = U'a' + static_cast<char32_t>(pick(rng, 26));
  const std::size_t at = pick(rng, w.size());
  switch (pick(rng, w.size() > 1 ? 4 : 2)) {
    case 0: w[at] = letter; break;
    case 1: w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), letter); break;
    case 2: w.erase(w.begin() + static_cast<std::ptrdiff_t>(at)); break;
    default:
      if (at + 1 < w.size()) std::swap(w[at], w[at + 1]);
      break;
  }
  std::string out;
  for (char32_t c : w) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out.empty() ? word : out;
}

std::string choose_input(std::mt19937_64& rng, const SessionState& s, const std::string& body,
                         const KeywordIndex& keywords) {
  const auto roll = pick(rng, 100);
  if (s.node == Node::Welcome) {
    if (roll < 40) return "1";
    if (roll < 80) return "2";
    if (roll < 96) return "3";
    return "4";
  }
  if (s.node == Node::TextInput) {
    if (roll < 3) return "99";
    const KindMask kinds = kinds_for(s.text_type);
    const auto all = keywords.keywords();
    for (int tries = 0; tries < 64; ++tries) {
      const Keyword& kw = all[pick(rng, all.size())];
      if (!kinds.contains(kw.kind)) continue;
      return pick(rng, 2) ? misspell(rng, kw.text) : kw.text;
    }
    return "duka";
  }
  if (s.node == Node::Disclaimer) return roll < 92 ? "0" : "99";
  if (s.node == Node::Help) return roll < 50 ? "0" : "99";

  const auto ordinals = shown_ordinals(body);
  if (roll < 2) return "98";
  if (roll < 4) return "abc";
  if (roll < 9) return "99";
  if (roll < 17 && shows(body, "0")) return "0";
  if (roll < 21 && shows(body, "96")) return "96";
  if (ordinals.empty()) return "99";
  return std::to_string(ordinals[pick(rng, ordinals.size())]);
}

}  // namespace

const char* to_string(BenchMode m) {
  switch (m) {
    case BenchMode::On: return "on";
    case BenchMode::Off: return "off";
    case BenchMode::Both: return "both";
  }
  return "?";
}

std::optional<BenchMode> parse_bench_mode(std::string_view s) {
  if (s == "on") return BenchMode::On;
  if (s == "off") return BenchMode::Off;
  if (s == "both") return BenchMode::Both;
  return std::nullopt;
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0;
  std::sort(samples.begin(), samples.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(samples.size())));
  rank = std::clamp<std::size_t>(rank, 1, samples.size());
  return samples[rank - 1];
}

LatencyStats summarize(const std::vector<double>& samples) {
  LatencyStats s;
  s.requests = samples.size();
  if (samples.empty()) return s;
  s.p50_ms = percentile(samples, 50);
  s.p95_ms = percentile(samples, 95);
  s.max_ms = *std::max_element(samples.begin(), samples.end());
  double total = 0;
  for (double v : samples) total += v;
  s.mean_ms = total / static_cast<double>(samples.size());
  return s;
}

WalkRun run_walks(std::shared_ptr<const Catalog> catalog, bool cache, const WalkOptions& o) {
  if (o.walks == 0) throw std::invalid_argument("bench: walks must be >= 1");
  std::vector<std::string> phones;
  Whitelist whitelist;
  for (std::size_t i = 0; i < std::max<std::size_t>(o.users, 1); ++i) {
    std::string digits = std::to_string(700000000 + i * 7919);
    phones.push_back("255" + digits);
    whitelist.add(phones.back());
  }
  GatewayOptions go;
  go.cache = cache;
  GatewayService gateway(catalog, std::move(whitelist), go);
  const KeywordIndex& keywords = *catalog->keywords;

  WalkRun run;
  run.mode = cache ? "on" : "off";
  run.walks = o.walks;
  std::vector<double> samples;
  std::uint64_t hash = 14695981039346656037ull;
  std::mt19937_64 rng(o.seed);
  std::int64_t now = kClockStart;

  for (std::size_t w = 0; w < o.walks; ++w) {
    GatewayRequest req;
    req.session_id = "walk-" + std::to_string(o.seed) + "-" + std::to_string(w);
    req.service_code = "*149*26#";
    req.msisdn_raw = phones[pick(rng, phones.size())];
    for (std::size_t step = 0; step <= o.max_steps; ++step) {
      const auto t0 = std::chrono::steady_clock::now();
      GatewayResponse resp = gateway.handle_request(req, now);
      const auto t1 = std::chrono::steady_clock::now();
      samples.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      now += 2;

      hash = fnv1a(fnv1a(hash, resp.body), "\n");
      if (o.keep_transcript) run.transcript.push_back(resp.body);
      const std::string body = resp.body.size() >= 4 ? resp.body.substr(4) : resp.body;
      const std::size_t chars = char_count(body);
      run.max_screen_chars = std::max(run.max_screen_chars, chars);
      if (chars > kScreenLimit) ++run.screens_over_limit;
      if (resp.body.rfind("END ", 0) == 0) {
        if (body.find('\n') != std::string::npos) ++run.details_reached;
        break;
      }

      auto stored = gateway.sessions().get(req.session_id, now);
      if (!stored) break;
      run.max_session_chars = std::max(run.max_session_chars, stored->size());
      const SessionState state = deserialize_session(*stored);
      const std::string input = choose_input(rng, state, body, keywords);
      req.text = req.text.empty() ? input : req.text + "*" + input;
    }
    now += 400;  // idle gap so the next walk never resumes a stored session
  }
  run.latency = summarize(samples);
  run.transcript_hash = hash;
  return run;
}

BenchResult run_bench(std::shared_ptr<const Catalog> catalog, BenchMode mode,
                      const WalkOptions& o) {
  BenchResult r;
  if (mode != BenchMode::Off) r.runs.push_back(run_walks(catalog, true, o));
  if (mode != BenchMode::On) r.runs.push_back(run_walks(catalog, false, o));
  if (mode == BenchMode::Both) {
    const auto& on = r.runs[0].latency;
    const auto& off = r.runs[1].latency;
    r.speedup = on.p50_ms > 0 ? off.p50_ms / on.p50_ms : 0.0;
    r.identical = r.runs[0].transcript_hash == r.runs[1].transcript_hash;
  }
  return r;
}

nlohmann::json to_json(const BenchResult& r) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"mode", run.mode},
                    {"walks", run.walks},
                    {"requests", run.latency.requests},
                    {"p50_ms", run.latency.p50_ms},
                    {"p95_ms", run.latency.p95_ms},
                    {"max_ms", run.latency.max_ms},
                    {"mean_ms", run.latency.mean_ms},
                    {"transcript_hash", to_hex_u64(run.transcript_hash)},
                    {"max_screen_chars", run.max_screen_chars},
                    {"screens_over_limit", run.screens_over_limit},
                    {"max_session_chars", run.max_session_chars},
                    {"details_reached", run.details_reached}});
  }
  nlohmann::json out = {{"runs", runs}};
  if (r.speedup) out["speedup"] = *r.speedup;
  if (r.identical) out["identical"] = *r.identical;
  return out;
}

}  // namespace ekichabi
