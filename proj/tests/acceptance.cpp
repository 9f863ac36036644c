// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Needs only the core library.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ekichabi/analytics.hpp"
#include "ekichabi/bench.hpp"
#include "ekichabi/gateway.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/sync.hpp"
#include "ekichabi/text.hpp"
#include "ekichabi/usage_log.hpp"
#include "support.hpp"

using namespace ekichabi;

namespace {

int failures = 0;

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

void screen_contract() {
  WalkOptions o;
  o.walks = 10000;
  o.seed = 2024;
  const WalkRun run = run_walks(testing::big_catalog(), true, o);
  const bool ok = run.screens_over_limit == 0 && run.max_screen_chars <= kScreenLimit &&
                  run.max_session_chars <= kSessionStringLimit;
  report("screen-contract", ok,
         fmt("%zu walks, %zu screens, longest %zu chars, %zu over 160, session string max %zu",
             run.walks, run.latency.requests, run.max_screen_chars, run.screens_over_limit,
             run.max_session_chars));
}

// ---------------------------------------------------------------------------
// Exhaustive enumeration over the fixture. Every list item on every page is
// chosen; 96 is never sent. Text queries are each vocabulary keyword with one
// extra letter so the keyword list is always shown, plus the exact keyword.

struct Enumeration {
  std::map<EntryPath, std::map<std::size_t, std::size_t>> depths;  // path -> depth -> count
  std::map<std::size_t, std::size_t> exact_depths;                 // text, keyword list skipped
  std::size_t no_jump_paths = 0, no_jump_bad = 0;
  std::size_t text_direct = 0, text_direct_bad = 0;
  std::size_t jump_checks = 0, jump_bad = 0;
  std::size_t show_checks = 0, show_bad = 0;
  std::string first_bad;
};

class Enumerator {
 public:
  explicit Enumerator(std::shared_ptr<const Catalog> c)
      : c_(std::move(c)), m_(*c_->indexed, Strings::defaults(), c_->version) {}

  Enumeration run() {
    const SessionState start = m_.start("255700000001", true).state;
    for (const char* in : {"1", "2", "3"}) {
      follow(start, in, false, false);
    }
    return e_;
  }

 private:
  std::size_t matches(const SessionState& s) const {
    std::vector<BusinessId> ids;
    if (s.keyword) ids = c_->keywords->resolve(*s.keyword);
    return testing::brute_count(*c_->directory, s.filters, s.keyword ? &ids : nullptr);
  }

  bool facets_left(const SessionState& s) const {
    for (Facet f : facet_order(s.entry_path)) {
      if (!s.filters.is_set(f)) return true;
    }
    return false;
  }

  void note_bad(const SessionState& s, const std::string& why) {
    if (e_.first_bad.empty()) e_.first_bad = why + " at " + serialize_session(s);
  }

  // Every item index shown on the current node, across pages.
  std::vector<std::pair<std::uint32_t, std::size_t>> choices(const SessionState& s) const {
    std::vector<std::pair<std::uint32_t, std::size_t>> out;
    const auto pages = m_.pages(s);
    for (std::size_t p = 0; p < pages.size(); ++p) {
      for (std::size_t i = pages[p].first; i < pages[p].second; ++i) {
        out.emplace_back(static_cast<std::uint32_t>(p), i);
      }
    }
    return out;
  }

  // `jumped`: a list was entered while facets were still unset.
  void follow(SessionState s, const std::string& input, bool jumped, bool exact) {
    const Node from = s.node;
    const bool into_filter = is_filter_node(from) || from == Node::KeywordSelect ||
                             from == Node::TextInput || from == Node::Welcome;
    const StepResult r = m_.step(s, input);
    if (r.invalid) {
      note_bad(s, "rejected input '" + input + "'");
      ++e_.no_jump_bad;
      return;
    }
    const SessionState& n = r.state;
    if (into_filter && (is_filter_node(n.node) || n.node == Node::BusinessList)) {
      ++e_.jump_checks;
      const bool small = matches(n) <= kJumpThreshold;
      const bool expect_list = small || !facets_left(n);
      if ((n.node == Node::BusinessList) != expect_list) {
        ++e_.jump_bad;
        note_bad(n, "jump rule");
      }
      if (n.node == Node::BusinessList && facets_left(n)) jumped = true;
    }
    visit(n, jumped, exact);
  }

  void visit(const SessionState& s, bool jumped, bool exact) {
    switch (s.node) {
      case Node::BusinessDetail: {
        const std::size_t depth = s.trail.size() + 1;
        if (exact) {
          ++e_.exact_depths[depth];
          return;
        }
        ++e_.depths[s.entry_path][depth];
        if (s.entry_path != EntryPath::Text && !jumped) {
          ++e_.no_jump_paths;
          if (depth != 8) {
            ++e_.no_jump_bad;
            note_bad(s, "depth " + std::to_string(depth));
          }
        }
        if (s.entry_path == EntryPath::Text && s.trail.size() >= 2 &&
            s.trail[s.trail.size() - 2].node == Node::KeywordSelect) {
          ++e_.text_direct;
          if (depth != 6) ++e_.text_direct_bad;
        }
        return;
      }
      case Node::TextTypeMenu:
        for (const char* in : {"1", "2", "3", "4"}) follow(s, in, jumped, exact);
        return;
      case Node::TextInput: {
        const KindMask kinds = kinds_for(s.text_type);
        for (const auto& kw : c_->keywords->keywords()) {
          if (!kinds.contains(kw.kind)) continue;
          follow(s, kw.text + "q", jumped, false);
          const auto exact_hits = c_->keywords->fuzzy_candidates(kw.text, 2, kinds);
          if (exact_hits.size() == 1 || exact_hits[1].distance > 0) {
            follow(s, kw.text, jumped, true);
          }
        }
        return;
      }
      default:
        break;
    }
    if (is_filter_node(s.node)) {
      ++e_.show_checks;
      if (m_.step(s, "96").state.node != Node::BusinessList) ++e_.show_bad;
    }
    for (const auto& [page, index] : choices(s)) {
      SessionState at = s;
      at.page = page;
      follow(at, std::to_string(ordinal_for(index)), jumped, exact);
    }
  }

  std::shared_ptr<const Catalog> c_;
  SessionMachine m_;
  Enumeration e_;
};

std::string histogram(const std::map<std::size_t, std::size_t>& h) {
  std::string out;
  for (const auto& [d, n] : h) out += (out.empty() ? "" : " ") + std::to_string(d) + "x" + std::to_string(n);
  return out.empty() ? "none" : out;
}

void path_depth_and_jump() {
  const auto t0 = std::chrono::steady_clock::now();
  const Enumeration e = Enumerator(testing::fixture_catalog()).run();
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool in_range = true;
  std::size_t total = 0;
  for (const auto& [path, h] : e.depths) {
    for (const auto& [d, n] : h) {
      total += n;
      if (d < 6 || d > 8) in_range = false;
    }
  }
  const auto& cat = e.depths.count(EntryPath::Category) ? e.depths.at(EntryPath::Category)
                                                          : std::map<std::size_t, std::size_t>{};
  const auto& loc = e.depths.count(EntryPath::Location) ? e.depths.at(EntryPath::Location)
                                                          : std::map<std::size_t, std::size_t>{};
  const auto& txt = e.depths.count(EntryPath::Text) ? e.depths.at(EntryPath::Text)
                                                      : std::map<std::size_t, std::size_t>{};
  const bool ok = in_range && e.no_jump_bad == 0 && e.no_jump_paths > 0 && e.text_direct > 0 &&
                  e.text_direct_bad == 0 && secs < 10.0;
  report("path-depth", ok,
         fmt("%zu paths in %.2f s; category %s; location %s; text %s; %zu unjumped "
             "category/location paths all 8 (%zu not); %zu keyword-list-to-list text paths all 6 "
             "(%zu not); exact unique queries skip the keyword list: %s%s%s",
             total, secs, histogram(cat).c_str(), histogram(loc).c_str(), histogram(txt).c_str(),
             e.no_jump_paths, e.no_jump_bad, e.text_direct, e.text_direct_bad,
             histogram(e.exact_depths).c_str(), e.first_bad.empty() ? "" : "; first problem: ",
             e.first_bad.c_str()));
  report("jump-rule", e.jump_bad == 0 && e.show_bad == 0 && e.jump_checks > 0,
         fmt("%zu selections checked (list iff <=10 matches or no facet left), %zu wrong; "
             "96 on %zu filter screens, %zu did not jump",
             e.jump_checks, e.jump_bad, e.show_checks, e.show_bad));
}

// ---------------------------------------------------------------------------

void fuzzy_oracle() {
  const auto c = testing::big_catalog();
  const KeywordIndex& ix = *c->keywords;
  std::mt19937_64 rng(77);
  const auto kws = ix.keywords();
  std::vector<std::string> queries = {"korogwe", "kyera"};
  while (queries.size() < 1002) {
    std::u32string w = decode_utf8(kws[rng() % kws.size()].text);
    const char32_t letter = U'a' + static_cast<char32_t>(rng() % 26);
    const std::size_t at = rng() % w.size();
    switch (rng() % 4) {
      case 0: w[at] = letter; break;
      case 1: w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), letter); break;
      case 2: if (w.size() > 1) w.erase(w.begin() + static_cast<std::ptrdiff_t>(at)); break;
      default: if (at + 1 < w.size()) std::swap(w[at], w[at + 1]); break;
    }
    const std::string q = trim(testing::utf8(w));
    if (!q.empty()) queries.push_back(q);
  }
  std::size_t mismatches = 0;
  for (const auto& q : queries) {
    if (ix.fuzzy_candidates(q, 8) != testing::brute_force_candidates(ix, q, 8)) ++mismatches;
  }
  auto has = [&](const char* q, const char* want) {
    for (const auto& cand : ix.fuzzy_candidates(q, 8)) {
      if (cand.text == want) return true;
    }
    return false;
  };
  const bool pairs = has("korogwe", "karagwe") && has("kyera", "kyerwa");
  std::size_t exact_bad = 0;
  for (const auto& kw : kws) {
    const auto got = ix.fuzzy_candidates(kw.text, 8);
    if (got.empty() || got.front().distance != 0 || got.front().text != kw.text) ++exact_bad;
  }
  report("fuzzy-oracle", mismatches == 0 && pairs && exact_bad == 0,
         fmt("%zu queries vs brute force, %zu differ; korogwe->karagwe and kyera->kyerwa %s; "
             "%zu exact keywords, %zu not ranked first",
             queries.size(), mismatches, pairs ? "found" : "MISSING", kws.size(), exact_bad));
}

// ---------------------------------------------------------------------------

void snapshot_size() {
  const Directory d = generate_synthetic(7, 10000);
  const std::string bytes = encode_snapshot(d);
  const Directory back = decode_snapshot(bytes);
  const bool lossless = back == d && encode_snapshot(back) == bytes;
  const bool ok = bytes.size() <= 2'000'000 && lossless;
  report("snapshot-size", ok,
         fmt("seed 7, 10000 businesses: %zu bytes (limit 2000000), round trip %s", bytes.size(),
             lossless ? "lossless" : "LOSSY"));
}

// ---------------------------------------------------------------------------

void log_budget() {
  std::mt19937_64 rng(5);
  LogBatch small;
  small.msisdn = "255700000001";
  small.base_ts = 1'700'000'000;
  for (int i = 0; i < 20000; ++i) {
    UsageLogRecord r;
    r.action = static_cast<Action>(1 + rng() % 5);
    r.dt = rng() % 120;
    r.business = static_cast<BusinessId>(1 + rng() % 10000);
    small.records.push_back(r);
  }
  const std::size_t small_bytes = encode_batch(small).size();

  LogBatch worst;
  worst.msisdn = "255700000001";
  worst.base_ts = 1'700'000'000;
  for (int i = 0; i < 6250; ++i) {
    UsageLogRecord r;
    r.action = Action::TextSearch;
    r.dt = rng() % 120;
    for (int k = 0; k < 32; ++k) r.query.push_back(static_cast<char>('a' + rng() % 26));
    worst.records.push_back(r);
  }
  const std::size_t worst_bytes = encode_batch(worst).size();

  std::size_t bad_round_trips = 0;
  for (int i = 0; i < 1000; ++i) {
    LogBatch b;
    b.msisdn = "2557" + std::to_string(10000000 + rng() % 89999999);
    b.base_ts = static_cast<std::uint32_t>(rng());
    for (auto& v : b.version) v = static_cast<std::uint8_t>(rng());
    for (std::size_t n = rng() % 50; n; --n) {
      UsageLogRecord r;
      r.action = static_cast<Action>(1 + rng() % kActionCount);
      r.dt = rng() % 4 == 0 ? rng() : rng() % 300;
      if (carries_business(r.action)) {
        r.business = static_cast<BusinessId>(rng());
      } else if (r.action == Action::FilterSearch) {
        for (std::size_t f = rng() % 6; f; --f) {
          r.facets.push_back({static_cast<std::uint8_t>(1 + rng() % 5), rng() % 100000});
        }
      } else {
        for (std::size_t k = rng() % 33; k; --k) r.query.push_back(static_cast<char>(rng()));
      }
      b.records.push_back(r);
    }
    try {
      if (decode_batch(encode_batch(b)) != b) ++bad_round_trips;
    } catch (const LogError&) {
      ++bad_round_trips;
    }
  }
  const bool ok = small_bytes <= 100'000 && worst_bytes <= 100'000 && bad_round_trips == 0;
  report("log-budget", ok,
         fmt("20000 small records: %zu bytes; 6250 records with 32-byte queries: %zu bytes "
             "(%.1f B/record; limit 100000); 1000 random batches, %zu failed round trip",
             small_bytes, worst_bytes, static_cast<double>(worst_bytes) / 6250.0,
             bad_round_trips));
}

// ---------------------------------------------------------------------------

void cache_transparency() {
  WalkOptions o;
  o.walks = 1000;
  o.seed = 11;
  const BenchResult r = run_bench(testing::big_catalog(), BenchMode::Both, o);
  const auto& on = r.runs[0].latency;
  const auto& off = r.runs[1].latency;
  const bool ok = r.identical.value_or(false) && on.p50_ms <= 50.0 && r.speedup.value_or(0) >= 10;
  report("cache-transparency", ok,
         fmt("1000 walks, %zu requests each; transcripts %s; cache-on p50 %.4f ms p95 %.4f ms; "
             "scan p50 %.4f ms; speedup %.1fx",
             on.requests, r.identical.value_or(false) ? "identical" : "DIFFER", on.p50_ms,
             on.p95_ms, off.p50_ms, r.speedup.value_or(0)));
}

// ---------------------------------------------------------------------------

void whitelist_ttl() {
  std::mt19937_64 rng(31);
  std::vector<std::string> enrolled, outsiders;
  std::string list;
  for (int i = 0; i < 40; ++i) {
    enrolled.push_back("2557" + std::to_string(10000000 + i * 1231));
    outsiders.push_back("2557" + std::to_string(60000000 + i * 977));
    list += (i % 2 ? "0" + enrolled.back().substr(3) : "+" + enrolled.back()) + "\n";
  }
  GatewayService gw(testing::fixture_catalog(), Whitelist::parse(list));
  const std::string refused = "END " + Strings::defaults().get("gateway.refused");
  const std::string welcome = "CON " + Strings::defaults().get("welcome.title");

  struct Live {
    std::string phone, text;
    std::int64_t last;
  };
  std::map<std::string, Live> live;
  std::int64_t now = 1'700'000'000;
  std::size_t refusal_checks = 0, refusal_bad = 0, expiry_checks = 0, expiry_bad = 0,
              keep_checks = 0, keep_bad = 0;
  for (int i = 0; i < 20000; ++i) {
    const auto roll = rng() % 100;
    if (roll < 15) {
      const std::string phone = outsiders[rng() % outsiders.size()];
      const auto r = gw.handle_request(
          {"o" + std::to_string(i), "*149#", phone, rng() % 2 ? "" : "1*2"}, now);
      ++refusal_checks;
      if (r.body != refused) ++refusal_bad;
      continue;
    }
    if (roll < 35 || live.empty()) {
      const std::string sid = "s" + std::to_string(i);
      const std::string phone = enrolled[rng() % enrolled.size()];
      const auto r = gw.handle_request({sid, "*149#", phone, ""}, now);
      ++refusal_checks;
      if (r.body.rfind(welcome, 0) != 0) ++refusal_bad;
      live[sid] = {phone, "", now};
    } else {
      auto it = live.begin();
      std::advance(it, rng() % live.size());
      const std::string sid = it->first;
      Live& l = it->second;
      // idle gap around the ttl boundary
      const std::int64_t gap = rng() % 2 ? 170 + static_cast<std::int64_t>(rng() % 21)
                                         : static_cast<std::int64_t>(rng() % 30);
      const std::int64_t t = l.last + gap;
      now = std::max(now, t);
      const std::string input = rng() % 3 ? "1" : "99";
      l.text = l.text.empty() ? input : l.text + "*" + input;
      const auto before = gw.stats().restarts;
      const auto r = gw.handle_request({sid, "*149#", l.phone, l.text}, t);
      const bool restarted = gw.stats().restarts != before;
      if (gap > kSessionTtlSeconds) {
        ++expiry_checks;
        if (!restarted || r.body.rfind(welcome, 0) != 0) ++expiry_bad;
        l.text.clear();
      } else {
        ++keep_checks;
        if (restarted) ++keep_bad;
      }
      l.last = t;
      if (r.body.rfind("END ", 0) == 0) live.erase(sid);
    }
    now += static_cast<std::int64_t>(rng() % 3);
  }
  const bool ok = refusal_bad == 0 && expiry_bad == 0 && keep_bad == 0 && expiry_checks > 0;
  report("whitelist-ttl", ok,
         fmt("%zu admission checks, %zu wrong; %zu requests after >180 s idle, %zu did not "
             "restart; %zu within 180 s, %zu restarted",
             refusal_checks, refusal_bad, expiry_checks, expiry_bad, keep_checks, keep_bad));
}

// ---------------------------------------------------------------------------

void analytics() {
  constexpr std::int64_t day0 = 1'699'920'000;
  const std::string a = "255700000001", b = "255700000002";
  std::string hits;
  const char* nodes1[] = {"W", "SE", "SS", "DI", "VI", "BL", "BD"};
  const char* in1[] = {"", "1", "1", "1", "1", "1", "1"};
  for (int i = 0; i < 7; ++i) hits += format_hit({day0 + 100 + 5 * i, "s1", a, nodes1[i], in1[i]}) + "\n";
  const char* nodes2[] = {"W", "TT", "TI", "KS", "BL", "BD"};
  const char* in2[] = {"", "3", "1", "duka", "1", "1"};
  for (int i = 0; i < 6; ++i) {
    hits += format_hit({day0 + 86400 + 7 * i, "s2", a, nodes2[i], in2[i]}) + "\n";
  }
  hits += format_hit({day0 + 10, "r", "255799999999", "X", ""}) + "\n";

  auto actions_with = [&](std::int64_t extra_gap) {
    std::vector<ActionRecord> v = {
        {day0 + 3 * 86400, b, "open_detail", "business=3"},
        {day0 + 3 * 86400 + 40, b, "call", "business=3"},
        {day0 + 3 * 86400 + 100, b, "favorite", "business=3"},
        {day0 + 4 * 86400, a, "text_search", "query=duka"},
    };
    if (extra_gap) v.push_back({day0 + 3 * 86400 + 100 + extra_gap, b, "add_contact", "business=3"});
    std::string out;
    for (const auto& r : v) out += format_action(r) + "\n";
    return out;
  };
  const UsageReport r = build_report(hits, actions_with(0));
  std::map<std::string, std::size_t> want_actions = {
      {"favorite", 1}, {"unfavorite", 0}, {"call", 1}, {"add_contact", 0},
      {"open_detail", 1}, {"filter_search", 0}, {"text_search", 1}};
  // user a: 2 USSD sessions, 1 client session, details 2, dates {0,1,4}
  // user b: 1 client session, details 1, dates {3}
  const bool counts = r.unique_users == 2 && r.ussd_sessions == 2 && r.client_sessions == 2 &&
                      r.sessions == 4 && r.details_total == 3 && r.ussd_hits == 13 &&
                      r.refused_hits == 1 && r.actions == want_actions &&
                      r.users.size() == 2 && r.users[0].active_dates == 3 &&
                      r.users[1].active_dates == 1 && r.active_dates_mean == 2.0 &&
                      r.text_searches == 2 && r.filter_searches == 1;
  const UsageReport same = build_report(hits, actions_with(180));
  const UsageReport gap = build_report(hits, actions_with(181));
  const bool split = same.client_sessions == r.client_sessions &&
                     gap.client_sessions == r.client_sessions + 1;
  report("analytics", counts && split,
         fmt("users %zu, sessions %zu (ussd %zu, client %zu), details %zu, active dates mean "
             "%.2f, actions match: %s; 180 s gap -> %zu client sessions, 181 s gap -> %zu",
             r.unique_users, r.sessions, r.ussd_sessions, r.client_sessions, r.details_total,
             r.active_dates_mean, r.actions == want_actions ? "yes" : "no",
             same.client_sessions, gap.client_sessions));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> criteria[] = {
      {"screen-contract", screen_contract},
      {"path-depth/jump-rule", path_depth_and_jump},
      {"fuzzy-oracle", fuzzy_oracle},
      {"snapshot-size", snapshot_size},
      {"log-budget", log_budget},
      {"cache-transparency", cache_transparency},
      {"whitelist-ttl", whitelist_ttl},
      {"analytics", analytics},
  };
  for (const auto& [name, fn] : criteria) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, std::string("exception: ") + e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
