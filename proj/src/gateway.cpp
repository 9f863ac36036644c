#include "ekichabi/gateway.hpp"

#include <chrono>
#include <functional>
#include <sstream>

#include "ekichabi/phone.hpp"
#include "ekichabi/snapshot.hpp"
#include "ekichabi/text.hpp"

namespace ekichabi {

std::int64_t unix_now() {
  using namespace std::chrono;
  return duration_cast<seconds>(system_clock::now().time_since_epoch()).count();
}

// ---- whitelist -------------------------------------------------------------

Whitelist Whitelist::parse(std::string_view text) {
  Whitelist w;
  for (const auto& raw : split(text, '\n')) {
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (auto n = try_normalize_msisdn(line)) {
      w.numbers_.insert(*n);
    } else {
      ++w.rejected_;
    }
  }
  return w;
}

Whitelist Whitelist::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open whitelist " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

void Whitelist::add(std::string_view raw) { numbers_.insert(normalize_msisdn(raw)); }

// ---- session store ---------------------------------------------------------

std::optional<std::string> InMemorySessionStore::get(const std::string& id, std::int64_t now) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) return std::nullopt;
  if (now - it->second.last_active > ttl_) {
    entries_.erase(it);
    return std::nullopt;
  }
  return it->second.state;
}

void InMemorySessionStore::put(const std::string& id, std::string state, std::int64_t now) {
  std::lock_guard lock(mu_);
  entries_[id] = {std::move(state), now};
}

void InMemorySessionStore::erase(const std::string& id) {
  std::lock_guard lock(mu_);
  entries_.erase(id);
}

std::size_t InMemorySessionStore::expire(std::int64_t now) {
  std::lock_guard lock(mu_);
  return std::erase_if(entries_,
                       [&](const auto& kv) { return now - kv.second.last_active > ttl_; });
}

std::size_t InMemorySessionStore::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---- sinks -----------------------------------------------------------------

FileSink::FileSink(const std::filesystem::path& path) : out_(path, std::ios::app) {}

bool FileSink::write(std::string_view line) {
  if (!out_) return false;
  out_ << line << '\n';
  return static_cast<bool>(out_);
}

bool FileSink::flush() {
  out_.flush();
  return static_cast<bool>(out_);
}

bool MemorySink::write(std::string_view line) {
  if (broken_) return false;
  std::lock_guard lock(mu_);
  lines_.emplace_back(line);
  return true;
}

std::vector<std::string> MemorySink::lines() const {
  std::lock_guard lock(mu_);
  return lines_;
}

// ---- hit log ---------------------------------------------------------------

std::string escape_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::optional<std::string> unescape_field(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i == s.size()) return std::nullopt;
    switch (s[i]) {
      case '\\': out.push_back('\\'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      default: return std::nullopt;
    }
  }
  return out;
}

std::string format_hit(const HitRecord& r) {
  return std::to_string(r.ts) + '\t' + escape_field(r.session_id) + '\t' +
         escape_field(r.msisdn) + '\t' + escape_field(r.node) + '\t' + escape_field(r.input);
}

std::optional<HitRecord> parse_hit(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const auto fields = split(line, '\t');
  if (fields.size() != 5) return std::nullopt;
  HitRecord r;
  try {
    std::size_t used = 0;
    r.ts = std::stoll(fields[0], &used);
    if (used != fields[0].size()) return std::nullopt;
  } catch (const std::exception&) {
    return std::nullopt;
  }
  auto sid = unescape_field(fields[1]);
  auto msisdn = unescape_field(fields[2]);
  auto node = unescape_field(fields[3]);
  auto input = unescape_field(fields[4]);
  if (!sid || !msisdn || !node || !input || sid->empty() || node->empty()) return std::nullopt;
  r.session_id = std::move(*sid);
  r.msisdn = std::move(*msisdn);
  r.node = std::move(*node);
  r.input = std::move(*input);
  return r;
}

HitLog::HitLog(std::shared_ptr<LineSink> sink, std::size_t flush_every)
    : sink_(std::move(sink)), flush_every_(flush_every == 0 ? 1 : flush_every) {}

HitLog::~HitLog() { flush(); }

void HitLog::append(const HitRecord& r) {
  std::lock_guard lock(mu_);
  bool ok = false;
  try {
    ok = sink_ && sink_->write(format_hit(r));
  } catch (const std::exception&) {
    ok = false;
  }
  if (!ok) {
    ++dropped_;
    return;
  }
  ++written_;
  if (++pending_ >= flush_every_) {
    sink_->flush();
    pending_ = 0;
  }
}

void HitLog::flush() {
  std::lock_guard lock(mu_);
  if (sink_) sink_->flush();
  pending_ = 0;
}

// ---- disclaimer flags ------------------------------------------------------

DisclaimerStore::DisclaimerStore(std::filesystem::path path) : path_(std::move(path)) {
  std::ifstream in(*path_);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (!line.empty()) seen_.insert(line);
  }
}

bool DisclaimerStore::seen(const std::string& msisdn) const {
  std::lock_guard lock(mu_);
  return seen_.count(msisdn) > 0;
}

void DisclaimerStore::mark(const std::string& msisdn) {
  std::lock_guard lock(mu_);
  if (!seen_.insert(msisdn).second || !path_) return;
  std::ofstream out(*path_, std::ios::app);
  out << msisdn << '\n';
}

std::size_t DisclaimerStore::size() const {
  std::lock_guard lock(mu_);
  return seen_.size();
}

// ---- service ---------------------------------------------------------------

GatewayService::GatewayService(std::shared_ptr<const Catalog> catalog, Whitelist whitelist,
                               GatewayOptions options, std::shared_ptr<SessionStore> sessions,
                               std::shared_ptr<HitLog> hits,
                               std::shared_ptr<DisclaimerStore> disclaimers)
    : catalog_(std::move(catalog)),
      whitelist_(std::move(whitelist)),
      options_(std::move(options)),
      sessions_(sessions ? std::move(sessions)
                         : std::make_shared<InMemorySessionStore>(options_.ttl_seconds)),
      hits_(hits ? std::move(hits) : std::make_shared<HitLog>(std::make_shared<NullSink>())),
      disclaimers_(disclaimers ? std::move(disclaimers) : std::make_shared<DisclaimerStore>()) {
  if (options_.cache) cache_ = std::make_unique<ScreenCache>(options_.cache_capacity);
}

std::mutex& GatewayService::stripe(const std::string& session_id) {
  return stripes_[std::hash<std::string>{}(session_id) % kStripes];
}

bool GatewayService::whitelisted(std::string_view raw) const {
  auto n = try_normalize_msisdn(raw);
  std::lock_guard lock(whitelist_mu_);
  return n && whitelist_.contains(*n);
}

void GatewayService::reload_whitelist(Whitelist w) {
  std::lock_guard lock(whitelist_mu_);
  whitelist_ = std::move(w);
}

std::string GatewayService::reload_directory(std::string_view snapshot) {
  auto next = Catalog::from_snapshot(snapshot);
  catalog_.replace(next);
  if (cache_) cache_->clear();
  return next->version;
}

GatewayStats GatewayService::stats() const {
  return {requests_, refused_, malformed_, errors_, restarts_};
}

GatewayResponse GatewayService::handle_request(const GatewayRequest& r) {
  return handle_request(r, unix_now());
}

GatewayResponse GatewayService::handle_request(const GatewayRequest& r, std::int64_t now) {
  ++requests_;
  if (r.session_id.empty() || r.msisdn_raw.empty()) {
    ++malformed_;
    return {400, "missing sessionId or phoneNumber"};
  }

  const auto msisdn = try_normalize_msisdn(r.msisdn_raw);
  const std::string segment = [&] {
    auto star = r.text.rfind('*');
    return star == std::string::npos ? r.text : r.text.substr(star + 1);
  }();
  bool admitted = false;
  if (msisdn) {
    std::lock_guard lock(whitelist_mu_);
    admitted = whitelist_.contains(*msisdn);
  }
  if (!admitted) {
    ++refused_;
    hits_->append({now, r.session_id, msisdn.value_or("-"), "X", segment});
    return {200, "END " + options_.strings.get("gateway.refused")};
  }

  std::lock_guard session_lock(stripe(r.session_id));
  const auto catalog = catalog_.get();
  const SearchBackend& backend =
      options_.cache ? static_cast<const SearchBackend&>(*catalog->indexed)
                     : static_cast<const SearchBackend&>(*catalog->scan);
  SessionMachine machine(backend, options_.strings, catalog->version, cache_.get());

  StepResult result;
  try {
    std::optional<SessionState> state;
    if (!r.text.empty()) {
      if (auto stored = sessions_->get(r.session_id, now)) {
        try {
          state = deserialize_session(*stored);
          if (state->msisdn != *msisdn) state.reset();
        } catch (const SessionFormatError&) {
          state.reset();
        }
      }
    }
    if (state) {
      const bool seen_before = state->disclaimer_seen;
      try {
        result = machine.step(std::move(*state), segment, now);
      } catch (const std::invalid_argument&) {
        // State no longer fits the directory (e.g. after a reload).
        ++restarts_;
        result = machine.start(*msisdn, disclaimers_->seen(*msisdn), now);
      }
      if (result.state.disclaimer_seen && !seen_before) disclaimers_->mark(*msisdn);
    } else {
      if (!r.text.empty()) ++restarts_;
      result = machine.start(*msisdn, disclaimers_->seen(*msisdn), now);
    }
  } catch (const std::exception&) {
    ++errors_;
    sessions_->erase(r.session_id);
    hits_->append({now, r.session_id, *msisdn, "E", segment});
    return {200, "END " + options_.strings.get("gateway.error")};
  }

  const bool end = result.screen.kind == ScreenKind::End;
  if (end) {
    sessions_->erase(r.session_id);
  } else {
    sessions_->put(r.session_id, serialize_session(result.state), now);
  }
  hits_->append({now, r.session_id, *msisdn, node_tag(result.state.node), segment});
  return {200, (end ? "END " : "CON ") + result.screen.body};
}

}  // namespace ekichabi
