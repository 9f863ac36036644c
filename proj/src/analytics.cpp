#include "ekichabi/analytics.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "ekichabi/directory.hpp"
#include "ekichabi/gateway.hpp"
#include "ekichabi/phone.hpp"
#include "ekichabi/sync.hpp"
#include "ekichabi/text.hpp"
#include "ekichabi/usage_log.hpp"

namespace ekichabi {
namespace {

std::int64_t day_of(std::int64_t ts) {
  return ts >= 0 ? ts / 86400 : -((-ts + 86399) / 86400);
}

struct UserAcc {
  UserUsage u;
  std::set<std::int64_t> ussd_days, client_days;
};

double mean(double total, std::size_t n) { return n == 0 ? 0.0 : total / static_cast<double>(n); }

std::string read_file(const std::filesystem::path& p) {
  if (p.empty()) return {};
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

UsageReport build_report(std::string_view hitlog, std::string_view actions,
                         std::string_view demographics) {
  UsageReport rep;
  for (int i = 1; i <= kActionCount; ++i) rep.actions[action_name(static_cast<Action>(i))] = 0;

  std::map<std::string, UserAcc> users;
  auto user = [&](const std::string& msisdn) -> UserAcc& {
    auto& acc = users[msisdn];
    acc.u.msisdn = msisdn;
    return acc;
  };
  double duration_total = 0;

  // USSD sessions, keyed by session id in order of first appearance.
  std::vector<std::string> order;
  std::unordered_map<std::string, std::vector<HitRecord>> sessions;
  for (const auto& line : split(hitlog, '\n')) {
    if (trim(line).empty()) continue;
    auto hit = parse_hit(line);
    if (!hit) {
      ++rep.warnings;
      continue;
    }
    if (hit->node == "X") {
      ++rep.refused_hits;
      continue;
    }
    auto [it, fresh] = sessions.try_emplace(hit->session_id);
    if (fresh) order.push_back(hit->session_id);
    it->second.push_back(std::move(*hit));
  }
  for (const auto& sid : order) {
    auto& hits = sessions[sid];
    std::stable_sort(hits.begin(), hits.end(),
                     [](const HitRecord& a, const HitRecord& b) { return a.ts < b.ts; });
    UserAcc& acc = user(hits.front().msisdn);
    ++acc.u.ussd_sessions;
    duration_total += static_cast<double>(hits.back().ts - hits.front().ts);
    std::string prev;
    for (const auto& h : hits) {
      ++acc.u.ussd_hits;
      acc.ussd_days.insert(day_of(h.ts));
      if (h.node == "BD") ++acc.u.details;
      if (h.input == "99") ++acc.u.back_uses;
      if (prev == "TI" && !h.input.empty() && h.input != "99" && h.input != "98") {
        ++acc.u.text_searches;
      }
      if (prev == "W" && (h.input == "1" || h.input == "2")) ++acc.u.filter_searches;
      prev = h.node;
    }
  }

  // Client actions, split into sessions per device.
  std::map<std::string, std::vector<ActionRecord>> devices;
  for (const auto& line : split(actions, '\n')) {
    if (trim(line).empty()) continue;
    auto a = parse_action(line);
    if (!a) {
      ++rep.warnings;
      continue;
    }
    devices[a->msisdn].push_back(std::move(*a));
  }
  for (auto& [msisdn, list] : devices) {
    std::stable_sort(list.begin(), list.end(),
                     [](const ActionRecord& a, const ActionRecord& b) { return a.ts < b.ts; });
    UserAcc& acc = user(msisdn);
    std::int64_t start = list.front().ts, last = list.front().ts;
    acc.u.client_sessions = 1;
    for (const auto& a : list) {
      if (a.ts - last > kClientSessionGap) {
        duration_total += static_cast<double>(last - start);
        ++acc.u.client_sessions;
        start = a.ts;
      }
      last = a.ts;
      ++acc.u.client_actions;
      ++rep.actions[a.action];
      acc.client_days.insert(day_of(a.ts));
      if (a.action == "open_detail") ++acc.u.details;
      if (a.action == "text_search") ++acc.u.text_searches;
      if (a.action == "filter_search") ++acc.u.filter_searches;
    }
    duration_total += static_cast<double>(last - start);
  }

  double dates = 0, ussd_dates = 0, client_dates = 0;
  for (auto& [msisdn, acc] : users) {
    std::set<std::int64_t> all = acc.ussd_days;
    all.insert(acc.client_days.begin(), acc.client_days.end());
    acc.u.active_dates = all.size();
    acc.u.ussd_dates = acc.ussd_days.size();
    acc.u.client_dates = acc.client_days.size();
    if (acc.u.ussd_sessions) ++rep.ussd_users;
    if (acc.u.client_sessions) ++rep.client_users;
    rep.ussd_sessions += acc.u.ussd_sessions;
    rep.client_sessions += acc.u.client_sessions;
    rep.ussd_hits += acc.u.ussd_hits;
    rep.details_total += acc.u.details;
    rep.back_uses += acc.u.back_uses;
    rep.text_searches += acc.u.text_searches;
    rep.filter_searches += acc.u.filter_searches;
    dates += static_cast<double>(acc.u.active_dates);
    ussd_dates += static_cast<double>(acc.u.ussd_dates);
    client_dates += static_cast<double>(acc.u.client_dates);
    rep.users.push_back(acc.u);
  }
  rep.unique_users = users.size();
  rep.sessions = rep.ussd_sessions + rep.client_sessions;
  rep.sessions_per_user = mean(static_cast<double>(rep.sessions), rep.unique_users);
  rep.details_per_user = mean(static_cast<double>(rep.details_total), rep.unique_users);
  rep.active_dates_mean = mean(dates, rep.unique_users);
  rep.ussd_active_dates_mean = mean(ussd_dates, rep.ussd_users);
  rep.client_active_dates_mean = mean(client_dates, rep.client_users);
  rep.session_duration_mean = mean(duration_total, rep.sessions);

  if (!demographics.empty()) {
    auto rows = read_csv_rows(demographics);
    if (!rows.empty()) {
      const auto header = rows.front();
      std::map<std::string, std::map<std::string, std::pair<Stratum, double>>> acc;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        auto msisdn = row.empty() ? std::nullopt : try_normalize_msisdn(row[0]);
        if (!msisdn || row.size() != header.size()) {
          ++rep.warnings;
          continue;
        }
        auto it = users.find(*msisdn);
        const UserUsage none;
        const UserUsage& u = it == users.end() ? none : it->second.u;
        for (std::size_t c = 1; c < header.size(); ++c) {
          auto& [s, date_sum] = acc[header[c]][row[c]];
          ++s.users;
          s.sessions += u.ussd_sessions + u.client_sessions;
          s.details += u.details;
          date_sum += static_cast<double>(u.active_dates);
        }
      }
      for (auto& [column, values] : acc) {
        for (auto& [value, entry] : values) {
          Stratum s = entry.first;
          s.sessions_per_user = mean(static_cast<double>(s.sessions), s.users);
          s.active_dates_mean = mean(entry.second, s.users);
          rep.strata[column][value] = s;
        }
      }
    }
  }
  return rep;
}

UsageReport build_report_files(const std::filesystem::path& hitlog,
                               const std::filesystem::path& actions,
                               const std::filesystem::path& demographics) {
  return build_report(read_file(hitlog), read_file(actions), read_file(demographics));
}

nlohmann::json to_json(const UsageReport& r) {
  using nlohmann::json;
  json users = json::array();
  for (const auto& u : r.users) {
    users.push_back({{"msisdn", u.msisdn},
                     {"ussd_sessions", u.ussd_sessions},
                     {"client_sessions", u.client_sessions},
                     {"ussd_hits", u.ussd_hits},
                     {"client_actions", u.client_actions},
                     {"details", u.details},
                     {"back_uses", u.back_uses},
                     {"text_searches", u.text_searches},
                     {"filter_searches", u.filter_searches},
                     {"active_dates", u.active_dates},
                     {"ussd_dates", u.ussd_dates},
                     {"client_dates", u.client_dates}});
  }
  json strata = json::object();
  for (const auto& [column, values] : r.strata) {
    for (const auto& [value, s] : values) {
      strata[column][value] = {{"users", s.users},
                               {"sessions", s.sessions},
                               {"details", s.details},
                               {"sessions_per_user", s.sessions_per_user},
                               {"active_dates_mean", s.active_dates_mean}};
    }
  }
  return {{"unique_users", r.unique_users},
          {"ussd_users", r.ussd_users},
          {"client_users", r.client_users},
          {"sessions", r.sessions},
          {"ussd_sessions", r.ussd_sessions},
          {"client_sessions", r.client_sessions},
          {"sessions_per_user", r.sessions_per_user},
          {"ussd_hits", r.ussd_hits},
          {"refused_hits", r.refused_hits},
          {"details_total", r.details_total},
          {"details_per_user", r.details_per_user},
          {"actions", r.actions},
          {"back_uses", r.back_uses},
          {"text_searches", r.text_searches},
          {"filter_searches", r.filter_searches},
          {"active_dates_mean", r.active_dates_mean},
          {"ussd_active_dates_mean", r.ussd_active_dates_mean},
          {"client_active_dates_mean", r.client_active_dates_mean},
          {"session_duration_mean", r.session_duration_mean},
          {"warnings", r.warnings},
          {"users", users},
          {"strata", strata}};
}

}  // namespace ekichabi
