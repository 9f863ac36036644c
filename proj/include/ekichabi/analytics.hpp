#pragma once

/// @file ekichabi/analytics.hpp
/// @brief Usage metrics from the USSD hit log and the client action store.
///
/// Definitions:
///   - USSD session: all admitted hits sharing a session id. Client session:
///     a run of one device's actions with no gap over 180 s.
///   - Detail visit: a hit serving BusinessDetail, or an open_detail action.
///   - Back use: a hit whose input is "99".
///   - USSD text search: a hit whose previous hit in the session served
///     TextInput and whose input is not a reserved code. USSD filter search:
///     input "1" or "2" answering the Welcome screen.
///   - Duration: last minus first timestamp of a session.
///   - Active dates: distinct UTC calendar dates with any activity.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ekichabi {

inline constexpr std::int64_t kClientSessionGap = 180;

struct UserUsage {
  std::string msisdn;
  std::size_t ussd_sessions = 0;
  std::size_t client_sessions = 0;
  std::size_t ussd_hits = 0;
  std::size_t client_actions = 0;
  std::size_t details = 0;
  std::size_t back_uses = 0;
  std::size_t text_searches = 0;
  std::size_t filter_searches = 0;
  std::size_t active_dates = 0;
  std::size_t ussd_dates = 0;
  std::size_t client_dates = 0;
};

struct Stratum {
  std::size_t users = 0;
  std::size_t sessions = 0;
  std::size_t details = 0;
  double sessions_per_user = 0;
  double active_dates_mean = 0;
};

struct UsageReport {
  std::size_t unique_users = 0;
  std::size_t ussd_users = 0;
  std::size_t client_users = 0;
  std::size_t sessions = 0;
  std::size_t ussd_sessions = 0;
  std::size_t client_sessions = 0;
  double sessions_per_user = 0;
  std::size_t ussd_hits = 0;
  std::size_t refused_hits = 0;
  std::size_t details_total = 0;
  double details_per_user = 0;
  std::map<std::string, std::size_t> actions;  // every action name, zeros included
  std::size_t back_uses = 0;
  std::size_t text_searches = 0;
  std::size_t filter_searches = 0;
  double active_dates_mean = 0;
  double ussd_active_dates_mean = 0;    // over USSD users
  double client_active_dates_mean = 0;  // over client users
  double session_duration_mean = 0;    // seconds, over all sessions
  std::size_t warnings = 0;             // unparseable lines skipped
  std::vector<UserUsage> users;         // sorted by msisdn
  /// column -> value -> stratum, from the optional demographics join.
  std::map<std::string, std::map<std::string, Stratum>> strata;
};

/// Pure function of the three texts. `demographics` is a CSV whose first
/// column is a phone number; every other column becomes a stratification.
UsageReport build_report(std::string_view hitlog, std::string_view actions,
                         std::string_view demographics = {});

UsageReport build_report_files(const std::filesystem::path& hitlog,
                               const std::filesystem::path& actions,
                               const std::filesystem::path& demographics = {});

nlohmann::json to_json(const UsageReport& r);

}  // namespace ekichabi
