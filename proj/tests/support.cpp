#include "support.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "ekichabi/text.hpp"

namespace ekichabi::testing {
namespace {

struct Group {
  Sector sector;
  const char* subsector;
  const char* name_prefix;
  std::vector<std::string> products;
  const char* district;
  const char* village;
  const char* subvillage;
  int count;
};

// Business counts per (subsector, place). Village totals: Kanazi 22,
// Kashenye 13, Kayanga 15.
const std::vector<Group>& groups() {
  static const std::vector<Group> g = {
      {Sector::Retailers, "shops and kiosks", "Duka la", {"soap", "sugar"}, "Bukoba", "Kanazi", "Kati", 7},
      {Sector::Retailers, "shops and kiosks", "Duka la", {"soap", "sugar"}, "Bukoba", "Kanazi", "Juu", 5},
      {Sector::Retailers, "shops and kiosks", "Duka la", {"airtime"}, "Bukoba", "Kashenye", "Kati", 5},
      {Sector::Retailers, "shops and kiosks", "Duka la", {"cooking oil"}, "Karagwe", "Kayanga", "Chini", 4},
      {Sector::Retailers, "shops and kiosks", "Duka la", {"cooking oil"}, "Karagwe", "Kayanga", "Mjini", 4},
      {Sector::Retailers, "agro-input shops", "Pembejeo", {"seeds", "fertilizer"}, "Bukoba", "Kanazi", "Kati", 5},
      {Sector::Retailers, "agro-input shops", "Pembejeo", {"seeds"}, "Bukoba", "Kanazi", "Juu", 2},
      {Sector::Retailers, "agro-input shops", "Pembejeo", {"hoes"}, "Bukoba", "Kashenye", "Kati", 3},
      {Sector::Retailers, "agro-input shops", "Pembejeo", {"pesticides"}, "Bukoba", "Kashenye", "Juu", 2},
      {Sector::Retailers, "agro-input shops", "Pembejeo", {"fertilizer"}, "Karagwe", "Kayanga", "Chini", 2},
      {Sector::Services, "wakalas", "Wakala", {"mobile money"}, "Bukoba", "Kanazi", "Kati", 1},
      {Sector::Services, "wakalas", "Wakala", {"mobile money"}, "Bukoba", "Kanazi", "Juu", 2},
      {Sector::Services, "wakalas", "Wakala", {"mobile money"}, "Bukoba", "Kashenye", "Juu", 3},
      {Sector::Services, "wakalas", "Wakala", {"mobile money"}, "Karagwe", "Kayanga", "Mjini", 5},
  };
  return g;
}

const char* kFirst[] = {"Amina",  "Baraka", "Chausiku", "Daudi",  "Esther", "Faraji", "Grace",
                        "Hamisi", "Imani",  "Joseph",   "Kulwa",  "Lucy",   "Mussa",  "Neema",
                        "Omari",  "Pendo",  "Rehema",   "Salum",  "Tumaini", "Upendo", "Vumilia",
                        "Winfrida", "Yusuf", "Zawadi",  "Agnes"};
const char* kLast[] = {"Kato", "Rwegasira"};

}  // namespace

Directory fixture_directory() {
  std::vector<Business> out;
  BusinessId id = 1;
  for (const auto& g : groups()) {
    for (int i = 0; i < g.count; ++i, ++id) {
      Business b;
      b.id = id;
      const std::string first = kFirst[(id - 1) % 25];
      b.owner_name = first + " " + kLast[(id - 1) / 25];
      b.name = std::string(g.name_prefix) + " " + first + ((id - 1) / 25 ? " Mdogo" : "");
      b.phone = "2557000000" + std::string(id < 10 ? "0" : "") + std::to_string(id);
      b.sector = g.sector;
      b.subsector = g.subsector;
      b.products = g.products;
      b.district = g.district;
      b.village = g.village;
      b.subvillage = g.subvillage;
      out.push_back(std::move(b));
    }
  }
  return Directory(std::move(out));
}

std::shared_ptr<const Catalog> fixture_catalog() {
  static const auto c = Catalog::build(fixture_directory());
  return c;
}

std::shared_ptr<const Catalog> big_catalog() {
  static const auto c = Catalog::build(generate_synthetic(7, 10000));
  return c;
}

std::size_t osa_oracle(const std::u32string& a, const std::u32string& b) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> memo;
  std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i,
                                                                std::size_t j) -> std::size_t {
    if (i == 0) return j;
    if (j == 0) return i;
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    std::size_t best = std::min({d(i - 1, j) + 1, d(i, j - 1) + 1,
                                 d(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? 0 : 1)});
    if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
      best = std::min(best, d(i - 2, j - 2) + 1);
    }
    memo[key] = best;
    return best;
  };
  return d(a.size(), b.size());
}

std::vector<Candidate> brute_force_candidates(const KeywordIndex& ix, const std::string& query,
                                              std::size_t k, KindMask kinds) {
  auto priority = [](KeywordKind kind) {
    switch (kind) {
      case KeywordKind::Sector: return 0;
      case KeywordKind::Subsector: return 1;
      case KeywordKind::Product: return 2;
      case KeywordKind::District:
      case KeywordKind::Village:
      case KeywordKind::Subvillage: return 3;
      case KeywordKind::OwnerName: return 4;
      case KeywordKind::BusinessName: return 5;
    }
    return 6;
  };
  const std::u32string q = decode_utf8(normalize_phrase(query));
  std::vector<Candidate> out;
  for (const auto& kw : ix.keywords()) {
    if (!kinds.contains(kw.kind)) continue;
    const std::u32string t = decode_utf8(kw.text);
    const std::size_t limit = std::max<std::size_t>(1, (t.size() + 3) / 4);
    const std::size_t dist = osa_oracle(q, t);
    if (dist <= limit) out.push_back({kw.text, kw.kind, dist});
  }
  std::sort(out.begin(), out.end(), [&](const Candidate& x, const Candidate& y) {
    return std::make_tuple(x.distance, priority(x.kind), x.text, static_cast<int>(x.kind)) <
           std::make_tuple(y.distance, priority(y.kind), y.text, static_cast<int>(y.kind));
  });
  if (out.size() > k) out.resize(k);
  return out;
}

std::size_t brute_count(const Directory& d, const FilterState& f,
                        const std::vector<BusinessId>* within) {
  std::size_t n = 0;
  for (const auto& b : d.businesses()) {
    if (within && std::find(within->begin(), within->end(), b.id) == within->end()) continue;
    if (f.sector && b.sector != *f.sector) continue;
    if (f.subsector && b.subsector != *f.subsector) continue;
    if (f.district && b.district != *f.district) continue;
    if (f.village && b.village != *f.village) continue;
    if (f.subvillage && b.subvillage != *f.subvillage) continue;
    ++n;
  }
  return n;
}

Walk walk(const SessionMachine& m, const std::vector<std::string>& inputs, bool disclaimer_seen,
          const std::string& msisdn) {
  Walk w;
  auto r = m.start(msisdn, disclaimer_seen, 0);
  w.states.push_back(r.state);
  w.screens.push_back(r.screen);
  w.invalid.push_back(false);
  std::int64_t t = 0;
  for (const auto& in : inputs) {
    r = m.step(w.states.back(), in, ++t);
    w.states.push_back(r.state);
    w.screens.push_back(r.screen);
    w.invalid.push_back(r.invalid);
  }
  return w;
}

std::string utf8(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

}  // namespace ekichabi::testing
