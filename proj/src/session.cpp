#include "ekichabi/session.hpp"

#include <charconv>

#include "ekichabi/text.hpp"

namespace ekichabi {
namespace {

struct TagEntry {
  Node node;
  const char* tag;
};

constexpr TagEntry kTags[] = {
    {Node::Welcome, "W"},         {Node::SectorList, "SE"},
    {Node::SubsectorList, "SS"},  {Node::DistrictList, "DI"},
    {Node::VillageList, "VI"},    {Node::SubvillageList, "SV"},
    {Node::TextTypeMenu, "TT"},   {Node::TextInput, "TI"},
    {Node::KeywordSelect, "KS"},  {Node::BusinessList, "BL"},
    {Node::Disclaimer, "DC"},     {Node::BusinessDetail, "BD"},
    {Node::Help, "HP"},
};

constexpr std::size_t kFieldCount = 13;

bool needs_escape(unsigned char c) {
  return c <= 0x20 || c == 0x7F || c == '%' || c == '|' || c == ',' || c == ':';
}

std::string escape(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char ch : s) {
    auto c = static_cast<unsigned char>(ch);
    if (needs_escape(c)) {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

[[noreturn]] void malformed(const std::string& what) {
  throw SessionFormatError(SessionFormatError::Kind::Malformed, "session string: " + what);
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return -1;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out.push_back(s[i]);
      continue;
    }
    if (i + 2 >= s.size()) malformed("bad escape");
    int hi = hex_value(s[i + 1]), lo = hex_value(s[i + 2]);
    if (hi < 0 || lo < 0) malformed("bad escape");
    out.push_back(static_cast<char>(hi * 16 + lo));
    i += 2;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view s, const char* what) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    malformed(std::string("bad ") + what);
  }
  return v;
}

std::optional<std::string> optional_field(std::string_view s) {
  if (s.empty()) return std::nullopt;
  return unescape(s);
}

}  // namespace

const char* node_tag(Node n) {
  for (const auto& t : kTags) {
    if (t.node == n) return t.tag;
  }
  return "?";
}

std::optional<Node> node_from_tag(std::string_view tag) {
  for (const auto& t : kTags) {
    if (tag == t.tag) return t.node;
  }
  return std::nullopt;
}

Node list_node(Facet f) {
  switch (f) {
    case Facet::Sector: return Node::SectorList;
    case Facet::Subsector: return Node::SubsectorList;
    case Facet::District: return Node::DistrictList;
    case Facet::Village: return Node::VillageList;
    case Facet::Subvillage: break;
  }
  return Node::SubvillageList;
}

std::optional<Facet> facet_of(Node n) {
  switch (n) {
    case Node::SectorList: return Facet::Sector;
    case Node::SubsectorList: return Facet::Subsector;
    case Node::DistrictList: return Facet::District;
    case Node::VillageList: return Facet::Village;
    case Node::SubvillageList: return Facet::Subvillage;
    default: return std::nullopt;
  }
}

bool is_filter_node(Node n) { return facet_of(n).has_value(); }

KindMask kinds_for(TextType t) {
  switch (t) {
    case TextType::BusinessName: return {KeywordKind::BusinessName};
    case TextType::Location:
      return {KeywordKind::District, KeywordKind::Village, KeywordKind::Subvillage};
    case TextType::Products:
      return {KeywordKind::Sector, KeywordKind::Subsector, KeywordKind::Product};
    case TextType::OwnerName: return {KeywordKind::OwnerName};
    case TextType::None: break;
  }
  return KindMask::all();
}

std::string SessionState::view_key() const {
  std::string k = node_tag(node);
  k.push_back('\x1f');
  k.push_back(static_cast<char>('0' + static_cast<int>(entry_path)));
  k.push_back(static_cast<char>('0' + static_cast<int>(text_type)));
  k.push_back('\x1f');
  k += filters.key();
  k.push_back('\x1f');
  k += std::to_string(page);
  k.push_back('\x1f');
  k += query;
  k.push_back('\x1f');
  if (keyword) {
    k.push_back(static_cast<char>('0' + static_cast<int>(keyword->kind)));
    k += keyword->text;
  }
  k.push_back('\x1f');
  if (selected_business) k += std::to_string(*selected_business);
  k.push_back('\x1f');
  k.push_back(trail.empty() ? '0' : '1');
  return k;
}

std::string serialize_session(const SessionState& s) {
  std::string out = "v1|";
  out += escape(s.msisdn);
  out.push_back('|');
  out += node_tag(s.node);
  out.push_back('|');
  static constexpr char kEntry[] = {'-', 'C', 'L', 'T'};
  out.push_back(kEntry[static_cast<int>(s.entry_path)]);
  out.push_back('|');
  if (s.filters.sector) out += std::to_string(static_cast<int>(*s.filters.sector));
  for (const auto* v : {&s.filters.subsector, &s.filters.district, &s.filters.village,
                        &s.filters.subvillage}) {
    out.push_back(',');
    if (*v) out += escape(**v);
  }
  out.push_back('|');
  out += std::to_string(s.page);
  out.push_back('|');
  out += std::to_string(static_cast<int>(s.text_type));
  out.push_back('|');
  out += escape(s.query);
  out.push_back('|');
  if (s.keyword) {
    out += std::to_string(static_cast<int>(s.keyword->kind));
    out.push_back(':');
    out += escape(s.keyword->text);
  } else {
    out.push_back('-');
  }
  out.push_back('|');
  out += s.selected_business ? std::to_string(*s.selected_business) : "-";
  out.push_back('|');
  out.push_back(s.disclaimer_seen ? '1' : '0');
  out.push_back('|');
  if (s.trail.empty()) out.push_back('-');
  for (std::size_t i = 0; i < s.trail.size(); ++i) {
    if (i) out.push_back(',');
    out += node_tag(s.trail[i].node);
    out += std::to_string(s.trail[i].page);
  }
  out.push_back('|');
  out += std::to_string(s.last_active);
  return out;
}

SessionState deserialize_session(std::string_view text) {
  if (!text.starts_with("v1|")) {
    throw SessionFormatError(SessionFormatError::Kind::Version,
                             "session string: unsupported version");
  }
  const auto fields = split(text, '|');
  if (fields.size() != kFieldCount) {
    throw SessionFormatError(SessionFormatError::Kind::FieldCount,
                             "session string: expected " + std::to_string(kFieldCount) +
                                 " fields, found " + std::to_string(fields.size()));
  }
  SessionState s;
  s.msisdn = unescape(fields[1]);
  auto node = node_from_tag(fields[2]);
  if (!node) malformed("unknown node '" + fields[2] + "'");
  s.node = *node;

  const std::string_view entries = "-CLT";
  if (fields[3].size() != 1 || entries.find(fields[3][0]) == std::string_view::npos) {
    malformed("bad entry path");
  }
  s.entry_path = static_cast<EntryPath>(entries.find(fields[3][0]));

  const auto facets = split(fields[4], ',');
  if (facets.size() != 5) malformed("bad filter field");
  if (!facets[0].empty()) {
    int code = parse_number<int>(facets[0], "sector");
    if (!is_valid_sector_code(code)) malformed("bad sector");
    s.filters.sector = static_cast<Sector>(code);
  }
  s.filters.subsector = optional_field(facets[1]);
  s.filters.district = optional_field(facets[2]);
  s.filters.village = optional_field(facets[3]);
  s.filters.subvillage = optional_field(facets[4]);

  s.page = parse_number<std::uint32_t>(fields[5], "page");
  int tt = parse_number<int>(fields[6], "text type");
  if (tt < 0 || tt > 4) malformed("bad text type");
  s.text_type = static_cast<TextType>(tt);
  s.query = unescape(fields[7]);

  if (fields[8] != "-") {
    auto colon = fields[8].find(':');
    if (colon == std::string::npos) malformed("bad keyword");
    int kind = parse_number<int>(std::string_view(fields[8]).substr(0, colon), "keyword kind");
    if (kind < 0 || kind >= kKeywordKindCount) malformed("bad keyword kind");
    s.keyword = KeywordRef{unescape(std::string_view(fields[8]).substr(colon + 1)),
                           static_cast<KeywordKind>(kind)};
  }
  if (fields[9] != "-") s.selected_business = parse_number<BusinessId>(fields[9], "business");
  if (fields[10] != "0" && fields[10] != "1") malformed("bad disclaimer flag");
  s.disclaimer_seen = fields[10] == "1";

  if (fields[11] != "-") {
    for (const auto& entry : split(fields[11], ',')) {
      std::size_t digits = entry.find_first_of("0123456789");
      if (digits == std::string::npos || digits == 0) malformed("bad trail entry");
      auto n = node_from_tag(std::string_view(entry).substr(0, digits));
      if (!n) malformed("bad trail node");
      s.trail.push_back(
          {*n, parse_number<std::uint32_t>(std::string_view(entry).substr(digits), "trail page")});
    }
  }
  s.last_active = parse_number<std::int64_t>(fields[12], "timestamp");
  if (!s.filters.structurally_valid()) malformed("filters out of order");
  return s;
}

}  // namespace ekichabi
