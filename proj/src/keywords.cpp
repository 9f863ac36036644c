#include "ekichabi/keywords.hpp"

#include <algorithm>
#include <numeric>

#include "ekichabi/text.hpp"

namespace ekichabi {

const char* to_string(KeywordKind k) {
  switch (k) {
    case KeywordKind::Sector: return "sector";
    case KeywordKind::Subsector: return "subsector";
    case KeywordKind::Product: return "product";
    case KeywordKind::District: return "district";
    case KeywordKind::Village: return "village";
    case KeywordKind::Subvillage: return "subvillage";
    case KeywordKind::OwnerName: return "owner_name";
    case KeywordKind::BusinessName: return "business_name";
  }
  return "?";
}

std::optional<KeywordKind> parse_keyword_kind(std::string_view s) {
  for (int i = 0; i < kKeywordKindCount; ++i) {
    auto k = static_cast<KeywordKind>(i);
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

int kind_priority(KeywordKind k) {
  switch (k) {
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
}

bool candidate_less(const Candidate& a, const Candidate& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  int pa = kind_priority(a.kind), pb = kind_priority(b.kind);
  if (pa != pb) return pa < pb;
  if (a.text != b.text) return a.text < b.text;
  return a.kind < b.kind;
}

std::size_t match_threshold(std::size_t chars) {
  return std::max<std::size_t>(1, (chars + 3) / 4);
}

// ---- distance -----------------------------------------------------------------

std::optional<std::size_t> damerau_levenshtein_within(std::u32string_view a,
                                                      std::u32string_view b,
                                                      std::size_t limit) {
  const std::size_t n = a.size(), m = b.size();
  if ((n > m ? n - m : m - n) > limit) return std::nullopt;

  // Three rolling rows: two back (for transpositions), previous, current.
  std::vector<std::size_t> two_back(m + 1), prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      std::size_t v = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        v = std::min(v, two_back[j - 2] + 1);
      }
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    // cur[j] <= prev[j-1] + 1 always, so a transposition two rows on can
    // never undercut this row's minimum.
    if (row_min > limit) return std::nullopt;
    std::swap(two_back, prev);
    std::swap(prev, cur);
  }
  if (prev[m] > limit) return std::nullopt;
  return prev[m];
}

std::size_t damerau_levenshtein(std::u32string_view a, std::u32string_view b) {
  return *damerau_levenshtein_within(a, b, std::max(a.size(), b.size()));
}

std::size_t damerau_levenshtein(std::string_view a, std::string_view b) {
  return damerau_levenshtein(decode_utf8(a), decode_utf8(b));
}

// ---- index ----------------------------------------------------------------------

namespace {

struct Builder {
  std::map<std::pair<std::string, KeywordKind>, std::vector<BusinessId>> entries;

  void add(const std::string& text, KeywordKind kind, BusinessId id) {
    if (text.empty()) return;
    auto& ids = entries[{text, kind}];
    if (ids.empty() || ids.back() != id) ids.push_back(id);
  }

  void add_label(const std::string& label, KeywordKind kind, BusinessId id) {
    add(normalize_phrase(label), kind, id);
    for (const auto& t : tokenize(label)) add(t, kind, id);
  }

  void add_tokens(const std::string& label, KeywordKind kind, BusinessId id) {
    for (const auto& t : tokenize(label)) add(t, kind, id);
  }
};

std::optional<FilterState> implied_facet(const Directory& d, KeywordKind kind,
                                         const std::vector<BusinessId>& ids) {
  std::vector<Facet> chain;
  switch (kind) {
    case KeywordKind::Sector: chain = {Facet::Sector}; break;
    case KeywordKind::Subsector: chain = {Facet::Sector, Facet::Subsector}; break;
    case KeywordKind::District: chain = {Facet::District}; break;
    case KeywordKind::Village: chain = {Facet::District, Facet::Village}; break;
    case KeywordKind::Subvillage:
      chain = {Facet::District, Facet::Village, Facet::Subvillage};
      break;
    default: return std::nullopt;
  }
  const Business& first = d.at(ids.front());
  for (BusinessId id : ids) {
    const Business& b = d.at(id);
    for (Facet f : chain) {
      if (facet_value(b, f) != facet_value(first, f)) return std::nullopt;
    }
  }
  FilterState f;
  for (Facet facet : chain) f.set(facet, facet_value(first, facet));
  return f;
}

}  // namespace

KeywordIndex::KeywordIndex(const Directory& d) {
  const auto& taxonomy = SectorTaxonomy::standard();
  std::vector<const Business*> ordered;
  ordered.reserve(d.size());
  for (const Business& b : d.businesses()) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(),
            [](const Business* a, const Business* b) { return canonical_less(*a, *b); });

  Builder builder;
  for (const Business* b : ordered) {
    builder.add_label(taxonomy.label(b->sector), KeywordKind::Sector, b->id);
    builder.add_label(b->subsector, KeywordKind::Subsector, b->id);
    for (const auto& p : b->products) builder.add_label(p, KeywordKind::Product, b->id);
    builder.add_label(b->district, KeywordKind::District, b->id);
    builder.add_label(b->village, KeywordKind::Village, b->id);
    builder.add_label(b->subvillage, KeywordKind::Subvillage, b->id);
    builder.add_tokens(b->name, KeywordKind::BusinessName, b->id);
    builder.add_tokens(b->owner_name, KeywordKind::OwnerName, b->id);
  }

  keywords_.reserve(builder.entries.size());
  for (auto& [key, ids] : builder.entries) {
    Keyword kw{key.first, key.second, std::move(ids), std::nullopt};
    kw.facet = implied_facet(d, kw.kind, kw.referents);
    keywords_.push_back(std::move(kw));
  }
  decoded_.reserve(keywords_.size());
  for (std::size_t i = 0; i < keywords_.size(); ++i) {
    decoded_.push_back(decode_utf8(keywords_[i].text));
    by_length_[decoded_.back().size()].push_back(i);
  }
}

const Keyword* KeywordIndex::find(std::string_view text, KeywordKind kind) const {
  auto it = std::lower_bound(
      keywords_.begin(), keywords_.end(), std::pair{text, kind},
      [](const Keyword& k, const std::pair<std::string_view, KeywordKind>& key) {
        if (k.text != key.first) return std::string_view(k.text) < key.first;
        return k.kind < key.second;
      });
  if (it == keywords_.end() || it->text != text || it->kind != kind) return nullptr;
  return &*it;
}

std::vector<Candidate> KeywordIndex::fuzzy_candidates(std::string_view query,
                                                      std::size_t k,
                                                      KindMask kinds) const {
  if (k == 0) throw SearchError("fuzzy_candidates: k must be >= 1");
  const std::string normalized = normalize_phrase(query);
  if (normalized.empty()) throw SearchError("fuzzy_candidates: empty query");
  const std::u32string q = decode_utf8(normalized);

  std::vector<Candidate> out;
  for (const auto& [len, members] : by_length_) {
    const std::size_t limit = match_threshold(len);
    const std::size_t gap = len > q.size() ? len - q.size() : q.size() - len;
    if (gap > limit) continue;
    for (std::size_t i : members) {
      const Keyword& kw = keywords_[i];
      if (!kinds.contains(kw.kind)) continue;
      if (auto dist = damerau_levenshtein_within(q, decoded_[i], limit)) {
        out.push_back({kw.text, kw.kind, *dist});
      }
    }
  }
  std::sort(out.begin(), out.end(), candidate_less);
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<BusinessId> KeywordIndex::resolve(const KeywordRef& ref) const {
  const Keyword* kw = find(ref);
  if (!kw) {
    throw SearchError("unknown keyword '" + ref.text + "' (" + to_string(ref.kind) + ")");
  }
  return kw->referents;
}

KeywordIndex build_keyword_index(const Directory& d) { return KeywordIndex(d); }

std::vector<Candidate> fuzzy_candidates(const KeywordIndex& ix, std::string_view query,
                                        std::size_t k, KindMask kinds) {
  return ix.fuzzy_candidates(query, k, kinds);
}

}  // namespace ekichabi
