#include "ekichabi/search.hpp"

#include <algorithm>
#include <set>

#include "ekichabi/text.hpp"

namespace ekichabi {

// ---- FilterState ----------------------------------------------------------------

const char* to_string(Facet f) {
  switch (f) {
    case Facet::Sector: return "sector";
    case Facet::Subsector: return "subsector";
    case Facet::District: return "district";
    case Facet::Village: return "village";
    case Facet::Subvillage: return "subvillage";
  }
  return "?";
}

std::optional<Facet> parent_of(Facet f) {
  switch (f) {
    case Facet::Subsector: return Facet::Sector;
    case Facet::Village: return Facet::District;
    case Facet::Subvillage: return Facet::Village;
    default: return std::nullopt;
  }
}

bool FilterState::is_set(Facet f) const {
  switch (f) {
    case Facet::Sector: return sector.has_value();
    case Facet::Subsector: return subsector.has_value();
    case Facet::District: return district.has_value();
    case Facet::Village: return village.has_value();
    case Facet::Subvillage: return subvillage.has_value();
  }
  return false;
}

std::optional<std::string> FilterState::value(Facet f) const {
  switch (f) {
    case Facet::Sector:
      if (!sector) return std::nullopt;
      return SectorTaxonomy::standard().label(*sector);
    case Facet::Subsector: return subsector;
    case Facet::District: return district;
    case Facet::Village: return village;
    case Facet::Subvillage: return subvillage;
  }
  return std::nullopt;
}

void FilterState::set(Facet f, const std::string& v) {
  switch (f) {
    case Facet::Sector: {
      auto s = SectorTaxonomy::standard().parse(v);
      if (!s) throw FilterError("unknown sector '" + v + "'");
      sector = *s;
      break;
    }
    case Facet::Subsector: subsector = v; break;
    case Facet::District: district = v; break;
    case Facet::Village: village = v; break;
    case Facet::Subvillage: subvillage = v; break;
  }
}

void FilterState::clear(Facet f) {
  switch (f) {
    case Facet::Sector: sector.reset(); break;
    case Facet::Subsector: subsector.reset(); break;
    case Facet::District: district.reset(); break;
    case Facet::Village: village.reset(); break;
    case Facet::Subvillage: subvillage.reset(); break;
  }
}

bool FilterState::structurally_valid() const {
  return (!subsector || sector) && (!village || district) && (!subvillage || village);
}

bool FilterState::empty() const {
  return !sector && !subsector && !district && !village && !subvillage;
}

bool FilterState::matches(const Business& b) const {
  return (!sector || b.sector == *sector) && (!subsector || b.subsector == *subsector) &&
         (!district || b.district == *district) && (!village || b.village == *village) &&
         (!subvillage || b.subvillage == *subvillage);
}

std::string FilterState::key() const {
  std::string k;
  k.push_back(sector ? static_cast<char>('0' + static_cast<int>(*sector)) : '-');
  for (const auto* v : {&subsector, &district, &village, &subvillage}) {
    k.push_back('\x1f');
    if (*v) {
      k.push_back('=');
      k += **v;
    }
  }
  return k;
}

const std::string& facet_value(const Business& b, Facet f) {
  switch (f) {
    case Facet::Sector: return SectorTaxonomy::standard().label(b.sector);
    case Facet::Subsector: return b.subsector;
    case Facet::District: return b.district;
    case Facet::Village: return b.village;
    case Facet::Subvillage: break;
  }
  return b.subvillage;
}

void validate_filter(const Directory& d, const FilterState& f) {
  if (!f.structurally_valid()) {
    throw FilterError("filter facets set out of order: " + f.key());
  }
  if (f.subsector && !SectorTaxonomy::standard().has_subsector(*f.sector, *f.subsector)) {
    throw FilterError("subsector '" + *f.subsector + "' is not in sector '" +
                      SectorTaxonomy::standard().label(*f.sector) + "'");
  }
  const GeoTree& geo = d.geo();
  if (f.district && !geo.contains(*f.district)) {
    throw FilterError("unknown district '" + *f.district + "'");
  }
  if (f.village && !geo.contains(*f.district, *f.village)) {
    throw FilterError("village '" + *f.village + "' is not in district '" + *f.district + "'");
  }
  if (f.subvillage && !geo.contains(*f.district, *f.village, *f.subvillage)) {
    throw FilterError("subvillage '" + *f.subvillage + "' is not in village '" +
                      *f.village + "'");
  }
}

void check_option_dimension(const FilterState& f, Facet dim) {
  if (f.is_set(dim)) {
    throw FilterError(std::string("facet '") + to_string(dim) + "' is already set");
  }
  if (auto parent = parent_of(dim); parent && !f.is_set(*parent)) {
    throw FilterError(std::string("facet '") + to_string(dim) + "' needs '" +
                      to_string(*parent) + "' first");
  }
}

std::string Query::key() const {
  std::string k = filters.key();
  k.push_back('\x1e');
  if (keyword) {
    k.push_back(static_cast<char>('0' + static_cast<int>(keyword->kind)));
    k += keyword->text;
  }
  return k;
}

ResultSet SearchBackend::resolve_keyword(const KeywordRef& kw) const {
  return results({kw, {}});
}

namespace {

void sort_options(std::vector<std::string>& labels, Facet dim) {
  if (dim == Facet::Sector) {
    const auto& tax = SectorTaxonomy::standard();
    std::sort(labels.begin(), labels.end(), [&](const std::string& a, const std::string& b) {
      return *tax.parse(a) < *tax.parse(b);
    });
  } else {
    std::sort(labels.begin(), labels.end(),
              [](const std::string& a, const std::string& b) { return label_less(a, b); });
  }
}

bool label_has(const std::string& label, const std::string& text) {
  if (normalize_phrase(label) == text) return true;
  for (const auto& t : tokenize(label)) {
    if (t == text) return true;
  }
  return false;
}

bool tokens_have(const std::string& label, const std::string& text) {
  for (const auto& t : tokenize(label)) {
    if (t == text) return true;
  }
  return false;
}

std::string posting_key(char tag, std::initializer_list<std::string_view> parts) {
  std::string k(1, tag);
  for (auto p : parts) {
    k.push_back('\x1f');
    k.append(p);
  }
  return k;
}

}  // namespace

bool business_has_keyword(const Business& b, const KeywordRef& kw) {
  switch (kw.kind) {
    case KeywordKind::Sector:
      return label_has(SectorTaxonomy::standard().label(b.sector), kw.text);
    case KeywordKind::Subsector: return label_has(b.subsector, kw.text);
    case KeywordKind::Product:
      return std::any_of(b.products.begin(), b.products.end(),
                         [&](const std::string& p) { return label_has(p, kw.text); });
    case KeywordKind::District: return label_has(b.district, kw.text);
    case KeywordKind::Village: return label_has(b.village, kw.text);
    case KeywordKind::Subvillage: return label_has(b.subvillage, kw.text);
    case KeywordKind::OwnerName: return tokens_have(b.owner_name, kw.text);
    case KeywordKind::BusinessName: return tokens_have(b.name, kw.text);
  }
  return false;
}

// ---- IndexedSearch ------------------------------------------------------------

IndexedSearch::IndexedSearch(std::shared_ptr<const Directory> directory,
                             std::shared_ptr<const KeywordIndex> keywords,
                             std::size_t memo_capacity)
    : directory_(std::move(directory)),
      keywords_(std::move(keywords)),
      count_memo_(memo_capacity),
      option_memo_(memo_capacity) {
  const auto all = directory_->businesses();
  std::vector<const Business*> ordered;
  ordered.reserve(all.size());
  for (const Business& b : all) ordered.push_back(&b);
  std::sort(ordered.begin(), ordered.end(),
            [](const Business* a, const Business* b) { return canonical_less(*a, *b); });

  id_by_rank_.reserve(ordered.size());
  rank_by_id_.assign(all.size() + 1, 0);
  for (std::uint32_t r = 0; r < ordered.size(); ++r) {
    const Business& b = *ordered[r];
    id_by_rank_.push_back(b.id);
    rank_by_id_[b.id] = r;
    const std::string code(1, static_cast<char>('0' + static_cast<int>(b.sector)));
    postings_[posting_key('S', {code})].push_back(r);
    postings_[posting_key('U', {code, b.subsector})].push_back(r);
    postings_[posting_key('D', {b.district})].push_back(r);
    postings_[posting_key('V', {b.district, b.village})].push_back(r);
    postings_[posting_key('W', {b.district, b.village, b.subvillage})].push_back(r);
  }
}

const IndexedSearch::Ranks* IndexedSearch::posting(const std::string& key) const {
  static const Ranks kEmpty;
  auto it = postings_.find(key);
  return it == postings_.end() ? &kEmpty : &it->second;
}

IndexedSearch::Ranks IndexedSearch::matching_ranks(const Query& q) const {
  validate_filter(*directory_, q.filters);
  const FilterState& f = q.filters;

  std::vector<const Ranks*> lists;
  Ranks keyword_ranks;
  if (q.keyword) {
    const Keyword* kw = keywords_->find(*q.keyword);
    if (!kw) throw SearchError("unknown keyword '" + q.keyword->text + "'");
    keyword_ranks.reserve(kw->referents.size());
    for (BusinessId id : kw->referents) keyword_ranks.push_back(rank_by_id_[id]);
    lists.push_back(&keyword_ranks);
  }
  if (f.sector) {
    const std::string code(1, static_cast<char>('0' + static_cast<int>(*f.sector)));
    lists.push_back(f.subsector ? posting(posting_key('U', {code, *f.subsector}))
                                : posting(posting_key('S', {code})));
  }
  if (f.subvillage) {
    lists.push_back(posting(posting_key('W', {*f.district, *f.village, *f.subvillage})));
  } else if (f.village) {
    lists.push_back(posting(posting_key('V', {*f.district, *f.village})));
  } else if (f.district) {
    lists.push_back(posting(posting_key('D', {*f.district})));
  }

  if (lists.empty()) {
    Ranks all(id_by_rank_.size());
    for (std::uint32_t r = 0; r < all.size(); ++r) all[r] = r;
    return all;
  }
  std::sort(lists.begin(), lists.end(),
            [](const Ranks* a, const Ranks* b) { return a->size() < b->size(); });
  Ranks acc = *lists.front();
  Ranks tmp;
  for (std::size_t i = 1; i < lists.size() && !acc.empty(); ++i) {
    tmp.clear();
    std::set_intersection(acc.begin(), acc.end(), lists[i]->begin(), lists[i]->end(),
                          std::back_inserter(tmp));
    acc.swap(tmp);
  }
  return acc;
}

ResultSet IndexedSearch::results(const Query& q) const {
  ResultSet out;
  const Ranks ranks = matching_ranks(q);
  out.ids.reserve(ranks.size());
  for (auto r : ranks) out.ids.push_back(id_by_rank_[r]);
  return out;
}

std::size_t IndexedSearch::count(const Query& q) const {
  const std::string key = q.key();
  if (auto hit = count_memo_.get(key)) return *hit;
  std::size_t n = matching_ranks(q).size();
  count_memo_.put(key, n);
  return n;
}

std::vector<std::string> IndexedSearch::options(const Query& q, Facet dim) const {
  check_option_dimension(q.filters, dim);
  std::string key = q.key();
  key.push_back(static_cast<char>('0' + static_cast<int>(dim)));
  if (auto hit = option_memo_.get(key)) return *hit;

  std::vector<const std::string*> seen;
  for (auto r : matching_ranks(q)) {
    const std::string& v = facet_value(directory_->at(id_by_rank_[r]), dim);
    if (std::find_if(seen.begin(), seen.end(),
                     [&](const std::string* s) { return *s == v; }) == seen.end()) {
      seen.push_back(&v);
    }
  }
  std::vector<std::string> labels;
  labels.reserve(seen.size());
  for (const auto* s : seen) labels.push_back(*s);
  sort_options(labels, dim);
  option_memo_.put(key, labels);
  return labels;
}

std::vector<Candidate> IndexedSearch::fuzzy_candidates(std::string_view query,
                                                       std::size_t k,
                                                       KindMask kinds) const {
  return keywords_->fuzzy_candidates(query, k, kinds);
}

// ---- ScanSearch -----------------------------------------------------------------

ScanSearch::ScanSearch(std::shared_ptr<const Directory> directory,
                       std::shared_ptr<const KeywordIndex> keywords)
    : directory_(std::move(directory)), keywords_(std::move(keywords)) {}

ResultSet ScanSearch::results(const Query& q) const {
  validate_filter(*directory_, q.filters);
  if (q.keyword && !keywords_->find(*q.keyword)) {
    throw SearchError("unknown keyword '" + q.keyword->text + "'");
  }
  std::vector<const Business*> hits;
  for (const Business& b : directory_->businesses()) {
    if (q.filters.matches(b) && (!q.keyword || business_has_keyword(b, *q.keyword))) {
      hits.push_back(&b);
    }
  }
  std::sort(hits.begin(), hits.end(),
            [](const Business* a, const Business* b) { return canonical_less(*a, *b); });
  ResultSet out;
  out.ids.reserve(hits.size());
  for (const auto* b : hits) out.ids.push_back(b->id);
  return out;
}

std::size_t ScanSearch::count(const Query& q) const { return results(q).total(); }

std::vector<std::string> ScanSearch::options(const Query& q, Facet dim) const {
  check_option_dimension(q.filters, dim);
  std::set<std::string> distinct;
  for (BusinessId id : results(q).ids) distinct.insert(facet_value(directory_->at(id), dim));
  std::vector<std::string> labels(distinct.begin(), distinct.end());
  sort_options(labels, dim);
  return labels;
}

std::vector<Candidate> ScanSearch::fuzzy_candidates(std::string_view query, std::size_t k,
                                                    KindMask kinds) const {
  if (k == 0) throw SearchError("fuzzy_candidates: k must be >= 1");
  const std::string normalized = normalize_phrase(query);
  if (normalized.empty()) throw SearchError("fuzzy_candidates: empty query");
  std::vector<Candidate> out;
  for (const Keyword& kw : keywords_->keywords()) {
    if (!kinds.contains(kw.kind)) continue;
    std::size_t dist = damerau_levenshtein(normalized, kw.text);
    if (dist <= match_threshold(char_count(kw.text))) out.push_back({kw.text, kw.kind, dist});
  }
  std::sort(out.begin(), out.end(), candidate_less);
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace ekichabi
