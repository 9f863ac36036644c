#include "ekichabi/directory.hpp"

#include <algorithm>

#include "ekichabi/phone.hpp"
#include "ekichabi/text.hpp"

namespace ekichabi {

// ---- taxonomy -------------------------------------------------------------

SectorTaxonomy::SectorTaxonomy(std::vector<SectorInfo> sectors)
    : sectors_(std::move(sectors)) {}

const SectorTaxonomy& SectorTaxonomy::standard() {
  static const SectorTaxonomy taxonomy({
      {Sector::WholesaleTraders,
       "wholesale traders",
       {"crop wholesalers", "livestock traders", "produce buyers"},
       {{"maize", "beans", "coffee", "bananas"},
        {"cattle", "goats", "chickens"},
        {"cassava", "groundnuts", "sunflower seeds"}}},
      {Sector::Retailers,
       "retailers",
       {"shops and kiosks", "agro-input shops", "hardware stores",
        "pharmacies"},
       {{"soap", "sugar", "cooking oil", "airtime"},
        {"seeds", "fertilizer", "pesticides", "hoes"},
        {"cement", "iron sheets", "nails"},
        {"medicine", "veterinary drugs"}}},
      {Sector::Transporters,
       "transporters",
       {"boda bodas", "lorries", "bicycle carriers"},
       {{"passengers", "parcels"},
        {"crop haulage", "building materials"},
        {"produce delivery"}}},
      {Sector::AgriculturalProcessors,
       "agricultural processors",
       {"milling machines", "oil pressers", "coffee hullers"},
       {{"maize flour", "cassava flour"},
        {"sunflower oil"},
        {"coffee hulling"}}},
      {Sector::SkilledTradespeople,
       "skilled tradespeople",
       {"tailors", "carpenters", "mechanics", "masons"},
       {{"school uniforms", "dresses"},
        {"furniture", "doors"},
        {"motorcycle repair", "bicycle repair"},
        {"bricklaying", "plastering"}}},
      {Sector::Services,
       "services",
       {"restaurants", "salons", "wakalas", "financial institutions"},
       {{"meals", "tea"},
        {"hair braiding", "barbering"},
        {"mobile money"},
        {"savings", "loans"}}},
  });
  return taxonomy;
}

const SectorInfo& SectorTaxonomy::info(Sector s) const {
  auto code = static_cast<int>(s);
  if (!is_valid_sector_code(code)) {
    throw DirectoryError("unknown sector code " + std::to_string(code));
  }
  return sectors_[static_cast<std::size_t>(code - 1)];
}

bool SectorTaxonomy::has_subsector(Sector s, std::string_view subsector) const {
  if (!is_valid_sector_code(static_cast<int>(s))) return false;
  const auto& subs = info(s).subsectors;
  return std::find(subs.begin(), subs.end(), subsector) != subs.end();
}

std::optional<Sector> SectorTaxonomy::parse(std::string_view label_or_code) const {
  std::string key = normalize_phrase(label_or_code);
  if (key.size() == 1 && key[0] >= '1' && key[0] <= '6') {
    return static_cast<Sector>(key[0] - '0');
  }
  for (const auto& s : sectors_) {
    if (s.label == key) return s.code;
  }
  return std::nullopt;
}

bool is_valid_sector_code(int code) { return code >= 1 && code <= kSectorCount; }

// ---- geography --------------------------------------------------------------

void GeoTree::add(const std::string& district, const std::string& village,
                  const std::string& subvillage) {
  tree_[district][village].insert(subvillage);
}

bool GeoTree::contains(std::string_view district) const {
  return tree_.find(district) != tree_.end();
}

bool GeoTree::contains(std::string_view district, std::string_view village) const {
  auto d = tree_.find(district);
  return d != tree_.end() && d->second.count(std::string(village)) > 0;
}

bool GeoTree::contains(std::string_view district, std::string_view village,
                       std::string_view subvillage) const {
  auto d = tree_.find(district);
  if (d == tree_.end()) return false;
  auto v = d->second.find(std::string(village));
  return v != d->second.end() && v->second.count(std::string(subvillage)) > 0;
}

std::size_t GeoTree::village_count() const {
  std::size_t n = 0;
  for (const auto& [_, villages] : tree_) n += villages.size();
  return n;
}

std::size_t GeoTree::subvillage_count() const {
  std::size_t n = 0;
  for (const auto& [_, villages] : tree_) {
    for (const auto& [__, subs] : villages) n += subs.size();
  }
  return n;
}

GeoTree GeoTree::synthetic(std::size_t districts, std::size_t villages,
                           std::size_t subvillages) {
  static const char* kDistricts[] = {"Bukoba", "Muleba",   "Karagwe",
                                     "Kyerwa", "Missenyi", "Ngara"};
  static const char* kPrefixes[] = {"Ka", "Ki", "Bu",  "Mu", "Ru", "Nya",
                                    "Ko", "Ma", "Ke",  "Bi", "Rwa", "Ibu"};
  static const char* kSuffixes[] = {"nazi", "shenye", "gera", "banga", "toma",
                                    "kuyu", "lembo",  "bare", "saka",  "hanga",
                                    "gina", "songa"};
  static const char* kSubvillages[] = {"Kati", "Juu", "Chini", "Mashariki",
                                       "Magharibi", "Kusini", "Kaskazini"};
  constexpr std::size_t kP = std::size(kPrefixes), kS = std::size(kSuffixes);

  GeoTree tree;
  std::size_t village_no = 0;
  for (std::size_t d = 0; d < districts; ++d) {
    std::string district = d < std::size(kDistricts)
                               ? kDistricts[d]
                               : "Wilaya " + std::to_string(d + 1);
    for (std::size_t v = 0; v < villages; ++v, ++village_no) {
      // Walk the syllable grid diagonally so consecutive villages differ in
      // both halves.
      std::size_t round = village_no / kP;
      std::string village;
      if (round < kS) {
        village = std::string(kPrefixes[village_no % kP]) +
                  kSuffixes[(village_no + round) % kS];
      } else {
        village = "Kijiji " + std::to_string(village_no + 1);
      }
      for (std::size_t s = 0; s < subvillages; ++s) {
        std::string sub = s < std::size(kSubvillages)
                              ? kSubvillages[s]
                              : "Kitongoji " + std::to_string(s + 1);
        tree.add(district, village, sub);
      }
    }
  }
  return tree;
}

// ---- records ----------------------------------------------------------------

bool canonical_less(const Business& a, const Business& b) {
  if (a.name != b.name) return label_less(a.name, b.name);
  return a.id < b.id;
}

std::optional<std::string> invalid_field(const Business& b) {
  const auto& tax = SectorTaxonomy::standard();
  if (b.id == 0) return "id";
  if (b.name.empty()) return "name";
  if (b.owner_name.empty()) return "owner_name";
  if (!is_canonical_msisdn(b.phone)) return "phone";
  if (!is_valid_sector_code(static_cast<int>(b.sector))) return "sector";
  if (!tax.has_subsector(b.sector, b.subsector)) return "subsector";
  if (b.products.size() > kMaxProducts) return "products";
  for (const auto& p : b.products) {
    if (p.empty()) return "products";
  }
  if (b.district.empty()) return "district";
  if (b.village.empty()) return "village";
  if (b.subvillage.empty()) return "subvillage";
  return std::nullopt;
}

Directory::Directory(std::vector<Business> businesses)
    : businesses_(std::move(businesses)) {
  std::sort(businesses_.begin(), businesses_.end(),
            [](const Business& a, const Business& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < businesses_.size(); ++i) {
    const Business& b = businesses_[i];
    if (auto field = invalid_field(b)) {
      throw DirectoryError("business " + std::to_string(b.id) +
                           ": invalid field '" + *field + "'");
    }
    if (i > 0 && businesses_[i - 1].id == b.id) {
      throw DirectoryError("duplicate business id " + std::to_string(b.id));
    }
    if (b.id != i + 1) {
      throw DirectoryError("business ids must be dense from 1; found " +
                           std::to_string(b.id) + " at position " +
                           std::to_string(i + 1));
    }
    geo_.add(b.district, b.village, b.subvillage);
  }
}

const Business* Directory::find(BusinessId id) const {
  if (id == 0 || id > businesses_.size()) return nullptr;
  return &businesses_[id - 1];
}

const Business& Directory::at(BusinessId id) const {
  const Business* b = find(id);
  if (!b) throw DirectoryError("no business with id " + std::to_string(id));
  return *b;
}

}  // namespace ekichabi
