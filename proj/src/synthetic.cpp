#include <random>
#include <stdexcept>
#include <unordered_set>

#include "ekichabi/directory.hpp"

namespace ekichabi {
namespace {

// std::mt19937_64's output sequence is fixed by the standard; the standard
// distributions are not, so range reduction is done here.
class Picker {
 public:
  explicit Picker(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  template <typename Container>
  const auto& from(const Container& c) {
    return c[below(std::size(c))];
  }

 private:
  std::mt19937_64 rng_;
};

const char* const kFirstNames[] = {
    "Asha",   "Juma",   "Neema",  "Baraka", "Rehema", "Hamisi", "Zawadi",
    "Salum",  "Upendo", "Daudi",  "Mwajuma", "Elia",  "Halima", "Yusufu",
    "Pendo",  "Amani",  "Furaha", "Issa",   "Mariamu", "Petro", "Tumaini",
    "Saidi",  "Grace",  "Joseph", "Witness", "Godfrey", "Agnes", "Emmanuel",
    "Fatuma", "Rashidi"};

const char* const kLastNames[] = {
    "Mushi",   "Kato",     "Rwegasira", "Byabato", "Kamugisha", "Mutalemwa",
    "Bashaija", "Kaijage", "Mugisha",   "Ndyetabula", "Rutta", "Lwakatare",
    "Tibaijuka", "Kahigi", "Nshala",    "Bishanga", "Mbeki",   "Mwombeki",
    "Kyaruzi", "Katabaro", "Muganyizi", "Rugemalira", "Tigalyoma", "Kashaija"};

const char* const kNameWords[] = {"Amani", "Baraka", "Neema", "Upendo",
                                  "Tumaini", "Faraja", "Mshikamano", "Jipe Moyo",
                                  "Mwanga", "Uhuru", "Imani", "Bahati"};

// Name patterns per sector, in taxonomy order.
const char* const kSectorPrefixes[kSectorCount][3] = {
    {"Jumla", "Biashara ya", "Soko la"},
    {"Duka la", "Kioski cha", "Duka"},
    {"Usafiri wa", "Boda", "Lori la"},
    {"Mashine ya", "Kinu cha", "Usindikaji"},
    {"Fundi", "Karakana ya", "Ufundi"},
    {"Huduma ya", "Mgahawa", "Saluni"}};

std::string make_phone(Picker& pick, std::unordered_set<std::string>& used) {
  for (;;) {
    std::string phone = pick.below(4) == 0 ? "2556" : "2557";
    for (int i = 0; i < 8; ++i) phone.push_back(static_cast<char>('0' + pick.below(10)));
    if (used.insert(phone).second) return phone;
  }
}

}  // namespace

Directory generate_synthetic(std::uint64_t seed, std::size_t n,
                             const SyntheticOptions& options) {
  if (n == 0) throw std::invalid_argument("generate_synthetic: n must be >= 1");
  if (options.districts == 0 || options.villages_per_district == 0 ||
      options.subvillages_per_village == 0) {
    throw std::invalid_argument("generate_synthetic: empty geography");
  }

  const auto& taxonomy = SectorTaxonomy::standard();
  const GeoTree geo = GeoTree::synthetic(options.districts,
                                         options.villages_per_district,
                                         options.subvillages_per_village);
  struct Place {
    const std::string* district;
    const std::string* village;
    const std::string* subvillage;
  };
  std::vector<Place> places;
  for (const auto& [district, villages] : geo.districts()) {
    for (const auto& [village, subs] : villages) {
      for (const auto& sub : subs) places.push_back({&district, &village, &sub});
    }
  }

  Picker pick(seed);
  std::unordered_set<std::string> phones;
  std::vector<Business> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Business b;
    b.id = static_cast<BusinessId>(i + 1);
    const SectorInfo& sector = taxonomy.sectors()[pick.below(kSectorCount)];
    b.sector = sector.code;
    std::size_t sub = pick.below(sector.subsectors.size());
    b.subsector = sector.subsectors[sub];

    std::string first = pick.from(kFirstNames);
    b.owner_name = first + " " + pick.from(kLastNames);
    const auto& prefixes = kSectorPrefixes[static_cast<int>(b.sector) - 1];
    std::string prefix = pick.from(prefixes);
    b.name = prefix + " " + (pick.below(2) == 0 ? first : std::string(pick.from(kNameWords)));

    b.phone = make_phone(pick, phones);

    const auto& vocab = sector.products[sub];
    std::size_t count = pick.below(std::min<std::size_t>(vocab.size(), 3) + 1);
    std::vector<std::size_t> order(vocab.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    for (std::size_t k = 0; k < count; ++k) {
      std::swap(order[k], order[k + pick.below(order.size() - k)]);
      b.products.push_back(vocab[order[k]]);
    }

    const Place& place = places[pick.below(places.size())];
    b.district = *place.district;
    b.village = *place.village;
    b.subvillage = *place.subvillage;
    out.push_back(std::move(b));
  }
  return Directory(std::move(out));
}

}  // namespace ekichabi
