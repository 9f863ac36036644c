#pragma once

/// @file ekichabi/directory.hpp
/// @brief The business directory: records, sector taxonomy, geography.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ekichabi {

using BusinessId = std::uint32_t;

inline constexpr std::size_t kMaxProducts = 8;

/// Stable sector codes 1-6.
enum class Sector : std::uint8_t {
  WholesaleTraders = 1,
  Retailers = 2,
  Transporters = 3,
  AgriculturalProcessors = 4,
  SkilledTradespeople = 5,
  Services = 6,
};

inline constexpr int kSectorCount = 6;

class DirectoryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SectorInfo {
  Sector code;
  std::string label;
  std::vector<std::string> subsectors;
  /// Product vocabulary per subsector, parallel to `subsectors`. Only used
  /// by the synthetic generator.
  std::vector<std::vector<std::string>> products;
};

/// The six sectors and their subsectors, in taxonomy (code) order.
class SectorTaxonomy {
 public:
  static const SectorTaxonomy& standard();

  std::span<const SectorInfo> sectors() const { return sectors_; }
  const SectorInfo& info(Sector s) const;
  const std::string& label(Sector s) const { return info(s).label; }
  bool has_subsector(Sector s, std::string_view subsector) const;

  /// Accepts a label (case-insensitive) or a code "1".."6".
  std::optional<Sector> parse(std::string_view label_or_code) const;

 private:
  explicit SectorTaxonomy(std::vector<SectorInfo> sectors);
  std::vector<SectorInfo> sectors_;
};

bool is_valid_sector_code(int code);

/// districts -> villages -> subvillages.
class GeoTree {
 public:
  using Villages = std::map<std::string, std::set<std::string>>;

  void add(const std::string& district, const std::string& village,
           const std::string& subvillage);

  bool contains(std::string_view district) const;
  bool contains(std::string_view district, std::string_view village) const;
  bool contains(std::string_view district, std::string_view village,
                std::string_view subvillage) const;

  const std::map<std::string, Villages, std::less<>>& districts() const {
    return tree_;
  }
  std::size_t village_count() const;
  std::size_t subvillage_count() const;

  /// The default synthetic geography: `districts` x `villages` x
  /// `subvillages` named nodes.
  static GeoTree synthetic(std::size_t districts, std::size_t villages,
                           std::size_t subvillages);

 private:
  std::map<std::string, Villages, std::less<>> tree_;
};

struct Business {
  BusinessId id = 0;
  std::string name;
  std::string owner_name;
  std::string phone;
  Sector sector = Sector::WholesaleTraders;
  std::string subsector;
  std::vector<std::string> products;
  std::string district;
  std::string village;
  std::string subvillage;

  bool operator==(const Business&) const = default;
};

/// Canonical result ordering: name (case-insensitive, then bytewise), then id.
bool canonical_less(const Business& a, const Business& b);

/// Immutable, validated set of businesses sorted by id.
class Directory {
 public:
  Directory() = default;
  /// Validates every invariant and sorts by id. Throws DirectoryError.
  explicit Directory(std::vector<Business> businesses);

  std::span<const Business> businesses() const { return businesses_; }
  std::size_t size() const { return businesses_.size(); }
  bool empty() const { return businesses_.empty(); }

  /// Ids are dense from 1, so lookup is an index.
  const Business* find(BusinessId id) const;
  const Business& at(BusinessId id) const;

  const GeoTree& geo() const { return geo_; }

  bool operator==(const Directory& other) const {
    return businesses_ == other.businesses_;
  }

 private:
  std::vector<Business> businesses_;
  GeoTree geo_;
};

/// Checks a single record's field invariants; returns the offending field
/// name or nullopt.
std::optional<std::string> invalid_field(const Business& b);

// ---- CSV ----------------------------------------------------------------

/// Row-level ingestion failure. Rows are 1-based with the header as row 1.
class CsvError : public DirectoryError {
 public:
  CsvError(std::size_t row, std::string column, const std::string& what);
  std::size_t row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

inline constexpr std::string_view kCsvHeader =
    "id,name,owner_name,phone,sector,subsector,products,district,village,"
    "subvillage";

Directory load_csv(const std::filesystem::path& path);

/// Generic RFC 4180 reader: rows of fields, blank lines skipped. Throws
/// CsvError on an unterminated quote.
std::vector<std::vector<std::string>> read_csv_rows(std::string_view text);
Directory parse_csv(std::string_view text);
std::string to_csv(const Directory& d);

// ---- synthetic data -------------------------------------------------------

struct SyntheticOptions {
  std::size_t districts = 6;
  std::size_t villages_per_district = 17;
  std::size_t subvillages_per_village = 3;
};

/// Deterministic for (seed, n, options) on every platform. Throws
/// std::invalid_argument for n == 0.
Directory generate_synthetic(std::uint64_t seed, std::size_t n,
                             const SyntheticOptions& options = {});

}  // namespace ekichabi
