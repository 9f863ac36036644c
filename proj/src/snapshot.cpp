#include "ekichabi/snapshot.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <unordered_map>

#include "ekichabi/varint.hpp"

namespace ekichabi {
namespace {

void put_string(std::string& out, std::string_view s) {
  put_varint(out, s.size());
  out.append(s);
}

constexpr std::size_t kHeaderFixed = 4 + 1 + 8;

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(as_bytes(bytes)) {}

  std::size_t offset() const { return pos_; }
  bool done() const { return pos_ == bytes_.size(); }

  std::uint8_t u8(const char* what) {
    if (pos_ >= bytes_.size()) truncated(what);
    return bytes_[pos_++];
  }

  std::uint64_t varint(const char* what) {
    std::uint64_t v = 0;
    std::size_t n = 0;
    switch (get_varint(bytes_.subspan(pos_), v, n)) {
      case VarintStatus::Ok:
        pos_ += n;
        return v;
      case VarintStatus::Incomplete:
        truncated(what);
      case VarintStatus::Overflow:
        break;
    }
    throw SnapshotError(SnapshotError::Kind::BadRecord, pos_,
                        std::string("varint overflow in ") + what);
  }

  std::string_view bytes(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) truncated(what);
    std::string_view s(reinterpret_cast<const char*>(bytes_.data()) + pos_, n);
    pos_ += n;
    return s;
  }

 private:
  [[noreturn]] void truncated(const char* what) {
    throw SnapshotError(SnapshotError::Kind::Truncated, pos_,
                        std::string("truncated ") + what);
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

SnapshotError::SnapshotError(Kind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + " at byte " +
                         std::to_string(offset) + ": " + what),
      kind_(kind),
      offset_(offset) {}

const char* to_string(SnapshotError::Kind kind) {
  switch (kind) {
    case SnapshotError::Kind::BadMagic: return "bad magic";
    case SnapshotError::Kind::UnsupportedFormat: return "unsupported format";
    case SnapshotError::Kind::Truncated: return "truncated";
    case SnapshotError::Kind::UnsortedPool: return "unsorted pool";
    case SnapshotError::Kind::DanglingIndex: return "dangling pool index";
    case SnapshotError::Kind::BadRecord: return "bad record";
    case SnapshotError::Kind::VersionMismatch: return "content version mismatch";
    case SnapshotError::Kind::TrailingBytes: return "trailing bytes";
  }
  return "unknown";
}

std::string canonical_record_bytes(const Directory& d) {
  std::string out;
  for (const Business& b : d.businesses()) {
    put_varint(out, b.id);
    put_string(out, b.name);
    put_string(out, b.owner_name);
    put_string(out, b.phone);
    out.push_back(static_cast<char>(b.sector));
    put_string(out, b.subsector);
    put_string(out, b.district);
    put_string(out, b.village);
    put_string(out, b.subvillage);
    put_varint(out, b.products.size());
    for (const auto& p : b.products) put_string(out, p);
  }
  return out;
}

ContentVersion content_version(const Directory& d) {
  const std::string bytes = canonical_record_bytes(d);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), digest);
  ContentVersion v{};
  std::copy_n(digest, v.size(), v.begin());
  return v;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0xF]);
  }
  return out;
}

std::string version_of(const Directory& d) { return to_hex(content_version(d)); }

std::vector<std::string> string_pool(const Directory& d) {
  std::vector<std::string> pool;
  for (const Business& b : d.businesses()) {
    for (const std::string* s : {&b.name, &b.owner_name, &b.phone, &b.subsector,
                                 &b.district, &b.village, &b.subvillage}) {
      pool.push_back(*s);
    }
    for (const auto& p : b.products) pool.push_back(p);
  }
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
  return pool;
}

std::string encode_snapshot(const Directory& d) {
  const auto pool = string_pool(d);
  std::unordered_map<std::string_view, std::uint64_t> index;
  index.reserve(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i) index.emplace(pool[i], i);

  std::string out(kSnapshotMagic);
  out.push_back(static_cast<char>(kSnapshotFormat));
  const ContentVersion version = content_version(d);
  out.append(reinterpret_cast<const char*>(version.data()), version.size());
  put_varint(out, d.size());
  put_varint(out, pool.size());
  for (const auto& s : pool) put_string(out, s);

  BusinessId prev = 0;
  for (const Business& b : d.businesses()) {
    put_varint(out, b.id - prev);
    prev = b.id;
    put_varint(out, index.at(b.name));
    put_varint(out, index.at(b.owner_name));
    put_varint(out, index.at(b.phone));
    out.push_back(static_cast<char>(b.sector));
    put_varint(out, index.at(b.subsector));
    put_varint(out, index.at(b.district));
    put_varint(out, index.at(b.village));
    put_varint(out, index.at(b.subvillage));
    out.push_back(static_cast<char>(b.products.size()));
    for (const auto& p : b.products) put_varint(out, index.at(p));
  }
  return out;
}

namespace {

void check_header(Reader& r, ContentVersion& version) {
  std::string_view magic = r.bytes(kSnapshotMagic.size(), "magic");
  if (magic != kSnapshotMagic) {
    throw SnapshotError(SnapshotError::Kind::BadMagic, 0, "expected EKD1");
  }
  std::uint8_t format = r.u8("format byte");
  if (format != kSnapshotFormat) {
    throw SnapshotError(SnapshotError::Kind::UnsupportedFormat, 4,
                        "format " + std::to_string(format));
  }
  std::string_view v = r.bytes(version.size(), "content version");
  std::copy(v.begin(), v.end(), version.begin());
}

}  // namespace

std::string snapshot_version(std::string_view bytes) {
  Reader r(bytes);
  ContentVersion version{};
  check_header(r, version);
  return to_hex(version);
}

Directory decode_snapshot(std::string_view bytes) {
  using Kind = SnapshotError::Kind;
  Reader r(bytes);
  ContentVersion version{};
  check_header(r, version);

  const std::uint64_t count = r.varint("business count");
  const std::uint64_t pool_size = r.varint("pool size");
  // Each pool entry and record needs at least one byte; reject absurd
  // counts before reserving.
  if (pool_size > bytes.size() || count > bytes.size()) {
    throw SnapshotError(Kind::Truncated, r.offset(), "counts exceed input size");
  }
  std::vector<std::string_view> pool;
  pool.reserve(pool_size);
  for (std::uint64_t i = 0; i < pool_size; ++i) {
    const std::size_t at = r.offset();
    std::uint64_t len = r.varint("pool entry length");
    if (len > bytes.size()) {
      throw SnapshotError(Kind::Truncated, at, "truncated pool entry");
    }
    std::string_view s = r.bytes(static_cast<std::size_t>(len), "pool entry");
    if (!pool.empty() && !(pool.back() < s)) {
      throw SnapshotError(Kind::UnsortedPool, at,
                          "pool entry " + std::to_string(i) + " out of order");
    }
    pool.push_back(s);
  }

  auto str = [&](const char* what) -> std::string {
    const std::size_t at = r.offset();
    std::uint64_t idx = r.varint(what);
    if (idx >= pool.size()) {
      throw SnapshotError(Kind::DanglingIndex, at,
                          std::string(what) + " index " + std::to_string(idx) +
                              " >= pool size " + std::to_string(pool.size()));
    }
    return std::string(pool[static_cast<std::size_t>(idx)]);
  };

  std::vector<Business> businesses;
  businesses.reserve(static_cast<std::size_t>(count));
  std::uint64_t id = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.offset();
    Business b;
    std::uint64_t delta = r.varint("id delta");
    id += delta;
    if (delta == 0 || id > 0xFFFFFFFFull) {
      throw SnapshotError(Kind::BadRecord, at, "bad id delta");
    }
    b.id = static_cast<BusinessId>(id);
    b.name = str("name");
    b.owner_name = str("owner");
    b.phone = str("phone");
    std::uint8_t sector = r.u8("sector");
    if (!is_valid_sector_code(sector)) {
      throw SnapshotError(Kind::BadRecord, at, "sector " + std::to_string(sector));
    }
    b.sector = static_cast<Sector>(sector);
    b.subsector = str("subsector");
    b.district = str("district");
    b.village = str("village");
    b.subvillage = str("subvillage");
    std::uint8_t products = r.u8("product count");
    if (products > kMaxProducts) {
      throw SnapshotError(Kind::BadRecord, at, "too many products");
    }
    for (std::uint8_t p = 0; p < products; ++p) b.products.push_back(str("product"));
    if (auto field = invalid_field(b)) {
      throw SnapshotError(Kind::BadRecord, at,
                          "business " + std::to_string(b.id) + " field " + *field);
    }
    businesses.push_back(std::move(b));
  }
  if (!r.done()) {
    throw SnapshotError(Kind::TrailingBytes, r.offset(), "data after last record");
  }

  Directory d;
  try {
    d = Directory(std::move(businesses));
  } catch (const DirectoryError& e) {
    throw SnapshotError(Kind::BadRecord, r.offset(), e.what());
  }
  if (content_version(d) != version) {
    throw SnapshotError(Kind::VersionMismatch, 5,
                        "records do not hash to the header version");
  }
  return d;
}

}  // namespace ekichabi
