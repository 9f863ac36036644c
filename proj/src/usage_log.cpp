#include "ekichabi/usage_log.hpp"

#include "ekichabi/phone.hpp"
#include "ekichabi/varint.hpp"

namespace ekichabi {
namespace {

constexpr const char* kActionNames[] = {"favorite",   "unfavorite",    "call",
                                        "add_contact", "open_detail", "filter_search",
                                        "text_search"};
constexpr const char* kFacetNames[] = {"sector", "subsector", "district", "village",
                                       "subvillage"};

std::string at_record(std::size_t index) {
  return index == LogError::kHeader ? "header" : "record " + std::to_string(index);
}

}  // namespace

const char* action_name(Action a) {
  const int i = static_cast<int>(a);
  return i >= 1 && i <= kActionCount ? kActionNames[i - 1] : "?";
}

std::optional<Action> parse_action_name(std::string_view name) {
  for (int i = 0; i < kActionCount; ++i) {
    if (name == kActionNames[i]) return static_cast<Action>(i + 1);
  }
  return std::nullopt;
}

bool carries_business(Action a) { return static_cast<int>(a) >= 1 && static_cast<int>(a) <= 5; }

LogError::LogError(Kind kind, std::size_t record, const std::string& what)
    : std::runtime_error("usage log " + at_record(record) + ": " + what),
      kind_(kind),
      record_(record) {}

const char* to_string(LogError::Kind k) {
  switch (k) {
    case LogError::Kind::BadMagic: return "bad_magic";
    case LogError::Kind::BadHeader: return "bad_header";
    case LogError::Kind::Truncated: return "truncated";
    case LogError::Kind::BadTag: return "bad_tag";
    case LogError::Kind::OversizeQuery: return "oversize_query";
    case LogError::Kind::BadPayload: return "bad_payload";
    case LogError::Kind::TrailingBytes: return "trailing_bytes";
  }
  return "?";
}

std::string encode_record(const UsageLogRecord& r, std::size_t index) {
  const int tag = static_cast<int>(r.action);
  if (tag < 1 || tag > kActionCount) {
    throw LogError(LogError::Kind::BadTag, index, "tag " + std::to_string(tag));
  }
  std::string out;
  out.push_back(static_cast<char>(tag));
  put_varint(out, r.dt);
  if (carries_business(r.action)) {
    put_varint(out, r.business);
  } else if (r.action == Action::FilterSearch) {
    if (r.facets.size() > kMaxLoggedFacets) {
      throw LogError(LogError::Kind::BadPayload, index, "too many facets");
    }
    put_varint(out, r.facets.size());
    for (const auto& f : r.facets) {
      if (f.facet < 1 || f.facet > kMaxLoggedFacets) {
        throw LogError(LogError::Kind::BadPayload, index, "facet tag " + std::to_string(f.facet));
      }
      out.push_back(static_cast<char>(f.facet));
      put_varint(out, f.value);
    }
  } else {
    if (r.query.size() > kMaxLoggedQuery) {
      throw LogError(LogError::Kind::OversizeQuery, index,
                     "query of " + std::to_string(r.query.size()) + " bytes");
    }
    out.push_back(static_cast<char>(r.query.size()));
    out += r.query;
  }
  return out;
}

std::string encode_batch(const LogBatch& b) {
  if (!is_canonical_msisdn(b.msisdn)) {
    throw LogError(LogError::Kind::BadHeader, LogError::kHeader, "msisdn not canonical");
  }
  std::string out(kLogMagic);
  out += b.msisdn;
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((b.base_ts >> (8 * i)) & 0xFF));
  out.append(reinterpret_cast<const char*>(b.version.data()), b.version.size());
  put_varint(out, b.records.size());
  for (std::size_t i = 0; i < b.records.size(); ++i) out += encode_record(b.records[i], i);
  return out;
}

std::size_t encoded_size(const LogBatch& b) { return encode_batch(b).size(); }

void BatchDecoder::feed(std::string_view chunk) {
  buffer_.append(chunk);
  parse();
  // Keep only the unconsumed tail.
  if (pos_ > 4096 && pos_ * 2 > buffer_.size()) {
    buffer_.erase(0, pos_);
    pos_ = 0;
  }
}

void BatchDecoder::parse() {
  if (!header_done_) {
    const std::size_t have = buffer_.size() - pos_;
    const std::size_t magic = std::min(have, kLogMagic.size());
    if (buffer_.compare(pos_, magic, kLogMagic.substr(0, magic)) != 0) {
      throw LogError(LogError::Kind::BadMagic, LogError::kHeader, "bad magic");
    }
    if (have < kLogHeaderSize) return;
    std::uint64_t count = 0;
    std::size_t used = 0;
    auto status = get_varint(as_bytes(std::string_view(buffer_).substr(pos_ + kLogHeaderSize)),
                             count, used);
    if (status == VarintStatus::Incomplete) return;
    if (status == VarintStatus::Overflow) {
      throw LogError(LogError::Kind::BadHeader, LogError::kHeader, "record count overflow");
    }
    const char* p = buffer_.data() + pos_ + 4;
    batch_.msisdn.assign(p, 12);
    if (!is_canonical_msisdn(batch_.msisdn)) {
      throw LogError(LogError::Kind::BadHeader, LogError::kHeader, "msisdn not canonical");
    }
    batch_.base_ts = 0;
    for (int i = 0; i < 4; ++i) {
      batch_.base_ts |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[12 + i])) << (8 * i);
    }
    for (int i = 0; i < 8; ++i) batch_.version[i] = static_cast<std::uint8_t>(p[16 + i]);
    count_ = count;
    pos_ += kLogHeaderSize + used;
    header_done_ = true;
  }
  while (batch_.records.size() < count_ && parse_record()) {
  }
  if (batch_.records.size() == count_ && pos_ < buffer_.size()) {
    throw LogError(LogError::Kind::TrailingBytes, count_,
                   std::to_string(buffer_.size() - pos_) + " bytes after the last record");
  }
}

bool BatchDecoder::parse_record() {
  const std::size_t index = batch_.records.size();
  const auto bytes = as_bytes(std::string_view(buffer_).substr(pos_));
  std::size_t at = 0;
  auto varint = [&](std::uint64_t& v) -> bool {
    std::size_t used = 0;
    auto st = get_varint(bytes.subspan(at), v, used);
    if (st == VarintStatus::Overflow) {
      throw LogError(LogError::Kind::BadPayload, index, "varint overflow");
    }
    if (st == VarintStatus::Incomplete) return false;
    at += used;
    return true;
  };

  if (bytes.empty()) return false;
  const int tag = bytes[at++];
  if (tag < 1 || tag > kActionCount) {
    throw LogError(LogError::Kind::BadTag, index, "tag " + std::to_string(tag));
  }
  UsageLogRecord r;
  r.action = static_cast<Action>(tag);
  if (!varint(r.dt)) return false;
  if (carries_business(r.action)) {
    std::uint64_t id = 0;
    if (!varint(id)) return false;
    if (id > 0xFFFFFFFFu) throw LogError(LogError::Kind::BadPayload, index, "business id too large");
    r.business = static_cast<BusinessId>(id);
  } else if (r.action == Action::FilterSearch) {
    std::uint64_t n = 0;
    if (!varint(n)) return false;
    if (n > kMaxLoggedFacets) throw LogError(LogError::Kind::BadPayload, index, "too many facets");
    for (std::uint64_t i = 0; i < n; ++i) {
      if (at >= bytes.size()) return false;
      FacetChoice f;
      f.facet = bytes[at++];
      if (f.facet < 1 || f.facet > kMaxLoggedFacets) {
        throw LogError(LogError::Kind::BadPayload, index, "facet tag " + std::to_string(f.facet));
      }
      if (!varint(f.value)) return false;
      r.facets.push_back(f);
    }
  } else {
    if (at >= bytes.size()) return false;
    const std::size_t len = bytes[at++];
    if (len > kMaxLoggedQuery) {
      throw LogError(LogError::Kind::OversizeQuery, index,
                     "query of " + std::to_string(len) + " bytes");
    }
    if (bytes.size() - at < len) return false;
    r.query.assign(reinterpret_cast<const char*>(bytes.data() + at), len);
    at += len;
  }
  pos_ += at;
  batch_.records.push_back(std::move(r));
  return true;
}

LogBatch BatchDecoder::finish() {
  if (!header_done_) {
    throw LogError(LogError::Kind::Truncated, LogError::kHeader, "incomplete header");
  }
  if (batch_.records.size() < count_) {
    throw LogError(LogError::Kind::Truncated, batch_.records.size(),
                   "batch ends inside the record");
  }
  return batch_;
}

LogBatch decode_batch(std::string_view bytes) {
  BatchDecoder d;
  d.feed(bytes);
  return d.finish();
}

std::vector<std::int64_t> record_times(const LogBatch& b) {
  std::vector<std::int64_t> out;
  std::int64_t t = b.base_ts;
  for (const auto& r : b.records) {
    t += static_cast<std::int64_t>(r.dt);
    out.push_back(t);
  }
  return out;
}

std::string render_payload(const UsageLogRecord& r, const std::vector<std::string>* pool) {
  if (carries_business(r.action)) return "business=" + std::to_string(r.business);
  if (r.action == Action::FilterSearch) {
    std::string out;
    for (const auto& f : r.facets) {
      if (!out.empty()) out.push_back(';');
      out += kFacetNames[f.facet - 1];
      out.push_back('=');
      if (f.facet != 1 && pool && f.value < pool->size()) {
        out += (*pool)[f.value];
      } else if (f.facet != 1) {
        out += "#" + std::to_string(f.value);
      } else {
        out += std::to_string(f.value);
      }
    }
    return out;
  }
  return "query=" + r.query;
}

}  // namespace ekichabi
