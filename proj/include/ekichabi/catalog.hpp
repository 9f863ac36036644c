#pragma once

/// @file ekichabi/catalog.hpp
/// @brief One loaded directory with everything derived from it.

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "ekichabi/directory.hpp"
#include "ekichabi/keywords.hpp"
#include "ekichabi/search.hpp"

namespace ekichabi {

/// Immutable once built. Shared between request threads by shared_ptr.
struct Catalog {
  std::shared_ptr<const Directory> directory;
  std::shared_ptr<const KeywordIndex> keywords;
  std::string snapshot;  // encoded bytes, as served to clients
  std::string version;
  std::vector<std::string> pool;
  std::unique_ptr<IndexedSearch> indexed;
  std::unique_ptr<ScanSearch> scan;

  static std::shared_ptr<const Catalog> build(Directory d);
  /// Throws SnapshotError for invalid bytes.
  static std::shared_ptr<const Catalog> from_snapshot(std::string_view bytes);
};

/// The current catalog; replace() swaps it atomically for new readers.
class CatalogHolder {
 public:
  explicit CatalogHolder(std::shared_ptr<const Catalog> c) : current_(std::move(c)) {}

  std::shared_ptr<const Catalog> get() const {
    std::lock_guard lock(mu_);
    return current_;
  }
  void replace(std::shared_ptr<const Catalog> c) {
    std::lock_guard lock(mu_);
    current_ = std::move(c);
  }

 private:
  mutable std::mutex mu_;
  std::shared_ptr<const Catalog> current_;
};

}  // namespace ekichabi
