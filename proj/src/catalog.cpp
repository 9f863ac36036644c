#include "ekichabi/catalog.hpp"

#include "ekichabi/snapshot.hpp"

namespace ekichabi {
namespace {

std::shared_ptr<Catalog> assemble(std::shared_ptr<const Directory> d, std::string snapshot) {
  auto c = std::make_shared<Catalog>();
  c->directory = std::move(d);
  c->keywords = std::make_shared<const KeywordIndex>(*c->directory);
  c->snapshot = std::move(snapshot);
  c->version = snapshot_version(c->snapshot);
  c->pool = string_pool(*c->directory);
  c->indexed = std::make_unique<IndexedSearch>(c->directory, c->keywords);
  c->scan = std::make_unique<ScanSearch>(c->directory, c->keywords);
  return c;
}

}  // namespace

std::shared_ptr<const Catalog> Catalog::build(Directory d) {
  auto dir = std::make_shared<const Directory>(std::move(d));
  std::string bytes = encode_snapshot(*dir);
  return assemble(std::move(dir), std::move(bytes));
}

std::shared_ptr<const Catalog> Catalog::from_snapshot(std::string_view bytes) {
  auto dir = std::make_shared<const Directory>(decode_snapshot(bytes));
  return assemble(std::move(dir), std::string(bytes));
}

}  // namespace ekichabi
