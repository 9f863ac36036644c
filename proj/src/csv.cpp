#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ekichabi/directory.hpp"
#include "ekichabi/phone.hpp"
#include "ekichabi/text.hpp"

namespace ekichabi {
namespace {

constexpr const char* kColumns[] = {"id",        "name",     "owner_name",
                                    "phone",     "sector",   "subsector",
                                    "products",  "district", "village",
                                    "subvillage"};
constexpr std::size_t kColumnCount = std::size(kColumns);

struct CsvRow {
  std::size_t line;  // 1-based row number
  std::vector<std::string> fields;
};

// RFC 4180 reader: quoted fields may contain commas, doubled quotes and line
// breaks.
std::vector<CsvRow> read_rows(std::string_view text) {
  std::vector<CsvRow> rows;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false, field_started = false;
  std::size_t row_no = 1;

  auto end_row = [&] {
    if (field_started || !fields.empty() || !field.empty()) {
      fields.push_back(std::move(field));
      rows.push_back({row_no, std::move(fields)});
    }
    fields.clear();
    field.clear();
    field_started = false;
    ++row_no;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        fields.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        end_row();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
  }
  if (in_quotes) throw CsvError(row_no, "", "unterminated quoted field");
  end_row();
  return rows;
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Business parse_row(const CsvRow& row) {
  if (row.fields.size() != kColumnCount) {
    throw CsvError(row.line, "",
                   "expected " + std::to_string(kColumnCount) +
                       " columns, found " + std::to_string(row.fields.size()));
  }
  auto col = [&](std::size_t i) { return trim(row.fields[i]); };
  auto fail = [&](std::size_t i, const std::string& why) -> CsvError {
    return CsvError(row.line, kColumns[i], why);
  };

  Business b;
  const std::string id = col(0);
  if (id.empty() || id.size() > 9 ||
      id.find_first_not_of("0123456789") != std::string::npos) {
    throw fail(0, "id must be a positive integer");
  }
  b.id = static_cast<BusinessId>(std::stoul(id));
  b.name = col(1);
  b.owner_name = col(2);
  const std::string phone = col(3);
  if (phone.empty()) throw fail(3, "phone is empty");
  auto canonical = try_normalize_msisdn(phone);
  if (!canonical) throw fail(3, "unrecognised phone number '" + phone + "'");
  b.phone = *canonical;
  auto sector = SectorTaxonomy::standard().parse(col(4));
  if (!sector) throw fail(4, "unknown sector '" + col(4) + "'");
  b.sector = *sector;
  b.subsector = normalize_phrase(col(5));
  for (const auto& p : split(row.fields[6], ';')) {
    std::string term = trim(p);
    if (!term.empty()) b.products.push_back(term);
  }
  if (b.products.size() > kMaxProducts) {
    throw fail(6, "more than " + std::to_string(kMaxProducts) + " products");
  }
  b.district = col(7);
  b.village = col(8);
  b.subvillage = col(9);

  if (auto field = invalid_field(b)) {
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      if (*field == kColumns[i]) throw fail(i, "invalid or empty value");
    }
    throw CsvError(row.line, *field, "invalid value");
  }
  return b;
}

}  // namespace

CsvError::CsvError(std::size_t row, std::string column, const std::string& what)
    : DirectoryError("row " + std::to_string(row) +
                     (column.empty() ? "" : ", column \"" + column + "\"") +
                     ": " + what),
      row_(row),
      column_(std::move(column)) {}

Directory parse_csv(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  auto rows = read_rows(text);
  if (rows.empty()) throw CsvError(1, "", "missing header row");

  const auto& header = rows.front().fields;
  bool header_ok = header.size() == kColumnCount;
  for (std::size_t i = 0; header_ok && i < kColumnCount; ++i) {
    header_ok = normalize_phrase(header[i]) == kColumns[i];
  }
  if (!header_ok) {
    throw CsvError(1, "", "header must be: " + std::string(kCsvHeader));
  }

  std::vector<Business> businesses;
  std::unordered_map<BusinessId, std::size_t> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    Business b = parse_row(rows[r]);
    auto [it, inserted] = seen.emplace(b.id, rows[r].line);
    if (!inserted) {
      throw CsvError(rows[r].line, "id",
                     "duplicate id " + std::to_string(b.id) +
                         " (first seen on row " + std::to_string(it->second) +
                         ")");
    }
    businesses.push_back(std::move(b));
  }
  return Directory(std::move(businesses));
}

std::vector<std::vector<std::string>> read_csv_rows(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (auto& row : read_rows(text)) out.push_back(std::move(row.fields));
  return out;
}

Directory load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DirectoryError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_csv(buf.str());
}

std::string to_csv(const Directory& d) {
  const auto& tax = SectorTaxonomy::standard();
  std::string out(kCsvHeader);
  out.push_back('\n');
  for (const Business& b : d.businesses()) {
    std::string products;
    for (std::size_t i = 0; i < b.products.size(); ++i) {
      if (i) products.push_back(';');
      products += b.products[i];
    }
    const std::string fields[] = {std::to_string(b.id), b.name, b.owner_name,
                                  b.phone, tax.label(b.sector), b.subsector,
                                  products, b.district, b.village,
                                  b.subvillage};
    for (std::size_t i = 0; i < kColumnCount; ++i) {
      if (i) out.push_back(',');
      out += quote(fields[i]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace ekichabi
