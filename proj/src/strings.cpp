#include "ekichabi/strings.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ekichabi/text.hpp"

namespace ekichabi {
namespace {

constexpr std::string_view kDefaults = R"(# eKichabi screen text
welcome.title=Karibu eKichabi
welcome.category=Search by category
welcome.location=Search by location
welcome.text=Search by typing
welcome.help=Help
nav.more=0. Zaidi
nav.back=99. Rudi
nav.show=96. Ona biashara
nav.continue=0. Endelea
error.invalid=Chaguo batili.
list.sector=Select sector:
list.subsector=Select subsector:
list.district=Select district:
list.village=Select village:
list.subvillage=Select subvillage:
list.business=Select business:
list.empty=No businesses found.
text.menu=Search by:
text.type.name=Business name
text.type.location=Location
text.type.products=Products/services
text.type.owner=Owner name
text.prompt.name=Type the business name:
text.prompt.location=Type a place name:
text.prompt.products=Type a product or service:
text.prompt.owner=Type the owner's name:
keyword.title=Did you mean:
keyword.none=No matches found. Check the spelling and try again.
disclaimer.title=Notice:
disclaimer.body=Every business here was visited in person by our team to record its contact details. Please take care when dealing with people you do not know. Some businesses may close or change what they do, and we cannot guarantee any transaction.
help.title=Help:
help.body=1: choose a sector, then narrow by place. 2: choose a place, then a sector. 3: type a business name, place, product or owner name and pick the closest word. Enter 0 for the next page, 99 to go back, 98 for the main menu and 96 to see matching businesses at once.
detail.owner=Mmiliki:
detail.phone=Simu:
gateway.refused=Samahani, huduma hii ni kwa washiriki wa utafiti tu.
gateway.error=Huduma haipatikani kwa sasa. Jaribu tena baadaye.
)";

std::string unescape(std::string_view v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == '\\' && i + 1 < v.size()) {
      char n = v[++i];
      out.push_back(n == 'n' ? '\n' : n);
    } else {
      out.push_back(v[i]);
    }
  }
  return out;
}

}  // namespace

Strings::Strings() { merge(kDefaults); }

const Strings& Strings::defaults() {
  static const Strings s;
  return s;
}

void Strings::merge(std::string_view text) {
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::runtime_error("strings line " + std::to_string(line_no) +
                               ": expected key=value");
    }
    entries_[trim(line.substr(0, eq))] = unescape(line.substr(eq + 1));
  }
}

Strings Strings::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open strings file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  Strings s;
  s.merge(buf.str());
  return s;
}

const std::string& Strings::get(std::string_view key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) throw std::out_of_range("no string for key " + std::string(key));
  return it->second;
}

}  // namespace ekichabi
