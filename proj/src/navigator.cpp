#include "ekichabi/navigator.hpp"

#include <algorithm>
#include <charconv>

#include "ekichabi/text.hpp"

namespace ekichabi {
namespace {

constexpr std::size_t kItemChars = 25;    // 24 characters and "…"
constexpr std::size_t kDetailChars = 32;

constexpr Facet kCategoryOrder[] = {Facet::Sector, Facet::Subsector, Facet::District,
                                    Facet::Village, Facet::Subvillage};
constexpr Facet kLocationOrder[] = {Facet::District, Facet::Village, Facet::Subvillage,
                                    Facet::Sector, Facet::Subsector};
constexpr Facet kTextOrder[] = {Facet::District, Facet::Village};

using Pages = std::vector<std::pair<std::size_t, std::size_t>>;

std::optional<std::uint32_t> parse_choice(std::string_view s) {
  if (s.empty() || s.size() > 6) return std::nullopt;
  std::uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string item_line(std::size_t index, const std::string& label) {
  return std::to_string(ordinal_for(index)) + ". " + truncate_chars(label, kItemChars);
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

}  // namespace

std::uint32_t ordinal_for(std::size_t index) {
  const auto n = static_cast<std::uint32_t>(index) + 1;
  return n < 96 ? n : n + 4;
}

std::optional<std::size_t> index_for(std::uint32_t ordinal) {
  if (ordinal == 0 || (ordinal >= 96 && ordinal <= 99)) return std::nullopt;
  return ordinal < 96 ? ordinal - 1 : ordinal - 5;
}

std::span<const Facet> facet_order(EntryPath p) {
  switch (p) {
    case EntryPath::Category: return kCategoryOrder;
    case EntryPath::Location: return kLocationOrder;
    case EntryPath::Text: return kTextOrder;
    case EntryPath::None: break;
  }
  return {};
}

struct SessionMachine::Layout {
  enum class Kind { List, Prose, Prompt, Detail };
  Kind kind = Kind::List;
  std::string title;
  std::vector<std::string> units;  // list labels, or words of prose
  std::vector<std::string> lines;  // prompt and detail bodies
  bool more_code = true;           // prose: "0. Zaidi" between pages
  bool show_code = false;
  bool back_code = false;
  bool continue_code = false;
};

SessionMachine::SessionMachine(const SearchBackend& search, const Strings& strings,
                               std::string version, ScreenMemo* memo)
    : search_(search), strings_(strings), version_(std::move(version)), memo_(memo) {}

Query SessionMachine::query_of(const SessionState& s) const {
  return {s.keyword, s.filters};
}

std::vector<Candidate> SessionMachine::candidates(const SessionState& s) const {
  if (s.query.empty()) return {};
  return search_.fuzzy_candidates(s.query, kDefaultCandidates, kinds_for(s.text_type));
}

SessionMachine::Layout SessionMachine::layout(const SessionState& s) const {
  Layout l;
  l.back_code = !s.trail.empty();
  auto prose = [&](const char* title, const char* body) {
    l.kind = Layout::Kind::Prose;
    l.title = strings_.get(title);
    for (auto& w : split(strings_.get(body), ' ')) {
      if (!w.empty()) l.units.push_back(std::move(w));
    }
  };
  switch (s.node) {
    case Node::Welcome:
      l.title = strings_.get("welcome.title");
      l.units = {strings_.get("welcome.category"), strings_.get("welcome.location"),
                 strings_.get("welcome.text"), strings_.get("welcome.help")};
      break;
    case Node::SectorList:
    case Node::SubsectorList:
    case Node::DistrictList:
    case Node::VillageList:
    case Node::SubvillageList: {
      const Facet f = *facet_of(s.node);
      l.title = strings_.get(std::string("list.") + to_string(f));
      l.units = search_.options(query_of(s), f);
      l.show_code = true;
      break;
    }
    case Node::TextTypeMenu:
      l.title = strings_.get("text.menu");
      l.units = {strings_.get("text.type.name"), strings_.get("text.type.location"),
                 strings_.get("text.type.products"), strings_.get("text.type.owner")};
      break;
    case Node::TextInput: {
      static constexpr const char* kPrompts[] = {"text.prompt.name", "text.prompt.name",
                                                 "text.prompt.location",
                                                 "text.prompt.products", "text.prompt.owner"};
      l.kind = Layout::Kind::Prompt;
      l.title = strings_.get(kPrompts[static_cast<int>(s.text_type)]);
      break;
    }
    case Node::KeywordSelect: {
      const auto cands = candidates(s);
      if (cands.empty()) {
        prose("keyword.title", "keyword.none");
        break;
      }
      l.title = strings_.get("keyword.title");
      for (const auto& c : cands) {
        const bool shared = std::count_if(cands.begin(), cands.end(), [&](const Candidate& o) {
                              return o.text == c.text;
                            }) > 1;
        std::string label = c.text;
        if (shared) {
          std::string kind = to_string(c.kind);
          std::replace(kind.begin(), kind.end(), '_', ' ');
          label += " (" + kind + ")";
        }
        l.units.push_back(std::move(label));
      }
      break;
    }
    case Node::BusinessList: {
      l.title = strings_.get("list.business");
      const auto& d = search_.directory();
      for (BusinessId id : search_.results(query_of(s)).ids) l.units.push_back(d.at(id).name);
      break;
    }
    case Node::Disclaimer:
      prose("disclaimer.title", "disclaimer.body");
      l.more_code = false;
      l.continue_code = true;
      break;
    case Node::Help:
      prose("help.title", "help.body");
      break;
    case Node::BusinessDetail: {
      l.kind = Layout::Kind::Detail;
      const Business* b = s.selected_business ? search_.directory().find(*s.selected_business)
                                              : nullptr;
      if (!b) {
        l.lines = {strings_.get("list.empty")};
        break;
      }
      l.lines = {
          truncate_chars(b->name, kDetailChars),
          truncate_chars(SectorTaxonomy::standard().label(b->sector), kDetailChars),
          truncate_chars(strings_.get("detail.owner") + " " + b->owner_name, kDetailChars),
          truncate_chars(b->district + "/" + b->village + "/" + b->subvillage, kDetailChars),
          strings_.get("detail.phone") + " " + b->phone,
      };
      break;
    }
  }
  return l;
}

namespace {

// Greedy page fill. The header always reserves the wider of title and error
// line so that page boundaries do not move when an error is shown.
template <typename Layout>
Pages paginate(const Layout& l, const Strings& strings) {
  const std::size_t header =
      std::max(char_count(l.title), char_count(strings.get("error.invalid")));
  std::size_t fixed = 0;  // footer lines present on every page, with newlines
  if (l.show_code) fixed += char_count(strings.get("nav.show")) + 1;
  if (l.back_code) fixed += char_count(strings.get("nav.back")) + 1;
  if (l.continue_code) fixed += char_count(strings.get("nav.continue")) + 1;
  const std::size_t more = char_count(strings.get("nav.more")) + 1;
  const std::size_t n = l.units.size();

  Pages pages;
  if (l.kind == Layout::Kind::List) {
    std::vector<std::size_t> widths(n);
    for (std::size_t i = 0; i < n; ++i) widths[i] = char_count(item_line(i, l.units[i])) + 1;
    std::size_t start = 0;
    while (start < n) {
      std::size_t rest = header + fixed;
      for (std::size_t i = start; i < n; ++i) rest += widths[i];
      if (rest <= kScreenLimit) {
        pages.emplace_back(start, n);
        break;
      }
      std::size_t used = header + fixed + more, end = start;
      while (end < n && used + widths[end] <= kScreenLimit) used += widths[end++];
      if (end == start) ++end;
      pages.emplace_back(start, end);
      start = end;
    }
  } else if (l.kind == Layout::Kind::Prose) {
    const std::size_t budget =
        kScreenLimit - header - fixed - (l.more_code ? more : 0) - 1;
    std::size_t start = 0;
    while (start < n) {
      std::size_t used = char_count(l.units[start]), end = start + 1;
      while (end < n && used + 1 + char_count(l.units[end]) <= budget) {
        used += 1 + char_count(l.units[end++]);
      }
      pages.emplace_back(start, end);
      start = end;
    }
  }
  if (pages.empty()) pages.emplace_back(0, 0);
  return pages;
}

}  // namespace

std::vector<std::string> SessionMachine::items(const SessionState& s) const {
  auto l = layout(s);
  if (l.kind != Layout::Kind::List) return {};
  return l.units;
}

Pages SessionMachine::pages(const SessionState& s) const {
  return paginate(layout(s), strings_);
}

Screen SessionMachine::render(const SessionState& s, bool invalid) const {
  if (!memo_) return render_fresh(s, invalid);
  std::string key = version_;
  key.push_back('\x1e');
  key += s.view_key();
  if (invalid) key += "\x1e!";
  if (auto hit = memo_->lookup(key)) return *hit;
  Screen screen = render_fresh(s, invalid);
  memo_->store(key, screen);
  return screen;
}

Screen SessionMachine::render_fresh(const SessionState& s, bool invalid) const {
  const Layout l = layout(s);
  const std::string& error = strings_.get("error.invalid");
  std::vector<std::string> lines;
  Screen screen;

  switch (l.kind) {
    case Layout::Kind::Detail:
      screen.kind = ScreenKind::End;
      lines = l.lines;
      break;
    case Layout::Kind::Prompt:
      if (invalid) lines.push_back(error);
      lines.push_back(l.title);
      lines.push_back(strings_.get("nav.back"));
      break;
    case Layout::Kind::List:
    case Layout::Kind::Prose: {
      const Pages pages = paginate(l, strings_);
      const std::size_t page = std::min<std::size_t>(s.page, pages.size() - 1);
      const auto [first, last] = pages[page];
      const bool more = page + 1 < pages.size();
      lines.push_back(invalid ? error : l.title);
      if (l.kind == Layout::Kind::List) {
        for (std::size_t i = first; i < last; ++i) lines.push_back(item_line(i, l.units[i]));
        if (l.units.empty()) lines.push_back(strings_.get("list.empty"));
      } else {
        std::string text;
        for (std::size_t i = first; i < last; ++i) {
          if (i > first) text.push_back(' ');
          text += l.units[i];
        }
        lines.push_back(std::move(text));
      }
      if (more && l.more_code) lines.push_back(strings_.get("nav.more"));
      if (l.show_code) lines.push_back(strings_.get("nav.show"));
      if (l.back_code) lines.push_back(strings_.get("nav.back"));
      if (l.continue_code) lines.push_back(strings_.get("nav.continue"));
      break;
    }
  }
  screen.body = join_lines(lines);
  return screen;
}

StepResult SessionMachine::start(std::string msisdn, bool disclaimer_seen,
                                 std::int64_t now) const {
  SessionState s;
  s.msisdn = std::move(msisdn);
  s.disclaimer_seen = disclaimer_seen;
  s.last_active = now;
  Screen screen = render(s);
  return {std::move(s), std::move(screen), false};
}

void SessionMachine::go(SessionState& s, Node next) const {
  s.trail.push_back({s.node, s.page});
  s.node = next;
  s.page = 0;
}

void SessionMachine::advance(SessionState& s) const {
  std::optional<Facet> next;
  for (Facet f : facet_order(s.entry_path)) {
    if (!s.filters.is_set(f)) {
      next = f;
      break;
    }
  }
  if (!next || search_.count(query_of(s)) <= kJumpThreshold) {
    go(s, Node::BusinessList);
  } else {
    go(s, list_node(*next));
  }
}

void SessionMachine::home(SessionState& s) const {
  SessionState fresh;
  fresh.msisdn = std::move(s.msisdn);
  fresh.disclaimer_seen = s.disclaimer_seen;
  fresh.last_active = s.last_active;
  s = std::move(fresh);
}

void SessionMachine::back(SessionState& s) const {
  if (s.page > 0) {
    --s.page;
    return;
  }
  if (s.trail.empty()) return;
  const TrailEntry e = s.trail.back();
  s.trail.pop_back();
  s.node = e.node;
  s.page = e.page;
  if (e.node != Node::Disclaimer && e.node != Node::BusinessDetail) {
    s.selected_business.reset();
  }
  switch (e.node) {
    case Node::Welcome:
      home(s);
      break;
    case Node::TextTypeMenu:
      s.text_type = TextType::None;
      [[fallthrough]];
    case Node::TextInput:
      s.query.clear();
      [[fallthrough]];
    case Node::KeywordSelect:
      s.keyword.reset();
      s.filters = {};
      break;
    default:
      if (auto f = facet_of(e.node)) {
        auto order = facet_order(s.entry_path);
        auto it = std::find(order.begin(), order.end(), *f);
        for (; it != order.end(); ++it) s.filters.clear(*it);
      }
      break;
  }
}

bool SessionMachine::submit_query(SessionState& s, std::string_view input) const {
  std::string q = truncate_bytes(normalize_phrase(input), kQueryLimitBytes);
  q = trim(q);
  if (q.empty()) return false;
  s.query = std::move(q);
  const auto cands = candidates(s);
  const auto exact = std::count_if(cands.begin(), cands.end(),
                                   [](const Candidate& c) { return c.distance == 0; });
  if (exact == 1) {
    const Candidate& c = cands.front();
    s.keyword = c.ref();
    const Keyword* kw = search_.keywords().find(c.ref());
    s.filters = kw && kw->facet ? *kw->facet : FilterState{};
    advance(s);
  } else {
    go(s, Node::KeywordSelect);
  }
  return true;
}

bool SessionMachine::choose(SessionState& s, std::size_t index) const {
  switch (s.node) {
    case Node::Welcome:
      if (index == 0 || index == 1) {
        s.entry_path = index == 0 ? EntryPath::Category : EntryPath::Location;
        advance(s);
      } else if (index == 2) {
        s.entry_path = EntryPath::Text;
        go(s, Node::TextTypeMenu);
      } else {
        go(s, Node::Help);
      }
      return true;
    case Node::TextTypeMenu:
      s.text_type = static_cast<TextType>(index + 1);
      go(s, Node::TextInput);
      return true;
    case Node::KeywordSelect: {
      const auto cands = candidates(s);
      s.keyword = cands.at(index).ref();
      const Keyword* kw = search_.keywords().find(cands[index].ref());
      s.filters = kw && kw->facet ? *kw->facet : FilterState{};
      advance(s);
      return true;
    }
    case Node::BusinessList: {
      const auto ids = search_.results(query_of(s)).ids;
      s.selected_business = ids.at(index);
      go(s, s.disclaimer_seen ? Node::BusinessDetail : Node::Disclaimer);
      return true;
    }
    default:
      if (auto f = facet_of(s.node)) {
        const auto labels = search_.options(query_of(s), *f);
        s.filters.set(*f, labels.at(index));
        advance(s);
        return true;
      }
      return false;
  }
}

StepResult SessionMachine::step(SessionState s, std::string_view raw, std::int64_t now) const {
  s.last_active = now;
  const std::string input = trim(raw);
  auto finish = [&](bool ok) {
    Screen screen = render(s, !ok);
    return StepResult{std::move(s), std::move(screen), !ok};
  };

  if (input == kInputHome) {
    home(s);
    return finish(true);
  }
  if (input == kInputBack) {
    back(s);
    return finish(true);
  }
  if (s.node == Node::TextInput) return finish(submit_query(s, input));
  if (s.node == Node::BusinessDetail) return finish(false);

  const Layout l = layout(s);
  const Pages pages = paginate(l, strings_);
  if (input == kInputNext) {
    if (s.page + 1 < pages.size()) {
      ++s.page;
      return finish(true);
    }
    if (s.node == Node::Disclaimer) {
      s.disclaimer_seen = true;
      go(s, Node::BusinessDetail);
      return finish(true);
    }
    return finish(false);
  }
  if (input == kInputShow) {
    if (!is_filter_node(s.node)) return finish(false);
    go(s, Node::BusinessList);
    return finish(true);
  }
  if (l.kind != Layout::Kind::List) return finish(false);
  auto ordinal = parse_choice(input);
  auto index = ordinal ? index_for(*ordinal) : std::nullopt;
  const auto [first, last] = pages[std::min<std::size_t>(s.page, pages.size() - 1)];
  if (!index || *index < first || *index >= last) return finish(false);
  return finish(choose(s, *index));
}

}  // namespace ekichabi
