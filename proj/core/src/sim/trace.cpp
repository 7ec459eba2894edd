#include "qparch/sim/trace.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>

namespace qparch::sim {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "STEP_START", "STEP_END", "PUBLISH", "ARRIVE", "DROP",
    "READ",       "FLAGS",    "VALUE",   "FAULT", "FAILURE_DECLARED"};

std::string flags_text(std::uint8_t flags) {
  std::string out;
  if (flags & flag::kStale) out.push_back('S');
  if (flags & flag::kTimeout) out.push_back('T');
  return out.empty() ? "-" : out;
}

}  // namespace

std::string_view event_kind_name(EventKind k) {
  return kKindNames[static_cast<size_t>(k)];
}

Scalar Scalar::integer(long long v) {
  Scalar s;
  s.kind = Kind::Int;
  s.i = v;
  return s;
}

Scalar Scalar::real(double v) {
  Scalar s;
  s.kind = Kind::Real;
  s.r = v;
  return s;
}

Scalar Scalar::boolean(bool v) {
  Scalar s;
  s.kind = Kind::Bool;
  s.b = v;
  return s;
}

Scalar Scalar::str(std::string v) {
  Scalar s;
  s.kind = Kind::Text;
  s.text = std::move(v);
  return s;
}

double Scalar::as_real() const {
  switch (kind) {
    case Kind::Int:
      return static_cast<double>(i);
    case Kind::Real:
      return r;
    case Kind::Bool:
      return b ? 1.0 : 0.0;
    default:
      return 0.0;
  }
}

bool Scalar::truthy() const {
  switch (kind) {
    case Kind::Int:
      return i != 0;
    case Kind::Real:
      return r != 0.0;
    case Kind::Bool:
      return b;
    case Kind::Text:
      return !text.empty();
    default:
      return false;
  }
}

std::string Scalar::to_string() const {
  switch (kind) {
    case Kind::Int:
      return std::to_string(i);
    case Kind::Real: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), r);
      return std::string(buf, ptr);
    }
    case Kind::Bool:
      return b ? "true" : "false";
    case Kind::Text:
      return text;
    default:
      return "-";
  }
}

Scalar Scalar::parse(std::string_view text) {
  if (text == "-" || text.empty()) return none();
  if (text == "true") return boolean(true);
  if (text == "false") return boolean(false);
  {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return integer(v);
  }
  {
    double v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec == std::errc() && ptr == text.data() + text.size()) return real(v);
  }
  return str(std::string(text));
}

std::int32_t SymbolTable::intern(std::string_view name) {
  auto it = index_.find(std::string(name));
  if (it != index_.end()) return it->second;
  std::int32_t id = static_cast<std::int32_t>(names_.size());
  names_.emplace_back(name);
  index_.emplace(names_.back(), id);
  return id;
}

std::int32_t SymbolTable::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

const std::string& SymbolTable::name(std::int32_t id) const {
  static const std::string kNone = "-";
  if (id < 0 || static_cast<size_t>(id) >= names_.size()) return kNone;
  return names_[static_cast<size_t>(id)];
}

std::string Trace::serialize() const {
  std::string out;
  out += "#seed " + std::to_string(seed) + "\n";
  out += "#grid " + std::to_string(grid) + "\n";
  out += "#rng " + rng_name + "\n";
  out += "#arch-hash " + arch_hash + "\n";
  for (const auto& e : events) {
    out += std::to_string(e.time);
    out += '\t';
    out += event_kind_name(e.kind);
    out += '\t';
    out += symbols.name(e.node);
    out += '\t';
    out += symbols.name(e.topic);
    out += '\t';
    out += e.seq >= 0 ? std::to_string(e.seq) : "-";
    out += '\t';
    if (e.kind == EventKind::Value || e.kind == EventKind::Fault)
      out += e.value.to_string();
    else
      out += flags_text(e.flags);
    out += '\n';
  }
  return out;
}

Trace Trace::parse(std::string_view text, TraceFormatError* error) {
  Trace trace;
  trace.grid = 1;
  int line_no = 0;
  Micros prev_time = -1;
  auto fail = [&](std::string msg) {
    if (error) *error = {line_no, std::move(msg)};
    return trace;
  };

  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      size_t space = line.find(' ');
      std::string_view key = line.substr(0, space);
      std::string_view val = space == std::string_view::npos
                                 ? std::string_view()
                                 : line.substr(space + 1);
      if (key == "#seed")
        std::from_chars(val.data(), val.data() + val.size(), trace.seed);
      else if (key == "#grid")
        std::from_chars(val.data(), val.data() + val.size(), trace.grid);
      else if (key == "#rng")
        trace.rng_name = std::string(val);
      else if (key == "#arch-hash")
        trace.arch_hash = std::string(val);
      continue;
    }
    // time \t kind \t node \t topic \t seq \t flags
    std::array<std::string_view, 6> cols;
    size_t start = 0;
    size_t n = 0;
    for (; n < 6; ++n) {
      size_t tab = line.find('\t', start);
      if (tab == std::string_view::npos) {
        cols[n] = line.substr(start);
        ++n;
        break;
      }
      cols[n] = line.substr(start, tab - start);
      start = tab + 1;
    }
    if (n != 6) return fail("expected 6 tab-separated columns");

    TraceEvent e;
    {
      auto [ptr, ec] =
          std::from_chars(cols[0].data(), cols[0].data() + cols[0].size(), e.time);
      if (ec != std::errc() || ptr != cols[0].data() + cols[0].size())
        return fail("bad timestamp '" + std::string(cols[0]) + "'");
    }
    if (e.time < prev_time) return fail("timestamps decrease");
    prev_time = e.time;

    bool known = false;
    for (size_t k = 0; k < kKindNames.size(); ++k) {
      if (kKindNames[k] == cols[1]) {
        e.kind = static_cast<EventKind>(k);
        known = true;
        break;
      }
    }
    if (!known) return fail("unknown event kind '" + std::string(cols[1]) + "'");

    e.node = cols[2] == "-" ? -1 : trace.symbols.intern(cols[2]);
    e.topic = cols[3] == "-" ? -1 : trace.symbols.intern(cols[3]);
    if (cols[4] != "-") {
      auto [ptr, ec] =
          std::from_chars(cols[4].data(), cols[4].data() + cols[4].size(), e.seq);
      if (ec != std::errc()) return fail("bad sequence number");
    }
    if (e.kind == EventKind::Value || e.kind == EventKind::Fault) {
      e.value = Scalar::parse(cols[5]);
    } else if (cols[5] != "-") {
      for (char c : cols[5]) {
        if (c == 'S')
          e.flags |= flag::kStale;
        else if (c == 'T')
          e.flags |= flag::kTimeout;
        else
          return fail("bad flags column '" + std::string(cols[5]) + "'");
      }
    }
    if (e.kind == EventKind::Fault) trace.faulted = true;
    trace.events.push_back(std::move(e));
  }
  if (error) *error = {};
  return trace;
}

}  // namespace qparch::sim
