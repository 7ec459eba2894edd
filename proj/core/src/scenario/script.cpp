#include "qparch/scenario/script.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace qparch::scenario {

InputScript InputScript::parse_csv(std::string_view text) {
  InputScript script;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    size_t c1 = line.find(',');
    size_t c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c1 == std::string_view::npos || c2 == std::string_view::npos)
      throw std::runtime_error("script line " + std::to_string(line_no) +
                               ": expected time_us,variable,value");
    std::string_view time_text = line.substr(0, c1);
    if (time_text == "time_us") continue;  // header row
    Micros time = 0;
    auto [ptr, ec] =
        std::from_chars(time_text.data(), time_text.data() + time_text.size(), time);
    if (ec != std::errc() || ptr != time_text.data() + time_text.size())
      throw std::runtime_error("script line " + std::to_string(line_no) +
                               ": bad timestamp '" + std::string(time_text) + "'");
    std::string variable(line.substr(c1 + 1, c2 - c1 - 1));
    sim::Scalar value = sim::Scalar::parse(line.substr(c2 + 1));
    script.rows_[variable].emplace_back(time, std::move(value));
  }
  for (auto& [name, rows] : script.rows_)
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
  return script;
}

sim::Scalar InputScript::at(std::string_view variable, Micros now,
                            sim::Scalar fallback) const {
  auto it = rows_.find(variable);
  if (it == rows_.end()) return fallback;
  sim::Scalar value = std::move(fallback);
  for (const auto& [time, v] : it->second) {
    if (time > now) break;
    value = v;
  }
  return value;
}

bool InputScript::has(std::string_view variable) const {
  return rows_.count(variable) > 0;
}

}  // namespace qparch::scenario
