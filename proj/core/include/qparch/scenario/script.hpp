#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qparch/sim/trace.hpp"

namespace qparch::scenario {

// Exogenous input script: CSV rows `time_us,variable,value`. A variable holds
// the value of its latest row with time <= now (step functions sample it).
class InputScript {
 public:
  InputScript() = default;

  // Throws std::runtime_error with a line number on malformed rows.
  static InputScript parse_csv(std::string_view text);

  sim::Scalar at(std::string_view variable, Micros now,
                 sim::Scalar fallback) const;
  bool has(std::string_view variable) const;
  bool empty() const { return rows_.empty(); }

 private:
  std::map<std::string, std::vector<std::pair<Micros, sim::Scalar>>, std::less<>>
      rows_;
};

}  // namespace qparch::scenario
