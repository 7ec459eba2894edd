#pragma once

#include <string>
#include <vector>

#include "qparch/analysis/bounds.hpp"
#include "qparch/sim/trace.hpp"

namespace qparch::monitor {

struct Violation {
  Micros time = 0;
  long long seq = -1;
  long long measured = 0;
  long long bound = 0;
  std::string detail;
};

struct CheckResult {
  std::string check;  // no_overtaking / consecutive_loss / age / processing_latency / detection
  analysis::Channel channel;
  std::vector<Violation> violations;
  long long max_observed = 0;  // check-specific: max age, longest loss run, ...
};

struct MonitorReport {
  std::vector<CheckResult> checks;

  size_t violation_count() const;
  bool clean() const { return violation_count() == 0; }
  // Mirrors the validation line format:
  // SEVERITY<TAB>CHECK<TAB>time<TAB>message  (+ one SUMMARY line per check)
  std::string to_records() const;
};

// All checks re-derive their verdicts from PUBLISH/ARRIVE/READ/STEP events
// only; they never trust engine-internal DROP bookkeeping.
std::vector<Violation> check_no_overtaking(const sim::Trace& trace,
                                           const analysis::Channel& ch);
std::vector<Violation> check_consecutive_loss(const sim::Trace& trace,
                                              const analysis::Channel& ch,
                                              long long bound,
                                              long long* max_run = nullptr);
std::vector<Violation> check_age(const sim::Trace& trace,
                                 const analysis::Channel& ch, Micros max_age,
                                 Micros* max_observed = nullptr);
std::vector<Violation> check_processing_latency(const sim::Trace& trace,
                                                const analysis::Channel& ch,
                                                Micros bound);
std::vector<Violation> check_detection(const sim::Trace& trace,
                                       const analysis::Channel& ch,
                                       long long k_steps);

// Runs the five checks for every analyzed channel.
MonitorReport monitor(const sim::Trace& trace,
                      const std::vector<analysis::ChannelAnalysis>& channels);

}  // namespace qparch::monitor
