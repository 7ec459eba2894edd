#include "qparch/monitor/checks.hpp"

#include <algorithm>
#include <map>

namespace qparch::monitor {

namespace {

// Everything a channel's checks need, extracted in one trace scan.
struct ChannelIndex {
  std::vector<std::pair<long long, Micros>> publishes;  // seq, publish time
  std::vector<std::pair<long long, Micros>> arrives;    // at the subscriber
  std::vector<std::pair<long long, Micros>> reads;
  std::vector<Micros> sub_firings;
  std::vector<Micros> declarations;  // FAILURE_DECLARED times
  Micros end_time = 0;
};

ChannelIndex build_index(const sim::Trace& trace, const analysis::Channel& ch) {
  ChannelIndex ix;
  const auto pub_sym = trace.symbols.find(ch.publisher);
  const auto sub_sym = trace.symbols.find(ch.subscriber);
  const auto topic_sym = trace.symbols.find(ch.topic);
  for (const auto& e : trace.events) {
    ix.end_time = e.time;
    switch (e.kind) {
      case sim::EventKind::Publish:
        if (e.node == pub_sym && e.topic == topic_sym)
          ix.publishes.emplace_back(e.seq, e.time);
        break;
      case sim::EventKind::Arrive:
        if (e.node == sub_sym && e.topic == topic_sym)
          ix.arrives.emplace_back(e.seq, e.time);
        break;
      case sim::EventKind::Read:
        if (e.node == sub_sym && e.topic == topic_sym)
          ix.reads.emplace_back(e.seq, e.time);
        break;
      case sim::EventKind::StepStart:
        if (e.node == sub_sym) ix.sub_firings.push_back(e.time);
        break;
      case sim::EventKind::FailureDeclared:
        if (e.node == sub_sym && e.topic == topic_sym)
          ix.declarations.push_back(e.time);
        break;
      default:
        break;
    }
  }
  return ix;
}

std::vector<Violation> overtaking_violations(const ChannelIndex& ix) {
  std::vector<Violation> out;
  long long prev = -1;
  for (const auto& [seq, time] : ix.reads) {
    if (prev >= 0 && seq < prev) {
      Violation v;
      v.time = time;
      v.seq = seq;
      v.measured = seq;
      v.bound = prev;
      v.detail = "READ seq " + std::to_string(seq) + " after seq " +
                 std::to_string(prev);
      out.push_back(std::move(v));
    }
    prev = std::max(prev, seq);
  }
  return out;
}

std::vector<Violation> loss_violations(const ChannelIndex& ix, long long bound,
                                       long long* max_run_out) {
  std::vector<Violation> out;
  std::map<long long, bool> read_by_seq;  // over published seqs
  for (const auto& [seq, time] : ix.publishes) read_by_seq[seq] = false;
  for (const auto& [seq, time] : ix.reads) {
    auto it = read_by_seq.find(seq);
    if (it != read_by_seq.end()) it->second = true;
  }
  long long run_start = 0, run_len = 0, max_run = 0;
  for (const auto& [seq, read] : read_by_seq) {
    if (!read) {
      if (run_len == 0) run_start = seq;
      ++run_len;
      continue;
    }
    // a run of never-read messages terminated by this read
    if (run_len > 0) {
      max_run = std::max(max_run, run_len);
      if (run_len > bound) {
        Violation v;
        v.seq = run_start;
        v.measured = run_len;
        v.bound = bound;
        v.detail = "seqs [" + std::to_string(run_start) + ", " +
                   std::to_string(run_start + run_len - 1) + "] never read";
        out.push_back(std::move(v));
      }
      run_len = 0;
    }
  }
  // a trailing unread run is not loss: the trace ended before its deadline
  if (max_run_out) *max_run_out = max_run;
  return out;
}

std::vector<Violation> age_violations(const ChannelIndex& ix, Micros max_age,
                                      Micros* max_observed_out) {
  std::vector<Violation> out;
  std::map<long long, Micros> pub_time(ix.publishes.begin(), ix.publishes.end());
  Micros max_observed = 0;
  for (const auto& [seq, read_time] : ix.reads) {
    auto it = pub_time.find(seq);
    if (it == pub_time.end()) continue;
    const Micros age = read_time - it->second;
    max_observed = std::max(max_observed, age);
    if (age >= max_age) {  // bound is strict
      Violation v;
      v.time = read_time;
      v.seq = seq;
      v.measured = age;
      v.bound = max_age;
      v.detail = "message age " + std::to_string(age) + " >= " +
                 std::to_string(max_age);
      out.push_back(std::move(v));
    }
  }
  if (max_observed_out) *max_observed_out = max_observed;
  return out;
}

std::vector<Violation> processing_violations(const ChannelIndex& ix, Micros bound) {
  std::vector<Violation> out;
  std::map<long long, Micros> first_read;
  for (const auto& [seq, time] : ix.reads)
    if (!first_read.count(seq)) first_read[seq] = time;
  for (const auto& [seq, publish_time] : ix.publishes) {
    const Micros deadline = publish_time + bound;
    if (auto it = first_read.find(seq); it != first_read.end()) {
      if (it->second <= deadline) continue;
      Violation v;
      v.time = it->second;
      v.seq = seq;
      v.measured = it->second - publish_time;
      v.bound = bound;
      v.detail = "read " + std::to_string(it->second - publish_time) +
                 " after publish, bound " + std::to_string(bound);
      out.push_back(std::move(v));
      continue;
    }
    // never read: fine if superseded by a newer arrival before the deadline
    bool superseded = false;
    for (const auto& [aseq, atime] : ix.arrives) {
      if (aseq > seq && atime <= deadline) {
        superseded = true;
        break;
      }
    }
    if (superseded) continue;
    if (ix.end_time <= deadline) continue;  // trace ended before the deadline
    Violation v;
    v.time = deadline;
    v.seq = seq;
    v.measured = ix.end_time - publish_time;
    v.bound = bound;
    v.detail = "seq " + std::to_string(seq) + " neither read nor superseded by " +
               std::to_string(deadline);
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<Violation> detection_violations(const ChannelIndex& ix, long long k) {
  std::vector<Violation> out;
  for (Micros declared_at : ix.declarations) {
    // firings up to and including the declaring one
    std::vector<Micros> firings;
    for (Micros f : ix.sub_firings)
      if (f <= declared_at) firings.push_back(f);
    Micros window_start = 0;
    bool enough = static_cast<long long>(firings.size()) >= k;
    if (enough && firings.size() >= static_cast<size_t>(k) + 1)
      window_start = firings[firings.size() - static_cast<size_t>(k) - 1];
    bool arrived_in_window = false;
    if (enough) {
      for (const auto& [seq, atime] : ix.arrives) {
        if (atime > window_start && atime <= declared_at) {
          arrived_in_window = true;
          break;
        }
      }
    }
    if (!enough || arrived_in_window) {
      Violation v;
      v.time = declared_at;
      v.measured = static_cast<long long>(firings.size());
      v.bound = k;
      v.detail = enough ? "publisher message arrived inside the k-window"
                        : "declared before k subscriber firings elapsed";
      out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace

std::vector<Violation> check_no_overtaking(const sim::Trace& trace,
                                           const analysis::Channel& ch) {
  return overtaking_violations(build_index(trace, ch));
}

std::vector<Violation> check_consecutive_loss(const sim::Trace& trace,
                                              const analysis::Channel& ch,
                                              long long bound,
                                              long long* max_run) {
  return loss_violations(build_index(trace, ch), bound, max_run);
}

std::vector<Violation> check_age(const sim::Trace& trace,
                                 const analysis::Channel& ch, Micros max_age,
                                 Micros* max_observed) {
  return age_violations(build_index(trace, ch), max_age, max_observed);
}

std::vector<Violation> check_processing_latency(const sim::Trace& trace,
                                                const analysis::Channel& ch,
                                                Micros bound) {
  return processing_violations(build_index(trace, ch), bound);
}

std::vector<Violation> check_detection(const sim::Trace& trace,
                                       const analysis::Channel& ch,
                                       long long k_steps) {
  return detection_violations(build_index(trace, ch), k_steps);
}

size_t MonitorReport::violation_count() const {
  size_t n = 0;
  for (const auto& c : checks) n += c.violations.size();
  return n;
}

std::string MonitorReport::to_records() const {
  std::string out;
  for (const auto& c : checks) {
    const std::string channel_text =
        c.channel.publisher + "->" + c.channel.subscriber + " " + c.channel.topic;
    for (const auto& v : c.violations) {
      out += "ERROR\t" + c.check + "\t" + std::to_string(v.time) + "\t" +
             channel_text + " seq=" + std::to_string(v.seq) +
             " measured=" + std::to_string(v.measured) +
             " bound=" + std::to_string(v.bound) + " " + v.detail + "\n";
    }
    out += "SUMMARY\t" + c.check + "\t" + channel_text +
           "\tviolations=" + std::to_string(c.violations.size()) +
           " max=" + std::to_string(c.max_observed) + "\n";
  }
  return out;
}

MonitorReport monitor(const sim::Trace& trace,
                      const std::vector<analysis::ChannelAnalysis>& channels) {
  MonitorReport report;
  for (const auto& entry : channels) {
    ChannelIndex ix = build_index(trace, entry.channel);

    CheckResult overtake{"no_overtaking", entry.channel, {}, 0};
    overtake.violations = overtaking_violations(ix);
    report.checks.push_back(std::move(overtake));

    CheckResult loss{"consecutive_loss", entry.channel, {}, 0};
    long long max_run = 0;
    loss.violations = loss_violations(ix, entry.bounds.consecutive_loss, &max_run);
    loss.max_observed = max_run;
    report.checks.push_back(std::move(loss));

    CheckResult age{"age", entry.channel, {}, 0};
    Micros max_age_seen = 0;
    age.violations = age_violations(ix, entry.bounds.max_age, &max_age_seen);
    age.max_observed = max_age_seen;
    report.checks.push_back(std::move(age));

    CheckResult proc{"processing_latency", entry.channel, {}, 0};
    proc.violations = processing_violations(ix, entry.bounds.max_processing_latency);
    report.checks.push_back(std::move(proc));

    CheckResult detect{"detection", entry.channel, {}, 0};
    detect.violations = detection_violations(ix, entry.bounds.detection_steps);
    report.checks.push_back(std::move(detect));
  }
  return report;
}

}  // namespace qparch::monitor
