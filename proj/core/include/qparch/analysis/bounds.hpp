#pragma once

#include <string>
#include <vector>

#include "qparch/adl/ast.hpp"
#include "qparch/support/time.hpp"

namespace qparch::analysis {

// One publisher -> subscriber edge of a topic. All durations are integer
// microseconds; queue is the subscriber's mailbox capacity.
struct Channel {
  std::string publisher;
  std::string subscriber;
  std::string topic;
  Micros latency = 0;  // declared MAXLATENCY, measured from publisher step start
  Micros pub_min = 0;
  Micros pub_max = 0;
  Micros sub_min = 0;
  Micros sub_max = 0;
  int queue = 1;

  // latency 0 is allowed as a degenerate boundary in bound arithmetic; the
  // validator still demands MAXLATENCY > 0 on real subscriptions.
  bool valid() const {
    return latency >= 0 && pub_min > 0 && pub_max >= pub_min && sub_min > 0 &&
           sub_max >= sub_min && queue >= 1;
  }
};

struct OvertakeResult {
  bool holds = false;
  Micros margin = 0;  // pub_min - latency, signed
};

struct ChannelBounds {
  bool no_overtaking = false;
  Micros overtake_margin = 0;
  long long loss_window = 1;        // M: smallest M with M*pub_min > L + sub_max
  long long consecutive_loss = 0;   // max(M - Q, 0)
  Micros max_age = 0;               // L + pub_max (strict bound)
  Micros max_processing_latency = 0;  // L + sub_max
  long long detection_steps = 1;    // k: smallest k with k*sub_min > L + pub_max
  // The loss and age bounds assume no overtaking; when that fails they are
  // still reported but only hold conditionally.
  bool conditional = false;
};

struct ChannelAnalysis {
  Channel channel;
  ChannelBounds bounds;
};

// Messages are read in publication order iff pub_min > L (strict).
OvertakeResult no_overtaking(const Channel& ch);

// Smallest M with M*pub_min > L + sub_max; the subscriber reads at least one
// of every M consecutive messages (no overtaking assumed).
long long loss_window(const Channel& ch);

// With queue Q, at most max(M-Q, 0) consecutive messages are never read.
long long consecutive_loss_bound(const Channel& ch, long long loss_window_m);

// Strict bound on read_time - publish_time for every read message.
Micros age_bound(const Channel& ch);

// A message published at t is processed by t + L + sub_max unless superseded.
Micros processing_latency_bound(const Channel& ch);

// Smallest k with k*sub_min > L + pub_max: after k consecutive subscriber
// firings without a new message, publisher failure may be soundly declared.
long long failure_detection_steps(const Channel& ch);

ChannelBounds derive_bounds(const Channel& ch);

// One entry per (publisher, subscriber, topic) triple, ordered by subscriber
// declaration order then subscription order. Pure function of its input.
std::vector<ChannelAnalysis> analyze(const adl::ArchitectureSpec& spec);

// Line-delimited record:
// CHANNEL pub sub topic L pub_min pub_max sub_min sub_max Q | NO_OVERTAKE b |
// M m | LOSS l | AGE a | PROC p | DETECT k
std::string to_record(const ChannelAnalysis& entry);
std::string to_records(const std::vector<ChannelAnalysis>& entries);

}  // namespace qparch::analysis
