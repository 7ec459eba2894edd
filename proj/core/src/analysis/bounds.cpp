#include "qparch/analysis/bounds.hpp"

#include <stdexcept>

namespace qparch::analysis {

OvertakeResult no_overtaking(const Channel& ch) {
  return {ch.pub_min > ch.latency, ch.pub_min - ch.latency};
}

long long loss_window(const Channel& ch) {
  if (!ch.valid()) throw std::invalid_argument("invalid channel");
  // smallest M with M*pub_min > L + sub_max
  return (ch.latency + ch.sub_max) / ch.pub_min + 1;
}

long long consecutive_loss_bound(const Channel& ch, long long loss_window_m) {
  long long loss = loss_window_m - ch.queue;
  return loss > 0 ? loss : 0;
}

Micros age_bound(const Channel& ch) { return ch.latency + ch.pub_max; }

Micros processing_latency_bound(const Channel& ch) {
  if (!ch.valid()) throw std::invalid_argument("invalid channel");
  return ch.latency + ch.sub_max;
}

long long failure_detection_steps(const Channel& ch) {
  if (!ch.valid()) throw std::invalid_argument("invalid channel");
  return (ch.latency + ch.pub_max) / ch.sub_min + 1;
}

ChannelBounds derive_bounds(const Channel& ch) {
  ChannelBounds b;
  auto ot = no_overtaking(ch);
  b.no_overtaking = ot.holds;
  b.overtake_margin = ot.margin;
  b.loss_window = loss_window(ch);
  b.consecutive_loss = consecutive_loss_bound(ch, b.loss_window);
  b.max_age = age_bound(ch);
  b.max_processing_latency = processing_latency_bound(ch);
  b.detection_steps = failure_detection_steps(ch);
  b.conditional = !ot.holds;
  return b;
}

std::vector<ChannelAnalysis> analyze(const adl::ArchitectureSpec& spec) {
  std::vector<ChannelAnalysis> out;
  for (const auto& sub_node : spec.nodes) {
    for (const auto& sub : sub_node.subscriptions) {
      const adl::NodeSpec* pub_node = spec.publisher_of(sub.topic);
      if (!pub_node)
        throw std::runtime_error("topic '" + sub.topic +
                                 "' has no unique publisher; validate first");
      Channel ch;
      ch.publisher = pub_node->name;
      ch.subscriber = sub_node.name;
      ch.topic = sub.topic;
      ch.latency = sub.max_latency;
      ch.pub_min = pub_node->period_min;
      ch.pub_max = pub_node->period_max;
      ch.sub_min = sub_node.period_min;
      ch.sub_max = sub_node.period_max;
      ch.queue = sub.buffer_capacity;
      out.push_back({ch, derive_bounds(ch)});
    }
  }
  return out;
}

std::string to_record(const ChannelAnalysis& entry) {
  const Channel& c = entry.channel;
  const ChannelBounds& b = entry.bounds;
  std::string out = "CHANNEL " + c.publisher + " " + c.subscriber + " " + c.topic;
  out += " " + std::to_string(c.latency);
  out += " " + std::to_string(c.pub_min) + " " + std::to_string(c.pub_max);
  out += " " + std::to_string(c.sub_min) + " " + std::to_string(c.sub_max);
  out += " " + std::to_string(c.queue);
  out += std::string(" | NO_OVERTAKE ") + (b.no_overtaking ? "true" : "false");
  out += " | M " + std::to_string(b.loss_window);
  out += " | LOSS " + std::to_string(b.consecutive_loss);
  out += " | AGE " + std::to_string(b.max_age);
  out += " | PROC " + std::to_string(b.max_processing_latency);
  out += " | DETECT " + std::to_string(b.detection_steps);
  return out;
}

std::string to_records(const std::vector<ChannelAnalysis>& entries) {
  std::string out;
  for (const auto& e : entries) {
    out += to_record(e);
    out += '\n';
  }
  return out;
}

}  // namespace qparch::analysis
