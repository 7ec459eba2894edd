#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qparch/adl/ast.hpp"
#include "qparch/sim/rng.hpp"
#include "qparch/sim/trace.hpp"

namespace qparch::sim {

enum class JitterModel { Uniform, FixedMin, FixedMax, Script };
enum class LatencyModel { Uniform, Fixed, Script };

struct SimConfig {
  std::uint64_t seed = 0;
  Micros horizon = 0;
  JitterModel jitter = JitterModel::Uniform;
  LatencyModel latency = LatencyModel::Uniform;
  Micros grid = 1;  // all event times are multiples of this resolution
  // The timeout flag trips after "publisher period + L" of silence. The
  // publisher period is ambiguous for jittered nodes; the conservative upper
  // bound (pub_max) never raises false timeouts and is the default.
  bool timeout_uses_pub_min = false;
  // adversarial schedules: firing gaps per node, latencies per "topic/subscriber"
  std::map<std::string, std::vector<Micros>> firing_script;
  std::map<std::string, std::vector<Micros>> latency_script;
};

// Message instance in flight / in a mailbox.
struct Payload {
  std::vector<Scalar> fields;  // positional, per TopicSpec field order
  bool operator==(const Payload&) const = default;
};

struct Envelope {
  long long seq = 0;  // strictly increasing per topic
  Micros publish_time = 0;
  Micros arrival_time = 0;
  std::uint8_t flags = 0;
  Payload payload;
  bool read = false;
};

// Per-subscription buffer: the newest Q arrived messages, arrival-ordered.
class Mailbox {
 public:
  explicit Mailbox(int capacity) : capacity_(capacity) {}

  // Delivery in arrival order. When full the oldest entry is evicted and
  // returned; callers report it as a DROP if it was never read.
  std::optional<Envelope> insert(Envelope e);

  // Marks everything unread as read; returns pointers in arrival order.
  std::vector<const Envelope*> take_unread();

  const Envelope* newest() const {
    return buffer_.empty() ? nullptr : &buffer_.back();
  }
  const std::deque<Envelope>& buffer() const { return buffer_; }
  long long last_read_seq() const { return last_read_seq_; }
  Micros last_arrival() const { return last_arrival_; }
  long long fresh_arrivals() const { return fresh_arrivals_; }
  void on_firing_done() { fresh_arrivals_ = 0; }

 private:
  int capacity_;
  std::deque<Envelope> buffer_;
  long long last_read_seq_ = 0;
  Micros last_arrival_ = 0;      // publisher silence reference, sim start = 0
  long long fresh_arrivals_ = 0; // arrivals with seq > last_read_seq since firing
};

// stale: nothing newer than last_read arrived since the previous firing, or
// the newest envelope itself carries the flag; timeout: publisher silent for
// longer than pub_max + L. Timeout implies stale.
std::uint8_t compute_in_flags(const Mailbox& mb, Micros now, Micros pub_max,
                              Micros latency_bound);

// Default out-flags: bitwise OR over all subscription in-flags.
std::uint8_t propagate_flags(std::span<const std::uint8_t> in_flags);

// One period draw. Gaps land on the grid inside [period_min, period_max].
Micros draw_period_gap(Micros period_min, Micros period_max, JitterModel model,
                       Rng& rng, Micros grid);
// One latency draw in (0, L], grid-aligned.
Micros draw_latency(Micros latency_bound, LatencyModel model, Rng& rng,
                    Micros grid);

// Thrown by step functions (and raised internally for payload type faults and
// script underruns); surfaces as a FAULT trace event.
struct SimFault : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class StepContext;

// A node's Mealy machine: constructed per run, stepped at every firing.
class StepFunction {
 public:
  virtual ~StepFunction() = default;
  virtual void step(StepContext& ctx) = 0;
};

struct InputView {
  const adl::TopicSpec* topic = nullptr;
  const Payload* latest = nullptr;  // topic defaults until a message arrives
  bool has_message = false;
  bool stale = false;
  bool timeout = false;
  std::vector<const Payload*> history;  // mailbox content, oldest to newest

  Scalar field(std::string_view name) const;
};

struct OutputView {
  const adl::TopicSpec* topic = nullptr;
  Payload payload;  // pre-filled with topic defaults
  std::uint8_t flags = 0;

  void set(std::string_view name, Scalar value);
  void turn_on(std::uint8_t f) { flags |= f; }
  void turn_off(std::uint8_t f) { flags &= static_cast<std::uint8_t>(~f); }
};

class StepContext {
 public:
  Micros now() const { return now_; }
  Micros dt() const { return dt_; }  // elapsed since the previous firing
  Rng& rng() { return *rng_; }

  const InputView& in(std::string_view local_name) const;
  OutputView& out(std::string_view local_name);

  // Scenario-level failure detector verdict for a subscription's publisher.
  void declare_publisher_failure(std::string_view local_name);

 private:
  friend struct StepContextAccess;
  Micros now_ = 0;
  Micros dt_ = 0;
  Rng* rng_ = nullptr;
  std::vector<std::pair<std::string, InputView>> inputs_;
  std::vector<std::pair<std::string, OutputView>> outputs_;
  std::vector<std::string> failures_;  // local subscription names
};

// Engine-side handle for populating a StepContext; not part of the step API.
struct StepContextAccess {
  StepContext& ctx;
  Micros& now() { return ctx.now_; }
  Micros& dt() { return ctx.dt_; }
  Rng*& rng() { return ctx.rng_; }
  std::vector<std::pair<std::string, InputView>>& inputs() { return ctx.inputs_; }
  std::vector<std::pair<std::string, OutputView>>& outputs() { return ctx.outputs_; }
  std::vector<std::string>& failures() { return ctx.failures_; }
};

using StepBindings = std::map<std::string, StepFunction*>;

// Seeded discrete-event run over [0, horizon]. Every node must be bound.
// Identical (spec, bindings behavior, cfg) give a bit-identical trace. On a
// fault the trace ends with a FAULT event and trace.faulted is set.
Trace run(const adl::ArchitectureSpec& spec, const StepBindings& bindings,
          const SimConfig& cfg, const std::string& arch_hash_hex);

}  // namespace qparch::sim
