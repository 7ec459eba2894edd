#include "qparch/sim/engine.hpp"

#include <algorithm>
#include <queue>

namespace qparch::sim {

namespace {

Payload defaults_of(const adl::TopicSpec& topic) {
  Payload p;
  p.fields.reserve(topic.fields.size());
  for (const auto& f : topic.fields) {
    switch (f.default_value.kind) {
      case adl::Literal::Kind::Int:
        p.fields.push_back(Scalar::integer(f.default_value.int_value));
        break;
      case adl::Literal::Kind::Float:
        p.fields.push_back(Scalar::real(f.default_value.float_value));
        break;
      case adl::Literal::Kind::Bool:
        p.fields.push_back(Scalar::boolean(f.default_value.bool_value));
        break;
      case adl::Literal::Kind::Duration:
        p.fields.push_back(Scalar::integer(f.default_value.duration_value));
        break;
      default:
        p.fields.push_back(Scalar::str(f.default_value.text));
        break;
    }
  }
  return p;
}

bool payload_field_ok(adl::FormatType type, const Scalar& v) {
  switch (v.kind) {
    case Scalar::Kind::Int:
      return adl::is_integer_type(type) ? adl::int_fits(type, v.i)
             : adl::is_float_type(type)
                 ? adl::float_fits(type, static_cast<double>(v.i))
                 : type == adl::FormatType::Duration || type == adl::FormatType::Time;
    case Scalar::Kind::Real:
      return adl::is_float_type(type) && adl::float_fits(type, v.r);
    case Scalar::Kind::Bool:
      return type == adl::FormatType::Bool;
    default:
      return !adl::is_sized_numeric(type) && type != adl::FormatType::Bool;
  }
}

}  // namespace

std::optional<Envelope> Mailbox::insert(Envelope e) {
  last_arrival_ = e.arrival_time;
  if (e.seq > last_read_seq_) ++fresh_arrivals_;
  std::optional<Envelope> evicted;
  if (static_cast<int>(buffer_.size()) == capacity_) {
    evicted = std::move(buffer_.front());
    buffer_.pop_front();
  }
  buffer_.push_back(std::move(e));
  return evicted;
}

std::vector<const Envelope*> Mailbox::take_unread() {
  std::vector<const Envelope*> out;
  for (auto& e : buffer_) {
    if (!e.read) {
      e.read = true;
      if (e.seq > last_read_seq_) last_read_seq_ = e.seq;
      out.push_back(&e);
    }
  }
  return out;
}

std::uint8_t compute_in_flags(const Mailbox& mb, Micros now, Micros pub_max,
                              Micros latency_bound) {
  std::uint8_t flags = 0;
  if (now - mb.last_arrival() > pub_max + latency_bound) flags |= flag::kTimeout;
  if (const Envelope* newest = mb.newest()) flags |= newest->flags;
  if (mb.fresh_arrivals() == 0 || (flags & flag::kTimeout)) flags |= flag::kStale;
  return flags;
}

std::uint8_t propagate_flags(std::span<const std::uint8_t> in_flags) {
  std::uint8_t out = 0;
  for (auto f : in_flags) out |= f;
  return out;
}

Micros draw_period_gap(Micros period_min, Micros period_max, JitterModel model,
                       Rng& rng, Micros grid) {
  const Micros lo = (period_min + grid - 1) / grid;  // smallest aligned >= min
  const Micros hi = period_max / grid;               // largest aligned <= max
  if (lo > hi)
    throw SimFault("no grid-aligned period in [" + std::to_string(period_min) +
                   ", " + std::to_string(period_max) + "]");
  switch (model) {
    case JitterModel::FixedMin:
      return lo * grid;
    case JitterModel::FixedMax:
      return hi * grid;
    case JitterModel::Uniform:
      return rng.between(lo, hi) * grid;
    case JitterModel::Script:
      throw SimFault("scripted jitter requires a schedule entry");
  }
  return lo * grid;
}

Micros draw_latency(Micros latency_bound, LatencyModel model, Rng& rng,
                    Micros grid) {
  const Micros hi = latency_bound / grid;  // latencies in (0, L]
  if (hi < 1)
    throw SimFault("latency bound " + std::to_string(latency_bound) +
                   " is below the time grid");
  switch (model) {
    case LatencyModel::Fixed:
      return hi * grid;
    case LatencyModel::Uniform:
      return rng.between(1, hi) * grid;
    case LatencyModel::Script:
      throw SimFault("scripted latency requires a schedule entry");
  }
  return hi * grid;
}

Scalar InputView::field(std::string_view name) const {
  for (size_t i = 0; i < topic->fields.size(); ++i)
    if (topic->fields[i].name == name) return latest->fields[i];
  throw SimFault("no field '" + std::string(name) + "' on topic '" +
                 topic->name + "'");
}

void OutputView::set(std::string_view name, Scalar value) {
  for (size_t i = 0; i < topic->fields.size(); ++i) {
    if (topic->fields[i].name == name) {
      payload.fields[i] = std::move(value);
      return;
    }
  }
  throw SimFault("no field '" + std::string(name) + "' on topic '" +
                 topic->name + "'");
}

const InputView& StepContext::in(std::string_view local_name) const {
  for (const auto& [name, view] : inputs_)
    if (name == local_name) return view;
  throw SimFault("no subscription '" + std::string(local_name) + "'");
}

OutputView& StepContext::out(std::string_view local_name) {
  for (auto& [name, view] : outputs_)
    if (name == local_name) return view;
  throw SimFault("no publication '" + std::string(local_name) + "'");
}

void StepContext::declare_publisher_failure(std::string_view local_name) {
  failures_.emplace_back(local_name);
}

namespace {

struct PendingArrival {
  Micros time = 0;
  std::string topic;
  long long seq = 0;
  std::string subscriber;
  std::string sub_local;
  Envelope envelope;
};

struct QueueItem {
  Micros time = 0;
  int cls = 0;  // 0 arrival, 1 step end, 2 firing; arrivals first at a tick
  std::string key_a;  // arrival: topic / firing: node name
  long long key_seq = 0;
  std::string key_b;  // arrival: subscriber
  size_t payload_index = 0;  // arrivals: index into arrival pool
};

struct QueueOrder {
  bool operator()(const QueueItem& a, const QueueItem& b) const {
    // std::priority_queue is a max-heap; invert for earliest-first
    if (a.time != b.time) return a.time > b.time;
    if (a.cls != b.cls) return a.cls > b.cls;
    if (a.key_a != b.key_a) return a.key_a > b.key_a;
    if (a.key_seq != b.key_seq) return a.key_seq > b.key_seq;
    return a.key_b > b.key_b;
  }
};

struct SubRuntime {
  const adl::SubscriptionSpec* sub = nullptr;
  const adl::TopicSpec* topic = nullptr;
  Micros timeout_period = 0;  // publisher period used in the silence bound
  Mailbox mailbox{1};
  std::int32_t topic_sym = -1;
  std::vector<std::int32_t> field_syms;
};

struct PubRuntime {
  const adl::PublicationSpec* pub = nullptr;
  const adl::TopicSpec* topic = nullptr;
  std::int32_t topic_sym = -1;
  std::vector<std::int32_t> field_syms;
};

struct ChannelRuntime {
  std::string subscriber;
  Micros latency_bound = 0;
  Rng rng{0};
  const std::vector<Micros>* script = nullptr;
  size_t script_pos = 0;
};

struct NodeRuntime {
  const adl::NodeSpec* spec = nullptr;
  StepFunction* fn = nullptr;
  Rng step_rng{0};
  Rng sched_rng{0};
  const std::vector<Micros>* firing_script = nullptr;
  size_t script_pos = 0;
  Micros last_fire = 0;
  bool fired = false;
  std::vector<SubRuntime> subs;
  std::vector<PubRuntime> pubs;
  std::int32_t node_sym = -1;
};

class Engine {
 public:
  Engine(const adl::ArchitectureSpec& spec, const StepBindings& bindings,
         const SimConfig& cfg, const std::string& arch_hash_hex)
      : spec_(spec), cfg_(cfg) {
    if (cfg.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
    if (cfg.grid <= 0) throw std::invalid_argument("grid must be > 0");
    trace_.seed = cfg.seed;
    trace_.grid = cfg.grid;
    trace_.rng_name = kRngName;
    trace_.arch_hash = arch_hash_hex;

    for (const auto& topic : spec.topics) {
      defaults_[topic.name] = defaults_of(topic);
      topic_seq_[topic.name] = 0;
    }

    for (const auto& node : spec.nodes) {
      NodeRuntime rt;
      rt.spec = &node;
      auto it = bindings.find(node.name);
      if (it == bindings.end() || it->second == nullptr)
        throw std::invalid_argument("node '" + node.name +
                                    "' has no step function bound");
      rt.fn = it->second;
      rt.step_rng = Rng(derive_stream_seed(cfg.seed, node.name + "/step"));
      rt.sched_rng = Rng(derive_stream_seed(cfg.seed, node.name + "/sched"));
      if (cfg.jitter == JitterModel::Script) {
        auto s = cfg.firing_script.find(node.name);
        if (s != cfg.firing_script.end()) rt.firing_script = &s->second;
      }
      rt.node_sym = trace_.symbols.intern(node.name);
      for (const auto& sub : node.subscriptions) {
        SubRuntime sr;
        sr.sub = &sub;
        sr.topic = spec.topic(sub.topic);
        if (!sr.topic)
          throw std::invalid_argument("unknown topic '" + sub.topic + "'");
        const adl::NodeSpec* pub_node = spec.publisher_of(sub.topic);
        if (!pub_node)
          throw std::invalid_argument("topic '" + sub.topic +
                                      "' lacks a unique publisher");
        sr.timeout_period = cfg.timeout_uses_pub_min ? pub_node->period_min
                                              : pub_node->period_max;
        sr.mailbox = Mailbox(sub.buffer_capacity);
        sr.topic_sym = trace_.symbols.intern(sub.topic);
        for (const auto& f : sr.topic->fields)
          sr.field_syms.push_back(trace_.symbols.intern(sub.topic + "." + f.name));
        rt.subs.push_back(std::move(sr));
      }
      for (const auto& pub : node.publications) {
        PubRuntime pr;
        pr.pub = &pub;
        pr.topic = spec.topic(pub.topic);
        if (!pr.topic)
          throw std::invalid_argument("unknown topic '" + pub.topic + "'");
        pr.topic_sym = trace_.symbols.intern(pub.topic);
        for (const auto& f : pr.topic->fields)
          pr.field_syms.push_back(trace_.symbols.intern(pub.topic + "." + f.name));
        rt.pubs.push_back(std::move(pr));
      }
      nodes_.emplace(node.name, std::move(rt));
    }

    // channel latency streams keyed topic/subscriber
    for (const auto& node : spec.nodes) {
      for (const auto& sub : node.subscriptions) {
        std::string key = sub.topic + "/" + node.name;
        ChannelRuntime cr;
        cr.subscriber = node.name;
        cr.latency_bound = sub.max_latency;
        cr.rng = Rng(derive_stream_seed(cfg.seed, "channel/" + key));
        if (cfg.latency == LatencyModel::Script) {
          auto s = cfg.latency_script.find(key);
          if (s != cfg.latency_script.end()) cr.script = &s->second;
        }
        channels_.emplace(key, std::move(cr));
      }
    }
  }

  Trace run() {
    for (auto& [name, rt] : nodes_) schedule_firing(rt);
    try {
      loop();
    } catch (const SimFault& fault) {
      emit({now_, EventKind::Fault, fault_node_sym_, -1, -1, 0,
            Scalar::str(fault.what())});
      trace_.faulted = true;
    }
    return std::move(trace_);
  }

 private:
  void emit(TraceEvent e) { trace_.events.push_back(std::move(e)); }

  void schedule_firing(NodeRuntime& rt) {
    // nothing can fire inside the horizon anymore: draw nothing
    if (rt.last_fire + rt.spec->period_min > cfg_.horizon) return;
    Micros gap;
    if (rt.firing_script) {
      if (rt.script_pos >= rt.firing_script->size()) {
        fault_node_sym_ = rt.node_sym;
        throw SimFault("firing script underrun for node '" + rt.spec->name + "'");
      }
      gap = (*rt.firing_script)[rt.script_pos++];
      if (gap < rt.spec->period_min || gap > rt.spec->period_max) {
        fault_node_sym_ = rt.node_sym;
        throw SimFault("scripted gap outside period bounds for node '" +
                       rt.spec->name + "'");
      }
    } else {
      gap = draw_period_gap(rt.spec->period_min, rt.spec->period_max,
                            cfg_.jitter, rt.sched_rng, cfg_.grid);
    }
    Micros at = rt.last_fire + gap;
    if (at > cfg_.horizon) return;
    queue_.push({at, 2, rt.spec->name, 0, "", 0});
  }

  Micros channel_latency(ChannelRuntime& cr, const std::string& key) {
    if (cr.script) {
      if (cr.script_pos >= cr.script->size())
        throw SimFault("latency script underrun for channel '" + key + "'");
      Micros l = (*cr.script)[cr.script_pos++];
      if (l <= 0 || l > cr.latency_bound)
        throw SimFault("scripted latency outside (0, L] for channel '" + key + "'");
      return l;
    }
    return draw_latency(cr.latency_bound, cfg_.latency, cr.rng, cfg_.grid);
  }

  void loop() {
    while (!queue_.empty()) {
      QueueItem item = queue_.top();
      queue_.pop();
      if (item.time > cfg_.horizon) continue;
      now_ = item.time;
      switch (item.cls) {
        case 0:
          process_arrival(arrivals_[item.payload_index]);
          break;
        case 1:
          emit({item.time, EventKind::StepEnd,
                trace_.symbols.intern(item.key_a), -1, -1, 0, Scalar::none()});
          break;
        case 2:
          process_firing(nodes_.at(item.key_a));
          break;
      }
    }
  }

  void process_arrival(PendingArrival& pa) {
    NodeRuntime& rt = nodes_.at(pa.subscriber);
    for (auto& sr : rt.subs) {
      if (sr.sub->local_name != pa.sub_local) continue;
      emit({pa.time, EventKind::Arrive, rt.node_sym, sr.topic_sym, pa.seq,
            pa.envelope.flags, Scalar::none()});
      auto evicted = sr.mailbox.insert(std::move(pa.envelope));
      if (evicted && !evicted->read)
        emit({pa.time, EventKind::Drop, rt.node_sym, sr.topic_sym, evicted->seq,
              evicted->flags, Scalar::none()});
      break;
    }
  }

  void process_firing(NodeRuntime& rt) {
    const Micros t = now_;
    fault_node_sym_ = rt.node_sym;
    emit({t, EventKind::StepStart, rt.node_sym, -1, -1, 0, Scalar::none()});

    StepContext ctx;
    StepContextAccess access{ctx};
    access.now() = t;
    access.dt() = rt.fired ? t - rt.last_fire : t;
    access.rng() = &rt.step_rng;

    std::vector<std::uint8_t> in_flags;
    for (auto& sr : rt.subs) {
      std::uint8_t flags =
          compute_in_flags(sr.mailbox, t, sr.timeout_period, sr.sub->max_latency);
      in_flags.push_back(flags);
      emit({t, EventKind::Flags, rt.node_sym, sr.topic_sym, -1, flags,
            Scalar::none()});
      for (const Envelope* e : sr.mailbox.take_unread())
        emit({t, EventKind::Read, rt.node_sym, sr.topic_sym, e->seq, e->flags,
              Scalar::none()});

      InputView view;
      view.topic = sr.topic;
      view.stale = flags & flag::kStale;
      view.timeout = flags & flag::kTimeout;
      view.has_message = sr.mailbox.newest() != nullptr;
      view.latest = view.has_message ? &sr.mailbox.newest()->payload
                                     : &defaults_.at(sr.sub->topic);
      for (const auto& e : sr.mailbox.buffer()) view.history.push_back(&e.payload);
      for (size_t i = 0; i < sr.topic->fields.size(); ++i)
        emit({t, EventKind::Value, rt.node_sym, sr.field_syms[i], -1, 0,
              view.latest->fields[i]});
      access.inputs().emplace_back(sr.sub->local_name, std::move(view));
      sr.mailbox.on_firing_done();
    }

    const std::uint8_t default_out = propagate_flags(in_flags);
    for (auto& pr : rt.pubs) {
      OutputView view;
      view.topic = pr.topic;
      view.payload = defaults_.at(pr.pub->topic);
      view.flags = default_out;
      access.outputs().emplace_back(pr.pub->local_name, std::move(view));
    }

    rt.fn->step(ctx);

    for (size_t pi = 0; pi < rt.pubs.size(); ++pi) {
      PubRuntime& pr = rt.pubs[pi];
      const OutputView& view = access.outputs()[pi].second;
      for (size_t i = 0; i < pr.topic->fields.size(); ++i) {
        if (!payload_field_ok(pr.topic->fields[i].type, view.payload.fields[i]))
          throw SimFault("payload value " + view.payload.fields[i].to_string() +
                         " does not fit " + pr.topic->name + "." +
                         pr.topic->fields[i].name);
      }
      long long seq = ++topic_seq_.at(pr.pub->topic);
      emit({t, EventKind::Publish, rt.node_sym, pr.topic_sym, seq, view.flags,
            Scalar::none()});
      for (size_t i = 0; i < pr.topic->fields.size(); ++i)
        emit({t, EventKind::Value, rt.node_sym, pr.field_syms[i], seq, 0,
              view.payload.fields[i]});

      // deliver to every subscriber of the topic, node declaration order
      for (const auto& sub_node : spec_.nodes) {
        for (const auto& sub : sub_node.subscriptions) {
          if (sub.topic != pr.pub->topic) continue;
          std::string key = sub.topic + "/" + sub_node.name;
          Micros latency = channel_latency(channels_.at(key), key);
          Envelope env;
          env.seq = seq;
          env.publish_time = t;
          env.arrival_time = t + latency;
          env.flags = view.flags;
          env.payload = view.payload;
          if (env.arrival_time > cfg_.horizon) continue;
          arrivals_.push_back({env.arrival_time, sub.topic, seq, sub_node.name,
                               sub.local_name, std::move(env)});
          queue_.push({arrivals_.back().time, 0, sub.topic, seq,
                       sub_node.name + "/" + sub.local_name,
                       arrivals_.size() - 1});
        }
      }
    }

    for (const auto& local : access.failures()) {
      for (const auto& sr : rt.subs)
        if (sr.sub->local_name == local)
          emit({t, EventKind::FailureDeclared, rt.node_sym, sr.topic_sym, -1, 0,
                Scalar::none()});
    }

    const Micros wcet = rt.spec->wcet.value_or(0);
    if (wcet == 0) {
      emit({t, EventKind::StepEnd, rt.node_sym, -1, -1, 0, Scalar::none()});
    } else {
      queue_.push({t + wcet, 1, rt.spec->name, 0, "", 0});
    }

    rt.last_fire = t;
    rt.fired = true;
    schedule_firing(rt);
  }

  const adl::ArchitectureSpec& spec_;
  const SimConfig& cfg_;
  Trace trace_;
  std::map<std::string, NodeRuntime> nodes_;
  std::map<std::string, ChannelRuntime> channels_;
  std::map<std::string, Payload> defaults_;
  std::map<std::string, long long> topic_seq_;
  std::priority_queue<QueueItem, std::vector<QueueItem>, QueueOrder> queue_;
  std::deque<PendingArrival> arrivals_;
  Micros now_ = 0;
  std::int32_t fault_node_sym_ = -1;
};

}  // namespace

Trace run(const adl::ArchitectureSpec& spec, const StepBindings& bindings,
          const SimConfig& cfg, const std::string& arch_hash_hex) {
  Engine engine(spec, bindings, cfg, arch_hash_hex);
  return engine.run();
}

}  // namespace qparch::sim
