#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qparch/adl/types.hpp"
#include "qparch/support/time.hpp"

namespace qparch::adl {

struct SourcePos {
  int line = 0;
  int col = 0;
  bool operator==(const SourcePos&) const = default;
};

// Scalar literal attached to a declaration (field default, address, ...).
struct Literal {
  enum class Kind { Int, Float, Bool, Duration, String, Dotted };
  Kind kind = Kind::Int;
  long long int_value = 0;
  double float_value = 0.0;
  bool bool_value = false;
  Micros duration_value = 0;
  std::string text;  // string body / dotted address / original spelling for floats

  bool operator==(const Literal&) const = default;

  static Literal integer(long long v);
  static Literal real(double v);
  static Literal boolean(bool v);
  static Literal duration(Micros v);
  static Literal string(std::string v);
  static Literal dotted(std::string v);
};

struct FieldSpec {
  std::string name;
  FormatType type = FormatType::Int32;
  Literal default_value;
  SourcePos pos;

  bool operator==(const FieldSpec& o) const {
    return name == o.name && type == o.type && default_value == o.default_value;
  }
};

// A class field that the toolkit does not model (step bindings and anything
// unrecognized). Preserved token-for-token so nothing is silently dropped.
struct OpaqueField {
  std::string name;
  std::string raw;  // space-joined tokens exactly as relexable
  bool known_binding = false;  // PATH/CXX/LIB and friends vs truly unknown
  SourcePos pos;

  bool operator==(const OpaqueField& o) const {
    return name == o.name && raw == o.raw && known_binding == o.known_binding;
  }
};

struct TopicSpec {
  std::string name;
  std::vector<FieldSpec> fields;
  std::vector<OpaqueField> extras;
  SourcePos pos;

  const FieldSpec* field(std::string_view field_name) const;
  bool operator==(const TopicSpec& o) const {
    return name == o.name && fields == o.fields && extras == o.extras;
  }
};

struct SubscriptionSpec {
  std::string local_name;
  std::string topic;
  Micros max_latency = 0;
  int buffer_capacity = 1;
  SourcePos pos;

  bool operator==(const SubscriptionSpec& o) const {
    return local_name == o.local_name && topic == o.topic &&
           max_latency == o.max_latency && buffer_capacity == o.buffer_capacity;
  }
};

struct PublicationSpec {
  std::string local_name;
  std::string topic;
  SourcePos pos;

  bool operator==(const PublicationSpec& o) const {
    return local_name == o.local_name && topic == o.topic;
  }
};

struct NodeSpec {
  std::string name;
  Micros period_min = 0;
  Micros period_max = 0;
  std::optional<Micros> wcet;
  std::vector<PublicationSpec> publications;
  std::vector<SubscriptionSpec> subscriptions;
  std::vector<OpaqueField> step_binding;
  SourcePos pos;

  const SubscriptionSpec* subscription(std::string_view local) const;
  const PublicationSpec* publication(std::string_view local) const;
  bool operator==(const NodeSpec& o) const {
    return name == o.name && period_min == o.period_min &&
           period_max == o.period_max && wcet == o.wcet &&
           publications == o.publications && subscriptions == o.subscriptions &&
           step_binding == o.step_binding;
  }
};

struct MachineSpec {
  std::string name;
  std::string os_kind;
  std::vector<std::string> nodes;
  std::string address;
  SourcePos pos;

  bool operator==(const MachineSpec& o) const {
    return name == o.name && os_kind == o.os_kind && nodes == o.nodes &&
           address == o.address;
  }
};

struct PlantSpec {
  std::string name;
  std::vector<MachineSpec> machines;
  SourcePos pos;

  bool operator==(const PlantSpec& o) const {
    return name == o.name && machines == o.machines;
  }
};

// Module-level declaration kept verbatim (named scalar constants and any class
// the toolkit does not model at top level).
struct OpaqueDecl {
  std::string name;  // may be empty (anonymous declarations)
  std::string type_annotation;
  std::string raw;
  SourcePos pos;

  bool operator==(const OpaqueDecl& o) const {
    return name == o.name && type_annotation == o.type_annotation && raw == o.raw;
  }
};

// Validated, immutable model of one architecture module. Safe to share
// read-only across threads.
struct ArchitectureSpec {
  std::string module_name;
  std::vector<TopicSpec> topics;
  std::vector<NodeSpec> nodes;
  std::optional<PlantSpec> plant;
  std::map<std::string, std::string> aliases;  // name -> dotted identifier
  std::vector<OpaqueDecl> extras;

  const TopicSpec* topic(std::string_view name) const;
  const NodeSpec* node(std::string_view name) const;
  // Publisher of a topic, or nullptr when none/ambiguous.
  const NodeSpec* publisher_of(std::string_view topic_name) const;

  bool operator==(const ArchitectureSpec& o) const {
    return module_name == o.module_name && topics == o.topics &&
           nodes == o.nodes && plant == o.plant && aliases == o.aliases &&
           extras == o.extras;
  }
};

}  // namespace qparch::adl
