#include "qparch/adl/ast.hpp"

namespace qparch::adl {

Literal Literal::integer(long long v) {
  Literal l;
  l.kind = Kind::Int;
  l.int_value = v;
  return l;
}

Literal Literal::real(double v) {
  Literal l;
  l.kind = Kind::Float;
  l.float_value = v;
  return l;
}

Literal Literal::boolean(bool v) {
  Literal l;
  l.kind = Kind::Bool;
  l.bool_value = v;
  return l;
}

Literal Literal::duration(Micros v) {
  Literal l;
  l.kind = Kind::Duration;
  l.duration_value = v;
  return l;
}

Literal Literal::string(std::string v) {
  Literal l;
  l.kind = Kind::String;
  l.text = std::move(v);
  return l;
}

Literal Literal::dotted(std::string v) {
  Literal l;
  l.kind = Kind::Dotted;
  l.text = std::move(v);
  return l;
}

const FieldSpec* TopicSpec::field(std::string_view field_name) const {
  for (const auto& f : fields)
    if (f.name == field_name) return &f;
  return nullptr;
}

const SubscriptionSpec* NodeSpec::subscription(std::string_view local) const {
  for (const auto& s : subscriptions)
    if (s.local_name == local) return &s;
  return nullptr;
}

const PublicationSpec* NodeSpec::publication(std::string_view local) const {
  for (const auto& p : publications)
    if (p.local_name == local) return &p;
  return nullptr;
}

const TopicSpec* ArchitectureSpec::topic(std::string_view name) const {
  for (const auto& t : topics)
    if (t.name == name) return &t;
  return nullptr;
}

const NodeSpec* ArchitectureSpec::node(std::string_view name) const {
  for (const auto& n : nodes)
    if (n.name == name) return &n;
  return nullptr;
}

const NodeSpec* ArchitectureSpec::publisher_of(std::string_view topic_name) const {
  const NodeSpec* found = nullptr;
  for (const auto& n : nodes) {
    for (const auto& p : n.publications) {
      if (p.topic == topic_name) {
        if (found) return nullptr;
        found = &n;
      }
    }
  }
  return found;
}

}  // namespace qparch::adl
