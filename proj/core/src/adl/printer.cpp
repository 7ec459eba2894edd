#include "qparch/adl/printer.hpp"

#include <charconv>

namespace qparch::adl {

std::string print_literal(const Literal& value) {
  switch (value.kind) {
    case Literal::Kind::Int:
      return std::to_string(value.int_value);
    case Literal::Kind::Float: {
      char buf[64];
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value.float_value);
      return std::string(buf, ptr);
    }
    case Literal::Kind::Bool:
      return value.bool_value ? "true" : "false";
    case Literal::Kind::Duration:
      return format_duration(value.duration_value);
    case Literal::Kind::String:
      return "\"" + value.text + "\"";
    case Literal::Kind::Dotted:
      return value.text;
  }
  return "";
}

namespace {

void print_topic(std::string& out, const TopicSpec& t) {
  out += t.name + " : topic {\n";
  if (!t.fields.empty()) {
    out += "  FIELDS\n";
    for (const auto& f : t.fields) {
      out += "    " + f.name + " : " + std::string(format_type_token(f.type)) +
             " " + print_literal(f.default_value) + "\n";
    }
  }
  for (const auto& x : t.extras) out += "  " + x.name + " " + x.raw + "\n";
  out += "}\n";
}

void print_node(std::string& out, const NodeSpec& n) {
  out += n.name + " : node {\n";
  if (n.period_min == n.period_max) {
    out += "  PERIOD " + format_duration(n.period_min) + "\n";
  } else {
    out += "  PERIOD " + format_duration(n.period_min) + " .. " +
           format_duration(n.period_max) + "\n";
  }
  if (n.wcet) out += "  WCET " + format_duration(*n.wcet) + "\n";
  if (!n.subscriptions.empty()) {
    out += "  SUBSCRIBES\n";
    for (const auto& s : n.subscriptions) {
      out += "    " + s.local_name + " { TOPIC " + s.topic + " MAXLATENCY " +
             format_duration(s.max_latency);
      if (s.buffer_capacity != 1)
        out += " QUEUE " + std::to_string(s.buffer_capacity);
      out += " }\n";
    }
  }
  if (!n.publications.empty()) {
    out += "  PUBLISHES\n";
    for (const auto& p : n.publications)
      out += "    " + p.local_name + " { TOPIC " + p.topic + " }\n";
  }
  for (const auto& b : n.step_binding) out += "  " + b.name + " " + b.raw + "\n";
  out += "}\n";
}

void print_plant(std::string& out, const PlantSpec& p) {
  out += (p.name.empty() ? std::string("plant") : p.name) + " : plant {\n";
  out += "  MACHINES\n";
  for (const auto& m : p.machines) {
    out += "    " + m.name + " { OS : " + m.os_kind + " {";
    if (!m.address.empty()) out += " IP " + m.address;
    if (!m.nodes.empty()) {
      out += " NODES";
      for (const auto& n : m.nodes) out += " " + n;
    }
    out += " } }\n";
  }
  out += "}\n";
}

}  // namespace

std::string pretty_print(const ArchitectureSpec& spec) {
  std::string out;
  for (const auto& e : spec.extras) {
    if (!e.name.empty()) out += e.name + " ";
    if (!e.type_annotation.empty()) out += ": " + e.type_annotation + " ";
    out += e.raw + "\n";
  }
  if (!spec.extras.empty()) out += "\n";
  for (const auto& [alias, target] : spec.aliases) out += alias + " = " + target + "\n";
  if (!spec.aliases.empty()) out += "\n";
  for (const auto& t : spec.topics) {
    print_topic(out, t);
    out += "\n";
  }
  for (const auto& n : spec.nodes) {
    print_node(out, n);
    out += "\n";
  }
  if (spec.plant) print_plant(out, *spec.plant);
  return out;
}

}  // namespace qparch::adl
