#include "qparch/adl/validate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace qparch::adl {

namespace {

bool default_fits(const FieldSpec& field) {
  const Literal& v = field.default_value;
  switch (field.type) {
    case FormatType::Bool:
      return v.kind == Literal::Kind::Bool;
    case FormatType::Duration:
    case FormatType::Time:
      return v.kind == Literal::Kind::Duration ||
             (v.kind == Literal::Kind::Int && v.int_value >= 0);
    case FormatType::Float32:
    case FormatType::Float64: {
      if (v.kind == Literal::Kind::Float) return float_fits(field.type, v.float_value);
      if (v.kind == Literal::Kind::Int)
        return float_fits(field.type, static_cast<double>(v.int_value));
      return false;
    }
    default:
      if (!is_integer_type(field.type)) return true;  // array/struct: no range check
      if (v.kind != Literal::Kind::Int) return false;
      return int_fits(field.type, v.int_value);
  }
}

}  // namespace

bool ValidationReport::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::Error; });
}

std::string ValidationReport::to_records() const {
  std::string out;
  for (const auto& f : findings) {
    out += f.severity == Severity::Error ? "ERROR" : "WARNING";
    out += '\t';
    out += f.rule;
    out += '\t';
    out += std::to_string(f.pos.line) + ":" + std::to_string(f.pos.col);
    out += '\t';
    out += f.message;
    out += '\n';
  }
  return out;
}

ValidationReport validate(const ArchitectureSpec& spec) {
  ValidationReport report;
  auto add = [&](Severity sev, const char* rule, SourcePos pos, std::string msg) {
    report.findings.push_back({sev, rule, pos, std::move(msg)});
  };

  // name uniqueness across the module scope
  std::map<std::string, SourcePos> names;
  auto claim = [&](const std::string& name, SourcePos pos, const char* what) {
    auto [it, fresh] = names.emplace(name, pos);
    if (!fresh)
      add(Severity::Error, rules::kDuplicateName, pos,
          std::string(what) + " '" + name + "' redeclares an existing name");
  };
  for (const auto& t : spec.topics) claim(t.name, t.pos, "topic");
  for (const auto& n : spec.nodes) claim(n.name, n.pos, "node");
  for (const auto& e : spec.extras)
    if (!e.name.empty()) claim(e.name, e.pos, "declaration");
  for (const auto& [alias, target] : spec.aliases) {
    auto [it, fresh] = names.emplace(alias, SourcePos{});
    if (!fresh)
      add(Severity::Error, rules::kDuplicateName, SourcePos{},
          "alias '" + alias + "' redeclares an existing name");
  }

  // aliases acyclic and resolvable
  for (const auto& [alias, target] : spec.aliases) {
    std::set<std::string> seen{alias};
    std::string cur = target.substr(0, target.find('.'));
    bool bad = false;
    while (!bad) {
      if (names.count(cur) && !spec.aliases.count(cur)) break;
      auto it = spec.aliases.find(cur);
      if (it == spec.aliases.end()) {
        add(Severity::Error, rules::kUnresolved, SourcePos{},
            "alias '" + alias + "' does not resolve: '" + cur + "' is undeclared");
        bad = true;
        break;
      }
      if (!seen.insert(cur).second) {
        add(Severity::Error, rules::kAliasCycle, SourcePos{},
            "alias cycle through '" + cur + "'");
        bad = true;
        break;
      }
      cur = it->second.substr(0, it->second.find('.'));
    }
  }

  // topics: field defaults fit the declared format type; unknown fields warn
  for (const auto& t : spec.topics) {
    std::set<std::string> field_names;
    for (const auto& f : t.fields) {
      if (!field_names.insert(f.name).second)
        add(Severity::Error, rules::kDuplicateName, f.pos,
            "duplicate field '" + f.name + "' in topic '" + t.name + "'");
      if (!default_fits(f))
        add(Severity::Error, rules::kTypeSize, f.pos,
            "default of '" + t.name + "." + f.name + "' does not fit " +
                std::string(format_type_token(f.type)));
    }
    for (const auto& x : t.extras)
      add(Severity::Warning, rules::kUnknownField, x.pos,
          "unknown field '" + x.name + "' on topic '" + t.name + "' (preserved)");
  }

  // nodes: period/wcet/latency/queue invariants; references to topics
  for (const auto& n : spec.nodes) {
    if (!(n.period_min > 0 && n.period_min <= n.period_max))
      add(Severity::Error, rules::kPeriodBounds, n.pos,
          "node '" + n.name + "' needs 0 < period_min <= period_max");
    if (n.wcet && *n.wcet > n.period_min)
      add(Severity::Error, rules::kWcetBound, n.pos,
          "node '" + n.name + "' WCET exceeds period_min");
    std::set<std::string> locals;
    for (const auto& s : n.subscriptions) {
      if (!locals.insert(s.local_name).second)
        add(Severity::Error, rules::kDuplicateName, s.pos,
            "duplicate local name '" + s.local_name + "' in node '" + n.name + "'");
      if (!spec.topic(s.topic))
        add(Severity::Error, rules::kUnknownTopic, s.pos,
            "subscription '" + s.local_name + "' references undeclared topic '" +
                s.topic + "'");
      if (s.max_latency <= 0)
        add(Severity::Error, rules::kMaxLatency, s.pos,
            "subscription '" + s.local_name + "' needs MAXLATENCY > 0");
      if (s.buffer_capacity < 1)
        add(Severity::Error, rules::kQueueCapacity, s.pos,
            "subscription '" + s.local_name + "' needs QUEUE >= 1");
    }
    for (const auto& p : n.publications) {
      if (!locals.insert(p.local_name).second)
        add(Severity::Error, rules::kDuplicateName, p.pos,
            "duplicate local name '" + p.local_name + "' in node '" + n.name + "'");
      if (!spec.topic(p.topic))
        add(Severity::Error, rules::kUnknownTopic, p.pos,
            "publication '" + p.local_name + "' references undeclared topic '" +
                p.topic + "'");
    }
    for (const auto& b : n.step_binding)
      if (!b.known_binding)
        add(Severity::Warning, rules::kUnknownField, b.pos,
            "unknown field '" + b.name + "' on node '" + n.name + "' (preserved)");
  }

  // exactly one publisher per topic
  for (const auto& t : spec.topics) {
    std::vector<const NodeSpec*> pubs;
    for (const auto& n : spec.nodes)
      for (const auto& p : n.publications)
        if (p.topic == t.name) pubs.push_back(&n);
    if (pubs.empty())
      add(Severity::Error, rules::kNoPublisher, t.pos,
          "topic '" + t.name + "' has no publishing node");
    else if (pubs.size() > 1)
      add(Severity::Error, rules::kUniquePublisher, t.pos,
          "topic '" + t.name + "' has " + std::to_string(pubs.size()) +
              " publishing nodes");
  }

  // plant: every node assigned at most once, to a declared node
  if (spec.plant) {
    std::set<std::string> assigned;
    for (const auto& m : spec.plant->machines) {
      for (const auto& node_name : m.nodes) {
        if (!spec.node(node_name))
          add(Severity::Error, rules::kPlantAssignment, m.pos,
              "machine '" + m.name + "' assigns undeclared node '" + node_name + "'");
        if (!assigned.insert(node_name).second)
          add(Severity::Error, rules::kPlantAssignment, m.pos,
              "node '" + node_name + "' assigned to more than one machine");
      }
    }
  }

  std::stable_sort(report.findings.begin(), report.findings.end(),
                   [](const Finding& a, const Finding& b) {
                     if (a.pos.line != b.pos.line) return a.pos.line < b.pos.line;
                     if (a.pos.col != b.pos.col) return a.pos.col < b.pos.col;
                     return a.rule < b.rule;
                   });
  return report;
}

}  // namespace qparch::adl
