#include "qparch/adl/resolve.hpp"

#include <set>
#include <vector>

namespace qparch::adl {

namespace {

std::vector<std::string> split_path(const std::string& dotted) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (start <= dotted.size()) {
    size_t dot = dotted.find('.', start);
    if (dot == std::string::npos) {
      parts.push_back(dotted.substr(start));
      break;
    }
    parts.push_back(dotted.substr(start, dot - start));
    start = dot + 1;
  }
  return parts;
}

ResolveOutcome member_walk_extra(const std::vector<std::string>& parts,
                                 const OpaqueDecl& e) {
  if (parts.size() > 1)
    return {std::nullopt, "'" + e.name + "' is opaque; members are not resolvable"};
  return {Resolved(&e), ""};
}

}  // namespace

ResolveOutcome resolve_identifier(const ArchitectureSpec& spec,
                                  const std::string& dotted_path) {
  auto parts = split_path(dotted_path);
  if (parts.empty() || parts.front().empty())
    return {std::nullopt, "empty identifier"};

  // chase aliases on the root segment
  std::string root = parts.front();
  std::set<std::string> seen;
  while (spec.aliases.count(root)) {
    if (!seen.insert(root).second)
      return {std::nullopt, "alias cycle through '" + root + "'"};
    auto target = split_path(spec.aliases.at(root));
    root = target.front();
    // dotted alias targets splice their tail into the path
    if (target.size() > 1)
      parts.insert(parts.begin() + 1, target.begin() + 1, target.end());
  }

  // plant root: the plant itself or plant.machine
  if (spec.plant && spec.plant->name == root) {
    if (parts.size() == 1) return {Resolved(&*spec.plant), ""};
    for (const auto& m : spec.plant->machines)
      if (m.name == parts[1]) {
        if (parts.size() > 2)
          return {std::nullopt, "machines have no members"};
        return {Resolved(&m), ""};
      }
    return {std::nullopt, "plant has no machine '" + parts[1] + "'"};
  }

  Resolved current;
  if (const TopicSpec* t = spec.topic(root))
    current = t;
  else if (const NodeSpec* n = spec.node(root))
    current = n;
  else {
    for (const auto& e : spec.extras)
      if (e.name == root) return member_walk_extra(parts, e);
    return {std::nullopt, "unknown root '" + root + "'"};
  }

  for (size_t i = 1; i < parts.size(); ++i) {
    const std::string& member = parts[i];
    if (std::holds_alternative<const TopicSpec*>(current)) {
      const TopicSpec* t = std::get<const TopicSpec*>(current);
      if (const FieldSpec* f = t->field(member)) {
        current = f;
        continue;
      }
      return {std::nullopt, "topic '" + t->name + "' has no field '" + member + "'"};
    }
    if (std::holds_alternative<const NodeSpec*>(current)) {
      const NodeSpec* n = std::get<const NodeSpec*>(current);
      if (const SubscriptionSpec* s = n->subscription(member)) {
        current = s;
        continue;
      }
      if (const PublicationSpec* p = n->publication(member)) {
        current = p;
        continue;
      }
      return {std::nullopt, "node '" + n->name + "' has no member '" + member + "'"};
    }
    return {std::nullopt, "'" + member + "': value has no members"};
  }
  return {current, ""};
}

}  // namespace qparch::adl
