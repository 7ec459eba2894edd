#include "qparch/adl/parser.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

#include "qparch/adl/lexer.hpp"

namespace qparch::adl {

namespace {

// ---------------------------------------------------------------------------
// Generic declaration tree (stage 1): the meta grammar
//   module := decl*
//   decl   := alias | NAME? (':' TYPE)? TYPEVALUE | NAME? (':' CLASS)? class_value
//   field  := FIELDNAME value+
//   value  := identifier | decl
// ---------------------------------------------------------------------------

struct GNode;

struct GField {
  std::string name;
  std::vector<GNode> items;
  SourcePos pos;
};

struct GNode {
  enum class Kind { Ref, Literal, Range, Class, Alias };
  Kind kind = Kind::Ref;
  std::string name;      // declaration name, may be empty
  std::string type_ann;  // annotation text, may be empty
  Token literal;         // Literal / Range low
  Token literal_hi;      // Range high
  std::vector<GField> fields;  // Class
  std::string ref;             // Ref target / Alias target
  SourcePos pos;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<Diagnostic>& diags)
      : toks_(std::move(tokens)), diags_(diags) {}

  std::vector<GNode> parse_module() {
    std::vector<GNode> decls;
    while (!at(Token::Kind::End)) {
      size_t before = i_;
      auto d = parse_item(/*top_level=*/true);
      if (d) decls.push_back(std::move(*d));
      if (i_ == before) skip();  // never loop on an unconsumed token
    }
    return decls;
  }

  bool had_error() const { return had_error_; }

 private:
  const Token& cur() const { return toks_[i_]; }
  const Token& next() const { return toks_[std::min(i_ + 1, toks_.size() - 1)]; }
  bool at(Token::Kind k) const { return cur().kind == k; }
  Token take() { return toks_[i_++]; }
  void skip() {
    if (!at(Token::Kind::End)) ++i_;
  }

  void error(SourcePos pos, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, pos, std::move(msg)});
    had_error_ = true;
  }

  bool is_literal_start() const {
    switch (cur().kind) {
      case Token::Kind::Int:
      case Token::Kind::Float:
      case Token::Kind::Dotted:
      case Token::Kind::Duration:
      case Token::Kind::String:
        return true;
      case Token::Kind::Name:
        return cur().text == "true" || cur().text == "false";
      default:
        return false;
    }
  }

  GNode literal_node() {
    GNode n;
    n.kind = GNode::Kind::Literal;
    n.pos = cur().pos;
    n.literal = take();
    if (at(Token::Kind::DotDot)) {
      take();
      if (!is_literal_start() && !at(Token::Kind::Name)) {
        error(cur().pos, "expected range upper bound after '..'");
        return n;
      }
      n.kind = GNode::Kind::Range;
      n.literal_hi = take();
    }
    return n;
  }

  std::optional<GNode> parse_item(bool top_level) {
    SourcePos pos = cur().pos;
    if (at(Token::Kind::Name) && !is_literal_start()) {
      if (is_field_name(cur().text)) {
        error(pos, "unexpected field name '" + cur().text + "' outside a class body");
        skip();
        return std::nullopt;
      }
      // NAME '=' identifier  -> alias
      if (next().kind == Token::Kind::Equals) {
        GNode n;
        n.kind = GNode::Kind::Alias;
        n.pos = pos;
        n.name = take().text;
        take();  // '='
        if (!at(Token::Kind::Name)) {
          error(cur().pos, "alias target must be an identifier");
          return std::nullopt;
        }
        n.ref = take().text;
        return n;
      }
      if (next().kind == Token::Kind::Colon) {
        std::string name = take().text;
        take();  // ':'
        if (!at(Token::Kind::Name)) {
          error(cur().pos, "expected type name after ':'");
          return std::nullopt;
        }
        std::string type_ann = take().text;
        auto body = parse_decl_value(pos);
        if (!body) return std::nullopt;
        body->name = std::move(name);
        body->type_ann = std::move(type_ann);
        return body;
      }
      if (next().kind == Token::Kind::LBrace) {
        std::string name = take().text;
        auto body = parse_decl_value(pos);
        if (!body) return std::nullopt;
        body->name = std::move(name);
        return body;
      }
      if (top_level) {
        error(pos, "expected declaration (name ':' type, alias, or class body)");
        skip();
        return std::nullopt;
      }
      GNode n;
      n.kind = GNode::Kind::Ref;
      n.pos = pos;
      Token name_tok = take();
      n.ref = name_tok.text;
      if (at(Token::Kind::DotDot)) {  // named range bound: lo_ref .. hi
        take();
        n.kind = GNode::Kind::Range;
        n.literal = std::move(name_tok);
        if (!is_literal_start() && !at(Token::Kind::Name)) {
          error(cur().pos, "expected range upper bound after '..'");
          return std::nullopt;
        }
        n.literal_hi = take();
      }
      return n;
    }
    auto body = parse_decl_value(pos);
    if (!body && top_level) skip();
    return body;
  }

  // TYPEVALUE | class_value | (':' TYPE value) without a leading name.
  std::optional<GNode> parse_decl_value(SourcePos pos) {
    if (at(Token::Kind::Colon)) {
      take();
      if (!at(Token::Kind::Name)) {
        error(cur().pos, "expected type name after ':'");
        return std::nullopt;
      }
      std::string type_ann = take().text;
      auto inner = parse_decl_value(pos);
      if (inner) inner->type_ann = std::move(type_ann);
      return inner;
    }
    if (at(Token::Kind::LBrace)) {
      return parse_class(pos);
    }
    if (is_literal_start()) {
      GNode n = literal_node();
      n.pos = pos;
      return n;
    }
    error(cur().pos, "expected a value");
    return std::nullopt;
  }

  std::optional<GNode> parse_class(SourcePos pos) {
    take();  // '{'
    GNode n;
    n.kind = GNode::Kind::Class;
    n.pos = pos;
    while (!at(Token::Kind::RBrace)) {
      if (at(Token::Kind::End)) {
        error(pos, "unterminated class body ('}' expected)");
        return std::nullopt;
      }
      if (!(at(Token::Kind::Name) && is_field_name(cur().text))) {
        error(cur().pos, "expected field name inside class body, got '" + cur().text + "'");
        skip();
        continue;
      }
      GField field;
      field.pos = cur().pos;
      field.name = take().text;
      while (!at(Token::Kind::RBrace) && !at(Token::Kind::End) &&
             !(at(Token::Kind::Name) && is_field_name(cur().text))) {
        size_t before = i_;
        auto item = parse_item(/*top_level=*/false);
        if (item) field.items.push_back(std::move(*item));
        if (i_ == before) skip();
      }
      if (field.items.empty())
        error(field.pos, "field '" + field.name + "' has no value");
      n.fields.push_back(std::move(field));
    }
    take();  // '}'
    return n;
  }

  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  size_t i_ = 0;
  bool had_error_ = false;
};

// ---------------------------------------------------------------------------
// Stage 2: elaboration of the generic tree into an ArchitectureSpec.
// ---------------------------------------------------------------------------

const std::set<std::string, std::less<>> kTopicFields = {"FIELDS"};
const std::set<std::string, std::less<>> kNodeFields = {
    "PERIOD", "WCET", "PUBLISHES", "SUBSCRIBES",
    // step/source binding fields: parsed and preserved, never interpreted
    "PATH", "CXX", "LIB", "DEVICES", "C", "HEADER", "FILENAME", "CLASS"};
const std::set<std::string, std::less<>> kNodeBindingFields = {
    "PATH", "CXX", "LIB", "DEVICES", "C", "HEADER", "FILENAME", "CLASS"};
const std::set<std::string, std::less<>> kPlantFields = {"MACHINES"};
const std::set<std::string, std::less<>> kSubscriptionFields = {"TOPIC", "MAXLATENCY", "QUEUE"};
const std::set<std::string, std::less<>> kOsKinds = {"linux", "lynxsecure", "certikos"};

std::string render_gnode(const GNode& n);

std::string render_gfield(const GField& f) {
  std::string out = f.name;
  for (const auto& item : f.items) {
    out.push_back(' ');
    out += render_gnode(item);
  }
  return out;
}

std::string render_gnode(const GNode& n) {
  std::string out;
  if (!n.name.empty()) out += n.name + " ";
  if (!n.type_ann.empty()) out += ": " + n.type_ann + " ";
  switch (n.kind) {
    case GNode::Kind::Ref:
      out += n.ref;
      break;
    case GNode::Kind::Alias:
      out += n.name + " = " + n.ref;
      break;
    case GNode::Kind::Literal:
      out += render_token(n.literal);
      break;
    case GNode::Kind::Range:
      out += render_token(n.literal) + " .. " + render_token(n.literal_hi);
      break;
    case GNode::Kind::Class: {
      out += "{";
      for (const auto& f : n.fields) out += " " + render_gfield(f);
      out += " }";
      break;
    }
  }
  return out;
}

class Elaborator {
 public:
  Elaborator(std::string_view module_name, std::vector<Diagnostic>& diags)
      : diags_(diags) {
    spec_.module_name = std::string(module_name);
  }

  std::optional<ArchitectureSpec> run(const std::vector<GNode>& decls) {
    // first pass: symbol table over named declarations and aliases
    for (const auto& d : decls) {
      if (d.kind == GNode::Kind::Alias) {
        if (!spec_.aliases.emplace(d.name, d.ref).second)
          error(d.pos, "duplicate alias '" + d.name + "'");
        continue;
      }
      if (!d.name.empty() && !symbols_.emplace(d.name, &d).second)
        error(d.pos, "duplicate declaration '" + d.name + "'");
    }
    for (const auto& [name, target] : spec_.aliases) {
      SourcePos pos{};
      for (const auto& d : decls)
        if (d.kind == GNode::Kind::Alias && d.name == name) pos = d.pos;
      if (!resolve_name(target, pos)) continue;
    }

    for (const auto& d : decls) {
      if (d.kind == GNode::Kind::Alias) continue;
      elaborate_top(d);
    }
    if (failed_) return std::nullopt;
    return std::move(spec_);
  }

 private:
  void error(SourcePos pos, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, pos, std::move(msg)});
    failed_ = true;
  }

  // Follows aliases to a named declaration. Reports unknown roots and cycles.
  const GNode* resolve_name(const std::string& dotted, SourcePos pos) {
    std::string root = dotted.substr(0, dotted.find('.'));
    std::set<std::string> seen;
    std::string cur = root;
    while (true) {
      if (auto it = symbols_.find(cur); it != symbols_.end()) return it->second;
      auto al = spec_.aliases.find(cur);
      if (al == spec_.aliases.end()) {
        error(pos, "unresolved identifier '" + dotted + "'");
        return nullptr;
      }
      if (!seen.insert(cur).second) {
        error(pos, "alias cycle involving '" + cur + "'");
        return nullptr;
      }
      cur = al->second.substr(0, al->second.find('.'));
    }
  }

  std::optional<Micros> duration_of(const GNode& item) {
    if (item.kind == GNode::Kind::Literal &&
        item.literal.kind == Token::Kind::Duration)
      return item.literal.duration;
    if (item.kind == GNode::Kind::Ref) {
      const GNode* target = resolve_name(item.ref, item.pos);
      if (!target) return std::nullopt;
      if (target->kind == GNode::Kind::Literal &&
          target->literal.kind == Token::Kind::Duration)
        return target->literal.duration;
      error(item.pos, "'" + item.ref + "' does not name a duration value");
      return std::nullopt;
    }
    error(item.pos, "expected a duration value");
    return std::nullopt;
  }

  std::string infer_class(const GNode& n) {
    if (!n.type_ann.empty()) return n.type_ann;
    std::vector<std::string> candidates;
    auto admits = [&](const std::set<std::string, std::less<>>& allowed) {
      return std::all_of(n.fields.begin(), n.fields.end(), [&](const GField& f) {
        return allowed.count(f.name) > 0;
      });
    };
    if (admits(kTopicFields)) candidates.push_back("topic");
    if (admits(kNodeFields)) candidates.push_back("node");
    if (admits(kPlantFields)) candidates.push_back("plant");
    if (candidates.size() == 1) return candidates.front();
    if (candidates.empty())
      error(n.pos, "cannot infer a class for this declaration; annotate it");
    else
      error(n.pos, "ambiguous class for this declaration; annotate it");
    return "";
  }

  void elaborate_top(const GNode& d) {
    if (d.kind == GNode::Kind::Ref) {
      error(d.pos, "a bare identifier is not a declaration");
      return;
    }
    if (d.kind != GNode::Kind::Class) {
      // scalar module constants (durations, numbers, strings): kept verbatim
      OpaqueDecl od;
      od.name = d.name;
      od.type_annotation = d.type_ann;
      od.raw = d.kind == GNode::Kind::Range
                   ? render_token(d.literal) + " .. " + render_token(d.literal_hi)
                   : render_token(d.literal);
      od.pos = d.pos;
      spec_.extras.push_back(std::move(od));
      return;
    }
    std::string cls = infer_class(d);
    if (cls == "topic")
      elaborate_topic(d);
    else if (cls == "node")
      elaborate_node(d);
    else if (cls == "plant")
      elaborate_plant(d);
    else if (!cls.empty()) {
      OpaqueDecl od;
      od.name = d.name;
      od.type_annotation = d.type_ann;
      od.raw = render_gnode_body(d);
      od.pos = d.pos;
      spec_.extras.push_back(std::move(od));
    }
  }

  static std::string render_gnode_body(const GNode& n) {
    GNode copy = n;
    copy.name.clear();
    copy.type_ann.clear();
    return render_gnode(copy);
  }

  void elaborate_topic(const GNode& d) {
    TopicSpec topic;
    topic.name = d.name;
    topic.pos = d.pos;
    if (topic.name.empty()) error(d.pos, "topics must be named");
    for (const auto& f : d.fields) {
      if (f.name == "FIELDS") {
        for (const auto& item : f.items) elaborate_topic_field(item, topic);
      } else {
        topic.extras.push_back({f.name, render_gfield_items(f), false, f.pos});
      }
    }
    spec_.topics.push_back(std::move(topic));
  }

  static std::string render_gfield_items(const GField& f) {
    std::string out;
    for (const auto& item : f.items) {
      if (!out.empty()) out.push_back(' ');
      out += render_gnode(item);
    }
    return out;
  }

  void elaborate_topic_field(const GNode& item, TopicSpec& topic) {
    if (item.kind != GNode::Kind::Literal || item.name.empty() ||
        item.type_ann.empty()) {
      error(item.pos, "topic fields must be 'name : format_type default'");
      return;
    }
    auto type = format_type_from_token(item.type_ann);
    if (!type) {
      error(item.pos, "unknown format type '" + item.type_ann + "'");
      return;
    }
    FieldSpec field;
    field.name = item.name;
    field.type = *type;
    field.pos = item.pos;
    const Token& lit = item.literal;
    switch (lit.kind) {
      case Token::Kind::Int: {
        long long v = 0;
        std::from_chars(lit.text.data(), lit.text.data() + lit.text.size(), v);
        if (is_float_type(*type))
          field.default_value = Literal::real(static_cast<double>(v));
        else
          field.default_value = Literal::integer(v);
        break;
      }
      case Token::Kind::Float: {
        double v = 0;
        std::from_chars(lit.text.data(), lit.text.data() + lit.text.size(), v);
        field.default_value = Literal::real(v);
        break;
      }
      case Token::Kind::Name:
        field.default_value = Literal::boolean(lit.text == "true");
        break;
      case Token::Kind::Duration:
        field.default_value = Literal::duration(lit.duration);
        break;
      case Token::Kind::String:
        field.default_value = Literal::string(lit.text);
        break;
      default:
        error(item.pos, "unsupported default value for field '" + field.name + "'");
        return;
    }
    topic.fields.push_back(std::move(field));
  }

  void elaborate_node(const GNode& d) {
    NodeSpec node;
    node.name = d.name;
    node.pos = d.pos;
    if (node.name.empty()) error(d.pos, "nodes must be named");
    for (const auto& f : d.fields) {
      if (f.name == "PERIOD") {
        if (f.items.size() != 1) {
          error(f.pos, "PERIOD expects one duration or one range");
          continue;
        }
        const GNode& item = f.items.front();
        if (item.kind == GNode::Kind::Range) {
          GNode lo, hi;
          lo.kind = hi.kind = GNode::Kind::Literal;
          lo.literal = item.literal;
          hi.literal = item.literal_hi;
          lo.pos = hi.pos = item.pos;
          if (item.literal.kind == Token::Kind::Name) {
            lo.kind = GNode::Kind::Ref;
            lo.ref = item.literal.text;
          }
          if (item.literal_hi.kind == Token::Kind::Name) {
            hi.kind = GNode::Kind::Ref;
            hi.ref = item.literal_hi.text;
          }
          auto mn = duration_of(lo), mx = duration_of(hi);
          if (mn && mx) {
            node.period_min = *mn;
            node.period_max = *mx;
          }
        } else if (auto v = duration_of(item)) {
          node.period_min = node.period_max = *v;
        }
      } else if (f.name == "WCET") {
        if (f.items.size() == 1) {
          if (auto v = duration_of(f.items.front())) node.wcet = *v;
        } else {
          error(f.pos, "WCET expects one duration");
        }
      } else if (f.name == "SUBSCRIBES") {
        for (const auto& item : f.items) elaborate_subscription(item, node);
      } else if (f.name == "PUBLISHES") {
        for (const auto& item : f.items) elaborate_publication(item, node);
      } else {
        node.step_binding.push_back({f.name, render_gfield_items(f),
                                     kNodeBindingFields.count(f.name) > 0, f.pos});
      }
    }
    spec_.nodes.push_back(std::move(node));
  }

  void elaborate_subscription(const GNode& item, NodeSpec& node) {
    if (item.kind != GNode::Kind::Class || item.name.empty()) {
      error(item.pos, "subscriptions must be 'local_name { TOPIC t MAXLATENCY d }'");
      return;
    }
    SubscriptionSpec sub;
    sub.local_name = item.name;
    sub.pos = item.pos;
    for (const auto& f : item.fields) {
      if (f.name == "TOPIC" && f.items.size() == 1 &&
          f.items.front().kind == GNode::Kind::Ref) {
        const GNode* t = resolve_name(f.items.front().ref, f.pos);
        sub.topic = t && !t->name.empty() ? t->name : f.items.front().ref;
      } else if (f.name == "MAXLATENCY" && f.items.size() == 1) {
        if (auto v = duration_of(f.items.front())) sub.max_latency = *v;
      } else if (f.name == "QUEUE" && f.items.size() == 1 &&
                 f.items.front().kind == GNode::Kind::Literal &&
                 f.items.front().literal.kind == Token::Kind::Int) {
        sub.buffer_capacity = std::stoi(f.items.front().literal.text);
      } else {
        error(f.pos, "unsupported subscription field '" + f.name + "'");
      }
    }
    if (sub.topic.empty()) error(item.pos, "subscription '" + sub.local_name + "' lacks TOPIC");
    node.subscriptions.push_back(std::move(sub));
  }

  void elaborate_publication(const GNode& item, NodeSpec& node) {
    if (item.kind != GNode::Kind::Class || item.name.empty()) {
      error(item.pos, "publications must be 'local_name { TOPIC t }'");
      return;
    }
    PublicationSpec pub;
    pub.local_name = item.name;
    pub.pos = item.pos;
    for (const auto& f : item.fields) {
      if (f.name == "TOPIC" && f.items.size() == 1 &&
          f.items.front().kind == GNode::Kind::Ref) {
        const GNode* t = resolve_name(f.items.front().ref, f.pos);
        pub.topic = t && !t->name.empty() ? t->name : f.items.front().ref;
      } else {
        error(f.pos, "unsupported publication field '" + f.name + "'");
      }
    }
    if (pub.topic.empty()) error(item.pos, "publication '" + pub.local_name + "' lacks TOPIC");
    node.publications.push_back(std::move(pub));
  }

  // Collects NODES references and the first IP address in an OS subtree.
  void scan_os(const GNode& os, MachineSpec& machine) {
    if (os.kind == GNode::Kind::Ref) {
      if (const GNode* target = resolve_name(os.ref, os.pos)) scan_os(*target, machine);
      return;
    }
    if (os.kind != GNode::Kind::Class) return;
    if (machine.os_kind.empty() && !os.type_ann.empty()) machine.os_kind = os.type_ann;
    for (const auto& f : os.fields) {
      if (f.name == "NODES") {
        for (const auto& item : f.items)
          if (item.kind == GNode::Kind::Ref) machine.nodes.push_back(item.ref);
      } else if (f.name == "IP" && !f.items.empty() &&
                 f.items.front().kind == GNode::Kind::Literal) {
        if (machine.address.empty())
          machine.address = f.items.front().literal.text;
      } else if (f.name == "OS" || f.name == "VMS") {
        for (const auto& item : f.items) scan_os(item, machine);
      }
    }
  }

  void elaborate_plant(const GNode& d) {
    if (spec_.plant) {
      error(d.pos, "multiple plant declarations");
      return;
    }
    PlantSpec plant;
    plant.name = d.name;
    plant.pos = d.pos;
    for (const auto& f : d.fields) {
      if (f.name != "MACHINES") {
        error(f.pos, "unsupported plant field '" + f.name + "'");
        continue;
      }
      for (const auto& item : f.items) {
        if (item.kind != GNode::Kind::Class || item.name.empty()) {
          error(item.pos, "machines must be 'name { OS ... }'");
          continue;
        }
        MachineSpec machine;
        machine.name = item.name;
        machine.pos = item.pos;
        for (const auto& mf : item.fields) {
          if (mf.name == "OS") {
            for (const auto& os : mf.items) {
              if (machine.os_kind.empty() && os.kind == GNode::Kind::Class &&
                  !os.type_ann.empty())
                machine.os_kind = os.type_ann;
              if (machine.os_kind.empty() && os.kind == GNode::Kind::Ref) {
                if (const GNode* t = resolve_name(os.ref, os.pos);
                    t && !t->type_ann.empty())
                  machine.os_kind = t->type_ann;
              }
              scan_os(os, machine);
            }
          }
        }
        if (machine.os_kind.empty() || kOsKinds.count(machine.os_kind) == 0)
          error(item.pos, "machine '" + machine.name + "' has no recognized OS");
        plant.machines.push_back(std::move(machine));
      }
    }
    spec_.plant = std::move(plant);
  }

  ArchitectureSpec spec_;
  std::map<std::string, const GNode*, std::less<>> symbols_;
  std::vector<Diagnostic>& diags_;
  bool failed_ = false;
};

}  // namespace

ParseResult parse_architecture(std::string_view source, std::string_view module_name) {
  ParseResult result;
  std::vector<LexError> lex_errors;
  auto tokens = lex(source, lex_errors);
  for (auto& e : lex_errors)
    result.diagnostics.push_back({Diagnostic::Severity::Error, e.pos, e.message});
  Parser parser(std::move(tokens), result.diagnostics);
  auto decls = parser.parse_module();
  if (!lex_errors.empty() || parser.had_error()) return result;

  Elaborator elab(module_name, result.diagnostics);
  result.spec = elab.run(decls);
  return result;
}

}  // namespace qparch::adl
