#include "qparch/monitor/query.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace qparch::monitor {

FormulaPtr make_true() {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::True;
  return f;
}

FormulaPtr make_false() {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::False;
  return f;
}

FormulaPtr make_var(std::string name, int shift) {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::Var;
  f->var = std::move(name);
  f->shift = shift;
  return f;
}

FormulaPtr make_cmp(CmpOp op, std::string var, sim::Scalar rhs, int shift) {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::Cmp;
  f->op = op;
  f->var = std::move(var);
  f->rhs = std::move(rhs);
  f->shift = shift;
  return f;
}

FormulaPtr make_not(FormulaPtr inner) {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::Not;
  f->args.push_back(std::move(inner));
  return f;
}

FormulaPtr make_connective(QueryFormula::Kind kind, std::vector<FormulaPtr> args) {
  auto f = std::make_shared<QueryFormula>();
  f->kind = kind;
  f->args = std::move(args);
  return f;
}

FormulaPtr make_temporal(bool is_all, Micros lo, bool lo_incl, Micros hi,
                         bool hi_incl, FormulaPtr arg) {
  auto f = std::make_shared<QueryFormula>();
  f->kind = QueryFormula::Kind::Temporal;
  f->is_all = is_all;
  f->lo = lo;
  f->hi = hi;
  f->lo_incl = lo_incl;
  f->hi_incl = hi_incl;
  f->args.push_back(std::move(arg));
  return f;
}

namespace {

// splits prevK_/nextK_ prefixes into (base, shift)
std::pair<std::string, int> split_shift_prefix(std::string_view name) {
  auto parse = [&](std::string_view prefix, int sign) -> std::optional<std::pair<std::string, int>> {
    if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
    std::string_view rest = name.substr(prefix.size());
    size_t i = 0;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    if (i >= rest.size() || rest[i] != '_' || i + 1 >= rest.size()) return std::nullopt;
    int k = 1;
    if (i > 0) {
      k = 0;
      std::from_chars(rest.data(), rest.data() + i, k);
      if (k <= 0) return std::nullopt;
    }
    return std::make_pair(std::string(rest.substr(i + 1)), sign * k);
  };
  if (auto p = parse("prev", -1)) return *p;
  if (auto n = parse("next", +1)) return *n;
  return {std::string(name), 0};
}

std::string shift_prefix(int shift) {
  if (shift == 0) return "";
  const char* dir = shift < 0 ? "prev" : "next";
  int k = std::abs(shift);
  return k == 1 ? std::string(dir) + "_" : std::string(dir) + std::to_string(k) + "_";
}

const char* cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "/=";
    case CmpOp::Lt: return "<";
    case CmpOp::Le: return "<=";
    case CmpOp::Gt: return ">";
    case CmpOp::Ge: return ">=";
  }
  return "=";
}

std::optional<CmpOp> cmp_from_symbol(std::string_view s) {
  if (s == "=") return CmpOp::Eq;
  if (s == "/=") return CmpOp::Ne;
  if (s == "<") return CmpOp::Lt;
  if (s == "<=") return CmpOp::Le;
  if (s == ">") return CmpOp::Gt;
  if (s == ">=") return CmpOp::Ge;
  return std::nullopt;
}

// seconds (possibly fractional or negative) -> microseconds, exact
std::optional<Micros> seconds_to_micros(std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  double scaled = v * 1e6;
  double rounded = std::round(scaled);
  if (std::fabs(scaled - rounded) > 1e-3) return std::nullopt;
  return static_cast<Micros>(rounded);
}

class QueryParser {
 public:
  QueryParser(std::string_view text, QueryParseError* error)
      : text_(text), error_(error) {
    if (error_) *error_ = {};
  }

  std::optional<TemporalQuery> parse_file() {
    TemporalQuery query;
    bool have_query = false;
    skip_ws();
    while (!done()) {
      if (peek() != '(') return fail("expected '('");
      take();
      std::string head = take_symbol();
      if (head == "assume-input") {
        std::string sys = take_symbol();
        auto atom = parse_formula();
        if (!atom) return std::nullopt;
        if (!expect(')')) return std::nullopt;
        if (query.system.empty()) query.system = sys;
        query.assumptions.push_back(std::move(atom));
      } else if (head == "query") {
        if (have_query) return fail("multiple (query ...) forms in one file");
        query.system = take_symbol();
        query.formula = parse_formula();
        if (!query.formula) return std::nullopt;
        if (!expect(')')) return std::nullopt;
        have_query = true;
      } else {
        return fail("expected (query ...) or (assume-input ...), got '" + head + "'");
      }
      skip_ws();
    }
    if (!have_query) return fail("no (query ...) form found");
    return query;
  }

  FormulaPtr parse_formula() {
    skip_ws();
    if (done()) return fail_f("unexpected end of query");
    char c = peek();
    if (c == '(') {
      take();
      std::string head = take_symbol();
      if (auto op = cmp_from_symbol(head)) {
        std::string name = take_symbol();
        skip_ws();
        std::string value = take_symbol();
        if (!expect(')')) return nullptr;
        auto [base, shift] = split_shift_prefix(name);
        return make_cmp(*op, base, sim::Scalar::parse(value), shift);
      }
      std::vector<FormulaPtr> args;
      QueryFormula::Kind kind;
      if (head == "and")
        kind = QueryFormula::Kind::And;
      else if (head == "or")
        kind = QueryFormula::Kind::Or;
      else if (head == "=>")
        kind = QueryFormula::Kind::Implies;
      else if (head == "not")
        kind = QueryFormula::Kind::Not;
      else
        return fail_f("unknown operator '" + head + "'");
      skip_ws();
      while (!done() && peek() != ')') {
        auto arg = parse_formula();
        if (!arg) return nullptr;
        args.push_back(std::move(arg));
        skip_ws();
      }
      if (!expect(')')) return nullptr;
      if (kind == QueryFormula::Kind::Not) {
        if (args.size() != 1) return fail_f("'not' takes exactly one argument");
        return make_not(args.front());
      }
      if (kind == QueryFormula::Kind::Implies && args.size() != 2)
        return fail_f("'=>' takes exactly two arguments");
      if (args.empty()) return fail_f("empty connective");
      return make_connective(kind, std::move(args));
    }
    if ((c == 'X' || c == 'F') &&
        (peek_at(1) == '[' || peek_at(1) == '(')) {
      return parse_temporal();
    }
    std::string sym = take_symbol();
    if (sym.empty()) return fail_f("expected a formula");
    if (sym == "true") return make_true();
    if (sym == "false") return make_false();
    auto [base, shift] = split_shift_prefix(sym);
    return make_var(base, shift);
  }

 private:
  bool done() const { return i_ >= text_.size(); }
  char peek() const { return text_[i_]; }
  char peek_at(size_t ahead) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  char take() { return text_[i_++]; }
  void skip_ws() {
    while (!done()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        take();
      } else if (peek() == ';') {  // comment to end of line
        while (!done() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }
  bool symbol_char(char c) const {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' &&
           c != '[' && c != ']' && c != ',';
  }
  std::string take_symbol() {
    skip_ws();
    std::string out;
    while (!done() && symbol_char(peek())) out.push_back(take());
    return out;
  }
  bool expect(char c) {
    skip_ws();
    if (done() || peek() != c) {
      fail_f(std::string("expected '") + c + "'");
      return false;
    }
    take();
    return true;
  }
  std::optional<TemporalQuery> fail(std::string msg) {
    if (error_ && error_->ok()) *error_ = {static_cast<int>(i_), std::move(msg)};
    return std::nullopt;
  }
  FormulaPtr fail_f(std::string msg) {
    if (error_ && error_->ok()) *error_ = {static_cast<int>(i_), std::move(msg)};
    return nullptr;
  }

  FormulaPtr parse_temporal() {
    const bool is_all = take() == 'X';
    char open = take();
    const bool lo_incl = open == '[';
    std::string lo_text = take_interval_number();
    skip_ws();
    if (done() || peek() != ',') return fail_f("expected ',' in interval");
    take();
    std::string hi_text = take_interval_number();
    skip_ws();
    if (done() || (peek() != ']' && peek() != ')'))
      return fail_f("expected ']' or ')' closing the interval");
    const bool hi_incl = take() == ']';
    skip_ws();
    if (done() || peek() != '[') return fail_f("expected '[' before the operand");
    take();
    auto arg = parse_formula();
    if (!arg) return nullptr;
    skip_ws();
    if (done() || peek() != ']') return fail_f("expected ']' after the operand");
    take();
    auto lo = seconds_to_micros(lo_text);
    auto hi = seconds_to_micros(hi_text);
    if (!lo || !hi) return fail_f("interval endpoints must be numbers (seconds)");
    if (*lo > *hi) return fail_f("interval start exceeds interval end");
    return make_temporal(is_all, *lo, lo_incl, *hi, hi_incl, std::move(arg));
  }

  std::string take_interval_number() {
    skip_ws();
    std::string out;
    while (!done() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                       peek() == '-' || peek() == '.'))
      out.push_back(take());
    return out;
  }

  std::string_view text_;
  size_t i_ = 0;
  QueryParseError* error_;
};

std::string format_seconds(Micros us) {
  if (us % kUsecPerSec == 0) return std::to_string(us / kUsecPerSec);
  char buf[64];
  auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), static_cast<double>(us) / 1e6);
  return std::string(buf, ptr);
}

}  // namespace

std::optional<TemporalQuery> parse_query(std::string_view text,
                                         QueryParseError* error) {
  QueryParser parser(text, error);
  return parser.parse_file();
}

std::string print_formula(const QueryFormula& f) {
  switch (f.kind) {
    case QueryFormula::Kind::True:
      return "true";
    case QueryFormula::Kind::False:
      return "false";
    case QueryFormula::Kind::Var:
      return shift_prefix(f.shift) + f.var;
    case QueryFormula::Kind::Cmp:
      return "(" + std::string(cmp_symbol(f.op)) + " " + shift_prefix(f.shift) +
             f.var + " " + f.rhs.to_string() + ")";
    case QueryFormula::Kind::Not:
      return "(not " + print_formula(*f.args.front()) + ")";
    case QueryFormula::Kind::And:
    case QueryFormula::Kind::Or:
    case QueryFormula::Kind::Implies: {
      std::string head = f.kind == QueryFormula::Kind::And   ? "and"
                         : f.kind == QueryFormula::Kind::Or  ? "or"
                                                             : "=>";
      std::string out = "(" + head;
      for (const auto& a : f.args) out += " " + print_formula(*a);
      return out + ")";
    }
    case QueryFormula::Kind::Temporal: {
      std::string out = f.is_all ? "X" : "F";
      out += f.lo_incl ? "[" : "(";
      out += format_seconds(f.lo) + "," + format_seconds(f.hi);
      out += f.hi_incl ? "]" : ")";
      out += "[" + print_formula(*f.args.front()) + "]";
      return out;
    }
  }
  return "";
}

std::string print_query(const std::string& system, const QueryFormula& f) {
  return "(query " + system + " " + print_formula(f) + ")";
}

namespace {

FormulaPtr expand(const QueryFormula& f, int shift, Micros period) {
  switch (f.kind) {
    case QueryFormula::Kind::True:
      return make_true();
    case QueryFormula::Kind::False:
      return make_false();
    case QueryFormula::Kind::Var:
      return make_var(f.var, f.shift + shift);
    case QueryFormula::Kind::Cmp:
      return make_cmp(f.op, f.var, f.rhs, f.shift + shift);
    case QueryFormula::Kind::Not:
      return make_not(expand(*f.args.front(), shift, period));
    case QueryFormula::Kind::And:
    case QueryFormula::Kind::Or:
    case QueryFormula::Kind::Implies: {
      std::vector<FormulaPtr> args;
      for (const auto& a : f.args) args.push_back(expand(*a, shift, period));
      return make_connective(f.kind, std::move(args));
    }
    case QueryFormula::Kind::Temporal: {
      if (f.lo % period != 0 || f.hi % period != 0)
        throw QueryError("interval endpoint is not an integer multiple of the period");
      long long lo = f.lo / period + (f.lo_incl ? 0 : 1);
      long long hi = f.hi / period - (f.hi_incl ? 0 : 1);
      if (lo > hi) return f.is_all ? make_true() : make_false();
      std::vector<FormulaPtr> args;
      for (long long o = lo; o <= hi; ++o)
        args.push_back(expand(*f.args.front(), shift + static_cast<int>(o), period));
      if (args.size() == 1) return args.front();
      return make_connective(
          f.is_all ? QueryFormula::Kind::And : QueryFormula::Kind::Or,
          std::move(args));
    }
  }
  throw QueryError("unreachable formula kind");
}

void shift_range(const QueryFormula& f, int& lo, int& hi) {
  switch (f.kind) {
    case QueryFormula::Kind::Var:
    case QueryFormula::Kind::Cmp:
      lo = std::min(lo, f.shift);
      hi = std::max(hi, f.shift);
      break;
    default:
      for (const auto& a : f.args) shift_range(*a, lo, hi);
      break;
  }
}

FormulaPtr apply_backshift(const QueryFormula& f, int amount) {
  switch (f.kind) {
    case QueryFormula::Kind::True:
      return make_true();
    case QueryFormula::Kind::False:
      return make_false();
    case QueryFormula::Kind::Var:
      return make_var(f.var, f.shift - amount);
    case QueryFormula::Kind::Cmp:
      return make_cmp(f.op, f.var, f.rhs, f.shift - amount);
    case QueryFormula::Kind::Not:
      return make_not(apply_backshift(*f.args.front(), amount));
    default: {
      std::vector<FormulaPtr> args;
      for (const auto& a : f.args) args.push_back(apply_backshift(*a, amount));
      auto out = std::make_shared<QueryFormula>(f);
      out->args = std::move(args);
      return out;
    }
  }
}

}  // namespace

bool has_forward_refs(const QueryFormula& f) {
  int lo = 0, hi = 0;
  shift_range(f, lo, hi);
  return hi > 0;
}

UnfoldResult unfold_query(const TemporalQuery& q, Micros period) {
  if (period <= 0) throw QueryError("period must be positive");
  if (!q.formula) throw QueryError("query has no formula");
  UnfoldResult result;
  result.unfolded = expand(*q.formula, 0, period);

  int lo = 0, hi = 0;
  shift_range(*result.unfolded, lo, hi);
  const int forward = hi > 0 ? hi : 0;
  result.plain.system = q.system;
  result.plain.formula = forward > 0 ? apply_backshift(*result.unfolded, forward)
                                     : result.unfolded;
  int plo = 0, phi = 0;
  shift_range(*result.plain.formula, plo, phi);
  result.plain.max_backshift = plo < 0 ? -plo : 0;
  for (const auto& a : q.assumptions) {
    auto expanded = expand(*a, 0, period);
    if (has_forward_refs(*expanded))
      throw QueryError("assume-input atoms must not reference future steps");
    result.plain.assumptions.push_back(std::move(expanded));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation over traces
// ---------------------------------------------------------------------------

namespace {

struct StepTable {
  std::vector<Micros> times;
  std::vector<std::vector<std::pair<std::int32_t, sim::Scalar>>> rows;

  const sim::Scalar* value(size_t step, std::int32_t sym) const {
    for (const auto& [s, v] : rows[step])
      if (s == sym) return &v;
    return nullptr;
  }
};

StepTable build_steps(const sim::Trace& trace, const std::string& node) {
  StepTable table;
  const auto node_sym = trace.symbols.find(node);
  bool in_step = false;
  for (const auto& e : trace.events) {
    if (e.kind == sim::EventKind::StepStart && e.node == node_sym) {
      table.times.push_back(e.time);
      table.rows.emplace_back();
      in_step = true;
      continue;
    }
    if (e.kind == sim::EventKind::Value && e.node == node_sym && in_step) {
      table.rows.back().emplace_back(e.topic, e.value);
    }
  }
  return table;
}

// variable name -> VALUE symbol: exact match, else unique ".name" suffix
std::int32_t resolve_var(const sim::Trace& trace, const std::string& var,
                         std::string* error) {
  if (auto id = trace.symbols.find(var); id >= 0) return id;
  std::int32_t found = -1;
  const std::string suffix = "." + var;
  for (size_t i = 0; i < trace.symbols.size(); ++i) {
    const std::string& name = trace.symbols.name(static_cast<std::int32_t>(i));
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0) {
      if (found >= 0) {
        *error = "variable '" + var + "' is ambiguous in this trace";
        return -1;
      }
      found = static_cast<std::int32_t>(i);
    }
  }
  if (found < 0) *error = "unknown variable '" + var + "'";
  return found;
}

struct VarBinding {
  std::int32_t sym = -1;
  bool builtin_initial = false;  // not_initial_step
};

bool collect_vars(const QueryFormula& f, const sim::Trace& trace,
                  std::vector<std::pair<std::string, VarBinding>>& vars,
                  std::string* error) {
  switch (f.kind) {
    case QueryFormula::Kind::Var:
    case QueryFormula::Kind::Cmp: {
      for (const auto& [name, b] : vars)
        if (name == f.var) return true;
      VarBinding binding;
      if (f.var == "not_initial_step") {
        binding.builtin_initial = true;
      } else {
        binding.sym = resolve_var(trace, f.var, error);
        if (binding.sym < 0) return false;
      }
      vars.emplace_back(f.var, binding);
      return true;
    }
    default:
      for (const auto& a : f.args)
        if (!collect_vars(*a, trace, vars, error)) return false;
      return true;
  }
}

bool cmp_eval(CmpOp op, const sim::Scalar& lhs, const sim::Scalar& rhs) {
  const double a = lhs.as_real();
  const double b = rhs.as_real();
  switch (op) {
    case CmpOp::Eq: return a == b;
    case CmpOp::Ne: return a != b;
    case CmpOp::Lt: return a < b;
    case CmpOp::Le: return a <= b;
    case CmpOp::Gt: return a > b;
    case CmpOp::Ge: return a >= b;
  }
  return false;
}

// three-valued inner eval: unknown when a referenced value is missing
enum class Tri { False, True, Unknown };

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Unknown || b == Tri::Unknown) return Tri::Unknown;
  return Tri::True;
}

Tri tri_not(Tri a) {
  if (a == Tri::Unknown) return Tri::Unknown;
  return a == Tri::True ? Tri::False : Tri::True;
}

class Evaluator {
 public:
  Evaluator(const StepTable& table,
            const std::vector<std::pair<std::string, VarBinding>>& vars)
      : table_(table), vars_(vars) {}

  Tri eval(const QueryFormula& f, size_t step) const {
    switch (f.kind) {
      case QueryFormula::Kind::True:
        return Tri::True;
      case QueryFormula::Kind::False:
        return Tri::False;
      case QueryFormula::Kind::Var: {
        auto v = lookup(f, step);
        if (!v) return Tri::Unknown;
        return v->truthy() ? Tri::True : Tri::False;
      }
      case QueryFormula::Kind::Cmp: {
        auto v = lookup(f, step);
        if (!v) return Tri::Unknown;
        return cmp_eval(f.op, *v, f.rhs) ? Tri::True : Tri::False;
      }
      case QueryFormula::Kind::Not:
        return tri_not(eval(*f.args.front(), step));
      case QueryFormula::Kind::And: {
        Tri acc = Tri::True;
        for (const auto& a : f.args) acc = tri_and(acc, eval(*a, step));
        return acc;
      }
      case QueryFormula::Kind::Or: {
        Tri acc = Tri::False;
        for (const auto& a : f.args) acc = tri_not(tri_and(tri_not(acc), tri_not(eval(*a, step))));
        return acc;
      }
      case QueryFormula::Kind::Implies: {
        Tri lhs = eval(*f.args[0], step);
        Tri rhs = eval(*f.args[1], step);
        return tri_not(tri_and(lhs, tri_not(rhs)));
      }
      case QueryFormula::Kind::Temporal:
        return Tri::Unknown;  // plain queries never contain temporal nodes
    }
    return Tri::Unknown;
  }

  std::optional<sim::Scalar> lookup(const QueryFormula& f, size_t step) const {
    const long long target =
        static_cast<long long>(step) + static_cast<long long>(f.shift);
    if (target < 0 || target >= static_cast<long long>(table_.times.size()))
      return std::nullopt;
    for (const auto& [name, binding] : vars_) {
      if (name != f.var) continue;
      if (binding.builtin_initial) return sim::Scalar::boolean(target > 0);
      const sim::Scalar* v = table_.value(static_cast<size_t>(target), binding.sym);
      if (!v) return std::nullopt;
      return *v;
    }
    return std::nullopt;
  }

  void valuation(const QueryFormula& f, size_t step,
                 std::vector<std::pair<std::string, sim::Scalar>>& out) const {
    if (f.kind == QueryFormula::Kind::Var || f.kind == QueryFormula::Kind::Cmp) {
      std::string label = shift_prefix(f.shift) + f.var;
      for (const auto& [l, v] : out)
        if (l == label) return;
      auto v = lookup(f, step);
      out.emplace_back(label, v ? *v : sim::Scalar::none());
      return;
    }
    for (const auto& a : f.args) valuation(*a, step, out);
  }

 private:
  const StepTable& table_;
  const std::vector<std::pair<std::string, VarBinding>>& vars_;
};

}  // namespace

EvalOutcome eval_query(const sim::Trace& trace, const PlainQuery& pq) {
  EvalOutcome outcome;
  if (!pq.formula) throw QueryError("plain query has no formula");
  if (has_forward_refs(*pq.formula))
    throw QueryError("plain query still references future steps");

  StepTable table = build_steps(trace, pq.system);
  if (table.times.empty()) {
    outcome.vacuous = true;
    outcome.warning = "trace has no firings of node '" + pq.system + "'";
    return outcome;
  }

  std::string error;
  std::vector<std::pair<std::string, VarBinding>> vars;
  if (!collect_vars(*pq.formula, trace, vars, &error))
    throw QueryError(error);
  for (const auto& a : pq.assumptions)
    if (!collect_vars(*a, trace, vars, &error)) throw QueryError(error);

  Evaluator ev(table, vars);

  // assumptions constrain all steps
  for (size_t i = 0; i < table.times.size(); ++i) {
    for (const auto& a : pq.assumptions) {
      if (ev.eval(*a, i) == Tri::False) {
        outcome.vacuous = true;
        outcome.warning = "assumption violated at step " + std::to_string(i) +
                          "; query holds vacuously";
        return outcome;
      }
    }
  }

  const size_t first = static_cast<size_t>(pq.max_backshift);
  if (first >= table.times.size()) {
    outcome.vacuous = true;
    outcome.warning = "trace shorter than the query shift; no checkable step";
    return outcome;
  }
  size_t checked = 0;
  for (size_t i = first; i < table.times.size(); ++i) {
    Tri verdict = ev.eval(*pq.formula, i);
    if (verdict == Tri::False) {
      outcome.holds = false;
      outcome.counterexample_step = i;
      ev.valuation(*pq.formula, i, outcome.valuation);
      return outcome;
    }
    if (verdict == Tri::True) ++checked;
  }
  if (checked == 0) {
    outcome.vacuous = true;
    outcome.warning = "no step carried every referenced variable";
  }
  return outcome;
}

}  // namespace qparch::monitor
