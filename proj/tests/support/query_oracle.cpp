#include "support/query_oracle.hpp"

#include <limits>
#include <stdexcept>

namespace qparch::testing {

using monitor::QueryFormula;

namespace {

constexpr long long kNoAtom = std::numeric_limits<long long>::max();

// composed step reach of a formula: every atom lands in [step+lo, step+hi];
// lo == kNoAtom marks an atom-free formula
void reach(const QueryFormula& f, Micros period, long long& lo, long long& hi) {
  switch (f.kind) {
    case QueryFormula::Kind::True:
    case QueryFormula::Kind::False:
      return;
    case QueryFormula::Kind::Var:
    case QueryFormula::Kind::Cmp:
      lo = lo == kNoAtom ? f.shift : std::min<long long>(lo, f.shift);
      hi = hi == -kNoAtom ? f.shift : std::max<long long>(hi, f.shift);
      return;
    case QueryFormula::Kind::Temporal: {
      long long wlo = f.lo / period + (f.lo_incl ? 0 : 1);
      long long whi = f.hi / period - (f.hi_incl ? 0 : 1);
      if (wlo > whi) return;  // empty window contributes nothing
      long long alo = kNoAtom, ahi = -kNoAtom;
      reach(*f.args.front(), period, alo, ahi);
      if (alo == kNoAtom) return;
      lo = lo == kNoAtom ? alo + wlo : std::min(lo, alo + wlo);
      hi = hi == -kNoAtom ? ahi + whi : std::max(hi, ahi + whi);
      return;
    }
    default:
      for (const auto& a : f.args) reach(*a, period, lo, hi);
      return;
  }
}

const sim::Scalar& value_at(const ValuationTrace& tr, long long step,
                            const std::string& var) {
  const auto& row = tr.steps.at(static_cast<size_t>(step));
  auto it = row.find(var);
  if (it == row.end())
    throw std::runtime_error("oracle trace lacks variable '" + var + "'");
  return it->second;
}

bool cmp(monitor::CmpOp op, double a, double b) {
  switch (op) {
    case monitor::CmpOp::Eq: return a == b;
    case monitor::CmpOp::Ne: return a != b;
    case monitor::CmpOp::Lt: return a < b;
    case monitor::CmpOp::Le: return a <= b;
    case monitor::CmpOp::Gt: return a > b;
    case monitor::CmpOp::Ge: return a >= b;
  }
  return false;
}

bool direct_eval(const QueryFormula& f, const ValuationTrace& tr, long long step,
                 Micros period) {
  switch (f.kind) {
    case QueryFormula::Kind::True:
      return true;
    case QueryFormula::Kind::False:
      return false;
    case QueryFormula::Kind::Var:
      return value_at(tr, step + f.shift, f.var).truthy();
    case QueryFormula::Kind::Cmp:
      return cmp(f.op, value_at(tr, step + f.shift, f.var).as_real(),
                 f.rhs.as_real());
    case QueryFormula::Kind::Not:
      return !direct_eval(*f.args.front(), tr, step, period);
    case QueryFormula::Kind::And:
      for (const auto& a : f.args)
        if (!direct_eval(*a, tr, step, period)) return false;
      return true;
    case QueryFormula::Kind::Or:
      for (const auto& a : f.args)
        if (direct_eval(*a, tr, step, period)) return true;
      return false;
    case QueryFormula::Kind::Implies:
      return !direct_eval(*f.args[0], tr, step, period) ||
             direct_eval(*f.args[1], tr, step, period);
    case QueryFormula::Kind::Temporal: {
      long long wlo = f.lo / period + (f.lo_incl ? 0 : 1);
      long long whi = f.hi / period - (f.hi_incl ? 0 : 1);
      if (wlo > whi) return f.is_all;  // empty window: X true, F false
      for (long long o = wlo; o <= whi; ++o) {
        const bool v = direct_eval(*f.args.front(), tr, step + o, period);
        if (f.is_all && !v) return false;
        if (!f.is_all && v) return true;
      }
      return f.is_all;
    }
  }
  return false;
}

}  // namespace

DirectVerdict direct_check(const monitor::TemporalQuery& q,
                           const ValuationTrace& trace, Micros period) {
  long long lo = kNoAtom, hi = -kNoAtom;
  reach(*q.formula, period, lo, hi);
  if (lo == kNoAtom) {  // atom-free: every step is checkable constant
    lo = 0;
    hi = 0;
  }
  DirectVerdict verdict;
  const long long forward = hi > 0 ? hi : 0;
  verdict.forward_reach = static_cast<int>(forward);
  const long long n = static_cast<long long>(trace.steps.size());
  // mirror the plain-eval skip rule exactly: plain steps j >= maxback map to
  // original steps i = j - F with maxback = max(0, F - lo)
  verdict.from = std::max(-forward, -lo);
  verdict.to = n - forward;
  for (long long i = verdict.from; i < verdict.to; ++i) {
    if (!direct_eval(*q.formula, trace, i, period)) {
      verdict.holds = false;
      verdict.first_fail = i;
      return verdict;
    }
  }
  return verdict;
}

sim::Trace to_sim_trace(const ValuationTrace& trace, const std::string& node,
                        Micros period) {
  sim::Trace t;
  t.rng_name = sim::kRngName;
  t.arch_hash = "0000000000000000";
  const auto node_sym = t.symbols.intern(node);
  for (size_t i = 0; i < trace.steps.size(); ++i) {
    const Micros at = static_cast<Micros>(i + 1) * period;
    t.events.push_back({at, sim::EventKind::StepStart, node_sym, -1, -1, 0, {}});
    for (const auto& [var, value] : trace.steps[i]) {
      t.events.push_back({at, sim::EventKind::Value, node_sym,
                          t.symbols.intern(var), -1, 0, value});
    }
    t.events.push_back({at, sim::EventKind::StepEnd, node_sym, -1, -1, 0, {}});
  }
  return t;
}

namespace {

const std::vector<std::string>& bool_vars() {
  static const std::vector<std::string> vars = {"p", "q", "r"};
  return vars;
}

const std::vector<std::string>& int_vars() {
  static const std::vector<std::string> vars = {"x", "y"};
  return vars;
}

monitor::FormulaPtr random_atom(sim::Rng& rng, int max_offset) {
  const int shift =
      static_cast<int>(rng.between(-max_offset, max_offset));
  if (rng.below(2) == 0) {
    const auto& v = bool_vars()[rng.below(bool_vars().size())];
    return monitor::make_var(v, shift);
  }
  const auto& v = int_vars()[rng.below(int_vars().size())];
  const auto op = static_cast<monitor::CmpOp>(rng.below(6));
  return monitor::make_cmp(op, v, sim::Scalar::integer(rng.between(0, 3)), shift);
}

}  // namespace

monitor::FormulaPtr random_formula(sim::Rng& rng, int depth, int max_offset,
                                   Micros period) {
  if (depth <= 0) return random_atom(rng, max_offset);
  switch (rng.below(7)) {
    case 0:
      return random_atom(rng, max_offset);
    case 1:
      return monitor::make_not(random_formula(rng, depth - 1, max_offset, period));
    case 2:
    case 3: {
      std::vector<monitor::FormulaPtr> args;
      const size_t n = 2 + rng.below(2);
      for (size_t i = 0; i < n; ++i)
        args.push_back(random_formula(rng, depth - 1, max_offset, period));
      return monitor::make_connective(rng.below(2) == 0
                                          ? QueryFormula::Kind::And
                                          : QueryFormula::Kind::Or,
                                      std::move(args));
    }
    case 4: {
      std::vector<monitor::FormulaPtr> args;
      args.push_back(random_formula(rng, depth - 1, max_offset, period));
      args.push_back(random_formula(rng, depth - 1, max_offset, period));
      return monitor::make_connective(QueryFormula::Kind::Implies, std::move(args));
    }
    default: {
      long long a = rng.between(-max_offset, max_offset);
      long long b = rng.between(-max_offset, max_offset);
      if (a > b) std::swap(a, b);
      const bool lo_incl = rng.below(2) == 0;
      const bool hi_incl = rng.below(2) == 0;
      return monitor::make_temporal(
          rng.below(2) == 0, a * period, lo_incl, b * period, hi_incl,
          random_formula(rng, depth - 1, max_offset, period));
    }
  }
}

ValuationTrace random_valuation_trace(sim::Rng& rng, size_t steps) {
  ValuationTrace trace;
  trace.steps.resize(steps);
  for (auto& row : trace.steps) {
    for (const auto& v : bool_vars())
      row[v] = sim::Scalar::boolean(rng.below(2) == 0);
    for (const auto& v : int_vars())
      row[v] = sim::Scalar::integer(rng.between(0, 3));
  }
  return trace;
}

}  // namespace qparch::testing
