#pragma once

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qparch/sim/trace.hpp"

namespace qparch::monitor {

enum class CmpOp { Eq, Ne, Lt, Le, Gt, Ge };

struct QueryFormula;
using FormulaPtr = std::shared_ptr<const QueryFormula>;

// Formula tree over trace-visible variables. Interval operators X (all steps
// in the window) and F (some step) carry endpoint times plus bracket-controlled
// inclusivity; prevK_/nextK_ spellings on variables parse into step shifts.
struct QueryFormula {
  enum class Kind { True, False, Var, Cmp, Not, And, Or, Implies, Temporal };
  Kind kind = Kind::True;

  std::string var;  // Var / Cmp left-hand side (base name, no shift prefix)
  int shift = 0;    // steps; negative = past, positive = future
  CmpOp op = CmpOp::Eq;
  sim::Scalar rhs;

  std::vector<FormulaPtr> args;

  bool is_all = true;      // X; false = F
  Micros lo = 0, hi = 0;   // window endpoints, microseconds
  bool lo_incl = true;
  bool hi_incl = true;
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr make_var(std::string name, int shift = 0);
FormulaPtr make_cmp(CmpOp op, std::string var, sim::Scalar rhs, int shift = 0);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_connective(QueryFormula::Kind kind, std::vector<FormulaPtr> args);
FormulaPtr make_temporal(bool is_all, Micros lo, bool lo_incl, Micros hi,
                         bool hi_incl, FormulaPtr arg);

struct TemporalQuery {
  std::string system;  // reference node whose firings index the steps
  FormulaPtr formula;
  std::vector<FormulaPtr> assumptions;  // (assume-input sys atom) forms
};

struct QueryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct QueryParseError {
  int offset = -1;
  std::string message;

  bool ok() const { return offset < 0; }
};

// One (query <sys> <formula>) per file; any number of (assume-input <sys> a).
// Interval times are seconds; X[0,2][q] and X(0,2][q] bracket forms accepted.
std::optional<TemporalQuery> parse_query(std::string_view text,
                                         QueryParseError* error = nullptr);

std::string print_formula(const QueryFormula& f);
std::string print_query(const std::string& system, const QueryFormula& f);

// Result of temporal unfolding: the intermediate form may reference future
// steps (nextK_), the plain form is shifted wholly into the past.
struct PlainQuery {
  std::string system;
  FormulaPtr formula;  // shifts <= 0 only
  int max_backshift = 0;
  std::vector<FormulaPtr> assumptions;
};

struct UnfoldResult {
  FormulaPtr unfolded;
  PlainQuery plain;
};

// X windows expand to conjunctions over the included step offsets, F to
// disjunctions; remaining forward references shift the whole formula into the
// past by the maximal forward offset. Throws QueryError when an endpoint is
// not an integer multiple of the period.
UnfoldResult unfold_query(const TemporalQuery& q, Micros period);

bool has_forward_refs(const QueryFormula& f);

struct EvalOutcome {
  bool holds = true;
  bool vacuous = false;
  std::string warning;
  std::optional<size_t> counterexample_step;
  std::vector<std::pair<std::string, sim::Scalar>> valuation;
};

// Steps are the reference node's firings; the first max_backshift steps are
// skipped (prevK references undefined there). Assumptions constrain every
// step: a trace violating one yields a vacuous hold with a warning.
EvalOutcome eval_query(const sim::Trace& trace, const PlainQuery& pq);

}  // namespace qparch::monitor
