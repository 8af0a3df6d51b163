#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scriptwp/vm.hpp"

namespace scriptwp {

// ---------------------------------------------------------------------------
// Readable precondition formulas.
//
// A formula is a list of clauses. Each clause binds the top `depth` stack
// cells to slot variables (slot 0 is the top) plus an implicit rest binder,
// and carries a propositional body over atoms. A state satisfies the formula
// iff some clause's pattern matches (height >= depth) and its body holds.
// ---------------------------------------------------------------------------

enum class TermKind { Var, Lit, Hash, Now };

struct Term {
  TermKind kind = TermKind::Lit;
  std::size_t slot = 0;  // Var
  Nat lit = 0;           // Lit
  std::vector<Term> args;  // Hash: exactly one

  friend bool operator==(const Term&, const Term&) = default;
};

Term var(std::size_t slot);
Term lit(Nat n);
Term hash_of(Term t);
Term now();

enum class AtomKind { Eq, IsSigned, Positive, TimeLe };

/// Eq(a, b); IsSigned(sig, pbk) against the state's message; Positive(t) is
/// t > 0; TimeLe(lock) is lock <= current time.
struct Atom {
  AtomKind kind = AtomKind::Positive;
  std::vector<Term> args;

  friend bool operator==(const Atom&, const Atom&) = default;
};

Atom eq(Term a, Term b);
Atom is_signed(Term sig, Term pbk);
Atom positive(Term t);
Atom time_le(Term lock);

enum class PropKind { True, False, Atom, Not, And, Or };

struct Prop {
  PropKind kind = PropKind::True;
  std::optional<Atom> atom;
  std::vector<Prop> children;

  friend bool operator==(const Prop&, const Prop&) = default;
};

Prop p_true();
Prop p_false();
Prop p_atom(Atom a);
Prop p_not(Prop p);
Prop p_and(std::vector<Prop> ps);
Prop p_or(std::vector<Prop> ps);

struct StackPattern {
  std::size_t depth = 0;
  /// Display names for the bound slots; empty means derive them on render.
  std::vector<std::string> names;
};

struct Clause {
  StackPattern pattern;
  Prop body;

  /// Structural identity; display names are ignored.
  friend bool operator==(const Clause& a, const Clause& b) {
    return a.pattern.depth == b.pattern.depth && a.body == b.body;
  }
};

struct WpFormula {
  std::vector<Clause> clauses;

  friend bool operator==(const WpFormula&, const WpFormula&) = default;
};

class FormulaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws FormulaError if a body references a slot outside its pattern.
void validate(const WpFormula& f);

/// All literal constants mentioned by the formula.
std::set<Nat> formula_constants(const WpFormula& f);
/// Literal locks of TimeLe atoms.
std::set<Nat> formula_lock_times(const WpFormula& f);

/// Highest slot referenced in `p`, if any.
std::optional<std::size_t> max_slot(const Prop& p);

/// Collects the distinct atoms of `p` in first-occurrence order.
void collect_atoms(const Prop& p, std::vector<Atom>& out);

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

using StatePredicate = std::function<bool(const StackState&)>;

Nat eval_term(const CryptoOracle& oracle, const Term& t, const StackState& s);
bool eval_atom(const CryptoOracle& oracle, const Atom& a, const StackState& s);
bool eval_prop(const CryptoOracle& oracle, const Prop& p, const StackState& s);
bool eval_formula(const CryptoOracle& oracle, const WpFormula& f, const StackState& s);

/// Stack non-empty with top > 0.
bool accept_state(const StackState& s);

/// (psi+): Failed is false, Succeeded(s) is psi(s).
bool lift_predicate(const StatePredicate& psi, const ExecOutcome& o);

StatePredicate formula_predicate(const CryptoOracle& oracle, WpFormula f);
StatePredicate semantic_wp(const CryptoOracle& oracle, Script script, StatePredicate post);
StatePredicate conj_sp(StatePredicate f, StatePredicate g);
StatePredicate true_everywhere();
StatePredicate false_everywhere();

/// Formula-level conjunction; agrees pointwise with conj_sp of the two.
WpFormula conj_formula(const WpFormula& f, const WpFormula& g);

/// "stack = x :: rest => x > 0".
WpFormula accept_formula();
WpFormula false_formula();
WpFormula true_formula();

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------

/// Display names used when rendering a clause (explicit names if present,
/// otherwise derived from the roles the slots play in the body).
std::vector<std::string> clause_names(const Clause& c);

std::string render_prop(const Prop& p, const std::vector<std::string>& names);
std::string render_clause(const Clause& c);
/// One clause per line; the empty formula renders as "false".
std::string render_formula(const WpFormula& f);

/// Inverse of render_formula. Blank lines and `#` comments are ignored.
/// Throws FormulaError on malformed input.
WpFormula parse_formula(std::string_view text);

}  // namespace scriptwp
