#include "scriptwp/predicates.hpp"

#include <algorithm>

namespace scriptwp {

Term var(std::size_t slot) {
  Term t;
  t.kind = TermKind::Var;
  t.slot = slot;
  return t;
}

Term lit(Nat n) {
  Term t;
  t.kind = TermKind::Lit;
  t.lit = std::move(n);
  return t;
}

Term hash_of(Term inner) {
  Term t;
  t.kind = TermKind::Hash;
  t.args.push_back(std::move(inner));
  return t;
}

Term now() {
  Term t;
  t.kind = TermKind::Now;
  return t;
}

namespace {

std::optional<std::size_t> first_var(const Term& t) {
  if (t.kind == TermKind::Var) return t.slot;
  for (const auto& a : t.args)
    if (auto v = first_var(a)) return v;
  return std::nullopt;
}

}  // namespace

Atom eq(Term a, Term b) {
  // Canonical operand order: variables before constants, shallower slots first.
  auto fa = first_var(a);
  auto fb = first_var(b);
  bool swap = false;
  if (fa && fb) swap = *fb < *fa;
  else if (fb) swap = true;
  else if (!fa && a.kind == TermKind::Lit && b.kind != TermKind::Lit) swap = true;
  if (swap) std::swap(a, b);
  return Atom{AtomKind::Eq, {std::move(a), std::move(b)}};
}

Atom is_signed(Term sig, Term pbk) { return Atom{AtomKind::IsSigned, {std::move(sig), std::move(pbk)}}; }
Atom positive(Term t) { return Atom{AtomKind::Positive, {std::move(t)}}; }
Atom time_le(Term lock) { return Atom{AtomKind::TimeLe, {std::move(lock)}}; }

Prop p_true() { return Prop{PropKind::True, std::nullopt, {}}; }
Prop p_false() { return Prop{PropKind::False, std::nullopt, {}}; }
Prop p_atom(Atom a) { return Prop{PropKind::Atom, std::move(a), {}}; }

Prop p_not(Prop p) {
  if (p.kind == PropKind::True) return p_false();
  if (p.kind == PropKind::False) return p_true();
  if (p.kind == PropKind::Not) return std::move(p.children.front());
  return Prop{PropKind::Not, std::nullopt, {std::move(p)}};
}

namespace {

// Flattens nested connectives of the same kind and folds the unit/zero constants.
Prop junction(PropKind kind, std::vector<Prop> ps) {
  const PropKind unit = kind == PropKind::And ? PropKind::True : PropKind::False;
  const PropKind zero = kind == PropKind::And ? PropKind::False : PropKind::True;
  std::vector<Prop> flat;
  for (auto& p : ps) {
    if (p.kind == unit) continue;
    if (p.kind == zero) return Prop{zero, std::nullopt, {}};
    if (p.kind == kind) {
      for (auto& c : p.children) flat.push_back(std::move(c));
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return Prop{unit, std::nullopt, {}};
  if (flat.size() == 1) return std::move(flat.front());
  return Prop{kind, std::nullopt, std::move(flat)};
}

}  // namespace

Prop p_and(std::vector<Prop> ps) { return junction(PropKind::And, std::move(ps)); }
Prop p_or(std::vector<Prop> ps) { return junction(PropKind::Or, std::move(ps)); }

namespace {

std::optional<std::size_t> max_slot(const Term& t) {
  std::optional<std::size_t> best;
  if (t.kind == TermKind::Var) best = t.slot;
  for (const auto& a : t.args) {
    auto m = max_slot(a);
    if (m && (!best || *m > *best)) best = m;
  }
  return best;
}

void term_constants(const Term& t, std::set<Nat>& out) {
  if (t.kind == TermKind::Lit) out.insert(t.lit);
  for (const auto& a : t.args) term_constants(a, out);
}

template <typename F>
void for_each_atom(const Prop& p, F&& f) {
  if (p.kind == PropKind::Atom) f(*p.atom);
  for (const auto& c : p.children) for_each_atom(c, f);
}

}  // namespace

std::optional<std::size_t> max_slot(const Prop& p) {
  std::optional<std::size_t> best;
  for_each_atom(p, [&](const Atom& a) {
    for (const auto& t : a.args) {
      auto m = max_slot(t);
      if (m && (!best || *m > *best)) best = m;
    }
  });
  return best;
}

void collect_atoms(const Prop& p, std::vector<Atom>& out) {
  for_each_atom(p, [&](const Atom& a) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  });
}

void validate(const WpFormula& f) {
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    const auto& c = f.clauses[i];
    auto m = max_slot(c.body);
    if (m && *m >= c.pattern.depth)
      throw FormulaError("clause " + std::to_string(i) + " references slot " + std::to_string(*m) +
                         " beyond its pattern depth " + std::to_string(c.pattern.depth));
    if (!c.pattern.names.empty() && c.pattern.names.size() != c.pattern.depth)
      throw FormulaError("clause " + std::to_string(i) + " has mismatched slot names");
  }
}

std::set<Nat> formula_constants(const WpFormula& f) {
  std::set<Nat> out;
  for (const auto& c : f.clauses)
    for_each_atom(c.body, [&](const Atom& a) {
      for (const auto& t : a.args) term_constants(t, out);
    });
  return out;
}

std::set<Nat> formula_lock_times(const WpFormula& f) {
  std::set<Nat> out;
  for (const auto& c : f.clauses)
    for_each_atom(c.body, [&](const Atom& a) {
      if (a.kind == AtomKind::TimeLe && a.args[0].kind == TermKind::Lit) out.insert(a.args[0].lit);
    });
  return out;
}

Nat eval_term(const CryptoOracle& oracle, const Term& t, const StackState& s) {
  switch (t.kind) {
    case TermKind::Var: return s.stack.at(t.slot);
    case TermKind::Lit: return t.lit;
    case TermKind::Hash: return oracle.hash(eval_term(oracle, t.args[0], s));
    case TermKind::Now: return s.current_time;
  }
  return 0;
}

bool eval_atom(const CryptoOracle& oracle, const Atom& a, const StackState& s) {
  switch (a.kind) {
    case AtomKind::Eq: return eval_term(oracle, a.args[0], s) == eval_term(oracle, a.args[1], s);
    case AtomKind::IsSigned:
      return oracle.is_signed(s.msg, eval_term(oracle, a.args[0], s), eval_term(oracle, a.args[1], s));
    case AtomKind::Positive: return eval_term(oracle, a.args[0], s) > 0;
    case AtomKind::TimeLe: return eval_term(oracle, a.args[0], s) <= s.current_time;
  }
  return false;
}

bool eval_prop(const CryptoOracle& oracle, const Prop& p, const StackState& s) {
  switch (p.kind) {
    case PropKind::True: return true;
    case PropKind::False: return false;
    case PropKind::Atom: return eval_atom(oracle, *p.atom, s);
    case PropKind::Not: return !eval_prop(oracle, p.children[0], s);
    case PropKind::And:
      return std::all_of(p.children.begin(), p.children.end(),
                         [&](const Prop& c) { return eval_prop(oracle, c, s); });
    case PropKind::Or:
      return std::any_of(p.children.begin(), p.children.end(),
                         [&](const Prop& c) { return eval_prop(oracle, c, s); });
  }
  return false;
}

bool eval_formula(const CryptoOracle& oracle, const WpFormula& f, const StackState& s) {
  for (const auto& c : f.clauses)
    if (s.stack.height() >= c.pattern.depth && eval_prop(oracle, c.body, s)) return true;
  return false;
}

bool accept_state(const StackState& s) { return !s.stack.empty() && s.stack.top() > 0; }

bool lift_predicate(const StatePredicate& psi, const ExecOutcome& o) { return o.ok() && psi(o.state()); }

StatePredicate formula_predicate(const CryptoOracle& oracle, WpFormula f) {
  validate(f);
  return [oracle, f = std::move(f)](const StackState& s) { return eval_formula(oracle, f, s); };
}

StatePredicate semantic_wp(const CryptoOracle& oracle, Script script, StatePredicate post) {
  return [oracle, script = std::move(script), post = std::move(post)](const StackState& s) {
    return lift_predicate(post, eval_script(oracle, script, s));
  };
}

StatePredicate conj_sp(StatePredicate f, StatePredicate g) {
  return [f = std::move(f), g = std::move(g)](const StackState& s) { return f(s) && g(s); };
}

StatePredicate true_everywhere() {
  return [](const StackState&) { return true; };
}

StatePredicate false_everywhere() {
  return [](const StackState&) { return false; };
}

WpFormula conj_formula(const WpFormula& f, const WpFormula& g) {
  WpFormula out;
  for (const auto& c : f.clauses) {
    for (const auto& d : g.clauses) {
      Clause merged;
      const Clause& deeper = d.pattern.depth > c.pattern.depth ? d : c;
      const Clause& other = &deeper == &c ? d : c;
      merged.pattern.depth = deeper.pattern.depth;
      merged.pattern.names = !deeper.pattern.names.empty() || other.pattern.depth < deeper.pattern.depth
                                 ? deeper.pattern.names
                                 : other.pattern.names;
      merged.body = p_and({c.body, d.body});
      out.clauses.push_back(std::move(merged));
    }
  }
  return out;
}

WpFormula accept_formula() {
  return WpFormula{{Clause{StackPattern{1, {"x"}}, p_atom(positive(var(0)))}}};
}

WpFormula false_formula() { return WpFormula{}; }

WpFormula true_formula() { return WpFormula{{Clause{StackPattern{0, {}}, p_true()}}}; }

}  // namespace scriptwp
