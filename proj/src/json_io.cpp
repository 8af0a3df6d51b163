#include "scriptwp/json_io.hpp"

#include <limits>

namespace scriptwp {

using nlohmann::json;

json nat_to_json(const Nat& n) {
  if (n <= std::numeric_limits<std::uint64_t>::max()) return n.convert_to<std::uint64_t>();
  return to_string(n);
}

json stack_to_json(const Stack& st) {
  json out = json::array();
  for (const auto& v : st.top_first()) out.push_back(nat_to_json(v));
  return out;
}

json state_to_json(const StackState& s) {
  return {{"time", nat_to_json(s.current_time)}, {"msg", nat_to_json(s.msg)}, {"stack", stack_to_json(s.stack)}};
}

json outcome_to_json(const ExecOutcome& o) {
  if (!o.ok()) return {{"result", "failed"}};
  return {{"result", "succeeded"}, {"state", state_to_json(o.state())}};
}

json verdict_to_json(const Verdict& v) {
  json out{{"holds", v.holds}, {"states_checked", v.states_checked}};
  if (!v.holds) {
    out["direction"] = to_string(v.direction);
    out["index"] = v.index;
    if (v.counterexample) out["counterexample"] = state_to_json(*v.counterexample);
  }
  return out;
}

json term_to_json(const Term& t) {
  switch (t.kind) {
    case TermKind::Var: return {{"var", t.slot}};
    case TermKind::Lit: return {{"lit", nat_to_json(t.lit)}};
    case TermKind::Hash: return {{"hash", term_to_json(t.args.at(0))}};
    case TermKind::Now: return {{"now", true}};
  }
  return {};
}

namespace {

const char* atom_name(AtomKind k) {
  switch (k) {
    case AtomKind::Eq: return "eq";
    case AtomKind::IsSigned: return "signed";
    case AtomKind::Positive: return "positive";
    case AtomKind::TimeLe: return "locktime_le_now";
  }
  return "";
}

}  // namespace

json prop_to_json(const Prop& p) {
  switch (p.kind) {
    case PropKind::True: return {{"op", "true"}};
    case PropKind::False: return {{"op", "false"}};
    case PropKind::Atom: {
      json args = json::array();
      for (const auto& t : p.atom->args) args.push_back(term_to_json(t));
      return {{"op", "atom"}, {"atom", atom_name(p.atom->kind)}, {"args", args}};
    }
    case PropKind::Not: return {{"op", "not"}, {"arg", prop_to_json(p.children.at(0))}};
    case PropKind::And:
    case PropKind::Or: {
      json args = json::array();
      for (const auto& c : p.children) args.push_back(prop_to_json(c));
      return {{"op", p.kind == PropKind::And ? "and" : "or"}, {"args", args}};
    }
  }
  return {};
}

json formula_to_json(const WpFormula& f) {
  json clauses = json::array();
  for (const auto& c : f.clauses)
    clauses.push_back({{"depth", c.pattern.depth}, {"names", clause_names(c)}, {"body", prop_to_json(c.body)}});
  return {{"text", render_formula(f)}, {"clauses", clauses}};
}

}  // namespace scriptwp
