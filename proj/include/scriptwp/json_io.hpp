#pragma once

#include "json.hpp"
#include "scriptwp/hoare.hpp"
#include "scriptwp/predicates.hpp"
#include "scriptwp/vm.hpp"

namespace scriptwp {

/// Naturals are JSON numbers when they fit in 64 bits, decimal strings otherwise.
nlohmann::json nat_to_json(const Nat& n);
nlohmann::json stack_to_json(const Stack& st);
nlohmann::json state_to_json(const StackState& s);
nlohmann::json outcome_to_json(const ExecOutcome& o);
nlohmann::json verdict_to_json(const Verdict& v);
nlohmann::json term_to_json(const Term& t);
nlohmann::json prop_to_json(const Prop& p);
/// {"text": rendered form, "clauses": [{"depth", "names", "body"}]}.
nlohmann::json formula_to_json(const WpFormula& f);

}  // namespace scriptwp
