#pragma once

#include <optional>
#include <vector>

#include "scriptwp/predicates.hpp"

namespace scriptwp {

/// A conjunction of literals: atom index * 2, plus 1 when negated. Sorted.
using Cube = std::vector<int>;

/// Disjunctive normal form of `p` over `atoms` (extended with any atoms of
/// `p` not yet listed). nullopt when the expansion exceeds `max_cubes`.
std::optional<std::vector<Cube>> to_dnf(const Prop& p, std::vector<Atom>& atoms, std::size_t max_cubes = 4096);

/// Removes contradictory cubes, duplicate literals and cubes, subsumed cubes,
/// and complementary literals ((A & B) | (A & !B & C) -> (A & B) | (A & C)),
/// repeating until nothing changes. Survivors keep their original order.
std::vector<Cube> simplify_cubes(std::vector<Cube> cubes);

Prop cubes_to_prop(const std::vector<Cube>& cubes, const std::vector<Atom>& atoms);

/// True when a and b agree on every truth assignment of their distinct atoms,
/// each atom read as an independent boolean. Throws std::length_error above
/// 20 atoms.
bool propositionally_equivalent(const Prop& a, const Prop& b);

/// Simplified DNF of `p`; `p` itself if nothing simplifies or it is too large.
Prop simplify_prop(const Prop& p);

/// simplify_prop on every clause body; clauses whose body becomes false are
/// dropped. Throws std::logic_error if a result is not equivalent to its input.
WpFormula simplify_formula(const WpFormula& f);

}  // namespace scriptwp
