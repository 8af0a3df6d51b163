#include "scriptwp/simplify.hpp"

#include <algorithm>
#include <stdexcept>

namespace scriptwp {

namespace {

constexpr std::size_t kMaxAtoms = 20;

std::size_t atom_index(const Atom& a, std::vector<Atom>& atoms) {
  auto it = std::find(atoms.begin(), atoms.end(), a);
  if (it != atoms.end()) return static_cast<std::size_t>(it - atoms.begin());
  atoms.push_back(a);
  return atoms.size() - 1;
}

std::optional<std::vector<Cube>> product(const std::vector<Cube>& xs, const std::vector<Cube>& ys,
                                         std::size_t max_cubes) {
  if (xs.size() * ys.size() > max_cubes) return std::nullopt;
  std::vector<Cube> out;
  for (const auto& x : xs)
    for (const auto& y : ys) {
      Cube c = x;
      c.insert(c.end(), y.begin(), y.end());
      std::sort(c.begin(), c.end());
      c.erase(std::unique(c.begin(), c.end()), c.end());
      out.push_back(std::move(c));
    }
  return out;
}

std::optional<std::vector<Cube>> dnf(const Prop& p, bool positive, std::vector<Atom>& atoms,
                                     std::size_t max_cubes) {
  switch (p.kind) {
    case PropKind::True: return positive ? std::vector<Cube>{Cube{}} : std::vector<Cube>{};
    case PropKind::False: return positive ? std::vector<Cube>{} : std::vector<Cube>{Cube{}};
    case PropKind::Atom: {
      const int i = static_cast<int>(atom_index(*p.atom, atoms));
      return std::vector<Cube>{Cube{2 * i + (positive ? 0 : 1)}};
    }
    case PropKind::Not: return dnf(p.children.at(0), !positive, atoms, max_cubes);
    case PropKind::And:
    case PropKind::Or: {
      const bool conjunctive = (p.kind == PropKind::And) == positive;
      std::vector<Cube> acc;
      if (conjunctive) acc.push_back(Cube{});
      for (const auto& c : p.children) {
        auto part = dnf(c, positive, atoms, max_cubes);
        if (!part) return std::nullopt;
        if (conjunctive) {
          auto next = product(acc, *part, max_cubes);
          if (!next) return std::nullopt;
          acc = std::move(*next);
        } else {
          acc.insert(acc.end(), part->begin(), part->end());
          if (acc.size() > max_cubes) return std::nullopt;
        }
      }
      return acc;
    }
  }
  return std::nullopt;
}

bool contradictory(const Cube& c) {
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    if (c[i] / 2 == c[i + 1] / 2) return true;
  return false;
}

bool subset(const Cube& small, const Cube& big) {
  return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

bool eval_indexed(const Prop& p, const std::vector<Atom>& atoms, std::uint32_t bits) {
  switch (p.kind) {
    case PropKind::True: return true;
    case PropKind::False: return false;
    case PropKind::Atom: {
      auto i = static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), *p.atom) - atoms.begin());
      return (bits >> i) & 1u;
    }
    case PropKind::Not: return !eval_indexed(p.children.at(0), atoms, bits);
    case PropKind::And:
      for (const auto& c : p.children)
        if (!eval_indexed(c, atoms, bits)) return false;
      return true;
    case PropKind::Or:
      for (const auto& c : p.children)
        if (eval_indexed(c, atoms, bits)) return true;
      return false;
  }
  return false;
}

}  // namespace

std::optional<std::vector<Cube>> to_dnf(const Prop& p, std::vector<Atom>& atoms, std::size_t max_cubes) {
  return dnf(p, true, atoms, max_cubes);
}

std::vector<Cube> simplify_cubes(std::vector<Cube> cubes) {
  for (auto& c : cubes) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  std::erase_if(cubes, contradictory);

  for (bool changed = true; changed;) {
    changed = false;

    std::vector<Cube> kept;
    for (auto& c : cubes)
      if (std::find(kept.begin(), kept.end(), c) == kept.end()) kept.push_back(std::move(c));
    cubes = std::move(kept);

    std::vector<bool> dead(cubes.size(), false);
    for (std::size_t i = 0; i < cubes.size(); ++i)
      for (std::size_t j = 0; j < cubes.size(); ++j)
        if (i != j && !dead[j] && !dead[i] && subset(cubes[j], cubes[i])) dead[i] = true;
    std::vector<Cube> alive;
    for (std::size_t i = 0; i < cubes.size(); ++i)
      if (!dead[i]) alive.push_back(std::move(cubes[i]));
    if (alive.size() != cubes.size()) changed = true;
    cubes = std::move(alive);

    for (std::size_t i = 0; i < cubes.size() && !changed; ++i) {
      for (int l : cubes[i]) {
        Cube rest;
        for (int x : cubes[i])
          if (x != l) rest.push_back(x);
        const int neg = l ^ 1;
        for (std::size_t j = 0; j < cubes.size(); ++j) {
          if (j == i) continue;
          auto& d = cubes[j];
          auto at = std::find(d.begin(), d.end(), neg);
          if (at == d.end() || !subset(rest, d)) continue;
          d.erase(at);
          changed = true;
        }
        if (changed) break;
      }
    }
  }
  return cubes;
}

Prop cubes_to_prop(const std::vector<Cube>& cubes, const std::vector<Atom>& atoms) {
  std::vector<Prop> disj;
  for (const auto& c : cubes) {
    std::vector<Prop> conj;
    for (int l : c) {
      Prop a = p_atom(atoms.at(static_cast<std::size_t>(l / 2)));
      conj.push_back(l % 2 ? p_not(std::move(a)) : std::move(a));
    }
    disj.push_back(p_and(std::move(conj)));
  }
  return p_or(std::move(disj));
}

bool propositionally_equivalent(const Prop& a, const Prop& b) {
  std::vector<Atom> atoms;
  collect_atoms(a, atoms);
  collect_atoms(b, atoms);
  if (atoms.size() > kMaxAtoms) throw std::length_error("too many atoms for a truth-table check");
  const std::uint32_t rows = 1u << atoms.size();
  for (std::uint32_t bits = 0; bits < rows; ++bits)
    if (eval_indexed(a, atoms, bits) != eval_indexed(b, atoms, bits)) return false;
  return true;
}

Prop simplify_prop(const Prop& p) {
  std::vector<Atom> atoms;
  collect_atoms(p, atoms);
  if (atoms.size() > kMaxAtoms) return p;
  auto cubes = to_dnf(p, atoms);
  if (!cubes) return p;
  auto simplified = simplify_cubes(*cubes);
  if (simplified == *cubes) return p;
  return cubes_to_prop(simplified, atoms);
}

WpFormula simplify_formula(const WpFormula& f) {
  WpFormula out;
  for (const auto& c : f.clauses) {
    Prop body = simplify_prop(c.body);
    if (!propositionally_equivalent(body, c.body))
      throw std::logic_error("simplification changed the meaning of a clause body");
    if (body.kind == PropKind::False) continue;
    out.clauses.push_back(Clause{c.pattern, std::move(body)});
  }
  return out;
}

}  // namespace scriptwp
