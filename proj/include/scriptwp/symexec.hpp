#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "scriptwp/predicates.hpp"
#include "scriptwp/vm.hpp"

namespace scriptwp {

// ---------------------------------------------------------------------------
// Symbolic values. One node type covers both the natural-valued terms
// (Var, Lit, Hash, CompareEq, BoolToNat, TimeVar) and the boolean ones
// (IsSigned, LeTime). Identity is structural.
// ---------------------------------------------------------------------------

enum class SymKind { Var, Lit, Hash, CompareEq, BoolToNat, TimeVar, IsSigned, LeTime };

struct SymExpr {
  SymKind kind = SymKind::Lit;
  int id = -1;  // Var
  Nat lit = 0;  // Lit
  std::vector<SymExpr> args;

  bool is_bool() const { return kind == SymKind::IsSigned || kind == SymKind::LeTime; }
  friend bool operator==(const SymExpr&, const SymExpr&) = default;
};

SymExpr s_var(int id);
SymExpr s_lit(Nat n);
SymExpr s_hash(SymExpr of);
/// Folds literal/literal and structurally identical operands to a literal.
SymExpr s_compare_eq(SymExpr a, SymExpr b);
SymExpr s_bool_to_nat(SymExpr b);
SymExpr s_time();
SymExpr s_is_signed(SymExpr sig, SymExpr pbk);
SymExpr s_le_time(SymExpr lock);

/// Unambiguous text form; also the identity key for path facts.
std::string render_sym(const SymExpr& e);

/// Known cells (top first) above an unknown remainder named by `tail`.
struct SymStack {
  std::vector<SymExpr> known;
  int tail = 0;

  friend bool operator==(const SymStack&, const SymStack&) = default;
};

std::string render_sym_stack(const SymStack& st);

enum class NodeKind { SplitStack, SplitNat, SplitBool, LeafFail, LeafOk };

struct TreeNode;
using TreePtr = std::shared_ptr<const TreeNode>;

/// SplitStack: `first` is the empty branch, `second` the cons branch binding
/// head_var and new_tail. SplitNat: `first` zero, `second` succ binding
/// head_var to the predecessor. SplitBool: `first` true, `second` false.
struct TreeNode {
  NodeKind kind = NodeKind::LeafFail;
  int tail = -1;
  int head_var = -1;
  int new_tail = -1;
  SymExpr expr;
  TreePtr first;
  TreePtr second;
  SymStack result;
};

struct DecisionTree {
  TreePtr root;
  /// Fresh-name counters after construction (v<next_var>, t<next_tail> unused).
  int next_var = 0;
  int next_tail = 1;
};

/// Raised for constructs the symbolic engine or formula language cannot express.
class UnsupportedConstruct : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SymContext {
  int next_var = 0;
  int next_tail = 1;
};

/// One instruction on a symbolic stack; successful leaves hold the result.
DecisionTree sym_step(const Instruction& instr, const SymStack& st, SymContext ctx = {});

/// Whole script from a fresh stack (no known cells, tail t0).
DecisionTree sym_eval(const Script& script);
DecisionTree sym_eval(const Script& script, const SymStack& initial, SymContext ctx = {});

std::string render_tree(const DecisionTree& tree);
std::size_t node_count(const DecisionTree& tree);

enum class PathAtomKind { StackEmpty, StackCons, NatIsZero, NatIsSucc, BoolIs };

struct PathAtom {
  PathAtomKind kind = PathAtomKind::StackEmpty;
  int tail = -1;      // StackEmpty / StackCons
  int head_var = -1;  // StackCons head; NatIsSucc predecessor
  int new_tail = -1;  // StackCons
  SymExpr expr;       // Nat/Bool atoms
  bool value = false; // BoolIs

  friend bool operator==(const PathAtom&, const PathAtom&) = default;
};

std::string render_path_atom(const PathAtom& a);

struct PathSummary {
  std::vector<PathAtom> atoms;
  SymStack result;
};

/// One summary per accepting leaf; acceptance of the result (top > 0) is
/// split on here, not in the evaluation tree.
std::vector<PathSummary> extract_accept_paths(const DecisionTree& tree);

/// Disjunction of the paths' conjunctions, one clause per pattern depth.
/// Throws UnsupportedConstruct for atoms outside the formula language.
WpFormula paths_to_formula(const std::vector<PathSummary>& paths);

/// sym_eval -> extract_accept_paths -> paths_to_formula -> simplify_formula.
WpFormula derive_wp(const Script& script);

using CompiledScript = std::function<ExecOutcome(const StackState&)>;

/// Concrete interpreter for a tree produced by sym_eval from a fresh stack.
CompiledScript compile_tree(const CryptoOracle& oracle, DecisionTree tree);

}  // namespace scriptwp
