#include "scriptwp/symexec.hpp"

#include <algorithm>
#include <map>

#include "scriptwp/script_text.hpp"
#include "scriptwp/simplify.hpp"

namespace scriptwp {

SymExpr s_var(int id) {
  SymExpr e;
  e.kind = SymKind::Var;
  e.id = id;
  return e;
}

SymExpr s_lit(Nat n) {
  SymExpr e;
  e.kind = SymKind::Lit;
  e.lit = std::move(n);
  return e;
}

SymExpr s_hash(SymExpr of) {
  SymExpr e;
  e.kind = SymKind::Hash;
  e.args.push_back(std::move(of));
  return e;
}

SymExpr s_compare_eq(SymExpr a, SymExpr b) {
  if (a.kind == SymKind::Lit && b.kind == SymKind::Lit) return s_lit(compare_naturals(a.lit, b.lit));
  if (a == b) return s_lit(1);
  SymExpr e;
  e.kind = SymKind::CompareEq;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

SymExpr s_bool_to_nat(SymExpr b) {
  SymExpr e;
  e.kind = SymKind::BoolToNat;
  e.args.push_back(std::move(b));
  return e;
}

SymExpr s_time() {
  SymExpr e;
  e.kind = SymKind::TimeVar;
  return e;
}

SymExpr s_is_signed(SymExpr sig, SymExpr pbk) {
  SymExpr e;
  e.kind = SymKind::IsSigned;
  e.args.push_back(std::move(sig));
  e.args.push_back(std::move(pbk));
  return e;
}

SymExpr s_le_time(SymExpr lock) {
  SymExpr e;
  e.kind = SymKind::LeTime;
  e.args.push_back(std::move(lock));
  return e;
}

std::string render_sym(const SymExpr& e) {
  switch (e.kind) {
    case SymKind::Var: return "v" + std::to_string(e.id);
    case SymKind::Lit: return to_string(e.lit);
    case SymKind::Hash: return "hash(" + render_sym(e.args[0]) + ")";
    case SymKind::CompareEq: return "cmp(" + render_sym(e.args[0]) + ", " + render_sym(e.args[1]) + ")";
    case SymKind::BoolToNat: return "bool(" + render_sym(e.args[0]) + ")";
    case SymKind::TimeVar: return "now";
    case SymKind::IsSigned: return "signed(" + render_sym(e.args[0]) + ", " + render_sym(e.args[1]) + ")";
    case SymKind::LeTime: return "(" + render_sym(e.args[0]) + " <= now)";
  }
  return {};
}

std::string render_sym_stack(const SymStack& st) {
  std::string out;
  for (const auto& e : st.known) out += render_sym(e) + " :: ";
  return out + "t" + std::to_string(st.tail);
}

namespace {

struct Facts {
  std::map<std::string, bool> nat_succ;
  std::map<std::string, bool> bools;
};

using Cont = std::function<TreePtr(SymStack, const Facts&)>;
using Branch = std::function<TreePtr(const Facts&)>;

TreePtr leaf_fail() {
  static const TreePtr node = std::make_shared<TreeNode>();
  return node;
}

TreePtr leaf_ok(SymStack st) {
  auto node = std::make_shared<TreeNode>();
  node->kind = NodeKind::LeafOk;
  node->result = std::move(st);
  return node;
}

SymExpr pop(SymStack& st) {
  SymExpr e = std::move(st.known.front());
  st.known.erase(st.known.begin());
  return e;
}

void push(SymStack& st, SymExpr e) { st.known.insert(st.known.begin(), std::move(e)); }

class Builder {
 public:
  explicit Builder(SymContext ctx) : ctx_(ctx) {}

  SymContext context() const { return ctx_; }

  TreePtr run(const Script& script, std::size_t i, SymStack st, const Facts& f) {
    if (i == script.size()) return leaf_ok(std::move(st));
    return step(script[i], std::move(st), f,
                [this, &script, i](SymStack next, const Facts& g) { return run(script, i + 1, std::move(next), g); });
  }

  TreePtr step(const Instruction& instr, SymStack st, const Facts& f, const Cont& k) {
    switch (instr.op()) {
      case Opcode::Dup:
        return ensure(1, std::move(st), f, [k](SymStack s, const Facts& g) {
          push(s, s.known.front());
          return k(std::move(s), g);
        });
      case Opcode::Hash:
        return ensure(1, std::move(st), f, [k](SymStack s, const Facts& g) {
          s.known.front() = s_hash(std::move(s.known.front()));
          return k(std::move(s), g);
        });
      case Opcode::Equal:
        return ensure(2, std::move(st), f, [k](SymStack s, const Facts& g) {
          SymExpr a = pop(s);
          SymExpr b = pop(s);
          push(s, s_compare_eq(std::move(a), std::move(b)));
          return k(std::move(s), g);
        });
      case Opcode::Verify:
        return ensure(1, std::move(st), f, [this, k](SymStack s, const Facts& g) {
          SymExpr top = pop(s);
          return branch_nat(
              top, g, [](const Facts&) { return leaf_fail(); }, [k, s](const Facts& h) { return k(s, h); });
        });
      case Opcode::CheckSig:
        return ensure(2, std::move(st), f, [k](SymStack s, const Facts& g) {
          SymExpr pbk = pop(s);
          SymExpr sig = pop(s);
          push(s, s_bool_to_nat(s_is_signed(std::move(sig), std::move(pbk))));
          return k(std::move(s), g);
        });
      case Opcode::CheckLockTimeVerify:
        return ensure(1, std::move(st), f, [this, k](SymStack s, const Facts& g) {
          return branch_bool(
              s_le_time(s.known.front()), g, [k, s](const Facts& h) { return k(s, h); },
              [](const Facts&) { return leaf_fail(); });
        });
      case Opcode::Drop:
        return ensure(1, std::move(st), f, [k](SymStack s, const Facts& g) {
          pop(s);
          return k(std::move(s), g);
        });
      case Opcode::Push:
        push(st, s_lit(instr.value()));
        return k(std::move(st), f);
      case Opcode::MultiSig:
        return multisig(std::move(st), f, k);
    }
    return leaf_fail();
  }

 private:
  // Guarantees k known cells, splitting the unknown tail one cell at a time.
  TreePtr ensure(std::size_t need, SymStack st, const Facts& f, const Cont& k) {
    if (st.known.size() >= need) return k(std::move(st), f);
    auto node = std::make_shared<TreeNode>();
    node->kind = NodeKind::SplitStack;
    node->tail = st.tail;
    node->head_var = ctx_.next_var++;
    node->new_tail = ctx_.next_tail++;
    node->first = leaf_fail();
    st.known.push_back(s_var(node->head_var));
    st.tail = node->new_tail;
    node->second = ensure(need, std::move(st), f, k);
    return node;
  }

  TreePtr branch_nat(const SymExpr& e, const Facts& f, const Branch& zero, const Branch& succ) {
    if (e.kind == SymKind::Lit) return e.lit == 0 ? zero(f) : succ(f);
    if (e.kind == SymKind::BoolToNat) return branch_bool(e.args[0], f, succ, zero);
    const std::string key = render_sym(e);
    if (auto it = f.nat_succ.find(key); it != f.nat_succ.end()) return it->second ? succ(f) : zero(f);
    auto node = std::make_shared<TreeNode>();
    node->kind = NodeKind::SplitNat;
    node->expr = e;
    node->head_var = ctx_.next_var++;
    Facts fz = f;
    fz.nat_succ[key] = false;
    node->first = zero(fz);
    Facts fs = f;
    fs.nat_succ[key] = true;
    node->second = succ(fs);
    return node;
  }

  TreePtr branch_bool(const SymExpr& e, const Facts& f, const Branch& on_true, const Branch& on_false) {
    const std::string key = render_sym(e);
    if (auto it = f.bools.find(key); it != f.bools.end()) return it->second ? on_true(f) : on_false(f);
    auto node = std::make_shared<TreeNode>();
    node->kind = NodeKind::SplitBool;
    node->expr = e;
    Facts ft = f;
    ft.bools[key] = true;
    node->first = on_true(ft);
    Facts ff = f;
    ff.bools[key] = false;
    node->second = on_false(ff);
    return node;
  }

  using CountCont = std::function<TreePtr(std::size_t, const Facts&)>;

  // Counts must be literal, or 0/1-valued results that can be split on.
  TreePtr resolve_count(const SymExpr& cell, const Facts& f, const CountCont& k) {
    if (cell.kind == SymKind::Lit) {
      auto n = to_size(cell.lit);
      if (!n) throw UnsupportedConstruct("multisig count too large: " + to_string(cell.lit));
      return k(*n, f);
    }
    if (cell.kind == SymKind::CompareEq || cell.kind == SymKind::BoolToNat) {
      return branch_nat(
          cell, f, [k](const Facts& g) { return k(0, g); }, [k](const Facts& g) { return k(1, g); });
    }
    throw UnsupportedConstruct("symbolic multisig count " + render_sym(cell));
  }

  // Pops `count` cells and returns them in push order.
  static std::vector<SymExpr> take_reversed(SymStack& s, std::size_t count) {
    std::vector<SymExpr> out(s.known.begin(), s.known.begin() + static_cast<std::ptrdiff_t>(count));
    s.known.erase(s.known.begin(), s.known.begin() + static_cast<std::ptrdiff_t>(count));
    std::reverse(out.begin(), out.end());
    return out;
  }

  TreePtr multisig(SymStack st, const Facts& f, const Cont& k) {
    return ensure(1, std::move(st), f, [this, k](SymStack s, const Facts& g) {
      SymExpr ncell = pop(s);
      return resolve_count(ncell, g, [this, k, s](std::size_t n, const Facts& g2) {
        return ensure(n, s, g2, [this, k, n](SymStack s2, const Facts& g3) {
          auto pbks = take_reversed(s2, n);
          return ensure(1, std::move(s2), g3, [this, k, pbks](SymStack s3, const Facts& g4) {
            SymExpr mcell = pop(s3);
            return resolve_count(mcell, g4, [this, k, pbks, s3](std::size_t m, const Facts& g5) {
              // m signatures plus the dummy cell.
              return ensure(m + 1, s3, g5, [this, k, pbks, m](SymStack s4, const Facts& g6) {
                auto sigs = take_reversed(s4, m);
                pop(s4);
                return compare_sigs(sigs, pbks, 0, 0, std::move(s4), g6, k);
              });
            });
          });
        });
      });
    });
  }

  TreePtr compare_sigs(const std::vector<SymExpr>& sigs, const std::vector<SymExpr>& pbks, std::size_t i,
                       std::size_t j, SymStack st, const Facts& f, const Cont& k) {
    if (i == sigs.size()) {
      push(st, s_lit(1));
      return k(std::move(st), f);
    }
    if (j == pbks.size()) {
      push(st, s_lit(0));
      return k(std::move(st), f);
    }
    return branch_bool(
        s_is_signed(sigs[i], pbks[j]), f,
        [&, i, j, st](const Facts& g) { return compare_sigs(sigs, pbks, i + 1, j + 1, st, g, k); },
        [&, i, j, st](const Facts& g) { return compare_sigs(sigs, pbks, i, j + 1, st, g, k); });
  }

  SymContext ctx_;
};

}  // namespace

DecisionTree sym_step(const Instruction& instr, const SymStack& st, SymContext ctx) {
  Builder b(ctx);
  TreePtr root = b.step(instr, st, Facts{}, [](SymStack s, const Facts&) { return leaf_ok(std::move(s)); });
  return DecisionTree{root, b.context().next_var, b.context().next_tail};
}

DecisionTree sym_eval(const Script& script, const SymStack& initial, SymContext ctx) {
  Builder b(ctx);
  TreePtr root = b.run(script, 0, initial, Facts{});
  return DecisionTree{root, b.context().next_var, b.context().next_tail};
}

DecisionTree sym_eval(const Script& script) { return sym_eval(script, SymStack{{}, 0}, SymContext{}); }

namespace {

void render_node(const TreeNode& n, int indent, std::string& out) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  switch (n.kind) {
    case NodeKind::LeafFail: out += "fail\n"; return;
    case NodeKind::LeafOk: out += "ok " + render_sym_stack(n.result) + "\n"; return;
    case NodeKind::SplitStack:
      out += "split t" + std::to_string(n.tail) + "\n";
      out += pad + "  empty: ";
      render_node(*n.first, indent + 1, out);
      out += pad + "  cons v" + std::to_string(n.head_var) + " :: t" + std::to_string(n.new_tail) + ": ";
      render_node(*n.second, indent + 1, out);
      return;
    case NodeKind::SplitNat:
      out += "split " + render_sym(n.expr) + "\n";
      out += pad + "  zero: ";
      render_node(*n.first, indent + 1, out);
      out += pad + "  succ v" + std::to_string(n.head_var) + ": ";
      render_node(*n.second, indent + 1, out);
      return;
    case NodeKind::SplitBool:
      out += "split " + render_sym(n.expr) + "\n";
      out += pad + "  true: ";
      render_node(*n.first, indent + 1, out);
      out += pad + "  false: ";
      render_node(*n.second, indent + 1, out);
      return;
  }
}

std::size_t count_nodes(const TreeNode& n) {
  std::size_t c = 1;
  if (n.first) c += count_nodes(*n.first);
  if (n.second) c += count_nodes(*n.second);
  return c;
}

}  // namespace

std::string render_tree(const DecisionTree& tree) {
  std::string out;
  render_node(*tree.root, 0, out);
  return out;
}

std::size_t node_count(const DecisionTree& tree) { return count_nodes(*tree.root); }

std::string render_path_atom(const PathAtom& a) {
  switch (a.kind) {
    case PathAtomKind::StackEmpty: return "t" + std::to_string(a.tail) + " = []";
    case PathAtomKind::StackCons:
      return "t" + std::to_string(a.tail) + " = v" + std::to_string(a.head_var) + " :: t" + std::to_string(a.new_tail);
    case PathAtomKind::NatIsZero: return render_sym(a.expr) + " = 0";
    case PathAtomKind::NatIsSucc: return render_sym(a.expr) + " = suc v" + std::to_string(a.head_var);
    case PathAtomKind::BoolIs: return render_sym(a.expr) + (a.value ? " = true" : " = false");
  }
  return {};
}

namespace {

class PathWalker {
 public:
  explicit PathWalker(const DecisionTree& t) : next_var_(t.next_var), next_tail_(t.next_tail) {}

  std::vector<PathSummary> run(const TreeNode& root) {
    walk(root);
    return std::move(out_);
  }

 private:
  void with(PathAtom a, const TreeNode& next) {
    atoms_.push_back(std::move(a));
    walk(next);
    atoms_.pop_back();
  }

  void walk(const TreeNode& n) {
    switch (n.kind) {
      case NodeKind::LeafFail: return;
      case NodeKind::LeafOk: accept(n.result); return;
      case NodeKind::SplitStack: {
        PathAtom empty;
        empty.kind = PathAtomKind::StackEmpty;
        empty.tail = n.tail;
        with(empty, *n.first);
        PathAtom cons;
        cons.kind = PathAtomKind::StackCons;
        cons.tail = n.tail;
        cons.head_var = n.head_var;
        cons.new_tail = n.new_tail;
        with(cons, *n.second);
        return;
      }
      case NodeKind::SplitNat: {
        PathAtom zero;
        zero.kind = PathAtomKind::NatIsZero;
        zero.expr = n.expr;
        with(zero, *n.first);
        PathAtom succ;
        succ.kind = PathAtomKind::NatIsSucc;
        succ.expr = n.expr;
        succ.head_var = n.head_var;
        with(succ, *n.second);
        return;
      }
      case NodeKind::SplitBool: {
        PathAtom t;
        t.kind = PathAtomKind::BoolIs;
        t.expr = n.expr;
        t.value = true;
        with(t, *n.first);
        PathAtom f = t;
        f.value = false;
        with(f, *n.second);
        return;
      }
    }
  }

  // Value already decided on this path, if any.
  std::optional<bool> known_succ(const SymExpr& e) const {
    for (const auto& a : atoms_) {
      if (a.expr != e) continue;
      if (a.kind == PathAtomKind::NatIsSucc) return true;
      if (a.kind == PathAtomKind::NatIsZero) return false;
    }
    return std::nullopt;
  }

  std::optional<bool> known_bool(const SymExpr& e) const {
    for (const auto& a : atoms_)
      if (a.kind == PathAtomKind::BoolIs && a.expr == e) return a.value;
    return std::nullopt;
  }

  void emit(const SymStack& result, std::vector<PathAtom> extra) {
    PathSummary p;
    p.atoms = atoms_;
    p.atoms.insert(p.atoms.end(), extra.begin(), extra.end());
    p.result = result;
    out_.push_back(std::move(p));
  }

  void accept(const SymStack& result) {
    std::vector<PathAtom> extra;
    SymExpr top;
    if (result.known.empty()) {
      PathAtom cons;
      cons.kind = PathAtomKind::StackCons;
      cons.tail = result.tail;
      cons.head_var = next_var_++;
      cons.new_tail = next_tail_++;
      top = s_var(cons.head_var);
      extra.push_back(cons);
    } else {
      top = result.known.front();
    }

    if (top.kind == SymKind::Lit) {
      if (top.lit > 0) emit(result, extra);
      return;
    }
    if (top.kind == SymKind::BoolToNat) {
      const SymExpr& b = top.args[0];
      if (auto v = known_bool(b)) {
        if (*v) emit(result, extra);
        return;
      }
      PathAtom a;
      a.kind = PathAtomKind::BoolIs;
      a.expr = b;
      a.value = true;
      extra.push_back(a);
      emit(result, extra);
      return;
    }
    if (auto v = known_succ(top)) {
      if (*v) emit(result, extra);
      return;
    }
    PathAtom a;
    a.kind = PathAtomKind::NatIsSucc;
    a.expr = top;
    a.head_var = next_var_++;
    extra.push_back(a);
    emit(result, extra);
  }

  int next_var_;
  int next_tail_;
  std::vector<PathAtom> atoms_;
  std::vector<PathSummary> out_;
};

Term to_term(const SymExpr& e, const std::map<int, std::size_t>& slot_of) {
  switch (e.kind) {
    case SymKind::Var: {
      auto it = slot_of.find(e.id);
      if (it == slot_of.end())
        throw UnsupportedConstruct("variable v" + std::to_string(e.id) + " is not a stack cell of the input");
      return var(it->second);
    }
    case SymKind::Lit: return lit(e.lit);
    case SymKind::Hash: return hash_of(to_term(e.args[0], slot_of));
    case SymKind::TimeVar: return now();
    default: throw UnsupportedConstruct("no formula counterpart for value " + render_sym(e));
  }
}

Prop nat_literal(const SymExpr& e, bool succ, const std::map<int, std::size_t>& slot_of) {
  Atom a = e.kind == SymKind::CompareEq ? eq(to_term(e.args[0], slot_of), to_term(e.args[1], slot_of))
                                        : positive(to_term(e, slot_of));
  return succ ? p_atom(std::move(a)) : p_not(p_atom(std::move(a)));
}

Prop bool_literal(const SymExpr& e, bool value, const std::map<int, std::size_t>& slot_of) {
  Atom a;
  if (e.kind == SymKind::IsSigned) a = is_signed(to_term(e.args[0], slot_of), to_term(e.args[1], slot_of));
  else if (e.kind == SymKind::LeTime) a = time_le(to_term(e.args[0], slot_of));
  else throw UnsupportedConstruct("no formula counterpart for condition " + render_sym(e));
  return value ? p_atom(std::move(a)) : p_not(p_atom(std::move(a)));
}

}  // namespace

std::vector<PathSummary> extract_accept_paths(const DecisionTree& tree) {
  return PathWalker(tree).run(*tree.root);
}

WpFormula paths_to_formula(const std::vector<PathSummary>& paths) {
  std::map<std::size_t, std::vector<Prop>> by_depth;
  for (const auto& p : paths) {
    std::map<int, const PathAtom*> split_of;
    for (const auto& a : p.atoms)
      if (a.kind == PathAtomKind::StackCons || a.kind == PathAtomKind::StackEmpty) split_of[a.tail] = &a;

    std::map<int, std::size_t> slot_of;
    std::size_t depth = 0;
    for (int t = 0;;) {
      auto it = split_of.find(t);
      if (it == split_of.end()) break;
      if (it->second->kind == PathAtomKind::StackEmpty)
        throw UnsupportedConstruct("accepting path requires an exact stack height");
      slot_of[it->second->head_var] = depth++;
      t = it->second->new_tail;
    }

    std::vector<Prop> lits;
    for (const auto& a : p.atoms) {
      switch (a.kind) {
        case PathAtomKind::NatIsZero: lits.push_back(nat_literal(a.expr, false, slot_of)); break;
        case PathAtomKind::NatIsSucc: lits.push_back(nat_literal(a.expr, true, slot_of)); break;
        case PathAtomKind::BoolIs: lits.push_back(bool_literal(a.expr, a.value, slot_of)); break;
        default: break;
      }
    }
    by_depth[depth].push_back(p_and(std::move(lits)));
  }

  WpFormula f;
  for (auto& [depth, conjs] : by_depth) f.clauses.push_back(Clause{StackPattern{depth, {}}, p_or(std::move(conjs))});
  return f;
}

WpFormula derive_wp(const Script& script) {
  return simplify_formula(paths_to_formula(extract_accept_paths(sym_eval(script))));
}

namespace {

struct Env {
  std::vector<std::optional<Nat>> vars;
  std::vector<std::optional<Stack>> tails;
};

class TreeInterpreter {
 public:
  TreeInterpreter(const CryptoOracle& oracle, const StackState& s) : oracle_(oracle), s_(s) {}

  ExecOutcome run(const TreeNode& n, Env& env) {
    switch (n.kind) {
      case NodeKind::LeafFail: return ExecOutcome::failed();
      case NodeKind::LeafOk: {
        Stack st = *env.tails.at(static_cast<std::size_t>(n.result.tail));
        for (std::size_t i = n.result.known.size(); i-- > 0;) st.push(value(n.result.known[i], env));
        return ExecOutcome::succeeded({s_.current_time, s_.msg, std::move(st)});
      }
      case NodeKind::SplitStack: {
        const Stack& cur = *env.tails.at(static_cast<std::size_t>(n.tail));
        if (cur.empty()) return run(*n.first, env);
        Stack rest = cur;
        set(env.vars, n.head_var, rest.pop());
        set(env.tails, n.new_tail, std::move(rest));
        return run(*n.second, env);
      }
      case NodeKind::SplitNat: {
        Nat v = value(n.expr, env);
        if (v == 0) return run(*n.first, env);
        set(env.vars, n.head_var, Nat(v - 1));
        return run(*n.second, env);
      }
      case NodeKind::SplitBool: return truth(n.expr, env) ? run(*n.first, env) : run(*n.second, env);
    }
    return ExecOutcome::failed();
  }

 private:
  template <typename T>
  static void set(std::vector<std::optional<T>>& v, int id, T x) {
    const auto i = static_cast<std::size_t>(id);
    if (v.size() <= i) v.resize(i + 1);
    v[i] = std::move(x);
  }

  Nat value(const SymExpr& e, const Env& env) const {
    switch (e.kind) {
      case SymKind::Var: return *env.vars.at(static_cast<std::size_t>(e.id));
      case SymKind::Lit: return e.lit;
      case SymKind::Hash: return oracle_.hash(value(e.args[0], env));
      case SymKind::CompareEq: return compare_naturals(value(e.args[0], env), value(e.args[1], env));
      case SymKind::BoolToNat: return bool_to_nat(truth(e.args[0], env));
      case SymKind::TimeVar: return s_.current_time;
      default: throw std::logic_error("boolean expression used as a value: " + render_sym(e));
    }
  }

  bool truth(const SymExpr& e, const Env& env) const {
    switch (e.kind) {
      case SymKind::IsSigned: return oracle_.is_signed(s_.msg, value(e.args[0], env), value(e.args[1], env));
      case SymKind::LeTime: return value(e.args[0], env) <= s_.current_time;
      default: throw std::logic_error("value used as a condition: " + render_sym(e));
    }
  }

  const CryptoOracle& oracle_;
  const StackState& s_;
};

}  // namespace

CompiledScript compile_tree(const CryptoOracle& oracle, DecisionTree tree) {
  return [oracle, tree = std::move(tree)](const StackState& s) {
    Env env;
    env.vars.resize(static_cast<std::size_t>(tree.next_var));
    env.tails.resize(static_cast<std::size_t>(tree.next_tail));
    env.tails[0] = s.stack;
    return TreeInterpreter(oracle, s).run(*tree.root, env);
  };
}

}  // namespace scriptwp
