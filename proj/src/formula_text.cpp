#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <sstream>

#include "scriptwp/predicates.hpp"

namespace scriptwp {

namespace {

const std::set<std::string> kReserved = {"stack", "rest", "now", "hash", "signed", "locktime", "true", "false"};

enum class Role { None, Sig, Pbk };

void mark_hashed(const Term& t, std::vector<Role>& roles) {
  if (t.kind == TermKind::Hash && t.args[0].kind == TermKind::Var) {
    auto& r = roles[t.args[0].slot];
    if (r == Role::None) r = Role::Pbk;
  }
  for (const auto& a : t.args) mark_hashed(a, roles);
}

void assign_roles(const Prop& p, std::vector<Role>& roles) {
  if (p.kind == PropKind::Atom) {
    const Atom& a = *p.atom;
    if (a.kind == AtomKind::IsSigned) {
      if (a.args[0].kind == TermKind::Var) roles[a.args[0].slot] = Role::Sig;
      if (a.args[1].kind == TermKind::Var && roles[a.args[1].slot] == Role::None)
        roles[a.args[1].slot] = Role::Pbk;
    }
    for (const auto& t : a.args) mark_hashed(t, roles);
  }
  for (const auto& c : p.children) assign_roles(c, roles);
}

// Names slots of one role; when several share it they are numbered in push
// order, so the deepest gets suffix 1.
void name_group(const std::vector<std::size_t>& slots, const std::string& base,
                std::vector<std::string>& names) {
  if (slots.size() == 1) {
    names[slots[0]] = base;
    return;
  }
  for (std::size_t i = 0; i < slots.size(); ++i) names[slots[i]] = base + std::to_string(slots.size() - i);
}

}  // namespace

std::vector<std::string> clause_names(const Clause& c) {
  if (!c.pattern.names.empty()) return c.pattern.names;
  const std::size_t depth = c.pattern.depth;
  std::vector<std::string> names(depth);
  if (depth == 0) return names;

  std::vector<Role> roles(depth, Role::None);
  assign_roles(c.body, roles);
  std::vector<std::size_t> sigs, pbks, others;
  for (std::size_t i = 0; i < depth; ++i) {
    (roles[i] == Role::Sig ? sigs : roles[i] == Role::Pbk ? pbks : others).push_back(i);
  }
  if (sigs.empty() && pbks.empty()) {
    if (depth == 1) {
      names[0] = "x";
    } else {
      for (std::size_t i = 0; i < depth; ++i)
        names[i] = depth <= 26 ? std::string(1, static_cast<char>('a' + i)) : "v" + std::to_string(i);
    }
    return names;
  }
  if (!sigs.empty()) name_group(sigs, "sig", names);
  if (!pbks.empty()) name_group(pbks, "pbk", names);
  if (!others.empty()) name_group(others, "dummy", names);
  return names;
}

namespace {

std::string render_term(const Term& t, const std::vector<std::string>& names) {
  switch (t.kind) {
    case TermKind::Var: return t.slot < names.size() ? names[t.slot] : "v" + std::to_string(t.slot);
    case TermKind::Lit: return to_string(t.lit);
    case TermKind::Hash: return "hash(" + render_term(t.args[0], names) + ")";
    case TermKind::Now: return "now";
  }
  return {};
}

std::string render_atom(const Atom& a, const std::vector<std::string>& names) {
  switch (a.kind) {
    case AtomKind::Eq: return render_term(a.args[0], names) + " == " + render_term(a.args[1], names);
    case AtomKind::IsSigned:
      return "signed(" + render_term(a.args[0], names) + ", " + render_term(a.args[1], names) + ")";
    case AtomKind::Positive: return render_term(a.args[0], names) + " > 0";
    case AtomKind::TimeLe: return "locktime " + render_term(a.args[0], names) + " <= now";
  }
  return {};
}

const char* atom_kind_name(AtomKind k) {
  switch (k) {
    case AtomKind::Eq: return "Eq";
    case AtomKind::IsSigned: return "IsSigned";
    case AtomKind::Positive: return "Positive";
    case AtomKind::TimeLe: return "TimeLe";
  }
  return "";
}

std::optional<std::size_t> first_var_of(const Term& t) {
  if (t.kind == TermKind::Var) return t.slot;
  for (const auto& a : t.args)
    if (auto v = first_var_of(a)) return v;
  return std::nullopt;
}

// Sort key for conjuncts: first variable index, constructor name, text.
struct ConjKey {
  std::size_t group;
  std::size_t first_var;
  std::string ctor;
  std::string text;
  auto operator<=>(const ConjKey&) const = default;
};

std::string render_in(const Prop& p, const std::vector<std::string>& names, PropKind parent);

ConjKey conj_key(const Prop& p, const std::vector<std::string>& names) {
  const Prop* lit = &p;
  if (p.kind == PropKind::Not && p.children[0].kind == PropKind::Atom) lit = &p.children[0];
  if (lit->kind != PropKind::Atom) return {1, 0, {}, render_in(p, names, PropKind::And)};
  std::size_t fv = std::numeric_limits<std::size_t>::max();
  for (const auto& t : lit->atom->args)
    if (auto v = first_var_of(t)) {
      fv = *v;
      break;
    }
  return {0, fv, atom_kind_name(lit->atom->kind), render_in(p, names, PropKind::And)};
}

std::string render_in(const Prop& p, const std::vector<std::string>& names, PropKind parent) {
  switch (p.kind) {
    case PropKind::True: return "true";
    case PropKind::False: return "false";
    case PropKind::Atom: return render_atom(*p.atom, names);
    case PropKind::Not: {
      const Prop& c = p.children[0];
      if (c.kind == PropKind::Atom && c.atom->kind == AtomKind::IsSigned) return "!" + render_atom(*c.atom, names);
      if (c.kind == PropKind::True || c.kind == PropKind::False) return "!" + render_in(c, names, PropKind::Not);
      return "!(" + render_in(c, names, PropKind::Not) + ")";
    }
    case PropKind::And: {
      std::vector<std::pair<ConjKey, const Prop*>> parts;
      for (const auto& c : p.children) parts.emplace_back(conj_key(c, names), &c);
      std::stable_sort(parts.begin(), parts.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::string out;
      for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " && ";
        const Prop& c = *parts[i].second;
        out += c.kind == PropKind::Or ? "(" + render_in(c, names, PropKind::And) + ")"
                                      : render_in(c, names, PropKind::And);
      }
      return parent == PropKind::Or ? "(" + out + ")" : out;
    }
    case PropKind::Or: {
      std::string out;
      for (std::size_t i = 0; i < p.children.size(); ++i) {
        if (i) out += " || ";
        out += render_in(p.children[i], names, PropKind::Or);
      }
      return out;
    }
  }
  return {};
}

}  // namespace

std::string render_prop(const Prop& p, const std::vector<std::string>& names) {
  return render_in(p, names, PropKind::True);
}

std::string render_clause(const Clause& c) {
  auto names = clause_names(c);
  std::string out = "stack = ";
  for (const auto& n : names) out += n + " :: ";
  out += "rest => ";
  out += render_prop(c.body, names);
  return out;
}

std::string render_formula(const WpFormula& f) {
  if (f.clauses.empty()) return "false";
  std::string out;
  for (std::size_t i = 0; i < f.clauses.size(); ++i) {
    if (i) out += "\n";
    out += render_clause(f.clauses[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view line) {
  static const char* const kSyms[] = {"::", "=>", "==", "<=", "&&", "||", "!", "(", ")", ",", ">", "="};
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(line.substr(i, j - i))});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) ++j;
      out.push_back({Tok::Number, std::string(line.substr(i, j - i))});
      i = j;
    } else {
      bool matched = false;
      for (const char* s : kSyms) {
        std::string_view sv(s);
        if (line.substr(i, sv.size()) == sv) {
          out.push_back({Tok::Sym, std::string(sv)});
          i += sv.size();
          matched = true;
          break;
        }
      }
      if (!matched) throw FormulaError(std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, ""});
  return out;
}

class ClauseParser {
 public:
  explicit ClauseParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Clause clause() {
    expect_ident("stack");
    expect_sym("=");
    std::vector<std::string> names;
    for (;;) {
      std::string n = ident();
      if (n == "rest") break;
      if (kReserved.count(n)) fail("reserved word '" + n + "' used as a stack variable");
      if (std::find(names.begin(), names.end(), n) != names.end()) fail("duplicate stack variable '" + n + "'");
      names.push_back(n);
      expect_sym("::");
    }
    expect_sym("=>");
    names_ = names;
    Prop body = expr();
    if (peek().kind != Tok::End) fail("trailing input '" + peek().text + "'");
    Clause c;
    c.pattern.depth = names.size();
    c.pattern.names = std::move(names);
    c.body = std::move(body);
    return c;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool at_sym(std::string_view s) const { return peek().kind == Tok::Sym && peek().text == s; }
  bool at_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }

  [[noreturn]] void fail(const std::string& why) const { throw FormulaError(why); }

  void expect_sym(std::string_view s) {
    if (!at_sym(s)) fail("expected '" + std::string(s) + "' but found '" + peek().text + "'");
    next();
  }
  void expect_ident(std::string_view s) {
    if (!at_ident(s)) fail("expected '" + std::string(s) + "' but found '" + peek().text + "'");
    next();
  }
  std::string ident() {
    if (peek().kind != Tok::Ident) fail("expected identifier but found '" + peek().text + "'");
    return next().text;
  }

  Prop expr() {
    std::vector<Prop> parts{conj()};
    while (at_sym("||")) {
      next();
      parts.push_back(conj());
    }
    return parts.size() == 1 ? std::move(parts[0]) : p_or(std::move(parts));
  }

  Prop conj() {
    std::vector<Prop> parts{unary()};
    while (at_sym("&&")) {
      next();
      parts.push_back(unary());
    }
    return parts.size() == 1 ? std::move(parts[0]) : p_and(std::move(parts));
  }

  Prop unary() {
    if (at_sym("!")) {
      next();
      return p_not(unary());
    }
    if (at_sym("(")) {
      next();
      Prop p = expr();
      expect_sym(")");
      return p;
    }
    if (at_ident("true")) {
      next();
      return p_true();
    }
    if (at_ident("false")) {
      next();
      return p_false();
    }
    return p_atom(atom());
  }

  Atom atom() {
    if (at_ident("signed")) {
      next();
      expect_sym("(");
      Term sig = term();
      expect_sym(",");
      Term pbk = term();
      expect_sym(")");
      return is_signed(std::move(sig), std::move(pbk));
    }
    if (at_ident("locktime")) {
      next();
      Term lock = term();
      expect_sym("<=");
      expect_ident("now");
      return time_le(std::move(lock));
    }
    Term lhs = term();
    if (at_sym("==")) {
      next();
      return eq(std::move(lhs), term());
    }
    if (at_sym(">")) {
      next();
      if (peek().kind != Tok::Number || peek().text != "0") fail("only comparisons '> 0' are supported");
      next();
      return positive(std::move(lhs));
    }
    fail("expected '==' or '> 0' after term, found '" + peek().text + "'");
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return lit(*parse_nat(next().text));
    if (t.kind != Tok::Ident) fail("expected term but found '" + t.text + "'");
    if (t.text == "hash") {
      next();
      expect_sym("(");
      Term inner = term();
      expect_sym(")");
      return hash_of(std::move(inner));
    }
    if (t.text == "now") {
      next();
      return now();
    }
    if (t.text == "rest") fail("the rest-of-stack binder cannot appear in a clause body");
    auto it = std::find(names_.begin(), names_.end(), t.text);
    if (it == names_.end()) fail("unbound variable '" + t.text + "'");
    next();
    return var(static_cast<std::size_t>(it - names_.begin()));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> names_;
};

}  // namespace

WpFormula parse_formula(std::string_view text) {
  WpFormula f;
  bool saw_false = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto toks = tokenize(line);
    if (toks.size() == 1) continue;
    if (toks.size() == 2 && toks[0].kind == Tok::Ident && toks[0].text == "false") {
      saw_false = true;
      continue;
    }
    try {
      f.clauses.push_back(ClauseParser(std::move(toks)).clause());
    } catch (const FormulaError& e) {
      throw FormulaError("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == text.size()) break;
  }
  if (f.clauses.empty() && !saw_false) throw FormulaError("empty formula (write 'false' for the unsatisfiable one)");
  if (saw_false && !f.clauses.empty()) throw FormulaError("'false' cannot be combined with clauses");
  return f;
}

}  // namespace scriptwp
