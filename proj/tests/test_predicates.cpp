#include <gtest/gtest.h>

#include "scriptwp/fixtures.hpp"
#include "scriptwp/hoare.hpp"
#include "scriptwp/predicates.hpp"
#include "test_support.hpp"

using namespace scriptwp;

namespace {

const CryptoOracle kToy = toy_oracle();

StackState at(Stack st, Nat time = 0, Nat msg = 10) { return StackState{std::move(time), std::move(msg), std::move(st)}; }

Domain small_domain() {
  Domain d;
  d.max_height = 4;
  d.max_value = 3;
  d.msgs = {0, 1};
  d.times = {0, 2};
  d.extra_values = {7, 13};
  return d;
}

}  // namespace

TEST(EvalFormula, Examples) {
  EXPECT_TRUE(eval_formula(kToy, wp_p2pkh(7), at({3, 13})));
  EXPECT_FALSE(eval_formula(kToy, wp_p2pkh(7), at({3})));
  EXPECT_FALSE(eval_formula(kToy, wp_p2pkh(7), at({3, 12})));
  EXPECT_FALSE(eval_formula(kToy, wp_p2pkh(7), at({4, 14})));
  EXPECT_FALSE(eval_formula(kToy, accept_formula(), at({})));
  EXPECT_FALSE(eval_formula(kToy, false_formula(), at({1})));
  EXPECT_TRUE(eval_formula(kToy, true_formula(), at({})));
}

TEST(EvalFormula, ClauseSemanticsIsExistential) {
  // Two overlapping clauses; the state fails the first but satisfies the second.
  WpFormula f{{Clause{StackPattern{1, {}}, p_atom(eq(var(0), lit(5)))},
               Clause{StackPattern{2, {}}, p_atom(eq(var(1), lit(6)))}}};
  EXPECT_TRUE(eval_formula(kToy, f, at({1, 6})));
  EXPECT_TRUE(eval_formula(kToy, f, at({5})));
  EXPECT_FALSE(eval_formula(kToy, f, at({1, 7})));
}

TEST(AcceptState, Examples) {
  EXPECT_FALSE(accept_state(at({})));
  EXPECT_FALSE(accept_state(at({0, 9})));
  EXPECT_TRUE(accept_state(at({2})));
}

TEST(LiftPredicate, Examples) {
  EXPECT_FALSE(lift_predicate(true_everywhere(), ExecOutcome::failed()));
  EXPECT_TRUE(lift_predicate(accept_state, ExecOutcome::succeeded(at({1}))));
  EXPECT_FALSE(lift_predicate(accept_state, ExecOutcome::succeeded(at({}))));
}

TEST(SemanticWp, Examples) {
  const Script drop3{Opcode::Drop, Opcode::Drop, Opcode::Drop};
  const auto wp = semantic_wp(kToy, drop3, accept_state);
  EXPECT_TRUE(wp(at({9, 9, 9, 5})));
  EXPECT_FALSE(wp(at({1, 2, 3})));
  const auto id = semantic_wp(kToy, {}, accept_state);
  for (const auto& s : enumerate_states(small_domain())) ASSERT_EQ(id(s), accept_state(s));
}

TEST(SemanticWp, Compositional) {
  std::mt19937_64 rng(21);
  const Domain d = small_domain();
  const auto states = enumerate_states(d);
  for (int i = 0; i < 40; ++i) {
    const Script p = gen::random_script(rng, 4, 3), q = gen::random_script(rng, 4, 3);
    const auto whole = semantic_wp(kToy, concat(p, q), accept_state);
    const auto split = semantic_wp(kToy, p, semantic_wp(kToy, q, accept_state));
    for (const auto& s : states) ASSERT_EQ(whole(s), split(s));
  }
}

TEST(ConjSp, Examples) {
  const auto g = formula_predicate(kToy, wp_p2pkh(7));
  const auto d = small_domain();
  for (const auto& s : enumerate_states(d)) {
    ASSERT_FALSE(conj_sp(false_everywhere(), g)(s));
    ASSERT_EQ(conj_sp(true_everywhere(), g)(s), g(s));
  }
  const auto c = conj_sp(formula_predicate(kToy, time_check_pre(5)), formula_predicate(kToy, wp_multi_sig24(1, 2, 3, 4)));
  EXPECT_FALSE(c(at({12, 11, 0}, 4)));
  EXPECT_TRUE(c(at({12, 11, 0}, 5)));
}

TEST(ConjFormula, AgreesWithConjSp) {
  std::mt19937_64 rng(22);
  const auto states = enumerate_states(small_domain());
  for (int i = 0; i < 60; ++i) {
    const WpFormula f = gen::random_formula(rng, 3, 2), g = gen::random_formula(rng, 3, 2);
    const auto a = formula_predicate(kToy, conj_formula(f, g));
    const auto b = conj_sp(formula_predicate(kToy, f), formula_predicate(kToy, g));
    for (const auto& s : states) ASSERT_EQ(a(s), b(s));
  }
}

TEST(Properties, FormulaIgnoresCellsBelowPattern) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 2000; ++i) {
    const WpFormula f = gen::random_formula(rng, 3, 2);
    StackState s = gen::random_state(rng, 4, 4);
    const bool before = eval_formula(kToy, f, s);
    std::size_t deepest = 0;
    for (const auto& c : f.clauses) deepest = std::max(deepest, c.pattern.depth);
    if (s.stack.height() < deepest) continue;
    s.stack.push_bottom(std::uniform_int_distribution<unsigned>(0, 9)(rng));
    ASSERT_EQ(eval_formula(kToy, f, s), before) << render_formula(f);
  }
}

TEST(Properties, AcceptDependsOnlyOnTop) {
  std::mt19937_64 rng(24);
  for (int i = 0; i < 1000; ++i) {
    StackState s = gen::random_state(rng, 4, 3);
    const bool before = accept_state(s);
    if (s.stack.empty()) continue;
    s.stack.push_bottom(5);
    s.current_time += 1;
    s.msg += 1;
    ASSERT_EQ(accept_state(s), before);
  }
}

TEST(Properties, LiftIsMonotone) {
  std::mt19937_64 rng(25);
  const auto strong = formula_predicate(kToy, wp_p2pkh(7));
  const auto weak = formula_predicate(kToy, accept1());
  for (int i = 0; i < 2000; ++i) {
    const StackState s = gen::random_state(rng, 4, 13);
    ASSERT_TRUE(!strong(s) || weak(s));
    const auto o = eval_script(kToy, gen::random_script(rng, 3, 13), s);
    ASSERT_TRUE(!lift_predicate(strong, o) || lift_predicate(weak, o));
  }
}

TEST(Validate, RejectsDanglingSlots) {
  WpFormula bad{{Clause{StackPattern{1, {}}, p_atom(positive(var(1)))}}};
  EXPECT_THROW(validate(bad), FormulaError);
  EXPECT_THROW(formula_predicate(kToy, bad), FormulaError);
  EXPECT_NO_THROW(validate(wp_multi_sig24(1, 2, 3, 4)));
}

TEST(Constants, FormulaConstantsAndLocks) {
  EXPECT_EQ(formula_constants(wp_p2pkh(7)), (std::set<Nat>{7}));
  EXPECT_EQ(formula_lock_times(wp_combined(5, 1, 2, 3, 4)), (std::set<Nat>{5}));
  EXPECT_EQ(formula_constants(wp_combined(5, 1, 2, 3, 4)), (std::set<Nat>{1, 2, 3, 4, 5}));
}

TEST(Builders, FoldingAndEqCanonicalOrder) {
  EXPECT_EQ(p_and({p_true(), p_atom(positive(var(0)))}), p_atom(positive(var(0))));
  EXPECT_EQ(p_and({p_false(), p_atom(positive(var(0)))}).kind, PropKind::False);
  EXPECT_EQ(p_or({p_true(), p_atom(positive(var(0)))}).kind, PropKind::True);
  EXPECT_EQ(p_not(p_not(p_atom(positive(var(0))))), p_atom(positive(var(0))));
  EXPECT_EQ(p_and({p_and({p_atom(positive(var(0))), p_atom(positive(var(1)))}), p_atom(positive(var(2)))}).children.size(),
            3u);
  EXPECT_EQ(eq(lit(7), hash_of(var(0))), eq(hash_of(var(0)), lit(7)));
  EXPECT_EQ(eq(var(1), var(0)), eq(var(0), var(1)));
}

TEST(FormulaText, RendersPublishedForms) {
  EXPECT_EQ(render_formula(wp_p2pkh(42)), "stack = pbk :: sig :: rest => hash(pbk) == 42 && signed(sig, pbk)");
  EXPECT_EQ(render_formula(accept_formula()), "stack = x :: rest => x > 0");
  EXPECT_EQ(render_formula(false_formula()), "false");
  EXPECT_EQ(render_formula(time_check_pre(5)), "stack = rest => locktime 5 <= now");
  EXPECT_EQ(render_formula(accept3()),
            "stack = pbkh2 :: pbkh1 :: pbk :: sig :: rest => pbkh2 == pbkh1 && signed(sig, pbk)");
  WpFormula drop3{{Clause{StackPattern{4, {}}, p_atom(positive(var(3)))}}};
  EXPECT_EQ(render_formula(drop3), "stack = a :: b :: c :: d :: rest => d > 0");
}

TEST(FormulaText, DerivedNames) {
  WpFormula f{{Clause{StackPattern{3, {}},
                      p_and({p_not(p_atom(is_signed(var(1), var(0)))), p_atom(eq(hash_of(var(0)), lit(3)))})}}};
  EXPECT_EQ(render_formula(f), "stack = pbk :: sig :: dummy :: rest => hash(pbk) == 3 && !signed(sig, pbk)");
  WpFormula one{{Clause{StackPattern{2, {}}, p_or({p_atom(positive(var(0))), p_not(p_atom(positive(var(1))))})}}};
  EXPECT_EQ(render_formula(one), "stack = a :: b :: rest => a > 0 || !(b > 0)");
}

TEST(FormulaText, ParseExamples) {
  EXPECT_EQ(parse_formula("stack = pbk :: sig :: rest => hash(pbk) == 42 && signed(sig, pbk)"), wp_p2pkh(42));
  EXPECT_EQ(parse_formula("false\n"), false_formula());
  EXPECT_EQ(parse_formula("# comment\n\nstack = x :: rest => x > 0  # trailing\n"), accept_formula());
  EXPECT_EQ(parse_formula("stack = rest => locktime 5 <= now"), time_check_pre(5));
  EXPECT_EQ(parse_formula("stack = rest => true"), true_formula());
}

TEST(FormulaText, ParseErrors) {
  for (const char* bad : {"", "stack = x :: rest => y > 0", "stack = x :: x :: rest => x > 0",
                          "stack = x :: rest => x > 1", "stack = x :: rest => rest > 0", "stack = x => x > 0",
                          "stack = x :: rest => (x > 0", "false\nstack = x :: rest => x > 0",
                          "stack = hash :: rest => true", "stack = x :: rest => x @ 0"}) {
    EXPECT_THROW(parse_formula(bad), FormulaError) << bad;
  }
  try {
    parse_formula("stack = x :: rest => x > 0\nstack = y :: rest => z > 0");
    FAIL();
  } catch (const FormulaError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(FormulaText, RoundTripProperty) {
  std::mt19937_64 rng(26);
  const auto states = enumerate_states(small_domain());
  for (int i = 0; i < 300; ++i) {
    const WpFormula f = gen::random_formula(rng, 4, 3);
    const std::string text = render_formula(f);
    const WpFormula back = parse_formula(text);
    ASSERT_EQ(render_formula(back), text);
    if (i % 10 == 0)
      for (const auto& s : states) ASSERT_EQ(eval_formula(kToy, back, s), eval_formula(kToy, f, s)) << text;
  }
}
