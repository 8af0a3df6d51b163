#include <gtest/gtest.h>

#include "scriptwp/fixtures.hpp"
#include "scriptwp/hoare.hpp"
#include "scriptwp/script_text.hpp"
#include "scriptwp/symexec.hpp"
#include "test_support.hpp"

using namespace scriptwp;

namespace {

const CryptoOracle kToy = toy_oracle();

Domain closed(const Script& s, const WpFormula& f, std::size_t height) {
  Domain base;
  base.max_height = height;
  return derive_domain(base, kToy, {&s}, {&f});
}

}  // namespace

TEST(FixtureScripts, Shapes) {
  EXPECT_EQ(render_script(script_p2pkh(42)), "OP_DUP OP_HASH 42 OP_EQUAL OP_VERIFY OP_CHECKSIG");
  EXPECT_EQ(render_script(script_p2pkh_faulty(7)), "OP_DUP OP_HASH 7 OP_EQUAL");
  EXPECT_EQ(render_script(op_push_list({3, 1, 4})), "3 1 4");
  EXPECT_EQ(render_script(multi_sig_script(2, {1, 2, 3, 4})), "2 1 2 3 4 4 OP_MULTISIG");
  EXPECT_EQ(render_script(check_time_script(5)), "5 OP_CHECKLOCKTIMEVERIFY OP_DROP");
  EXPECT_EQ(combined_script(5, 1, 2, 3, 4), concat(check_time_script(5), multi_sig_script(2, {1, 2, 3, 4})));
  EXPECT_THROW(multi_sig_script(2, {1, 2}), std::invalid_argument);
  EXPECT_THROW(multi_sig_script(3, {1, 2}), std::invalid_argument);
  EXPECT_NO_THROW(multi_sig_script(0, {1}));
}

TEST(FixtureFormulas, Rendering) {
  EXPECT_EQ(render_formula(wp_p2pkh(42)), "stack = pbk :: sig :: rest => hash(pbk) == 42 && signed(sig, pbk)");
  EXPECT_EQ(render_formula(wp_faulty(7)), "stack = pbk :: rest => hash(pbk) == 7");
  EXPECT_EQ(render_formula(time_check_pre(5)), "stack = rest => locktime 5 <= now");
  EXPECT_EQ(render_formula(accept1()), "stack = pbk :: sig :: rest => signed(sig, pbk)");
  EXPECT_EQ(wp_multi_sig24(1, 2, 3, 4).clauses.at(0).pattern.names,
            (std::vector<std::string>{"sig2", "sig1", "dummy"}));
  EXPECT_EQ(wp_multi_sig24(1, 2, 3, 4).clauses.at(0).body.children.size(), 6u);
  EXPECT_EQ(wp_combined(5, 1, 2, 3, 4), conj_formula(time_check_pre(5), wp_multi_sig24(1, 2, 3, 4)));
  for (const auto& f : {wp_p2pkh(42), wp_faulty(7), wp_multi_sig24(1, 2, 3, 4), wp_combined(5, 1, 2, 3, 4),
                        wp_check_time(5), accept1(), accept2(), accept3(), accept4(42), accept5(42)})
    EXPECT_NO_THROW(validate(f));
}

TEST(P2pkhDecoded, Examples) {
  EXPECT_EQ(p2pkh_decoded(kToy, 7, 10, Stack{3, 13, 5}), (Stack{1, 5}));
  EXPECT_EQ(p2pkh_decoded(kToy, 7, 10, Stack{3, 14}), (Stack{0}));
  EXPECT_EQ(p2pkh_decoded(kToy, 7, 10, Stack{4, 14}), std::nullopt);
  EXPECT_EQ(p2pkh_decoded(kToy, 7, 10, Stack{3}), std::nullopt);
  EXPECT_EQ(p2pkh_decoded(kToy, 7, 10, Stack{}), std::nullopt);
}

TEST(P2pkhDecoded, AgreesWithInterpreter) {
  for (const Nat h : {Nat(7), Nat(42)}) {
    const Script s = script_p2pkh(h);
    const Domain d = closed(s, wp_p2pkh(h), 5);
    for (const auto& st : enumerate_states(d)) {
      const auto decoded = p2pkh_decoded(kToy, h, st.msg, st.stack);
      const ExecOutcome o = eval_script(kToy, s, st);
      ASSERT_EQ(decoded.has_value(), o.ok()) << to_string(st);
      if (decoded) ASSERT_EQ(*decoded, o.state().stack);
    }
  }
}

TEST(FixtureWps, MatchSemanticWp) {
  for (const auto& e : fixture_entries()) {
    const Domain d = closed(e.script, e.wp, e.name.find("p2ms") != std::string::npos || e.name == "combined" ? 4 : 5);
    const Verdict v = check_iff_triple(kToy, formula_predicate(kToy, e.wp), e.script, accept_state, d);
    EXPECT_TRUE(v.holds) << e.name << ": " << to_string(v);
  }
}

TEST(FixtureWps, DerivedEquivalent) {
  for (const auto& e : fixture_entries()) {
    const WpFormula derived = derive_wp(e.script);
    const Domain d = closed(e.script, e.wp, 4);
    const Verdict v = check_pred_equiv(formula_predicate(kToy, derived), formula_predicate(kToy, e.wp), d);
    EXPECT_TRUE(v.holds) << e.name << ": " << to_string(v);
  }
  EXPECT_EQ(derive_wp(script_p2pkh(42)), wp_p2pkh(42));
}

TEST(FixtureWps, IntermediateConditions) {
  // accept2 is the weakest precondition of OP_VERIFY for accept1, and so on up the chain.
  const Domain d = closed(script_p2pkh(7), accept3(), 5);
  const auto check = [&](const WpFormula& pre, Script seg, const WpFormula& post) {
    return check_iff_triple(kToy, formula_predicate(kToy, pre), seg, formula_predicate(kToy, post), d).holds;
  };
  EXPECT_TRUE(check(accept1(), {Opcode::CheckSig}, accept_formula()));
  EXPECT_TRUE(check(accept2(), {Opcode::Verify}, accept1()));
  EXPECT_TRUE(check(accept3(), {Opcode::Equal}, accept2()));
  EXPECT_TRUE(check(accept4(7), {Instruction::push(7)}, accept3()));
  EXPECT_TRUE(check(accept5(7), {Opcode::Hash}, accept4(7)));
  EXPECT_TRUE(check(wp_p2pkh(7), {Opcode::Dup}, accept5(7)));
  EXPECT_FALSE(check(accept1(), {Opcode::Verify}, accept1()));
}

TEST(FixtureWps, FaultyScriptIsDistinguished) {
  const Script faulty = script_p2pkh_faulty(7);
  const Domain d = closed(faulty, wp_p2pkh(7), 4);
  const Verdict v = check_iff_triple(kToy, formula_predicate(kToy, wp_p2pkh(7)), faulty, accept_state, d);
  ASSERT_FALSE(v.holds);
  ASSERT_TRUE(v.counterexample.has_value());
  EXPECT_EQ(v.direction, Direction::Backward);
  EXPECT_TRUE(lift_predicate(accept_state, eval_script(kToy, faulty, *v.counterexample)));
  EXPECT_FALSE(eval_formula(kToy, wp_p2pkh(7), *v.counterexample));
  EXPECT_FALSE(eval_script(kToy, script_p2pkh(7), *v.counterexample).ok() &&
               accept_state(eval_script(kToy, script_p2pkh(7), *v.counterexample).state()));
  // The plain triple still holds: the faulty script accepts everything P2PKH accepts.
  EXPECT_TRUE(check_triple(kToy, formula_predicate(kToy, wp_p2pkh(7)), faulty, accept_state, d).holds);
}

TEST(FixtureEntries, Names) {
  std::vector<std::string> names;
  for (const auto& e : fixture_entries()) names.push_back(e.name);
  EXPECT_EQ(names, (std::vector<std::string>{"p2pkh", "p2pkh_7", "p2pkh_faulty", "drop3", "empty", "p2ms_2of4",
                                             "checktime", "combined"}));
}
