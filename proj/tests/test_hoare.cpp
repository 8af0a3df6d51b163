#include <gtest/gtest.h>

#include "scriptwp/fixtures.hpp"
#include "scriptwp/hoare.hpp"
#include "scriptwp/script_text.hpp"
#include "test_support.hpp"

using namespace scriptwp;

namespace {

const CryptoOracle kToy = toy_oracle();

Domain dom(std::size_t h, std::uint64_t v, std::vector<Msg> msgs = {10}, std::vector<Time> times = {0}) {
  Domain d;
  d.max_height = h;
  d.max_value = v;
  d.msgs = std::move(msgs);
  d.times = std::move(times);
  return d;
}

Domain p2pkh_domain(const Nat& h, std::size_t height = 4) {
  const Script s = script_p2pkh(h);
  const WpFormula f = wp_p2pkh(h);
  return derive_domain(dom(height, 2), kToy, {&s}, {&f});
}

}  // namespace

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate_states(dom(0, 5)).size(), 1u);
  EXPECT_EQ(enumerate_states(dom(1, 1)).size(), 3u);
  EXPECT_EQ(enumerate_states(dom(2, 2, {1, 2})).size(), 26u);
  EXPECT_EQ(dom(2, 2, {1, 2}).state_count(), 26u);
  EXPECT_EQ(dom(6, 9, {1}, {0, 1, 2}).state_count(), 3u * 1111111u);
}

TEST(Enumerate, ExactlyOnceAndOrdered) {
  const Domain d = dom(3, 2, {0, 1}, {4, 5});
  const auto states = enumerate_states(d);
  std::set<std::string> seen;
  for (const auto& s : states) {
    ASSERT_TRUE(seen.insert(to_string(s)).second) << to_string(s);
    ASSERT_LE(s.stack.height(), 3u);
  }
  EXPECT_EQ(seen.size(), d.state_count());
  EXPECT_EQ(states.front().stack, Stack{});
  EXPECT_EQ(states[4].stack, Stack{0});
  // Heights never decrease along the enumeration.
  for (std::size_t i = 1; i < states.size(); ++i) ASSERT_LE(states[i - 1].stack.height(), states[i].stack.height());
  // Within a height, stacks are lexicographic, top first.
  EXPECT_EQ(states[4 * (1 + 3)].stack, (Stack{0, 0}));
  EXPECT_EQ(states[4 * (1 + 3 + 1)].stack, (Stack{0, 1}));
  EXPECT_EQ(states[4 * (1 + 3 + 3)].stack, (Stack{1, 0}));
}

TEST(Enumerate, OverflowIsReported) {
  Domain d = dom(40, 1000);
  EXPECT_THROW(d.state_count(), std::overflow_error);
}

TEST(DomainClosure, ConstantsPreimagesSignaturesAndTimes) {
  const Domain d = close_domain(dom(2, 1), kToy, {7}, {5});
  const auto v = d.values();
  for (int x : {0, 1, 3, 7, 10, 11, 13, 17}) EXPECT_TRUE(std::count(v.begin(), v.end(), Nat(x))) << x;
  EXPECT_EQ(d.times, (std::vector<Time>{0, 4, 5, 6}));
  const Script ct = check_time_script(5);
  EXPECT_EQ(script_lock_times(ct), (std::set<Nat>{5}));
  const Domain cd = derive_domain(dom(1, 0), kToy, {&ct}, {});
  EXPECT_EQ(cd.values(), (std::vector<Nat>{0, 10}));  // the lock time is not a stack value
}

TEST(CheckTriple, Examples) {
  const Nat h = 7;
  const Domain d = p2pkh_domain(h);
  const auto pre = formula_predicate(kToy, wp_p2pkh(h));
  EXPECT_TRUE(check_triple(kToy, pre, script_p2pkh(h), accept_state, d).holds);
  EXPECT_TRUE(check_triple(kToy, pre, script_p2pkh_faulty(h), accept_state, d).holds);
  const Verdict v = check_triple(kToy, true_everywhere(), {Opcode::Verify}, accept_state, d);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.counterexample->stack, Stack{});
  EXPECT_EQ(v.direction, Direction::Forward);
  EXPECT_EQ(v.index, 0u);
}

TEST(CheckIffTriple, Examples) {
  const Nat h = 7;
  const Domain d = p2pkh_domain(h);
  const auto pre = formula_predicate(kToy, wp_p2pkh(h));
  EXPECT_TRUE(check_iff_triple(kToy, pre, script_p2pkh(h), accept_state, d).holds);

  const Verdict v = check_iff_triple(kToy, pre, script_p2pkh_faulty(h), accept_state, d);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.direction, Direction::Backward);
  const StackState& s = *v.counterexample;
  EXPECT_EQ(kToy.hash(s.stack.at(0)), h);
  EXPECT_FALSE(pre(s));
  EXPECT_TRUE(lift_predicate(accept_state, eval_script(kToy, script_p2pkh_faulty(h), s)));

  // A script that never accepts against the empty precondition.
  EXPECT_TRUE(check_iff_triple(kToy, false_everywhere(), {Instruction::push(0)}, accept_state, d).holds);
}

TEST(CheckPredEquiv, Examples) {
  const Domain d = p2pkh_domain(7);
  const auto p = formula_predicate(kToy, wp_p2pkh(7));
  EXPECT_TRUE(check_pred_equiv(p, p, d).holds);
  const Script drop3{Opcode::Drop, Opcode::Drop, Opcode::Drop};
  const auto readable = formula_predicate(kToy, parse_formula("stack = a :: b :: c :: d :: rest => d > 0"));
  EXPECT_TRUE(check_pred_equiv(semantic_wp(kToy, drop3, accept_state), readable, d).holds);
  const Verdict v = check_pred_equiv(formula_predicate(kToy, wp_faulty(7)), p, d);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.direction, Direction::Forward);
  EXPECT_EQ(v.counterexample->stack.at(0), 3);
}

TEST(CheckOutcomeEquiv, Examples) {
  const Domain d = p2pkh_domain(7, 3);
  EXPECT_TRUE(check_outcome_equiv(kToy, script_p2pkh(7), script_p2pkh(7), d).holds);
  EXPECT_FALSE(check_outcome_equiv(kToy, script_p2pkh(7), script_p2pkh_faulty(7), d).holds);
  EXPECT_TRUE(check_outcome_equiv(kToy, parse_script("OP_PUSH 1 OP_DROP"), {}, d).holds);
}

TEST(Determinism, ThreadCountDoesNotChangeVerdict) {
  const Domain d = p2pkh_domain(7);
  const auto pre = formula_predicate(kToy, wp_p2pkh(7));
  const Verdict ref = check_iff_triple(kToy, pre, script_p2pkh_faulty(7), accept_state, d, {1, 4096});
  for (unsigned threads : {2u, 3u, 8u})
    for (std::uint64_t chunk : {1u, 7u, 100u, 100000u}) {
      const Verdict v = check_iff_triple(kToy, pre, script_p2pkh_faulty(7), accept_state, d, {threads, chunk});
      ASSERT_EQ(v.holds, ref.holds);
      ASSERT_EQ(v.index, ref.index);
      ASSERT_EQ(v.counterexample, ref.counterexample);
      ASSERT_EQ(v.direction, ref.direction);
    }
}

TEST(Properties, FirstViolationIsGloballyFirst) {
  // Brute-force oracle over the materialized enumeration.
  const Domain d = dom(3, 3, {0, 1}, {0, 1});
  const auto states = enumerate_states(d);
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    const Script p = gen::random_script(rng, 4, 3);
    const auto pre = formula_predicate(kToy, gen::random_formula(rng, 2, 1));
    std::optional<std::size_t> first;
    for (std::size_t k = 0; k < states.size() && !first; ++k)
      if (pre(states[k]) != lift_predicate(accept_state, eval_script(kToy, p, states[k]))) first = k;
    const Verdict v = check_iff_triple(kToy, pre, p, accept_state, d, {3, 5});
    ASSERT_EQ(v.holds, !first.has_value());
    if (first) {
      ASSERT_EQ(v.index, *first);
      ASSERT_EQ(*v.counterexample, states[*first]);
    }
  }
}

TEST(Properties, IffImpliesPlainAndCounterexamplesAreGenuine) {
  const Domain d = dom(3, 3, {0, 1}, {0, 1, 2});
  std::mt19937_64 rng(32);
  for (int i = 0; i < 60; ++i) {
    const Script p = gen::random_script(rng, 4, 3);
    const auto pre = formula_predicate(kToy, gen::random_formula(rng, 3, 2));
    const Verdict iff = check_iff_triple(kToy, pre, p, accept_state, d);
    const Verdict plain = check_triple(kToy, pre, p, accept_state, d);
    if (iff.holds) ASSERT_TRUE(plain.holds);
    for (const Verdict* v : {&iff, &plain}) {
      if (v->holds) continue;
      const bool before = pre(*v->counterexample);
      const bool after = lift_predicate(accept_state, eval_script(kToy, p, *v->counterexample));
      if (v->direction == Direction::Forward) ASSERT_TRUE(before && !after);
      else ASSERT_TRUE(!before && after);
    }
  }
}

TEST(Properties, WeakeningBreaksIff) {
  const Nat h = 7;
  const Domain d = p2pkh_domain(h);
  const auto pre = formula_predicate(kToy, wp_p2pkh(h));
  // Excludes pre-satisfying states whose third cell is 0.
  const auto extra = formula_predicate(kToy, parse_formula("stack = a :: b :: c :: rest => c > 0"));
  const Verdict v = check_iff_triple(kToy, conj_sp(pre, extra), script_p2pkh(h), accept_state, d);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.direction, Direction::Backward);
}

TEST(Properties, CounterexamplesPersistInLargerDomains) {
  const Nat h = 7;
  const auto pre = formula_predicate(kToy, wp_p2pkh(h));
  const Domain small = p2pkh_domain(h, 2);
  const Verdict v = check_iff_triple(kToy, pre, script_p2pkh_faulty(h), accept_state, small);
  ASSERT_FALSE(v.holds);
  Domain big = p2pkh_domain(h, 3);
  big.extra_values.insert(50);
  big.msgs.push_back(11);
  const Verdict w = check_iff_triple(kToy, pre, script_p2pkh_faulty(h), accept_state, big);
  ASSERT_FALSE(w.holds);
  // The small domain's witness is still a witness in the big one.
  const StackState& s = *v.counterexample;
  EXPECT_NE(pre(s), lift_predicate(accept_state, eval_script(kToy, script_p2pkh_faulty(h), s)));
}

TEST(VerdictText, Rendering) {
  EXPECT_EQ(to_string(Verdict::hold(12)), "Holds (12 states)");
  Verdict v;
  v.holds = false;
  v.direction = Direction::Backward;
  v.index = 3;
  v.counterexample = StackState{0, 10, Stack{7}};
  EXPECT_EQ(to_string(v), "Counterexample (backward) at state #3: time=0 msg=10 stack=[7]");
}
