#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scriptwp/predicates.hpp"
#include "scriptwp/vm.hpp"

namespace scriptwp {

/// A bounded state space: every (time, msg, stack) with time in `times`, msg
/// in `msgs`, and stacks of height <= max_height over values().
struct Domain {
  std::size_t max_height = 6;
  std::uint64_t max_value = 2;
  std::vector<Msg> msgs{10};
  std::vector<Time> times{0};
  /// Values enumerated in addition to 0..max_value.
  std::set<Nat> extra_values;

  /// Sorted, duplicate-free element alphabet.
  std::vector<Nat> values() const;
  /// |times| * |msgs| * sum_{h<=max_height} |values|^h. Throws std::overflow_error
  /// if it does not fit in 64 bits.
  std::uint64_t state_count() const;
};

/// Closes `base` over what a check needs to be meaningful: the given
/// constants, their hash preimages, a valid signature for every (msg, value)
/// pair, and times t-1, t, t+1 around every lock time.
Domain close_domain(Domain base, const CryptoOracle& oracle, const std::set<Nat>& constants,
                    const std::set<Nat>& lock_times);

std::set<Nat> script_constants(const Script& script);
/// Values pushed immediately before OP_CHECKLOCKTIMEVERIFY.
std::set<Nat> script_lock_times(const Script& script);

/// Domain closed over everything mentioned by the scripts and formulas.
Domain derive_domain(Domain base, const CryptoOracle& oracle, const std::vector<const Script*>& scripts,
                     const std::vector<const WpFormula*>& formulas);

/// Enumeration order: stacks by height then lexicographically (top first,
/// in values() order); for each stack every time, and for each time every msg.
StackState state_at(const Domain& d, const std::vector<Nat>& values, std::uint64_t index);
std::vector<StackState> enumerate_states(const Domain& d);

enum class Direction { Forward, Backward };

const char* to_string(Direction d);

struct Verdict {
  bool holds = true;
  std::uint64_t states_checked = 0;
  std::optional<StackState> counterexample;
  Direction direction = Direction::Forward;
  std::uint64_t index = 0;

  static Verdict hold(std::uint64_t checked) { return Verdict{true, checked, std::nullopt, Direction::Forward, 0}; }
};

std::string to_string(const Verdict& v);

struct CheckOptions {
  /// 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  std::uint64_t chunk = 4096;
};

/// Violation test for one state; nullopt when the state is fine.
using StateCheck = std::function<std::optional<Direction>(const StackState&)>;

/// Scans the domain and reports the first violating state in enumeration
/// order. Work is split into chunks across threads; the result does not
/// depend on the thread count.
Verdict find_first_violation(const Domain& d, const StateCheck& check, const CheckOptions& opts = {});

/// <pre> script <post>: pre(s) implies post+ (eval script s).
Verdict check_triple(const CryptoOracle& oracle, const StatePredicate& pre, const Script& script,
                     const StatePredicate& post, const Domain& d, const CheckOptions& opts = {});

/// <pre>iff script <post>. Backward counterexamples are states that reach
/// the postcondition without satisfying the precondition.
Verdict check_iff_triple(const CryptoOracle& oracle, const StatePredicate& pre, const Script& script,
                         const StatePredicate& post, const Domain& d, const CheckOptions& opts = {});

/// Pointwise equivalence. Forward: phi holds but psi does not.
Verdict check_pred_equiv(const StatePredicate& phi, const StatePredicate& psi, const Domain& d,
                         const CheckOptions& opts = {});

/// Full outcome equality of two scripts on every state.
Verdict check_outcome_equiv(const CryptoOracle& oracle, const Script& p, const Script& q, const Domain& d,
                            const CheckOptions& opts = {});

}  // namespace scriptwp
