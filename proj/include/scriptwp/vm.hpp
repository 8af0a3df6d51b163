#pragma once

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scriptwp/nat.hpp"

namespace scriptwp {

/// A stack of naturals. Element 0 is the top; storage keeps the top at the
/// back so push and pop are O(1).
class Stack {
 public:
  Stack() = default;
  Stack(std::initializer_list<Nat> top_first);
  static Stack from_top_first(std::span<const Nat> items);

  bool empty() const { return items_.empty(); }
  std::size_t height() const { return items_.size(); }

  /// i-th element counted from the top.
  const Nat& at(std::size_t i) const { return items_[items_.size() - 1 - i]; }
  const Nat& top() const { return items_.back(); }

  void push(Nat n) { items_.push_back(std::move(n)); }
  Nat pop();
  /// Appends an element below the current bottom.
  void push_bottom(Nat n) { items_.insert(items_.begin(), std::move(n)); }

  std::vector<Nat> top_first() const;

  friend bool operator==(const Stack&, const Stack&) = default;

 private:
  std::vector<Nat> items_;  // bottom first
};

std::string to_string(const Stack& st);

using Msg = Nat;
using Time = Nat;

struct StackState {
  Time current_time;
  Msg msg;
  Stack stack;

  friend bool operator==(const StackState&, const StackState&) = default;
};

std::string to_string(const StackState& s);

/// Failed carries no state; Succeeded carries the resulting state.
class ExecOutcome {
 public:
  static ExecOutcome failed() { return ExecOutcome{}; }
  static ExecOutcome succeeded(StackState s) { return ExecOutcome{std::move(s)}; }

  bool ok() const { return state_.has_value(); }
  const StackState& state() const { return *state_; }

  friend bool operator==(const ExecOutcome&, const ExecOutcome&) = default;

 private:
  ExecOutcome() = default;
  explicit ExecOutcome(StackState s) : state_(std::move(s)) {}
  std::optional<StackState> state_;
};

std::string to_string(const ExecOutcome& o);

enum class Opcode {
  Dup,
  Hash,
  Equal,
  Verify,
  CheckSig,
  CheckLockTimeVerify,
  Drop,
  MultiSig,
  Push,
};

class Instruction {
 public:
  constexpr Instruction(Opcode op) : op_(op) {}  // NOLINT: opcodes convert implicitly
  static Instruction push(Nat n);

  Opcode op() const { return op_; }
  /// Payload of a push; only meaningful when op() == Opcode::Push.
  const Nat& value() const { return value_; }

  friend bool operator==(const Instruction&, const Instruction&) = default;

 private:
  Opcode op_;
  Nat value_{0};
};

using Script = std::vector<Instruction>;

Script concat(const Script& p, const Script& q);

/// Pluggable, pure stand-ins for hashing and signature checking.
/// `preimage` and `sign` are optional inverses used only to pick
/// interesting values when building finite checking domains.
struct CryptoOracle {
  std::function<Nat(const Nat&)> hash;
  std::function<bool(const Msg&, const Nat& sig, const Nat& pbk)> is_signed;
  std::function<std::optional<Nat>(const Nat& digest)> preimage;
  std::function<std::optional<Nat>(const Msg&, const Nat& pbk)> sign;
};

enum class SignRule { Sum, Xor };

/// hash(n) = a*n + b; the sign rule fixes the valid signature for (msg, pbk):
/// Sum accepts sig == msg + pbk, Xor accepts sig == msg ^ pbk.
CryptoOracle toy_oracle(Nat hash_a = 2, Nat hash_b = 1, SignRule rule = SignRule::Sum);

Nat compare_naturals(const Nat& n, const Nat& m);
Nat bool_to_nat(bool b);

bool cmp_multi_sigs(const CryptoOracle& oracle, const Msg& msg, std::span<const Nat> sigs,
                    std::span<const Nat> pbks);

// Per-opcode stack functions. nullopt signals failure.
std::optional<Stack> execute_stack_dup(Stack st);
std::optional<Stack> execute_op_hash(const CryptoOracle& oracle, Stack st);
std::optional<Stack> execute_stack_equality(Stack st);
std::optional<Stack> execute_stack_verify(Stack st);
std::optional<Stack> execute_stack_drop(Stack st);
std::optional<Stack> execute_op_push(const Nat& n, Stack st);
std::optional<Stack> execute_stack_check_sig(const CryptoOracle& oracle, const Msg& msg, Stack st);
std::optional<Stack> execute_check_lock_time(const Time& time, Stack st);
std::optional<Stack> execute_multi_sig(const CryptoOracle& oracle, const Msg& msg, Stack st);

ExecOutcome eval_instr(const CryptoOracle& oracle, const Instruction& instr, const StackState& s);
ExecOutcome eval_script(const CryptoOracle& oracle, std::span<const Instruction> script,
                        const StackState& s);
ExecOutcome eval_script_from_outcome(const CryptoOracle& oracle, std::span<const Instruction> script,
                                     const ExecOutcome& prior);

/// Runs `unlock` on the empty-stack initial state, then `lock` on the result,
/// and tests the accept condition.
bool run_unlock_lock(const CryptoOracle& oracle, const Script& unlock, const Script& lock,
                     const Msg& msg, const Time& time);

}  // namespace scriptwp
