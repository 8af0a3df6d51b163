#include "scriptwp/vm.hpp"

#include <algorithm>
#include <sstream>

#include "scriptwp/predicates.hpp"

namespace scriptwp {

std::optional<Nat> parse_nat(std::string_view text) {
  if (text.empty()) return std::nullopt;
  Nat n = 0;
  for (char c : text) {
    if (c < '0' || c > '9') return std::nullopt;
    n = n * 10 + (c - '0');
  }
  return n;
}

std::string to_string(const Nat& n) { return n.str(); }

std::optional<std::size_t> to_size(const Nat& n) {
  if (n < 0 || n > Nat(std::numeric_limits<std::size_t>::max())) return std::nullopt;
  return n.convert_to<std::size_t>();
}

Stack::Stack(std::initializer_list<Nat> top_first) : items_(top_first.begin(), top_first.end()) {
  std::reverse(items_.begin(), items_.end());
}

Stack Stack::from_top_first(std::span<const Nat> items) {
  Stack st;
  st.items_.assign(items.rbegin(), items.rend());
  return st;
}

Nat Stack::pop() {
  Nat n = std::move(items_.back());
  items_.pop_back();
  return n;
}

std::vector<Nat> Stack::top_first() const { return {items_.rbegin(), items_.rend()}; }

std::string to_string(const Stack& st) {
  std::string out = "[";
  for (std::size_t i = 0; i < st.height(); ++i) {
    if (i) out += ", ";
    out += to_string(st.at(i));
  }
  return out + "]";
}

std::string to_string(const StackState& s) {
  return "time=" + to_string(s.current_time) + " msg=" + to_string(s.msg) +
         " stack=" + to_string(s.stack);
}

std::string to_string(const ExecOutcome& o) {
  return o.ok() ? "Succeeded: " + to_string(o.state().stack) : "Failed";
}

Instruction Instruction::push(Nat n) {
  Instruction i{Opcode::Push};
  i.value_ = std::move(n);
  return i;
}

Script concat(const Script& p, const Script& q) {
  Script r = p;
  r.insert(r.end(), q.begin(), q.end());
  return r;
}

CryptoOracle toy_oracle(Nat hash_a, Nat hash_b, SignRule rule) {
  CryptoOracle o;
  o.hash = [hash_a, hash_b](const Nat& n) { return hash_a * n + hash_b; };
  o.preimage = [hash_a, hash_b](const Nat& h) -> std::optional<Nat> {
    if (h < hash_b) return std::nullopt;
    if (hash_a == 0) return h == hash_b ? std::optional<Nat>(0) : std::nullopt;
    Nat d = h - hash_b;
    if (d % hash_a != 0) return std::nullopt;
    return d / hash_a;
  };
  switch (rule) {
    case SignRule::Sum:
      o.is_signed = [](const Msg& m, const Nat& sig, const Nat& pbk) { return sig == m + pbk; };
      o.sign = [](const Msg& m, const Nat& pbk) -> std::optional<Nat> { return m + pbk; };
      break;
    case SignRule::Xor:
      o.is_signed = [](const Msg& m, const Nat& sig, const Nat& pbk) { return sig == (m ^ pbk); };
      o.sign = [](const Msg& m, const Nat& pbk) -> std::optional<Nat> { return m ^ pbk; };
      break;
  }
  return o;
}

Nat compare_naturals(const Nat& n, const Nat& m) { return n == m ? 1 : 0; }

Nat bool_to_nat(bool b) { return b ? 1 : 0; }

bool cmp_multi_sigs(const CryptoOracle& oracle, const Msg& msg, std::span<const Nat> sigs,
                    std::span<const Nat> pbks) {
  // A failed match consumes only the public key; a successful one consumes both.
  while (!sigs.empty()) {
    if (pbks.empty()) return false;
    if (oracle.is_signed(msg, sigs.front(), pbks.front())) sigs = sigs.subspan(1);
    pbks = pbks.subspan(1);
  }
  return true;
}

std::optional<Stack> execute_stack_dup(Stack st) {
  if (st.empty()) return std::nullopt;
  st.push(st.top());
  return st;
}

std::optional<Stack> execute_op_hash(const CryptoOracle& oracle, Stack st) {
  if (st.empty()) return std::nullopt;
  st.push(oracle.hash(st.pop()));
  return st;
}

std::optional<Stack> execute_stack_equality(Stack st) {
  if (st.height() <= 1) return std::nullopt;
  Nat a = st.pop();
  Nat b = st.pop();
  st.push(compare_naturals(a, b));
  return st;
}

std::optional<Stack> execute_stack_verify(Stack st) {
  if (st.empty() || st.top() == 0) return std::nullopt;
  st.pop();
  return st;
}

std::optional<Stack> execute_stack_drop(Stack st) {
  if (st.empty()) return std::nullopt;
  st.pop();
  return st;
}

std::optional<Stack> execute_op_push(const Nat& n, Stack st) {
  st.push(n);
  return st;
}

std::optional<Stack> execute_stack_check_sig(const CryptoOracle& oracle, const Msg& msg, Stack st) {
  if (st.height() <= 1) return std::nullopt;
  Nat pbk = st.pop();
  Nat sig = st.pop();
  st.push(bool_to_nat(oracle.is_signed(msg, sig, pbk)));
  return st;
}

std::optional<Stack> execute_check_lock_time(const Time& time, Stack st) {
  if (st.empty() || st.top() > time) return std::nullopt;
  return st;
}

namespace {

// Pops `count` elements (top first) and returns them in push order.
std::optional<std::vector<Nat>> fetch_reversed(Stack& st, const Nat& count) {
  auto n = to_size(count);
  if (!n || *n > st.height()) return std::nullopt;
  std::vector<Nat> out(*n);
  for (std::size_t i = *n; i-- > 0;) out[i] = st.pop();
  return out;
}

}  // namespace

std::optional<Stack> execute_multi_sig(const CryptoOracle& oracle, const Msg& msg, Stack st) {
  if (st.empty()) return std::nullopt;
  Nat n = st.pop();
  auto pbks = fetch_reversed(st, n);
  if (!pbks || st.empty()) return std::nullopt;
  Nat m = st.pop();
  auto sigs = fetch_reversed(st, m);
  if (!sigs || st.empty()) return std::nullopt;
  st.pop();  // dummy
  st.push(bool_to_nat(cmp_multi_sigs(oracle, msg, *sigs, *pbks)));
  return st;
}

ExecOutcome eval_instr(const CryptoOracle& oracle, const Instruction& instr, const StackState& s) {
  std::optional<Stack> next;
  switch (instr.op()) {
    case Opcode::Dup: next = execute_stack_dup(s.stack); break;
    case Opcode::Hash: next = execute_op_hash(oracle, s.stack); break;
    case Opcode::Equal: next = execute_stack_equality(s.stack); break;
    case Opcode::Verify: next = execute_stack_verify(s.stack); break;
    case Opcode::CheckSig: next = execute_stack_check_sig(oracle, s.msg, s.stack); break;
    case Opcode::CheckLockTimeVerify: next = execute_check_lock_time(s.current_time, s.stack); break;
    case Opcode::Drop: next = execute_stack_drop(s.stack); break;
    case Opcode::MultiSig: next = execute_multi_sig(oracle, s.msg, s.stack); break;
    case Opcode::Push: next = execute_op_push(instr.value(), s.stack); break;
  }
  if (!next) return ExecOutcome::failed();
  return ExecOutcome::succeeded({s.current_time, s.msg, std::move(*next)});
}

ExecOutcome eval_script(const CryptoOracle& oracle, std::span<const Instruction> script,
                        const StackState& s) {
  ExecOutcome out = ExecOutcome::succeeded(s);
  for (const auto& instr : script) {
    out = eval_instr(oracle, instr, out.state());
    if (!out.ok()) break;
  }
  return out;
}

ExecOutcome eval_script_from_outcome(const CryptoOracle& oracle, std::span<const Instruction> script,
                                     const ExecOutcome& prior) {
  if (!prior.ok()) return prior;
  return eval_script(oracle, script, prior.state());
}

bool run_unlock_lock(const CryptoOracle& oracle, const Script& unlock, const Script& lock,
                     const Msg& msg, const Time& time) {
  StackState init{time, msg, {}};
  return lift_predicate(accept_state, eval_script_from_outcome(oracle, lock, eval_script(oracle, unlock, init)));
}

}  // namespace scriptwp
