#include "scriptwp/fixtures.hpp"

#include <stdexcept>

namespace scriptwp {

Script script_p2pkh(const Nat& pbkh) {
  return {Opcode::Dup, Opcode::Hash, Instruction::push(pbkh), Opcode::Equal, Opcode::Verify, Opcode::CheckSig};
}

Script script_p2pkh_faulty(const Nat& pbkh) {
  return {Opcode::Dup, Opcode::Hash, Instruction::push(pbkh), Opcode::Equal};
}

Script op_push_list(const std::vector<Nat>& values) {
  Script out;
  for (const auto& v : values) out.push_back(Instruction::push(v));
  return out;
}

Script multi_sig_script(const Nat& m, const std::vector<Nat>& pbks) {
  if (!(m < pbks.size()))
    throw std::invalid_argument("multisig needs m < number of keys (m = " + to_string(m) + ", keys = " +
                                std::to_string(pbks.size()) + ")");
  Script out{Instruction::push(m)};
  for (auto& i : op_push_list(pbks)) out.push_back(i);
  out.push_back(Instruction::push(pbks.size()));
  out.push_back(Opcode::MultiSig);
  return out;
}

Script check_time_script(const Time& t1) {
  return {Instruction::push(t1), Opcode::CheckLockTimeVerify, Opcode::Drop};
}

Script combined_script(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4) {
  return concat(check_time_script(t1), multi_sig_script(2, {k1, k2, k3, k4}));
}

WpFormula wp_p2pkh(const Nat& pbkh) {
  return {{Clause{StackPattern{2, {"pbk", "sig"}},
                  p_and({p_atom(eq(hash_of(var(0)), lit(pbkh))), p_atom(is_signed(var(1), var(0)))})}}};
}

WpFormula wp_faulty(const Nat& pbkh) {
  return {{Clause{StackPattern{1, {"pbk"}}, p_atom(eq(hash_of(var(0)), lit(pbkh)))}}};
}

WpFormula wp_multi_sig24(const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4) {
  const Nat keys[] = {k1, k2, k3, k4};
  std::vector<Prop> pairs;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j)
      pairs.push_back(
          p_and({p_atom(is_signed(var(1), lit(keys[i]))), p_atom(is_signed(var(0), lit(keys[j])))}));
  return {{Clause{StackPattern{3, {"sig2", "sig1", "dummy"}}, p_or(std::move(pairs))}}};
}

WpFormula time_check_pre(const Time& t1) {
  return {{Clause{StackPattern{0, {}}, p_atom(time_le(lit(t1)))}}};
}

WpFormula wp_combined(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4) {
  return conj_formula(time_check_pre(t1), wp_multi_sig24(k1, k2, k3, k4));
}

WpFormula wp_check_time(const Time& t1) { return conj_formula(time_check_pre(t1), accept_formula()); }

WpFormula accept1() {
  return {{Clause{StackPattern{2, {"pbk", "sig"}}, p_atom(is_signed(var(1), var(0)))}}};
}

WpFormula accept2() {
  return {{Clause{StackPattern{3, {"x", "pbk", "sig"}},
                  p_and({p_atom(positive(var(0))), p_atom(is_signed(var(2), var(1)))})}}};
}

WpFormula accept3() {
  return {{Clause{StackPattern{4, {"pbkh2", "pbkh1", "pbk", "sig"}},
                  p_and({p_atom(eq(var(0), var(1))), p_atom(is_signed(var(3), var(2)))})}}};
}

WpFormula accept4(const Nat& pbkh) {
  return {{Clause{StackPattern{3, {"pbkh2", "pbk", "sig"}},
                  p_and({p_atom(eq(var(0), lit(pbkh))), p_atom(is_signed(var(2), var(1)))})}}};
}

WpFormula accept5(const Nat& pbkh) {
  return {{Clause{StackPattern{3, {"pbk1", "pbk", "sig"}},
                  p_and({p_atom(eq(hash_of(var(0)), lit(pbkh))), p_atom(is_signed(var(2), var(1)))})}}};
}

namespace {

std::optional<Stack> p2pkh_decoded_aux1(const CryptoOracle& oracle, const Nat& pbk, const Msg& msg, Stack st,
                                        const Nat& cp_res) {
  if (st.empty()) return std::nullopt;
  if (cp_res == 0) return std::nullopt;
  Nat sig1 = st.pop();
  st.push(bool_to_nat(oracle.is_signed(msg, sig1, pbk)));
  return st;
}

}  // namespace

std::optional<Stack> p2pkh_decoded(const CryptoOracle& oracle, const Nat& pbkh, const Msg& msg, const Stack& st) {
  if (st.empty()) return std::nullopt;
  Stack rest = st;
  Nat pbk = rest.pop();
  return p2pkh_decoded_aux1(oracle, pbk, msg, std::move(rest), compare_naturals(pbkh, oracle.hash(pbk)));
}

std::vector<FixtureEntry> fixture_entries() {
  return {
      {"p2pkh", script_p2pkh(42), wp_p2pkh(42), "P2PKH locking script, key hash 42"},
      {"p2pkh_7", script_p2pkh(7), wp_p2pkh(7), "P2PKH with a hash the toy oracle can invert"},
      {"p2pkh_faulty", script_p2pkh_faulty(7), wp_faulty(7), "P2PKH missing OP_VERIFY OP_CHECKSIG"},
      {"drop3", {Opcode::Drop, Opcode::Drop, Opcode::Drop},
       {{Clause{StackPattern{4, {}}, p_atom(positive(var(3)))}}}, "fourth element from the top is > 0"},
      {"empty", {}, accept_formula(), "WP of the empty script is the postcondition"},
      {"p2ms_2of4", multi_sig_script(2, {1, 2, 3, 4}), wp_multi_sig24(1, 2, 3, 4), "2-of-4 multisig"},
      {"checktime", check_time_script(5), wp_check_time(5), "lock time 5"},
      {"combined", combined_script(5, 1, 2, 3, 4), wp_combined(5, 1, 2, 3, 4), "lock time 5 then 2-of-4 multisig"},
  };
}

}  // namespace scriptwp
