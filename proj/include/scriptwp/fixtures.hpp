#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scriptwp/predicates.hpp"
#include "scriptwp/vm.hpp"

namespace scriptwp {

Script script_p2pkh(const Nat& pbkh);
/// OP_DUP OP_HASH <pbkh> OP_EQUAL, i.e. P2PKH without the signature check.
Script script_p2pkh_faulty(const Nat& pbkh);
Script op_push_list(const std::vector<Nat>& values);
/// m, keys..., |keys|, OP_MULTISIG. Throws std::invalid_argument unless m < |keys|.
Script multi_sig_script(const Nat& m, const std::vector<Nat>& pbks);
Script check_time_script(const Time& t1);
Script combined_script(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4);

WpFormula wp_p2pkh(const Nat& pbkh);
WpFormula wp_faulty(const Nat& pbkh);
/// sig2 :: sig1 :: dummy :: rest with one disjunct per key pair i < j.
WpFormula wp_multi_sig24(const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4);
/// Height-0 pattern: locktime t1 <= now.
WpFormula time_check_pre(const Time& t1);
WpFormula wp_combined(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4);
WpFormula wp_check_time(const Time& t1);

WpFormula accept1();
WpFormula accept2();
WpFormula accept3();
WpFormula accept4(const Nat& pbkh);
WpFormula accept5(const Nat& pbkh);

/// The hand-decoded P2PKH function; nullopt is failure.
std::optional<Stack> p2pkh_decoded(const CryptoOracle& oracle, const Nat& pbkh, const Msg& msg, const Stack& st);

struct FixtureEntry {
  std::string name;
  Script script;
  WpFormula wp;
  std::string notes;
};

/// Every shipped script with its published precondition.
std::vector<FixtureEntry> fixture_entries();

}  // namespace scriptwp
