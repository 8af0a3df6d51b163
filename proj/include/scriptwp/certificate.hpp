#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scriptwp/hoare.hpp"
#include "scriptwp/predicates.hpp"
#include "scriptwp/vm.hpp"

namespace scriptwp {

enum class Evidence { EnumeratedCheck, SymbolicEquivalence, PredicateRewrite };

const char* to_string(Evidence e);
std::optional<Evidence> parse_evidence(std::string_view s);

/// Asserts <pre>iff segment <post>. A PredicateRewrite step has an empty
/// segment and asserts pre and post are equivalent.
struct CertStep {
  WpFormula pre;
  Script segment;
  WpFormula post;
  Evidence evidence = Evidence::EnumeratedCheck;

  friend bool operator==(const CertStep&, const CertStep&) = default;
};

struct Certificate {
  std::string name;
  std::vector<CertStep> steps;
  WpFormula final_post;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

Script concatenated_segments(const Certificate& cert);

struct StepReport {
  std::size_t index = 0;
  Evidence evidence = Evidence::EnumeratedCheck;
  Verdict verdict;
  /// Set when the step could not be checked at all (e.g. unsupported script).
  std::string error;
  bool ok() const { return error.empty() && verdict.holds; }
};

struct LinkReport {
  /// Link between step `index` and step `index + 1` (or finalPost).
  std::size_t index = 0;
  bool connected = true;
  /// Semantic comparison, only run when the formulas differ syntactically.
  std::optional<Verdict> verdict;
};

struct CertReport {
  std::vector<StepReport> steps;
  std::vector<LinkReport> links;
  std::optional<Verdict> end_to_end;
  bool holds = false;
  /// First failing step (or link); empty when holds.
  std::optional<std::size_t> failed_step;
  std::string failure;
  /// Counterexample of the first failure, if it produced one.
  std::optional<Verdict> failing_verdict;
};

/// Checks every step's evidence and every link, then cross-checks the
/// end-to-end iff-triple over the concatenated segments. Throws
/// std::invalid_argument for a certificate without steps.
CertReport verify_certificate(const CryptoOracle& oracle, const Certificate& cert, const Domain& d,
                              const CheckOptions& opts = {});

/// `base` closed over every script and formula the certificate mentions.
Domain certificate_domain(Domain base, const CryptoOracle& oracle, const Certificate& cert);

/// Six single-instruction steps, wpP2PKH -> accept5 -> ... -> accept1 -> acceptState.
Certificate step_by_step_p2pkh_certificate(const Nat& pbkh);
/// Lock-time step then 2-of-4 multisig step.
Certificate combined_certificate(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4);

class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// JSON document: {"name", "steps": [{"pre", "script", "post", "evidence"}],
/// "final_post"}; formulas are formula text (a string, or an array of clause
/// lines). Throws CertificateError on schema or parse errors.
Certificate parse_certificate(std::string_view json_text);
std::string render_certificate(const Certificate& cert);

}  // namespace scriptwp
