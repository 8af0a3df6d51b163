#include "scriptwp/certificate.hpp"

#include "json.hpp"
#include <sstream>

#include "scriptwp/fixtures.hpp"
#include "scriptwp/script_text.hpp"
#include "scriptwp/symexec.hpp"

namespace scriptwp {

const char* to_string(Evidence e) {
  switch (e) {
    case Evidence::EnumeratedCheck: return "enumerated-check";
    case Evidence::SymbolicEquivalence: return "symbolic-equivalence";
    case Evidence::PredicateRewrite: return "predicate-rewrite";
  }
  return "";
}

std::optional<Evidence> parse_evidence(std::string_view s) {
  for (auto e : {Evidence::EnumeratedCheck, Evidence::SymbolicEquivalence, Evidence::PredicateRewrite})
    if (s == to_string(e)) return e;
  return std::nullopt;
}

Script concatenated_segments(const Certificate& cert) {
  Script out;
  for (const auto& s : cert.steps) out = concat(out, s.segment);
  return out;
}

namespace {

StepReport check_step(const CryptoOracle& oracle, const CertStep& step, std::size_t index, const Domain& d,
                      const CheckOptions& opts) {
  StepReport r;
  r.index = index;
  r.evidence = step.evidence;
  const auto pre = formula_predicate(oracle, step.pre);
  switch (step.evidence) {
    case Evidence::EnumeratedCheck:
      r.verdict = check_iff_triple(oracle, pre, step.segment, formula_predicate(oracle, step.post), d, opts);
      break;
    case Evidence::SymbolicEquivalence:
      if (!(step.post == accept_formula())) {
        r.error = "symbolic-equivalence evidence needs the accept condition as postcondition";
        break;
      }
      try {
        r.verdict = check_pred_equiv(pre, formula_predicate(oracle, derive_wp(step.segment)), d, opts);
      } catch (const UnsupportedConstruct& e) {
        r.error = e.what();
      }
      break;
    case Evidence::PredicateRewrite:
      if (!step.segment.empty()) {
        r.error = "predicate-rewrite step must have an empty script";
        break;
      }
      r.verdict = check_pred_equiv(pre, formula_predicate(oracle, step.post), d, opts);
      break;
  }
  if (!r.error.empty()) r.verdict.holds = false;
  return r;
}

}  // namespace

CertReport verify_certificate(const CryptoOracle& oracle, const Certificate& cert, const Domain& d,
                              const CheckOptions& opts) {
  if (cert.steps.empty()) throw std::invalid_argument("certificate has no steps");
  CertReport rep;
  auto fail = [&rep](std::size_t i, std::string why, std::optional<Verdict> v) {
    if (rep.failed_step) return;
    rep.failed_step = i;
    rep.failure = std::move(why);
    rep.failing_verdict = std::move(v);
  };

  for (std::size_t i = 0; i < cert.steps.size(); ++i) {
    const auto& step = cert.steps[i];
    StepReport sr = check_step(oracle, step, i, d, opts);
    if (!sr.ok()) {
      if (!sr.error.empty()) fail(i, "step " + std::to_string(i) + ": " + sr.error, std::nullopt);
      else fail(i, "step " + std::to_string(i) + ": " + to_string(sr.verdict), sr.verdict);
    }
    rep.steps.push_back(std::move(sr));

    const WpFormula& next = i + 1 < cert.steps.size() ? cert.steps[i + 1].pre : cert.final_post;
    LinkReport lr;
    lr.index = i;
    lr.connected = step.post == next;
    if (!lr.connected) {
      lr.verdict = check_pred_equiv(formula_predicate(oracle, step.post), formula_predicate(oracle, next), d, opts);
      std::string why = "connectivity after step " + std::to_string(i) + ": post does not match the next pre";
      if (!lr.verdict->holds) why += "; " + to_string(*lr.verdict);
      fail(i, why, lr.verdict->holds ? std::nullopt : lr.verdict);
    }
    rep.links.push_back(std::move(lr));
  }

  if (!rep.failed_step) {
    rep.end_to_end = check_iff_triple(oracle, formula_predicate(oracle, cert.steps.front().pre),
                                      concatenated_segments(cert), formula_predicate(oracle, cert.final_post), d,
                                      opts);
    if (!rep.end_to_end->holds) {
      rep.failure = "end-to-end: " + to_string(*rep.end_to_end);
      rep.failing_verdict = rep.end_to_end;
    }
  }
  rep.holds = !rep.failed_step && rep.end_to_end && rep.end_to_end->holds;
  return rep;
}

Domain certificate_domain(Domain base, const CryptoOracle& oracle, const Certificate& cert) {
  std::vector<const Script*> scripts;
  std::vector<const WpFormula*> formulas{&cert.final_post};
  for (const auto& s : cert.steps) {
    scripts.push_back(&s.segment);
    formulas.push_back(&s.pre);
    formulas.push_back(&s.post);
  }
  return derive_domain(std::move(base), oracle, scripts, formulas);
}

Certificate step_by_step_p2pkh_certificate(const Nat& pbkh) {
  const Script full = script_p2pkh(pbkh);
  const std::vector<WpFormula> conds = {wp_p2pkh(pbkh), accept5(pbkh), accept4(pbkh), accept3(),
                                        accept2(),      accept1(),     accept_formula()};
  Certificate c;
  c.name = "p2pkh-step-by-step";
  for (std::size_t i = 0; i < full.size(); ++i)
    c.steps.push_back(CertStep{conds[i], Script{full[i]}, conds[i + 1], Evidence::EnumeratedCheck});
  c.final_post = accept_formula();
  return c;
}

Certificate combined_certificate(const Time& t1, const Nat& k1, const Nat& k2, const Nat& k3, const Nat& k4) {
  Certificate c;
  c.name = "checktime-then-multisig";
  const WpFormula ms = wp_multi_sig24(k1, k2, k3, k4);
  c.steps.push_back(CertStep{wp_combined(t1, k1, k2, k3, k4), check_time_script(t1), ms, Evidence::EnumeratedCheck});
  c.steps.push_back(
      CertStep{ms, multi_sig_script(2, {k1, k2, k3, k4}), accept_formula(), Evidence::EnumeratedCheck});
  c.final_post = accept_formula();
  return c;
}

namespace {

using nlohmann::json;

WpFormula formula_field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw CertificateError(where + ": missing \"" + key + "\"");
  const json& v = j.at(key);
  std::string text;
  if (v.is_string()) {
    text = v.get<std::string>();
  } else if (v.is_array()) {
    for (const auto& line : v) {
      if (!line.is_string()) throw CertificateError(where + ": \"" + key + "\" lines must be strings");
      text += line.get<std::string>() + "\n";
    }
  } else {
    throw CertificateError(where + ": \"" + key + "\" must be a string or an array of strings");
  }
  try {
    return parse_formula(text);
  } catch (const FormulaError& e) {
    throw CertificateError(where + ": \"" + key + "\": " + e.what());
  }
}

json formula_lines(const WpFormula& f) {
  json lines = json::array();
  std::istringstream in(render_formula(f));
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

}  // namespace

Certificate parse_certificate(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CertificateError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CertificateError("certificate must be a JSON object");
  Certificate c;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw CertificateError("\"name\" must be a string");
    c.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("steps") || !doc["steps"].is_array() || doc["steps"].empty())
    throw CertificateError("\"steps\" must be a non-empty array");
  for (std::size_t i = 0; i < doc["steps"].size(); ++i) {
    const json& s = doc["steps"][i];
    const std::string where = "step " + std::to_string(i);
    if (!s.is_object()) throw CertificateError(where + ": must be an object");
    CertStep step;
    step.pre = formula_field(s, "pre", where);
    step.post = formula_field(s, "post", where);
    if (!s.contains("script") || !s["script"].is_string())
      throw CertificateError(where + ": \"script\" must be a string");
    try {
      step.segment = parse_script(s["script"].get<std::string>());
    } catch (const ParseError& e) {
      throw CertificateError(where + ": script: " + e.what());
    }
    const std::string ev = s.value("evidence", std::string(to_string(Evidence::EnumeratedCheck)));
    auto kind = parse_evidence(ev);
    if (!kind) throw CertificateError(where + ": unknown evidence \"" + ev + "\"");
    step.evidence = *kind;
    c.steps.push_back(std::move(step));
  }
  c.final_post = formula_field(doc, "final_post", "certificate");
  return c;
}

std::string render_certificate(const Certificate& cert) {
  json doc;
  doc["name"] = cert.name;
  doc["steps"] = json::array();
  for (const auto& s : cert.steps)
    doc["steps"].push_back({{"pre", formula_lines(s.pre)},
                            {"script", render_script(s.segment)},
                            {"post", formula_lines(s.post)},
                            {"evidence", to_string(s.evidence)}});
  doc["final_post"] = formula_lines(cert.final_post);
  return doc.dump(2) + "\n";
}

}  // namespace scriptwp
