#include "scriptwp/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "scriptwp/certificate.hpp"
#include "scriptwp/hoare.hpp"
#include "scriptwp/json_io.hpp"
#include "scriptwp/script_text.hpp"
#include "scriptwp/symexec.hpp"

namespace scriptwp {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string script_text;
  std::string script_file;
  std::string script2_text;
  std::string script2_file;
  std::string formula_file;
  std::string cert_path;
  std::string corpus_dir = "corpus";

  std::string stack;
  std::string msg = "10";
  std::string time = "0";

  std::string hash_a = "2";
  std::string hash_b = "1";
  std::string sign_rule = "sum";

  std::size_t max_height = 6;
  std::uint64_t max_value = 2;
  std::string msgs = "10";
  std::string times = "0";
  unsigned threads = 0;

  bool json = false;
  bool tree = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Nat nat_arg(const std::string& text, const std::string& what) {
  auto n = parse_nat(text);
  if (!n) throw InputError(what + ": not a natural number: '" + text + "'");
  return *n;
}

std::vector<Nat> nat_list(const std::string& text, const std::string& what) {
  std::vector<Nat> out;
  if (text.find_first_not_of(" \t") == std::string::npos) return out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    out.push_back(nat_arg(item, what));
  }
  return out;
}

CryptoOracle oracle_of(const Options& o) {
  SignRule rule;
  if (o.sign_rule == "sum") rule = SignRule::Sum;
  else if (o.sign_rule == "xor") rule = SignRule::Xor;
  else throw InputError("--sign-rule must be sum or xor");
  return toy_oracle(nat_arg(o.hash_a, "--hash-a"), nat_arg(o.hash_b, "--hash-b"), rule);
}

Domain base_domain(const Options& o) {
  Domain d;
  d.max_height = o.max_height;
  d.max_value = o.max_value;
  d.msgs = nat_list(o.msgs, "--msgs");
  d.times = nat_list(o.times, "--times");
  if (d.msgs.empty() || d.times.empty()) throw InputError("--msgs and --times need at least one value");
  return d;
}

CheckOptions check_options(const Options& o) {
  CheckOptions c;
  c.threads = o.threads;
  return c;
}

Script load_script(const std::string& text, const std::string& file, bool have_text, const char* what) {
  if (!file.empty()) return parse_script(read_file(file));
  if (have_text) return parse_script(text);
  throw InputError(std::string("no ") + what + " given (pass it inline or with a file option)");
}

std::string join(const std::vector<Nat>& xs) {
  std::string out;
  for (const auto& x : xs) out += (out.empty() ? "" : ", ") + to_string(x);
  return out;
}

std::string describe(const Domain& d) {
  return std::to_string(d.state_count()) + " states (max height " + std::to_string(d.max_height) + ", values {" +
         join(d.values()) + "}, msgs {" + join(d.msgs) + "}, times {" + join(d.times) + "})";
}

json domain_json(const Domain& d) {
  json values = json::array(), msgs = json::array(), times = json::array();
  for (const auto& v : d.values()) values.push_back(nat_to_json(v));
  for (const auto& v : d.msgs) msgs.push_back(nat_to_json(v));
  for (const auto& v : d.times) times.push_back(nat_to_json(v));
  return {{"max_height", d.max_height}, {"values", values}, {"msgs", msgs}, {"times", times},
          {"states", d.state_count()}};
}

void print_verdict(std::ostream& out, const Options& o, const Verdict& v, const Domain& d) {
  if (o.json) {
    out << json{{"verdict", verdict_to_json(v)}, {"domain", domain_json(d)}}.dump(2) << "\n";
    return;
  }
  out << to_string(v) << "\n";
  out << "domain: " << describe(d) << "\n";
}

int cmd_run(const Options& o, bool have_script, std::ostream& out) {
  const Script script = load_script(o.script_text, o.script_file, have_script, "script");
  const CryptoOracle oracle = oracle_of(o);
  StackState s{nat_arg(o.time, "--time"), nat_arg(o.msg, "--msg"), Stack::from_top_first(nat_list(o.stack, "--stack"))};
  const ExecOutcome r = eval_script(oracle, script, s);
  if (o.json) out << outcome_to_json(r).dump(2) << "\n";
  else out << to_string(r) << "\n";
  return r.ok() ? kExitOk : kExitFailure;
}

int cmd_wp(const Options& o, bool have_script, std::ostream& out) {
  const Script script = load_script(o.script_text, o.script_file, have_script, "script");
  const WpFormula wp = derive_wp(script);
  if (o.json) {
    json doc{{"formula", formula_to_json(wp)}};
    if (o.tree) doc["tree"] = render_tree(sym_eval(script));
    out << doc.dump(2) << "\n";
    return kExitOk;
  }
  out << render_formula(wp) << "\n";
  if (o.tree) out << "\n" << render_tree(sym_eval(script));
  return kExitOk;
}

int cmd_check_wp(const Options& o, bool have_script, std::ostream& out) {
  const Script script = load_script(o.script_text, o.script_file, have_script, "script");
  const WpFormula f = parse_formula(read_file(o.formula_file));
  validate(f);
  const CryptoOracle oracle = oracle_of(o);
  const Domain d = derive_domain(base_domain(o), oracle, {&script}, {&f});
  const Verdict v = check_iff_triple(oracle, formula_predicate(oracle, f), script, accept_state, d, check_options(o));
  print_verdict(out, o, v, d);
  return v.holds ? kExitOk : kExitFailure;
}

int cmd_equiv(const Options& o, bool have1, bool have2, std::ostream& out) {
  const Script p = load_script(o.script_text, o.script_file, have1, "first script");
  const Script q = load_script(o.script2_text, o.script2_file, have2, "second script");
  const CryptoOracle oracle = oracle_of(o);
  const Domain d = derive_domain(base_domain(o), oracle, {&p, &q}, {});
  const Verdict v = check_outcome_equiv(oracle, p, q, d, check_options(o));
  print_verdict(out, o, v, d);
  return v.holds ? kExitOk : kExitFailure;
}

json cert_report_json(const Certificate& c, const CertReport& r, const Domain& d) {
  json steps = json::array();
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const auto& s = r.steps[i];
    json js{{"index", s.index},
            {"evidence", to_string(s.evidence)},
            {"script", render_script(c.steps[i].segment)},
            {"ok", s.ok()}};
    if (!s.error.empty()) js["error"] = s.error;
    else js["verdict"] = verdict_to_json(s.verdict);
    const auto& l = r.links[i];
    js["connected"] = l.connected;
    if (l.verdict) js["link_verdict"] = verdict_to_json(*l.verdict);
    steps.push_back(js);
  }
  json doc{{"name", c.name}, {"holds", r.holds}, {"steps", steps}, {"domain", domain_json(d)}};
  if (r.end_to_end) doc["end_to_end"] = verdict_to_json(*r.end_to_end);
  if (r.failed_step) doc["failed_step"] = *r.failed_step;
  if (!r.failure.empty()) doc["failure"] = r.failure;
  return doc;
}

void print_cert_report(std::ostream& out, const Certificate& c, const CertReport& r, const Domain& d) {
  out << "certificate " << (c.name.empty() ? "(unnamed)" : c.name) << ", domain " << describe(d) << "\n";
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const auto& s = r.steps[i];
    out << "step " << i << " [" << to_string(s.evidence) << "] '" << render_script(c.steps[i].segment) << "': ";
    out << (s.error.empty() ? to_string(s.verdict) : "error: " + s.error) << "\n";
    const auto& l = r.links[i];
    if (!l.connected) {
      out << "  link " << i << " -> " << (i + 1 < r.steps.size() ? "step " + std::to_string(i + 1) : "final post")
          << ": not connected";
      if (l.verdict) out << " (" << to_string(*l.verdict) << ")";
      out << "\n";
    }
  }
  if (r.end_to_end) out << "end-to-end: " << to_string(*r.end_to_end) << "\n";
  if (r.holds) out << "certificate holds\n";
  else out << "certificate FAILED" << (r.failed_step ? " at step " + std::to_string(*r.failed_step) : "") << ": "
           << r.failure << "\n";
}

int cmd_certify(const Options& o, std::ostream& out) {
  Certificate cert;
  try {
    cert = parse_certificate(read_file(o.cert_path));
  } catch (const CertificateError& e) {
    throw InputError(o.cert_path + ": " + e.what());
  }
  const CryptoOracle oracle = oracle_of(o);
  const Domain d = certificate_domain(base_domain(o), oracle, cert);
  const CertReport r = verify_certificate(oracle, cert, d, check_options(o));
  if (o.json) out << cert_report_json(cert, r, d).dump(2) << "\n";
  else print_cert_report(out, cert, r, d);
  return r.holds ? kExitOk : kExitFailure;
}

// Corpus scripts may lower the enumeration height with a "# max-height: N" line.
std::optional<std::size_t> max_height_directive(const std::string& text) {
  const std::string key = "# max-height:";
  auto at = text.find(key);
  if (at == std::string::npos) return std::nullopt;
  std::istringstream in(text.substr(at + key.size()));
  std::size_t h;
  if (!(in >> h)) throw InputError("malformed max-height directive");
  return h;
}

struct CorpusResult {
  std::string name;
  bool ok = true;
  std::vector<std::string> notes;
};

CorpusResult check_corpus_entry(const Options& o, const CryptoOracle& oracle, const fs::path& script_path) {
  CorpusResult r;
  r.name = script_path.stem().string();
  auto fail = [&r](std::string why) {
    r.ok = false;
    r.notes.push_back("FAIL " + why);
  };
  try {
    const std::string text = read_file(script_path.string());
    const Script script = parse_script(text);
    if (parse_script(render_script(script)) == script) r.notes.push_back("script round-trip ok");
    else fail("script round-trip");

    fs::path wp_path = script_path;
    wp_path.replace_extension(".wp");
    const WpFormula expected = parse_formula(read_file(wp_path.string()));
    validate(expected);
    const std::string canonical = render_formula(expected);
    if (render_formula(parse_formula(canonical)) == canonical) r.notes.push_back("formula round-trip ok");
    else fail("formula round-trip");

    Domain base = base_domain(o);
    if (auto h = max_height_directive(text)) base.max_height = std::min(base.max_height, *h);
    const WpFormula derived = derive_wp(script);
    const Domain d = derive_domain(base, oracle, {&script}, {&expected, &derived});
    const CheckOptions opts = check_options(o);

    const Verdict eq = check_pred_equiv(formula_predicate(oracle, derived), formula_predicate(oracle, expected), d, opts);
    if (eq.holds) r.notes.push_back("derived wp equivalent: " + to_string(eq));
    else fail("derived wp differs: " + to_string(eq));

    const Verdict iff = check_iff_triple(oracle, formula_predicate(oracle, expected), script, accept_state, d, opts);
    if (iff.holds) r.notes.push_back("iff-triple: " + to_string(iff));
    else fail("iff-triple: " + to_string(iff));
  } catch (const std::exception& e) {
    fail(e.what());
  }
  return r;
}

CorpusResult check_corpus_cert(const Options& o, const CryptoOracle& oracle, const fs::path& path) {
  CorpusResult r;
  r.name = path.filename().string();
  try {
    const Certificate cert = parse_certificate(read_file(path.string()));
    const Domain d = certificate_domain(base_domain(o), oracle, cert);
    const CertReport rep = verify_certificate(oracle, cert, d, check_options(o));
    r.ok = rep.holds;
    if (rep.holds) r.notes.push_back(std::to_string(cert.steps.size()) + " steps hold, end-to-end " +
                                     to_string(*rep.end_to_end));
    else r.notes.push_back("FAIL " + rep.failure);
  } catch (const std::exception& e) {
    r.ok = false;
    r.notes.push_back(std::string("FAIL ") + e.what());
  }
  return r;
}

int cmd_corpus(const Options& o, std::ostream& out) {
  if (!fs::is_directory(o.corpus_dir)) throw InputError("corpus directory not found: " + o.corpus_dir);
  std::vector<fs::path> scripts, certs;
  for (const auto& e : fs::directory_iterator(o.corpus_dir)) {
    const std::string name = e.path().filename().string();
    if (e.path().extension() == ".script") scripts.push_back(e.path());
    else if (name.size() > 10 && name.substr(name.size() - 10) == ".cert.json") certs.push_back(e.path());
  }
  std::sort(scripts.begin(), scripts.end());
  std::sort(certs.begin(), certs.end());
  if (scripts.empty() && certs.empty()) throw InputError("no corpus entries in " + o.corpus_dir);

  const CryptoOracle oracle = oracle_of(o);
  std::vector<CorpusResult> results;
  for (const auto& p : scripts) results.push_back(check_corpus_entry(o, oracle, p));
  for (const auto& p : certs) results.push_back(check_corpus_cert(o, oracle, p));

  const bool all = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.ok; });
  if (o.json) {
    json entries = json::array();
    for (const auto& r : results) entries.push_back({{"name", r.name}, {"ok", r.ok}, {"notes", r.notes}});
    out << json{{"ok", all}, {"entries", entries}}.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      out << (r.ok ? "PASS " : "FAIL ") << r.name << "\n";
      for (const auto& n : r.notes) out << "  " << n << "\n";
    }
    out << std::count_if(results.begin(), results.end(), [](const auto& r) { return r.ok; }) << "/"
        << results.size() << " corpus entries pass\n";
  }
  return all ? kExitOk : kExitFailure;
}

void add_oracle_options(CLI::App* sub, Options& o) {
  sub->add_option("--hash-a", o.hash_a, "toy hash multiplier (hash(n) = a*n + b)")->capture_default_str();
  sub->add_option("--hash-b", o.hash_b, "toy hash offset")->capture_default_str();
  sub->add_option("--sign-rule", o.sign_rule, "sum: sig = msg + pbk, xor: sig = msg ^ pbk")
      ->check(CLI::IsMember({"sum", "xor"}))
      ->capture_default_str();
}

void add_domain_options(CLI::App* sub, Options& o) {
  sub->add_option("--max-height", o.max_height, "largest stack height enumerated")->capture_default_str();
  sub->add_option("--max-value", o.max_value, "values 0..N are always enumerated")->capture_default_str();
  sub->add_option("--msgs", o.msgs, "comma-separated messages")->capture_default_str();
  sub->add_option("--times", o.times, "comma-separated current times")->capture_default_str();
  sub->add_option("--threads", o.threads, "worker threads, 0 = all cores")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Weakest preconditions and Hoare triples for non-branching Bitcoin Script", "scriptwp"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute a script on one state");
  auto* run_script = run->add_option("script", o.script_text, "script text");
  run->add_option("-f,--file", o.script_file, "read the script from a file");
  run->add_option("--stack", o.stack, "initial stack, top first, comma-separated");
  run->add_option("--msg", o.msg, "message being signed")->capture_default_str();
  run->add_option("--time", o.time, "current time")->capture_default_str();
  run->add_flag("--json", o.json, "machine-readable output");
  add_oracle_options(run, o);

  auto* wp = app.add_subcommand("wp", "derive the weakest precondition of acceptance");
  auto* wp_script = wp->add_option("script", o.script_text, "script text");
  wp->add_option("-f,--file", o.script_file, "read the script from a file");
  wp->add_flag("--json", o.json, "print the formula AST as JSON");
  wp->add_flag("--tree", o.tree, "also print the symbolic decision tree");

  auto* check = app.add_subcommand("check-wp", "check <formula>iff script <accept> by enumeration");
  auto* check_script = check->add_option("script", o.script_text, "script text");
  check->add_option("-f,--file", o.script_file, "read the script from a file");
  check->add_option("--formula", o.formula_file, "formula file")->required();
  check->add_flag("--json", o.json, "machine-readable output");
  add_oracle_options(check, o);
  add_domain_options(check, o);

  auto* equiv = app.add_subcommand("equiv", "compare two scripts' outcomes on every state");
  auto* eq1 = equiv->add_option("script", o.script_text, "first script text");
  auto* eq2 = equiv->add_option("script2", o.script2_text, "second script text");
  equiv->add_option("-f,--file", o.script_file, "read the first script from a file");
  equiv->add_option("--file2", o.script2_file, "read the second script from a file");
  equiv->add_flag("--json", o.json, "machine-readable output");
  add_oracle_options(equiv, o);
  add_domain_options(equiv, o);

  auto* certify = app.add_subcommand("certify", "verify a certificate chain");
  certify->add_option("certificate", o.cert_path, "certificate JSON file")->required();
  certify->add_flag("--json", o.json, "machine-readable output");
  add_oracle_options(certify, o);
  add_domain_options(certify, o);

  auto* corpus = app.add_subcommand("corpus", "regression over the shipped fixtures");
  corpus->add_option("--dir", o.corpus_dir, "corpus directory")->capture_default_str();
  corpus->add_flag("--json", o.json, "machine-readable output");
  add_oracle_options(corpus, o);
  add_domain_options(corpus, o);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (run->parsed()) return cmd_run(o, run_script->count() > 0, out);
    if (wp->parsed()) return cmd_wp(o, wp_script->count() > 0, out);
    if (check->parsed()) return cmd_check_wp(o, check_script->count() > 0, out);
    if (equiv->parsed()) {
      // With --file, the single positional names the second script.
      if (!o.script_file.empty() && eq1->count() > 0 && eq2->count() == 0 && o.script2_file.empty()) {
        o.script2_text = o.script_text;
        return cmd_equiv(o, false, true, out);
      }
      return cmd_equiv(o, eq1->count() > 0, eq2->count() > 0, out);
    }
    if (certify->parsed()) return cmd_certify(o, out);
    if (corpus->parsed()) return cmd_corpus(o, out);
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const FormulaError& e) {
    err << "formula error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const UnsupportedConstruct& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::overflow_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace scriptwp
