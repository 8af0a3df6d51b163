#include "scriptwp/hoare.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

namespace scriptwp {

std::vector<Nat> Domain::values() const {
  std::set<Nat> all(extra_values.begin(), extra_values.end());
  for (std::uint64_t v = 0; v <= max_value; ++v) all.insert(Nat(v));
  return {all.begin(), all.end()};
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw std::overflow_error("domain too large to enumerate");
  return a * b;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (b > std::numeric_limits<std::uint64_t>::max() - a) throw std::overflow_error("domain too large to enumerate");
  return a + b;
}

// Number of stacks of each height.
std::vector<std::uint64_t> stacks_per_height(std::size_t max_height, std::uint64_t alphabet) {
  std::vector<std::uint64_t> out;
  std::uint64_t n = 1;
  for (std::size_t h = 0; h <= max_height; ++h) {
    out.push_back(n);
    if (h < max_height) n = checked_mul(n, alphabet);
  }
  return out;
}

}  // namespace

std::uint64_t Domain::state_count() const {
  std::uint64_t stacks = 0;
  for (auto n : stacks_per_height(max_height, values().size())) stacks = checked_add(stacks, n);
  return checked_mul(checked_mul(stacks, times.size()), msgs.size());
}

Domain close_domain(Domain base, const CryptoOracle& oracle, const std::set<Nat>& constants,
                    const std::set<Nat>& lock_times) {
  std::set<Nat> seeds(constants.begin(), constants.end());
  for (const auto& c : constants)
    if (oracle.preimage)
      if (auto p = oracle.preimage(c)) seeds.insert(*p);

  std::set<Nat> values = seeds;
  for (std::uint64_t v = 0; v <= base.max_value; ++v) values.insert(Nat(v));
  if (oracle.sign) {
    std::set<Nat> sigs;
    for (const auto& m : base.msgs)
      for (const auto& v : values)
        if (auto s = oracle.sign(m, v)) sigs.insert(*s);
    values.insert(sigs.begin(), sigs.end());
  }
  for (const auto& v : values)
    if (v > base.max_value) base.extra_values.insert(v);

  for (const auto& t : lock_times) {
    for (const Nat& cand : {t == 0 ? Nat(0) : Nat(t - 1), t, Nat(t + 1)})
      if (std::find(base.times.begin(), base.times.end(), cand) == base.times.end()) base.times.push_back(cand);
  }
  std::sort(base.times.begin(), base.times.end());
  return base;
}

std::set<Nat> script_constants(const Script& script) {
  std::set<Nat> out;
  for (const auto& i : script)
    if (i.op() == Opcode::Push) out.insert(i.value());
  return out;
}

std::set<Nat> script_lock_times(const Script& script) {
  std::set<Nat> out;
  for (std::size_t i = 0; i + 1 < script.size(); ++i)
    if (script[i].op() == Opcode::Push && script[i + 1].op() == Opcode::CheckLockTimeVerify)
      out.insert(script[i].value());
  return out;
}

Domain derive_domain(Domain base, const CryptoOracle& oracle, const std::vector<const Script*>& scripts,
                     const std::vector<const WpFormula*>& formulas) {
  std::set<Nat> constants, locks;
  for (const Script* s : scripts) {
    auto c = script_constants(*s);
    auto l = script_lock_times(*s);
    constants.insert(c.begin(), c.end());
    locks.insert(l.begin(), l.end());
  }
  for (const WpFormula* f : formulas) {
    auto c = formula_constants(*f);
    auto l = formula_lock_times(*f);
    constants.insert(c.begin(), c.end());
    locks.insert(l.begin(), l.end());
  }
  // Lock times are compared against the clock, not stack cells.
  for (const auto& l : locks) constants.erase(l);
  return close_domain(std::move(base), oracle, constants, locks);
}

StackState state_at(const Domain& d, const std::vector<Nat>& values, std::uint64_t index) {
  const std::uint64_t per_stack = static_cast<std::uint64_t>(d.times.size()) * d.msgs.size();
  std::uint64_t stack_index = index / per_stack;
  const std::uint64_t rem = index % per_stack;
  StackState s;
  s.current_time = d.times[rem / d.msgs.size()];
  s.msg = d.msgs[rem % d.msgs.size()];

  const std::uint64_t base = values.size();
  std::size_t height = 0;
  std::uint64_t level = 1;
  while (stack_index >= level) {
    stack_index -= level;
    ++height;
    level *= base;
  }
  // Digit i (most significant first) is the element i from the top.
  std::vector<Nat> top_first(height);
  for (std::size_t i = height; i-- > 0;) {
    top_first[i] = values[stack_index % base];
    stack_index /= base;
  }
  s.stack = Stack::from_top_first(top_first);
  return s;
}

std::vector<StackState> enumerate_states(const Domain& d) {
  const auto values = d.values();
  const auto n = d.state_count();
  std::vector<StackState> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(state_at(d, values, i));
  return out;
}

const char* to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

std::string to_string(const Verdict& v) {
  if (v.holds) return "Holds (" + std::to_string(v.states_checked) + " states)";
  return "Counterexample (" + std::string(to_string(v.direction)) + ") at state #" + std::to_string(v.index) +
         ": " + to_string(*v.counterexample);
}

Verdict find_first_violation(const Domain& d, const StateCheck& check, const CheckOptions& opts) {
  if (d.msgs.empty() || d.times.empty()) throw std::invalid_argument("domain needs at least one msg and one time");
  const auto values = d.values();
  const std::uint64_t total = d.state_count();
  const std::uint64_t chunk = std::max<std::uint64_t>(opts.chunk, 1);
  const std::uint64_t chunks = (total + chunk - 1) / chunk;

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(chunks, 1)));

  constexpr std::uint64_t kNone = std::numeric_limits<std::uint64_t>::max();
  std::atomic<std::uint64_t> next_chunk{0};
  std::atomic<std::uint64_t> best{kNone};
  std::vector<Direction> dirs(chunks == 0 ? 1 : chunks, Direction::Forward);

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next_chunk.fetch_add(1);
      if (c >= chunks) return;
      const std::uint64_t begin = c * chunk;
      if (begin >= best.load()) return;
      const std::uint64_t end = std::min(total, begin + chunk);
      for (std::uint64_t i = begin; i < end; ++i) {
        if (auto dir = check(state_at(d, values, i))) {
          dirs[c] = *dir;
          std::uint64_t cur = best.load();
          while (i < cur && !best.compare_exchange_weak(cur, i)) {
          }
          break;
        }
      }
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  const std::uint64_t found = best.load();
  if (found == kNone) return Verdict::hold(total);
  Verdict v;
  v.holds = false;
  v.states_checked = total;
  v.index = found;
  v.direction = dirs[found / chunk];
  v.counterexample = state_at(d, values, found);
  return v;
}

Verdict check_triple(const CryptoOracle& oracle, const StatePredicate& pre, const Script& script,
                     const StatePredicate& post, const Domain& d, const CheckOptions& opts) {
  return find_first_violation(
      d,
      [&](const StackState& s) -> std::optional<Direction> {
        if (pre(s) && !lift_predicate(post, eval_script(oracle, script, s))) return Direction::Forward;
        return std::nullopt;
      },
      opts);
}

Verdict check_iff_triple(const CryptoOracle& oracle, const StatePredicate& pre, const Script& script,
                         const StatePredicate& post, const Domain& d, const CheckOptions& opts) {
  return find_first_violation(
      d,
      [&](const StackState& s) -> std::optional<Direction> {
        const bool before = pre(s);
        const bool after = lift_predicate(post, eval_script(oracle, script, s));
        if (before && !after) return Direction::Forward;
        if (!before && after) return Direction::Backward;
        return std::nullopt;
      },
      opts);
}

Verdict check_pred_equiv(const StatePredicate& phi, const StatePredicate& psi, const Domain& d,
                         const CheckOptions& opts) {
  return find_first_violation(
      d,
      [&](const StackState& s) -> std::optional<Direction> {
        const bool a = phi(s);
        const bool b = psi(s);
        if (a && !b) return Direction::Forward;
        if (!a && b) return Direction::Backward;
        return std::nullopt;
      },
      opts);
}

Verdict check_outcome_equiv(const CryptoOracle& oracle, const Script& p, const Script& q, const Domain& d,
                            const CheckOptions& opts) {
  return find_first_violation(
      d,
      [&](const StackState& s) -> std::optional<Direction> {
        const auto a = eval_script(oracle, p, s);
        const auto b = eval_script(oracle, q, s);
        if (a == b) return std::nullopt;
        // Forward: p succeeds where q does not match it.
        return a.ok() ? Direction::Forward : Direction::Backward;
      },
      opts);
}

}  // namespace scriptwp
