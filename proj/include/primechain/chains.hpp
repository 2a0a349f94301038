#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "primechain/errors.hpp"
#include "primechain/interval.hpp"
#include "primechain/primality.hpp"
#include "primechain/rational.hpp"

namespace primechain {

/// How the real orbit value is mapped to an integer term.
enum class RoundingMode { Nearest, Floor };

/// How the next prime is chosen inside a feasible window.
enum class SelectionPolicy { Nearest, NextAbove };

enum class RuleKind { Power, Exp2Tower, DigitShift, ScaledNN };

inline const char* rounding_name(RoundingMode m) {
  return m == RoundingMode::Nearest ? "nearest" : "floor";
}
inline const char* policy_name(SelectionPolicy p) {
  return p == SelectionPolicy::Nearest ? "nearest" : "next-above";
}

/// One step law x -> x^e, x -> 2^x, x -> b*x, or the indexed family c*n^n.
struct GrowthRule {
  RuleKind kind = RuleKind::Power;
  RationalExponent exponent{3, 2};  // Power
  RoundingMode rounding = RoundingMode::Nearest;
  unsigned long shift_base = 10;  // DigitShift
  unsigned long nn_start = 3;     // ScaledNN

  static GrowthRule power(RationalExponent e, RoundingMode r = RoundingMode::Nearest) {
    if (e.is_identity()) throw domain_error("power rule requires exponent > 1");
    GrowthRule g;
    g.kind = RuleKind::Power;
    g.exponent = e;
    g.rounding = r;
    return g;
  }
  static GrowthRule exp2_tower() {
    GrowthRule g;
    g.kind = RuleKind::Exp2Tower;
    g.rounding = RoundingMode::Floor;
    return g;
  }
  static GrowthRule digit_shift(unsigned long base) {
    if (base < 2) throw domain_error("digit shift base must be >= 2");
    GrowthRule g;
    g.kind = RuleKind::DigitShift;
    g.rounding = RoundingMode::Nearest;
    g.shift_base = base;
    return g;
  }
  static GrowthRule scaled_nn(unsigned long n_from) {
    if (n_from < 1) throw domain_error("scaled n^n start must be >= 1");
    GrowthRule g;
    g.kind = RuleKind::ScaledNN;
    g.rounding = RoundingMode::Floor;
    g.nn_start = n_from;
    return g;
  }

  /// "power:5/4:nearest" | "power:3:floor" | "exp2" | "shift:10" | "nn:3"
  static GrowthRule parse(std::string_view spec) {
    const auto next_field = [](std::string_view& rest) -> std::string_view {
      const auto colon = rest.find(':');
      std::string_view f = rest.substr(0, colon);
      rest = colon == std::string_view::npos ? std::string_view{} : rest.substr(colon + 1);
      return f;
    };
    std::string_view rest = spec;
    const std::string_view head = next_field(rest);
    if (head == "exp2") {
      if (!rest.empty()) throw parse_error("rule 'exp2' takes no parameters");
      return exp2_tower();
    }
    const auto to_ulong = [&](std::string_view part) -> unsigned long {
      if (part.empty() || part.size() > 9) throw parse_error("bad rule parameter in '" + std::string(spec) + "'");
      unsigned long v = 0;
      for (char c : part) {
        if (c < '0' || c > '9') throw parse_error("bad rule parameter in '" + std::string(spec) + "'");
        v = v * 10 + static_cast<unsigned long>(c - '0');
      }
      return v;
    };
    if (head == "shift") return digit_shift(to_ulong(next_field(rest)));
    if (head == "nn") return scaled_nn(to_ulong(next_field(rest)));
    if (head == "power") {
      const RationalExponent e = RationalExponent::parse(next_field(rest));
      const std::string_view mode = next_field(rest);
      RoundingMode r = RoundingMode::Nearest;
      if (mode == "floor")
        r = RoundingMode::Floor;
      else if (mode != "nearest" && !mode.empty())
        throw parse_error("rounding must be 'nearest' or 'floor', got '" + std::string(mode) + "'");
      return power(e, r);
    }
    throw parse_error("unknown rule '" + std::string(spec) + "'");
  }

  std::string spec() const {
    switch (kind) {
      case RuleKind::Power:
        return "power:" + exponent.str() + ":" + rounding_name(rounding);
      case RuleKind::Exp2Tower:
        return "exp2";
      case RuleKind::DigitShift:
        return "shift:" + std::to_string(shift_base);
      case RuleKind::ScaledNN:
        return "nn:" + std::to_string(nn_start);
    }
    return "?";
  }

  friend bool operator==(const GrowthRule& a, const GrowthRule& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case RuleKind::Power: return a.exponent == b.exponent && a.rounding == b.rounding;
      case RuleKind::Exp2Tower: return true;
      case RuleKind::DigitShift: return a.shift_base == b.shift_base;
      case RuleKind::ScaledNN: return a.nn_start == b.nn_start;
    }
    return false;
  }
};

/// A chain of primes linked by a growth rule, optionally with the seed
/// enclosure that realizes it.
struct PrimeChain {
  GrowthRule rule;
  SelectionPolicy policy = SelectionPolicy::Nearest;
  std::vector<mpz_class> primes;
  std::optional<RealInterval> seed;

  std::size_t length() const { return primes.size(); }
  const mpz_class& last() const {
    if (primes.empty()) throw domain_error("chain is empty");
    return primes.back();
  }
};

/// Exact decimal digit count (display and energy both want the true value).
inline std::size_t digits10(const mpz_class& v) {
  if (v == 0) return 1;
  mpz_class a = abs(v);
  return a.get_str().size();
}

namespace detail {

/// Smallest t >= 1 with scale * t^q >= target (all positive, exact).
inline mpz_class least_scaled_root(const mpz_class& target, unsigned long q, const mpz_class& scale) {
  mpz_class est = target / scale;
  mpz_class t;
  mpz_root(t.get_mpz_t(), est.get_mpz_t(), q);
  if (t < 1) t = 1;
  const auto holds = [&](const mpz_class& v) {
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), v.get_mpz_t(), q);
    return pw * scale >= target;
  };
  while (!holds(t)) ++t;
  while (t > 1 && holds(t - 1)) --t;
  return t;
}

/// Largest t >= 1 with scale * t^q <= target (all positive, exact).
inline mpz_class greatest_scaled_root(const mpz_class& target, unsigned long q, const mpz_class& scale) {
  mpz_class est = target / scale;
  mpz_class t;
  mpz_root(t.get_mpz_t(), est.get_mpz_t(), q);
  if (t < 1) t = 1;
  const auto holds = [&](const mpz_class& v) {
    mpz_class pw;
    mpz_pow_ui(pw.get_mpz_t(), v.get_mpz_t(), q);
    return pw * scale <= target;
  };
  while (!holds(t)) {
    if (t == 1) throw domain_error("scaled root: no admissible value");
    --t;
  }
  while (holds(t + 1)) ++t;
  return t;
}

}  // namespace detail

/// Exact integer window of successors of s under a power rule: the set of t
/// reachable as the rounding of x^e when x rounds to s. Nearest mode brackets
/// by the half-integer offsets (s -/+ 1/2)^e, floor mode by s^e and (s+1)^e.
/// Boundary ties cannot occur in nearest mode: (2s-1)^p is odd while 2^p t^q
/// is even.
inline primality::SearchWindow power_window(const mpz_class& s, const RationalExponent& e,
                                            RoundingMode mode) {
  if (s < 2) throw domain_error("power window requires s >= 2");
  if (e.is_identity()) throw domain_error("power window requires exponent > 1");
  const unsigned long p = e.num, q = e.den;
  mpz_class lo, hi;
  if (mode == RoundingMode::Nearest) {
    mpz_class below, above, two_p;
    mpz_pow_ui(below.get_mpz_t(), mpz_class(2 * s - 1).get_mpz_t(), p);
    mpz_pow_ui(above.get_mpz_t(), mpz_class(2 * s + 1).get_mpz_t(), p);
    mpz_ui_pow_ui(two_p.get_mpz_t(), 2, p);
    lo = detail::least_scaled_root(below, q, two_p);     // ceil((s-1/2)^e)
    hi = detail::greatest_scaled_root(above, q, two_p);  // floor((s+1/2)^e)
  } else {
    mpz_class base, next;
    mpz_pow_ui(base.get_mpz_t(), s.get_mpz_t(), p);
    mpz_pow_ui(next.get_mpz_t(), mpz_class(s + 1).get_mpz_t(), p);
    lo = detail::least_scaled_root(base, q, mpz_class(1));     // ceil(s^e)
    hi = detail::greatest_scaled_root(next, q, mpz_class(1));  // floor((s+1)^e)
  }
  return primality::SearchWindow(lo, hi + 1);
}

/// Successor window under a digit shift used for stepwise extension: the
/// base-b digit extensions of s. (Orbit rounding itself is slightly laxer --
/// round(b*x) can land one digit-carry outside this window -- but extension
/// deliberately stays on digit extensions.)
inline primality::SearchWindow shift_window(const mpz_class& s, unsigned long base) {
  if (s < 1) throw domain_error("shift window requires s >= 1");
  return primality::SearchWindow(s * base, s * base + base);
}

/// One prime selected from a feasible window, with the window kept for
/// reporting.
struct StepPick {
  mpz_class chosen;
  primality::PrimeCandidate verdict;
  mpz_class window_lo;
  mpz_class window_hi;  // half-open
};

namespace detail {

/// Choose between the nearest prime below and above an exact real target
/// described by: floor m of the target, plus an exact comparator that orders
/// (down + up) against twice the target. Ties go upward.
inline std::optional<StepPick> pick_by_target(
    const primality::SearchWindow& w, const mpz_class& m, int extra_rounds,
    const std::function<int(const mpz_class&)>& cmp_sum_vs_twice_target) {
  std::optional<primality::PrimeCandidate> down;
  const mpz_class down_hi = std::min(m, mpz_class(w.hi - 1));
  if (down_hi >= w.lo) down = primality::last_prime_in_window(primality::SearchWindow(w.lo, down_hi + 1), extra_rounds);
  std::optional<primality::PrimeCandidate> up;
  const mpz_class up_lo = std::max(mpz_class(m + 1), w.lo);
  if (up_lo < w.hi) up = primality::first_prime_in_window(primality::SearchWindow(up_lo, w.hi), extra_rounds);

  if (!down && !up) return std::nullopt;
  const primality::PrimeCandidate* pick = nullptr;
  if (!down)
    pick = &*up;
  else if (!up)
    pick = &*down;
  else {
    const int c = cmp_sum_vs_twice_target(down->value + up->value);
    pick = (c < 0 || c == 0) ? &*up : &*down;  // sum below twice-target: up is closer; tie up
  }
  return StepPick{pick->value, *pick, w.lo, w.hi};
}

}  // namespace detail

/// Select the next prime after s under the rule's local window, or nullopt if
/// the window holds no prime (the dead-end case the caller reports).
inline std::optional<StepPick> pick_next(const mpz_class& s, const GrowthRule& rule,
                                         SelectionPolicy policy, int extra_rounds = 2) {
  if (rule.kind == RuleKind::Power) {
    const primality::SearchWindow w = power_window(s, rule.exponent, rule.rounding);
    const unsigned long p = rule.exponent.num, q = rule.exponent.den;
    mpz_class sp;
    mpz_pow_ui(sp.get_mpz_t(), s.get_mpz_t(), p);
    mpz_class m;  // floor(s^e)
    mpz_root(m.get_mpz_t(), sp.get_mpz_t(), q);
    if (policy == SelectionPolicy::NextAbove) {
      const mpz_class from = std::max(mpz_class(m + 1), w.lo);
      if (from >= w.hi) return std::nullopt;
      auto c = primality::first_prime_in_window(primality::SearchWindow(from, w.hi), extra_rounds);
      if (!c) return std::nullopt;
      return StepPick{c->value, *c, w.lo, w.hi};
    }
    // nearest to s^e: compare (down+up)^q against 2^q * s^p exactly
    mpz_class rhs;
    mpz_ui_pow_ui(rhs.get_mpz_t(), 2, q);
    rhs *= sp;
    return detail::pick_by_target(w, m, extra_rounds, [&](const mpz_class& sum) {
      mpz_class lhs;
      mpz_pow_ui(lhs.get_mpz_t(), sum.get_mpz_t(), q);
      return cmp(lhs, rhs);
    });
  }
  if (rule.kind == RuleKind::DigitShift) {
    const primality::SearchWindow w = shift_window(s, rule.shift_base);
    if (policy == SelectionPolicy::NextAbove) {
      auto c = primality::first_prime_in_window(w, extra_rounds);
      if (!c) return std::nullopt;
      return StepPick{c->value, *c, w.lo, w.hi};
    }
    // target = window centre (b*s + (b-1)/2); compare sum against 2*centre
    const mpz_class twice_centre = 2 * rule.shift_base * s + rule.shift_base - 1;
    const mpz_class m = twice_centre / 2;  // floor(centre)
    return detail::pick_by_target(w, m, extra_rounds,
                                  [&](const mpz_class& sum) { return cmp(sum, twice_centre); });
  }
  throw domain_error("rule '" + rule.spec() + "' has no stepwise extension law");
}

/// Result of growing a chain in place.
struct ExtendReport {
  std::size_t appended = 0;
  std::optional<mpz_class> blocked_lo;  // window that held no prime
  std::optional<mpz_class> blocked_hi;
  bool blocked() const { return blocked_lo.has_value(); }
};

/// Append up to `steps` primes to the chain; stops early at a dead end and
/// reports the empty window.
inline ExtendReport extend_chain(PrimeChain& chain, std::size_t steps, int extra_rounds = 2) {
  if (chain.primes.empty()) throw domain_error("cannot extend an empty chain");
  ExtendReport rep;
  for (std::size_t i = 0; i < steps; ++i) {
    auto pick = pick_next(chain.primes.back(), chain.rule, chain.policy, extra_rounds);
    if (!pick) {
      const auto w = chain.rule.kind == RuleKind::DigitShift
                         ? shift_window(chain.primes.back(), chain.rule.shift_base)
                         : power_window(chain.primes.back(), chain.rule.exponent, chain.rule.rounding);
      rep.blocked_lo = w.lo;
      rep.blocked_hi = w.hi;
      return rep;
    }
    chain.primes.push_back(pick->chosen);
    ++rep.appended;
  }
  return rep;
}

/// Every adjacent pair sits inside the rule's feasibility law: the exact
/// power window for power rules, the rounding image |t - b*s| <= b/2 for
/// digit shifts.
inline bool chain_is_consistent(const PrimeChain& chain) {
  for (std::size_t i = 0; i + 1 < chain.primes.size(); ++i) {
    const mpz_class& s = chain.primes[i];
    const mpz_class& t = chain.primes[i + 1];
    if (chain.rule.kind == RuleKind::Power) {
      const auto w = power_window(s, chain.rule.exponent, chain.rule.rounding);
      if (t < w.lo || t >= w.hi) return false;
    } else if (chain.rule.kind == RuleKind::DigitShift) {
      const mpz_class dist = 2 * abs(t - s * chain.rule.shift_base);
      if (dist > chain.rule.shift_base) return false;
    } else {
      return false;  // no pairwise law to check
    }
  }
  return true;
}

/// ---- Orbit generation from a seed enclosure -------------------------------

enum class GenerateOutcome { Completed, PrecisionExhausted };

struct GeneratedTerm {
  std::size_t index;
  mpz_class value;
  primality::PrimeCandidate verdict;
};

struct GenerateResult {
  std::vector<GeneratedTerm> terms;
  GenerateOutcome outcome = GenerateOutcome::Completed;
  std::size_t undecided_index = 0;   // first index whose rounding stayed open
  mpfr_prec_t precision_bits = 0;    // working precision of the final attempt

  bool completed() const { return outcome == GenerateOutcome::Completed; }
};

namespace detail {

/// Shared escalation ladder: walk the orbit, round each level, retry the whole
/// walk at higher precision while the blocking width is still shrinking. A
/// width that stops improving under escalation is intrinsic to the seed's own
/// uncertainty, at which point the honest answer is "undecidable".
template <typename Apply>
GenerateResult generate_ladder(const RealInterval& seed, std::size_t count, bool emit_index0,
                               RoundingMode mode, Apply&& apply, const PrecisionPolicy& policy,
                               int extra_rounds) {
  policy.validate();
  mpfr_prec_t prec = policy.start_bits;
  std::optional<std::size_t> prev_index;
  std::optional<mpfr_exp_t> prev_width;
  std::vector<std::pair<std::size_t, mpz_class>> decided;
  GenerateResult result;

  while (true) {
    decided.clear();
    RealInterval x = seed.rounded_to(prec);
    std::optional<mpfr_exp_t> blocked_width;
    std::size_t blocked_index = 0;

    for (std::size_t idx = 0; idx <= count; ++idx) {
      if (idx > 0) x = apply(x);
      const auto r = (mode == RoundingMode::Nearest) ? round_nearest(x) : floor_of(x);
      if (!r) {
        blocked_index = idx;
        blocked_width = x.width_exponent();
        break;
      }
      if (idx > 0 || emit_index0) decided.emplace_back(idx, *r);
    }

    if (!blocked_width) {
      result.outcome = GenerateOutcome::Completed;
      result.precision_bits = prec;
      break;
    }
    // Escalation makes progress while it reaches deeper levels, or narrows
    // the blocking interval at the same level. A width that holds still under
    // doubled precision is the seed's own uncertainty showing through.
    const bool improving = !prev_index || blocked_index > *prev_index ||
                           (blocked_index == *prev_index && *blocked_width <= *prev_width - 2);
    if (prec >= policy.max_bits || !improving) {
      result.outcome = GenerateOutcome::PrecisionExhausted;
      result.undecided_index = blocked_index;
      result.precision_bits = prec;
      break;
    }
    prev_index = blocked_index;
    prev_width = blocked_width;
    prec = policy.next(prec);
  }

  result.terms.reserve(decided.size());
  for (auto& [idx, value] : decided) {
    GeneratedTerm t;
    t.index = idx;
    t.verdict = primality::classify(value, extra_rounds);
    t.value = std::move(value);
    result.terms.push_back(std::move(t));
  }
  return result;
}

}  // namespace detail

/// Iterate the rule's orbit from a seed enclosure and emit the rounded term at
/// every level, index 0 included (the rounding of the seed itself). Stops at
/// `count` or at the first undecidable rounding, whichever comes first.
inline GenerateResult generate_from_seed(const RealInterval& seed, const GrowthRule& rule,
                                         std::size_t count, const PrecisionPolicy& policy = {},
                                         int extra_rounds = 2) {
  if (!seed.is_positive()) throw domain_error("seed must be positive");
  switch (rule.kind) {
    case RuleKind::Power: {
      const RationalExponent e = rule.exponent;
      return detail::generate_ladder(
          seed, count, /*emit_index0=*/true, rule.rounding,
          [&](const RealInterval& x) { return pow_rational(x, e); }, policy, extra_rounds);
    }
    case RuleKind::DigitShift: {
      // Orbit values round to nearest; the digit-extension window applies to
      // stepwise extension, not to rounding the orbit itself.
      const mpz_class b(rule.shift_base);
      return detail::generate_ladder(
          seed, count, /*emit_index0=*/true, RoundingMode::Nearest,
          [&](const RealInterval& x) { return mul_integer(x, b); }, policy, extra_rounds);
    }
    case RuleKind::Exp2Tower:
      // Tower terms start at level 1; the seed's own floor is not a term.
      return detail::generate_ladder(
          seed, count, /*emit_index0=*/false, RoundingMode::Floor,
          [&](const RealInterval& x) { return exp2_interval(x); }, policy, extra_rounds);
    case RuleKind::ScaledNN:
      throw domain_error("scaled n^n is indexed, not iterated: use scan_scaled_nn");
  }
  throw domain_error("unhandled rule kind");
}

/// Mills ladder: terms floor(A^(3^n)) for n = 1..count via repeated cubing.
inline GenerateResult verify_mills(const RealInterval& A, std::size_t count,
                                   const PrecisionPolicy& policy = {}, int extra_rounds = 2) {
  if (!A.is_positive()) throw domain_error("Mills constant must be positive");
  return detail::generate_ladder(
      A, count, /*emit_index0=*/false, RoundingMode::Floor,
      [](const RealInterval& x) { return pow_integer(x, 3); }, policy, extra_rounds);
}

/// Wright tower: terms floor(2^2^...^2^alpha) for n = 1..count.
inline GenerateResult verify_wright(const RealInterval& alpha, std::size_t count,
                                    const PrecisionPolicy& policy = {}, int extra_rounds = 2,
                                    const Exp2Limits& limits = {}) {
  return detail::generate_ladder(
      alpha, count, /*emit_index0=*/false, RoundingMode::Floor,
      [&](const RealInterval& x) { return exp2_interval(x, limits); }, policy, extra_rounds);
}

/// Forward Mills construction: start at 2, cube, take the next prime.
inline PrimeChain regenerate_mills(std::size_t count, int extra_rounds = 2) {
  if (count < 1) throw domain_error("regenerate_mills: count must be >= 1");
  PrimeChain chain;
  chain.rule = GrowthRule::power(RationalExponent(3, 1), RoundingMode::Floor);
  chain.policy = SelectionPolicy::NextAbove;
  chain.primes = {mpz_class(2)};
  while (chain.primes.size() < count) {
    const mpz_class cube = chain.primes.back() * chain.primes.back() * chain.primes.back();
    auto c = primality::next_prime(cube, extra_rounds);
    chain.primes.push_back(c.value);
  }
  return chain;
}

/// Forward Wright construction. The published tower is pinned: 3, 13, 16381,
/// then the next prime above 2^16381 (a 4932-digit search; allowed only when
/// the caller asks for it). Depth 5 would require 2^(10^4931) and is refused.
inline PrimeChain regenerate_wright(std::size_t count, int extra_rounds = 2) {
  if (count < 1) throw domain_error("regenerate_wright: count must be >= 1");
  if (count > 4) throw resource_error("regenerate_wright: tower term 5 is astronomically out of reach");
  PrimeChain chain;
  chain.rule = GrowthRule::exp2_tower();
  chain.policy = SelectionPolicy::NextAbove;
  const std::array<unsigned long, 3> known = {3, 13, 16381};
  for (std::size_t i = 0; i < std::min<std::size_t>(count, 3); ++i)
    chain.primes.emplace_back(known[i]);
  if (count == 4) {
    mpz_class tower = mpz_class(1) << 16381;
    chain.primes.push_back(primality::next_prime(tower, extra_rounds).value);
  }
  return chain;
}

/// Scan floor(c * n^n) for n in [n_from, n_to]; term index is n itself.
/// Per-term escalation; an intrinsically undecidable floor ends the scan.
inline GenerateResult scan_scaled_nn(const RealInterval& c, unsigned long n_from, unsigned long n_to,
                                     const PrecisionPolicy& policy = {}, int extra_rounds = 2) {
  if (!c.is_positive()) throw domain_error("scale constant must be positive");
  if (n_from < 1 || n_to < n_from) throw domain_error("scan_scaled_nn: need 1 <= n_from <= n_to");
  policy.validate();
  GenerateResult result;
  for (unsigned long n = n_from; n <= n_to; ++n) {
    mpz_class nn;
    mpz_ui_pow_ui(nn.get_mpz_t(), n, n);
    mpfr_prec_t prec = policy.start_bits;
    std::optional<mpfr_exp_t> prev_width;
    std::optional<mpz_class> value;
    mpfr_prec_t used = prec;
    while (true) {
      const RealInterval t = mul_integer(c.rounded_to(prec), nn);
      used = prec;
      if (auto f = floor_of(t)) {
        value = std::move(*f);
        break;
      }
      const mpfr_exp_t w = t.width_exponent();
      const bool improving = !prev_width || w <= *prev_width - 2;
      if (prec >= policy.max_bits || !improving) break;
      prev_width = w;
      prec = policy.next(prec);
    }
    result.precision_bits = used;
    if (!value) {
      result.outcome = GenerateOutcome::PrecisionExhausted;
      result.undecided_index = n;
      return result;
    }
    GeneratedTerm term;
    term.index = n;
    term.verdict = primality::classify(*value, extra_rounds);
    term.value = std::move(*value);
    result.terms.push_back(std::move(term));
  }
  result.outcome = GenerateOutcome::Completed;
  return result;
}

/// ---- Backward recovery ----------------------------------------------------

namespace detail {

inline std::pair<mpq_class, mpq_class> level_window(const mpz_class& s, RoundingMode mode) {
  if (mode == RoundingMode::Nearest)
    return {mpq_class(2 * s - 1, 2), mpq_class(2 * s + 1, 2)};
  return {mpq_class(s), mpq_class(s + 1)};
}

/// Run one backward pass at fixed precision. The enclosures only ever
/// overapproximate, so an empty intersection is a proof of infeasibility, not
/// a precision artifact.
template <typename Pull>
RealInterval pullback_pass(const std::vector<mpz_class>& values, RoundingMode mode,
                           mpfr_prec_t prec, Pull&& pull) {
  auto [lo, hi] = level_window(values.back(), mode);
  RealInterval I = RealInterval::from_rationals(lo, hi, prec);
  for (std::size_t i = values.size() - 1; i-- > 0;) {
    I = pull(I);
    auto [wlo, whi] = level_window(values[i], mode);
    const RealInterval W = RealInterval::from_rationals(wlo, whi, prec);
    auto J = intersect(I, W);
    if (!J)
      throw empty_intersection_error("no seed realizes the chain: constraint at index " +
                                     std::to_string(i) + " (value " + values[i].get_str() +
                                     ") is incompatible with the later terms");
    I = std::move(*J);
  }
  return I;
}

/// Escalate a pullback until its width stops improving (the residual width is
/// then pinned by the chain itself, not by rounding slop).
template <typename Pass>
RealInterval escalate_pullback(const PrecisionPolicy& policy, Pass&& pass) {
  policy.validate();
  mpfr_prec_t prec = policy.start_bits;
  RealInterval best = pass(prec);
  while (prec < policy.max_bits) {
    prec = policy.next(prec);
    RealInterval cand = pass(prec);
    const bool improved = cand.width_exponent() <= best.width_exponent() - 2;
    best = std::move(cand);
    if (!improved) break;
  }
  return best;
}

}  // namespace detail

/// Tightest enclosure of the seeds x whose power-rule orbit rounds to exactly
/// this chain. Inverts x -> x^(p/q) as root-by-p then power-by-q and
/// intersects with each level's rounding window on the way down.
inline RealInterval recover_seed(const PrimeChain& chain, const PrecisionPolicy& policy = {}) {
  if (chain.rule.kind != RuleKind::Power)
    throw domain_error("seed recovery is defined for power rules");
  if (chain.primes.empty()) throw domain_error("cannot recover a seed from an empty chain");
  const RationalExponent e = chain.rule.exponent;
  return detail::escalate_pullback(policy, [&](mpfr_prec_t prec) {
    return detail::pullback_pass(chain.primes, chain.rule.rounding, prec, [&](const RealInterval& I) {
      return pow_integer(nth_root(I, e.num), e.den);
    });
  });
}

/// Enclosure of the Mills-style constant A from a floor chain p_n =
/// floor(A^(3^n)): pull the last window down by cube roots, intersecting each
/// level, then take one more cube root to reach A itself.
inline RealInterval recover_mills_constant(const std::vector<mpz_class>& primes,
                                           const PrecisionPolicy& policy = {}) {
  if (primes.empty()) throw domain_error("cannot recover a constant from an empty chain");
  return detail::escalate_pullback(policy, [&](mpfr_prec_t prec) {
    RealInterval I = detail::pullback_pass(primes, RoundingMode::Floor, prec,
                                           [](const RealInterval& x) { return nth_root(x, 3); });
    return nth_root(I, 3);
  });
}

/// Exact rational intersection of the constraints p_i <= c * n^n < p_i + 1.
/// The enclosure is tight up to outward rounding at the returned precision.
inline RealInterval recover_scale_constant(const std::vector<mpz_class>& primes,
                                           unsigned long n_from, const PrecisionPolicy& policy = {}) {
  if (primes.empty()) throw domain_error("cannot recover a constant from no terms");
  policy.validate();
  mpq_class lo(0), hi(-1);
  bool first = true;
  unsigned long n = n_from;
  for (const mpz_class& p : primes) {
    mpz_class nn;
    mpz_ui_pow_ui(nn.get_mpz_t(), n, n);
    mpq_class tlo(p, nn), thi(p + 1, nn);
    tlo.canonicalize();
    thi.canonicalize();
    if (first) {
      lo = tlo;
      hi = thi;
      first = false;
    } else {
      if (tlo > lo) lo = tlo;
      if (thi < hi) hi = thi;
    }
    ++n;
  }
  if (lo >= hi)
    throw empty_intersection_error("no scale constant satisfies all floor constraints");
  // Precision: enough bits to keep the exact endpoints distinct after rounding.
  const auto num_bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(lo.get_num_mpz_t(), 2));
  const auto den_bits = static_cast<mpfr_prec_t>(mpz_sizeinbase(lo.get_den_mpz_t(), 2));
  const mpfr_prec_t prec = std::min(std::max(policy.start_bits, num_bits + den_bits + 32), policy.max_bits);
  return RealInterval::from_rationals(lo, hi, prec);
}

}  // namespace primechain
