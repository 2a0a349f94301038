#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <thread>
#include <utility>
#include <vector>

#include "primechain/chains.hpp"
#include "primechain/errors.hpp"
#include "primechain/interval.hpp"
#include "primechain/primality.hpp"

namespace primechain::search {

/// Annealing schedule and domain knobs. start_min/start_max bound the real
/// seed x0 one level below the first chain term: first terms are drawn from
/// the integer image [⌈start_min^e⌉, ⌊start_max^e⌋]. Every run is reproducible
/// from rng_seed alone unless the wall-clock budget cuts it short.
struct SearchConfig {
  std::uint64_t rng_seed = 1;
  double initial_temperature = 2.0;
  double cooling_factor = 0.95;
  int steps_per_temperature = 200;
  int restart_count = 8;
  std::size_t target_length = 8;
  double time_budget_seconds = 60.0;
  double growth_penalty = 0.01;  // weight on log10(last)/length
  double min_temperature = 0.05;
  unsigned long start_min = 40;  // real-seed range, one level below the first term
  unsigned long start_max = 60;
  int extra_rounds = 1;  // PRP rounds while searching; survivors get re-verified by callers

  void validate() const {
    if (initial_temperature <= 0 || min_temperature <= 0 || min_temperature > initial_temperature)
      throw domain_error("search config: bad temperature range");
    if (cooling_factor <= 0 || cooling_factor >= 1)
      throw domain_error("search config: cooling factor must be in (0,1)");
    if (steps_per_temperature < 1 || restart_count < 1)
      throw domain_error("search config: steps and restarts must be positive");
    if (target_length < 1) throw domain_error("search config: target length must be >= 1");
    if (start_min < 2 || start_max < start_min)
      throw domain_error("search config: bad start seed range");
  }
};

struct SearchProgress {
  int restart = 0;
  std::size_t best_length = 0;  // best across restarts merged so far
  double best_energy = 0;
  std::uint64_t moves_tried = 0;  // cumulative
};

using ProgressFn = std::function<void(const SearchProgress&)>;

struct SearchOutcome {
  PrimeChain best;
  double best_energy = 0;
  bool reached_target = false;
  bool budget_exhausted = false;
  int restarts_completed = 0;
  std::uint64_t moves_tried = 0;
  std::uint64_t moves_accepted = 0;
};

namespace detail {

inline double log10_of(const mpz_class& v) {
  if (v <= 1) return 0.0;
  mpfr_t t;
  mpfr_init2(t, 64);
  mpfr_set_z(t, v.get_mpz_t(), MPFR_RNDN);
  mpfr_log10(t, t, MPFR_RNDN);
  const double d = mpfr_get_d(t, MPFR_RNDN);
  mpfr_clear(t);
  return d;
}

}  // namespace detail

/// Longer is better; among equal lengths, slower growth of the last term is
/// better. Lower energy wins.
inline double chain_energy(const PrimeChain& chain, double growth_penalty) {
  if (chain.primes.empty()) return 0.0;
  const double len = static_cast<double>(chain.primes.size());
  return -len + growth_penalty * detail::log10_of(chain.primes.back()) / len;
}

/// Integer window of admissible first terms: the image of the real-seed range
/// [start_min, start_max] under x ↦ x^e, i.e. every integer in it is s^e for
/// some seed s in range. (Outward float rounding can admit one extra integer
/// at each end; the range only steers the search, so that slack is harmless.)
inline primality::SearchWindow start_prime_window(const GrowthRule& rule, const SearchConfig& cfg) {
  if (rule.kind != RuleKind::Power) throw domain_error("start window is a power-rule notion");
  const RealInterval base =
      RealInterval::from_rationals(mpq_class(cfg.start_min), mpq_class(cfg.start_max), 320);
  const RealInterval img = pow_rational(base, rule.exponent);
  const mpq_class lo = img.lo_rational(), hi = img.hi_rational();
  mpz_class ilo, ihi;
  mpz_cdiv_q(ilo.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  mpz_fdiv_q(ihi.get_mpz_t(), hi.get_num_mpz_t(), hi.get_den_mpz_t());
  if (ihi < ilo) ihi = ilo;
  return primality::SearchWindow(ilo, ihi + 1);
}

namespace detail {

inline double uniform01(std::mt19937_64& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Uniform-ish draw in [0, width); modulo fold is fine for move proposals.
inline mpz_class draw_below(std::mt19937_64& g, const mpz_class& width) {
  if (width <= 0) return 0;
  const std::size_t bits = mpz_sizeinbase(width.get_mpz_t(), 2);
  mpz_class acc = 0;
  for (std::size_t got = 0; got < bits + 64; got += 64) {
    acc <<= 64;
    acc += mpz_class(static_cast<unsigned long>(g()));
  }
  return acc % width;
}

/// Random prime inside [lo, hi): scan upward from a random offset, wrapping.
inline std::optional<mpz_class> random_prime_in(std::mt19937_64& g, const mpz_class& lo,
                                                const mpz_class& hi, int extra_rounds) {
  if (lo >= hi) return std::nullopt;
  const mpz_class split = lo + draw_below(g, mpz_class(hi - lo));
  if (auto c = primality::first_prime_in_window(primality::SearchWindow(split, hi), extra_rounds))
    return c->value;
  if (split > lo)
    if (auto c = primality::first_prime_in_window(primality::SearchWindow(lo, split), extra_rounds))
      return c->value;
  return std::nullopt;
}

/// Deterministic per-restart seed derivation (splitmix-style stream).
inline std::uint64_t restart_seed(std::uint64_t base, int restart) {
  return base + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(restart + 1);
}

/// Lexicographic tie-break so merged results are stable: longer wins, then
/// lower energy, then smaller prime vector.
inline bool better_chain(const PrimeChain& a, double ea, const PrimeChain& b, double eb) {
  if (a.primes.size() != b.primes.size()) return a.primes.size() > b.primes.size();
  if (ea != eb) return ea < eb;
  return a.primes < b.primes;
}

// ---- power-rule moves ------------------------------------------------------

/// Regrow `chain` to `target` terms: greedy takes the nearest prime each step,
/// randomized draws a random window prime each step.
inline void regrow_power(PrimeChain& chain, std::size_t target, bool randomized,
                         std::mt19937_64& g, int extra_rounds) {
  while (chain.primes.size() < target) {
    if (!randomized) {
      auto pick = pick_next(chain.primes.back(), chain.rule, SelectionPolicy::Nearest, extra_rounds);
      if (!pick) return;
      chain.primes.push_back(pick->chosen);
    } else {
      const auto w = power_window(chain.primes.back(), chain.rule.exponent, chain.rule.rounding);
      auto p = random_prime_in(g, w.lo, w.hi, extra_rounds);
      if (!p) return;
      chain.primes.push_back(std::move(*p));
    }
  }
}

inline PrimeChain initial_power_chain(const GrowthRule& rule, const SearchConfig& cfg,
                                      const primality::SearchWindow& starts, std::mt19937_64& g) {
  PrimeChain chain;
  chain.rule = rule;
  chain.policy = SelectionPolicy::Nearest;
  if (auto start = random_prime_in(g, starts.lo, starts.hi, cfg.extra_rounds)) {
    chain.primes = {std::move(*start)};
    regrow_power(chain, cfg.target_length, /*randomized=*/false, g, cfg.extra_rounds);
  }
  return chain;
}

/// Move (a): re-pick the prime at a random position among window alternatives,
/// keeping the suffix when it still fits the new window. Move (b): truncate
/// there and regrow (greedy or randomized). 50/50 between the two.
inline PrimeChain neighbour_power(const PrimeChain& cur, const SearchConfig& cfg,
                                  const primality::SearchWindow& starts, std::mt19937_64& g) {
  if (cur.primes.empty()) return initial_power_chain(cur.rule, cfg, starts, g);
  PrimeChain next = cur;
  const auto cut = static_cast<std::size_t>(draw_below(g, mpz_class(cur.primes.size())).get_ui());
  const bool lateral = uniform01(g) < 0.5;

  std::optional<mpz_class> repick;
  if (cut == 0) {
    repick = random_prime_in(g, starts.lo, starts.hi, cfg.extra_rounds);
  } else {
    const auto w = power_window(next.primes[cut - 1], next.rule.exponent, next.rule.rounding);
    repick = random_prime_in(g, w.lo, w.hi, cfg.extra_rounds);
  }
  if (repick) {
    if (lateral && cut + 1 < next.primes.size()) {
      const auto w2 = power_window(*repick, next.rule.exponent, next.rule.rounding);
      if (w2.lo <= next.primes[cut + 1] && next.primes[cut + 1] < w2.hi) {
        next.primes[cut] = std::move(*repick);  // suffix still consistent: lateral move
        return next;
      }
    }
    next.primes.resize(cut + 1);
    next.primes[cut] = std::move(*repick);
  } else {
    next.primes.resize(cut + 1);  // nothing else in the window: just truncate and regrow
  }
  regrow_power(next, cfg.target_length, uniform01(g) < 0.5, g, cfg.extra_rounds);
  return next;
}

// ---- scaled n^n moves ------------------------------------------------------

struct NNEnvelope {
  mpq_class lo{0};
  mpq_class hi{1};
};

/// Exact envelope of scale constants consistent with the picks (skipping index
/// `skip` when given). The scan domain for constants is (0, 1).
inline std::optional<NNEnvelope> nn_envelope(const std::vector<mpz_class>& primes,
                                             unsigned long n_from,
                                             std::size_t skip = static_cast<std::size_t>(-1)) {
  NNEnvelope env;
  unsigned long n = n_from;
  std::size_t idx = 0;
  for (const auto& p : primes) {
    if (idx++ == skip) {
      ++n;
      continue;
    }
    mpz_class nn;
    mpz_ui_pow_ui(nn.get_mpz_t(), n, n);
    mpq_class lo(p, nn), hi(p + 1, nn);
    lo.canonicalize();
    hi.canonicalize();
    if (lo > env.lo) env.lo = lo;
    if (hi < env.hi) env.hi = hi;
    if (env.lo >= env.hi) return std::nullopt;
    ++n;
  }
  return env;
}

/// Prime candidates for level n consistent with the envelope: the integers m
/// with [m/n^n, (m+1)/n^n) meeting [lo, hi).
inline std::vector<mpz_class> nn_candidates(const NNEnvelope& env, unsigned long n,
                                            int extra_rounds) {
  mpz_class nn;
  mpz_ui_pow_ui(nn.get_mpz_t(), n, n);
  const mpq_class lo_scaled = env.lo * nn;
  const mpq_class hi_scaled = env.hi * nn;
  mpz_class m_lo, m_hi;
  mpz_fdiv_q(m_lo.get_mpz_t(), lo_scaled.get_num_mpz_t(), lo_scaled.get_den_mpz_t());
  mpz_cdiv_q(m_hi.get_mpz_t(), hi_scaled.get_num_mpz_t(), hi_scaled.get_den_mpz_t());
  std::vector<mpz_class> out;
  for (mpz_class m = m_lo; m < m_hi; ++m) {
    if (m < 2) continue;
    if (mpq_class(m + 1, nn) <= env.lo || mpq_class(m, nn) >= env.hi) continue;
    if (primality::classify(m, extra_rounds).passed()) out.push_back(m);
  }
  return out;
}

inline void regrow_nn(PrimeChain& chain, std::size_t target, bool randomized, std::mt19937_64& g,
                      int extra_rounds) {
  auto env = nn_envelope(chain.primes, chain.rule.nn_start);
  if (!env) return;
  while (chain.primes.size() < target) {
    const unsigned long n = chain.rule.nn_start + static_cast<unsigned long>(chain.primes.size());
    auto cands = nn_candidates(*env, n, extra_rounds);
    if (cands.empty()) return;
    const std::size_t at = randomized
        ? static_cast<std::size_t>(draw_below(g, mpz_class(cands.size())).get_ui())
        : cands.size() / 2;  // greedy: stay near the envelope centre
    chain.primes.push_back(cands[at]);
    env = nn_envelope(chain.primes, chain.rule.nn_start);
    if (!env) {  // unreachable: candidates were envelope-consistent
      chain.primes.pop_back();
      return;
    }
  }
}

inline PrimeChain initial_nn_chain(const GrowthRule& rule, const SearchConfig& cfg,
                                   std::mt19937_64& g) {
  PrimeChain chain;
  chain.rule = rule;
  chain.policy = SelectionPolicy::Nearest;
  regrow_nn(chain, cfg.target_length, /*randomized=*/true, g, cfg.extra_rounds);
  return chain;
}

/// Move (c): swap the prime selected for one index against the envelope of all
/// other picks, keeping the rest. Fallback/alternative: truncate-and-regrow.
inline PrimeChain neighbour_nn(const PrimeChain& cur, const SearchConfig& cfg, std::mt19937_64& g) {
  if (cur.primes.empty()) return initial_nn_chain(cur.rule, cfg, g);
  PrimeChain next = cur;
  const auto cut = static_cast<std::size_t>(draw_below(g, mpz_class(cur.primes.size())).get_ui());
  if (uniform01(g) < 0.5) {
    if (auto env = nn_envelope(next.primes, next.rule.nn_start, cut)) {
      const unsigned long n = next.rule.nn_start + static_cast<unsigned long>(cut);
      auto cands = nn_candidates(*env, n, cfg.extra_rounds);
      if (!cands.empty()) {
        const auto at = static_cast<std::size_t>(draw_below(g, mpz_class(cands.size())).get_ui());
        next.primes[cut] = cands[at];  // swap; all other picks still satisfied
        return next;
      }
    }
  }
  next.primes.resize(cut);
  if (auto env = nn_envelope(next.primes, next.rule.nn_start)) {
    const unsigned long n = next.rule.nn_start + static_cast<unsigned long>(cut);
    auto cands = nn_candidates(*env, n, cfg.extra_rounds);
    if (!cands.empty()) {
      const auto at = static_cast<std::size_t>(draw_below(g, mpz_class(cands.size())).get_ui());
      next.primes.push_back(cands[at]);
    }
  }
  regrow_nn(next, cfg.target_length, uniform01(g) < 0.5, g, cfg.extra_rounds);
  return next;
}

// ---- per-restart run -------------------------------------------------------

struct RestartResult {
  PrimeChain best;
  double best_energy = 0;
  std::uint64_t tried = 0;
  std::uint64_t accepted = 0;
  bool budget_hit = false;
  bool ran = false;
};

inline RestartResult run_restart(const GrowthRule& rule, const SearchConfig& cfg, int restart,
                                 const std::optional<primality::SearchWindow>& starts,
                                 std::chrono::steady_clock::time_point deadline) {
  RestartResult res;
  if (std::chrono::steady_clock::now() >= deadline) {
    res.budget_hit = true;
    return res;
  }
  res.ran = true;
  const bool is_power = rule.kind == RuleKind::Power;
  std::mt19937_64 g(restart_seed(cfg.rng_seed, restart));

  PrimeChain cur = is_power ? initial_power_chain(rule, cfg, *starts, g)
                            : initial_nn_chain(rule, cfg, g);
  double cur_energy = chain_energy(cur, cfg.growth_penalty);
  res.best = cur;
  res.best_energy = cur_energy;

  for (double t = cfg.initial_temperature;
       t >= cfg.min_temperature && res.best.primes.size() < cfg.target_length;
       t *= cfg.cooling_factor) {
    if (std::chrono::steady_clock::now() >= deadline) {
      res.budget_hit = true;
      break;
    }
    for (int step = 0; step < cfg.steps_per_temperature; ++step) {
      PrimeChain cand = is_power ? neighbour_power(cur, cfg, *starts, g)
                                 : neighbour_nn(cur, cfg, g);
      const double cand_energy = chain_energy(cand, cfg.growth_penalty);
      ++res.tried;
      const double delta = cand_energy - cur_energy;
      if (delta <= 0 || uniform01(g) < std::exp(-delta / t)) {
        cur = std::move(cand);
        cur_energy = cand_energy;
        ++res.accepted;
        if (better_chain(cur, cur_energy, res.best, res.best_energy)) {
          res.best = cur;
          res.best_energy = cur_energy;
        }
      }
      if (res.best.primes.size() >= cfg.target_length) break;
    }
  }
  return res;
}

}  // namespace detail

/// Simulated annealing over chains under `rule` (power with nearest rounding,
/// or scaled n^n). All restart_count restarts always run — independently, in
/// parallel when hardware allows — from seeds derived off rng_seed, and are
/// merged with deterministic tie-breaks (length, then energy, then
/// lexicographic), so the result is a pure function of the config; only an
/// expiring time budget (reported via budget_exhausted) can cut schedules
/// short. Each restart stops on its own once it reaches target_length.
inline SearchOutcome anneal_chain(const GrowthRule& rule, const SearchConfig& cfg,
                                  const ProgressFn& progress = nullptr) {
  cfg.validate();
  if (rule.kind != RuleKind::Power && rule.kind != RuleKind::ScaledNN)
    throw domain_error("annealing is defined for power and scaled n^n rules");
  if (rule.kind == RuleKind::Power && rule.rounding != RoundingMode::Nearest)
    throw domain_error("annealing searches nearest-rounding power chains");

  std::optional<primality::SearchWindow> starts;
  if (rule.kind == RuleKind::Power) starts = start_prime_window(rule, cfg);
  const auto deadline =
      std::chrono::steady_clock::now() +
      std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(cfg.time_budget_seconds));

  std::vector<detail::RestartResult> results(static_cast<std::size_t>(cfg.restart_count));
  std::vector<std::exception_ptr> errors(results.size());
  const unsigned workers = std::min<unsigned>(
      std::max(1u, std::thread::hardware_concurrency()), static_cast<unsigned>(cfg.restart_count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < results.size(); ++i)
      results[i] = detail::run_restart(rule, cfg, static_cast<int>(i), starts, deadline);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < results.size();) {
          try {
            results[i] = detail::run_restart(rule, cfg, static_cast<int>(i), starts, deadline);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  SearchOutcome out;
  out.best.rule = rule;
  out.best.policy = SelectionPolicy::Nearest;
  bool have_best = false;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out.moves_tried += r.tried;
    out.moves_accepted += r.accepted;
    out.budget_exhausted = out.budget_exhausted || r.budget_hit;
    if (r.ran) ++out.restarts_completed;
    if (r.ran && (!have_best ||
                  detail::better_chain(r.best, r.best_energy, out.best, out.best_energy))) {
      out.best = r.best;
      out.best_energy = r.best_energy;
      have_best = true;
    }
    if (progress && r.ran) {
      SearchProgress p;
      p.restart = static_cast<int>(i);
      p.best_length = out.best.primes.size();
      p.best_energy = out.best_energy;
      p.moves_tried = out.moves_tried;
      progress(p);
    }
  }
  out.reached_target = out.best.primes.size() >= cfg.target_length;
  return out;
}

/// Greedy baseline: extend from a fixed start with nearest-prime picks until
/// the window dies or max_steps terms were appended; the report carries the
/// stopping reason (blocked window vs. step budget).
struct GreedyOutcome {
  PrimeChain chain;
  ExtendReport report;
  bool infeasible() const { return report.blocked(); }
};

inline GreedyOutcome greedy_extend(const GrowthRule& rule, const mpz_class& start,
                                   std::size_t max_steps,
                                   SelectionPolicy policy = SelectionPolicy::Nearest,
                                   int extra_rounds = 2) {
  if (!primality::classify(start, extra_rounds).passed())
    throw domain_error("greedy extension requires a prime start");
  GreedyOutcome out;
  out.chain.rule = rule;
  out.chain.policy = policy;
  out.chain.primes = {start};
  if (max_steps > 0) out.report = extend_chain(out.chain, max_steps, extra_rounds);
  return out;
}

/// Convenience: the greedy chain itself, grown to at most max_length terms.
inline PrimeChain greedy_chain(const GrowthRule& rule, const mpz_class& start,
                               std::size_t max_length,
                               SelectionPolicy policy = SelectionPolicy::Nearest,
                               int extra_rounds = 2) {
  return greedy_extend(rule, start, max_length > 1 ? max_length - 1 : 0, policy, extra_rounds)
      .chain;
}

}  // namespace primechain::search
