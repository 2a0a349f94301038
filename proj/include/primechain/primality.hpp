#pragma once

#include <gmpxx.h>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "primechain/errors.hpp"
#include "primechain/interval.hpp"

namespace primechain::primality {

enum class PrimeStatus { ProvenPrime, ProbablePrime, Composite };

inline const char* status_name(PrimeStatus s) {
  switch (s) {
    case PrimeStatus::ProvenPrime: return "proven-prime";
    case PrimeStatus::ProbablePrime: return "probable-prime";
    case PrimeStatus::Composite: return "composite";
  }
  return "?";
}

/// The verdict on one candidate, with enough of a transcript to reproduce it.
struct PrimeCandidate {
  mpz_class value;
  PrimeStatus status = PrimeStatus::Composite;
  std::string evidence;            // which test decided, witnesses/parameters used
  std::optional<mpz_class> factor; // present when a divisor was found

  bool passed() const { return status != PrimeStatus::Composite; }
};

/// Half-open integer window [lo, hi).
struct SearchWindow {
  mpz_class lo;
  mpz_class hi;

  SearchWindow(mpz_class l, mpz_class h) : lo(std::move(l)), hi(std::move(h)) {
    if (lo >= hi) throw domain_error("search window must satisfy lo < hi");
  }
  mpz_class width() const { return hi - lo; }
};

namespace detail {

inline constexpr std::uint32_t kSieveBound = 10000;

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = [] {
    std::vector<bool> comp(kSieveBound, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 2; i < kSieveBound; ++i) {
      if (comp[i]) continue;
      out.push_back(i);
      for (std::uint64_t j = static_cast<std::uint64_t>(i) * i; j < kSieveBound; j += i)
        comp[static_cast<std::size_t>(j)] = true;
    }
    return out;
  }();
  return primes;
}

inline std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

inline std::uint64_t powmod_u64(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1ull) r = mulmod_u64(r, base, m);
    base = mulmod_u64(base, base, m);
    exp >>= 1;
  }
  return r;
}

inline bool u64_strong_test(std::uint64_t n, std::uint64_t a) {
  // n odd >= 3, a reduced; returns true when n is a strong probable prime base a.
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1ull) == 0) {
    d >>= 1;
    ++s;
  }
  std::uint64_t x = powmod_u64(a, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod_u64(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

// Sufficient witness set for all n < 2^64 (and well beyond 3.3e24).
inline constexpr std::array<std::uint64_t, 12> kU64Witnesses = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace detail

/// Deterministic Miller-Rabin for machine-word inputs.
inline bool is_prime_u64(std::uint64_t n) {
  if (n < 2) return false;
  for (const std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n == p) return true;
    if (n % p == 0) return false;
  }
  for (const std::uint64_t a : detail::kU64Witnesses) {
    if (!detail::u64_strong_test(n, a)) return false;
  }
  return true;
}

/// Strong (Miller-Rabin) probable prime test to an arbitrary base. n odd >= 3.
inline bool strong_probable_prime(const mpz_class& n, const mpz_class& base) {
  mpz_class a = base % n;
  if (a < 0) a += n;
  if (a == 0 || a == 1 || a == n - 1) return true;  // uninformative base: treat as pass
  mpz_class d = n - 1;
  unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);
  mpz_class x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (unsigned long i = 1; i < s; ++i) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == n - 1) return true;
  }
  return false;
}

namespace detail {

/// Selfridge parameter search (method A): first D in 5, -7, 9, -11, ... with
/// jacobi(D, n) = -1. Assumes n odd, not a perfect square, no small factors.
/// Returns false (composite) if a jacobi of 0 exposes a shared factor.
inline bool select_lucas_d(const mpz_class& n, long& d_out) {
  long d = 5;
  for (int k = 0; k < 64; ++k) {
    mpz_class dz(d);
    const int j = mpz_jacobi(dz.get_mpz_t(), n.get_mpz_t());
    if (j == -1) {
      d_out = d;
      return true;
    }
    if (j == 0 && mpz_cmpabs_ui(n.get_mpz_t(), static_cast<unsigned long>(d < 0 ? -d : d)) != 0)
      return false;  // gcd(|D|, n) proper: composite
    d = d > 0 ? -(d + 2) : -(d - 2);
  }
  // Unreachable for non-squares; fail closed.
  throw precision_error("lucas: no suitable D found");
}

}  // namespace detail

/// Strong Lucas probable prime test with Selfridge parameters (P=1,
/// Q=(1-D)/4). n must be odd, >= 3, not a perfect square.
inline bool strong_lucas_probable_prime(const mpz_class& n) {
  long d_long = 0;
  if (!detail::select_lucas_d(n, d_long)) return false;
  const mpz_class D(d_long);
  const mpz_class Q = (1 - D) / 4;

  mpz_class delta = n + 1;
  const unsigned long s = mpz_scan1(delta.get_mpz_t(), 0);
  mpz_class d = delta;
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  const auto mod_n = [&](mpz_class& v) { mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t()); };
  const auto halve = [&](mpz_class& v) {
    // division by 2 mod odd n
    if (mpz_odd_p(v.get_mpz_t())) v += n;
    mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), 1);
    mod_n(v);
  };

  // Binary ladder over the bits of d, most significant first. Index starts at
  // 1 (U=1, V=P=1), doubling and conditional increment as in standard Lucas
  // sequence evaluation; Qk tracks Q^index.
  mpz_class U(1), V(1), Qk = Q;
  mod_n(Qk);
  const std::size_t bits = mpz_sizeinbase(d.get_mpz_t(), 2);
  for (std::size_t i = bits - 1; i-- > 0;) {
    // double: U <- U*V, V <- V^2 - 2*Qk, Qk <- Qk^2
    U *= V;
    mod_n(U);
    V *= V;
    V -= 2 * Qk;
    mod_n(V);
    Qk *= Qk;
    mod_n(Qk);
    if (mpz_tstbit(d.get_mpz_t(), static_cast<mp_bitcnt_t>(i))) {
      // increment: with P=1, U' = (U + V)/2, V' = (D*U + V)/2, Qk <- Qk*Q
      mpz_class u_new = U + V;
      mpz_class v_new = D * U + V;
      halve(u_new);
      halve(v_new);
      U = u_new;
      V = v_new;
      Qk *= Q;
      mod_n(Qk);
    }
  }

  if (U == 0) return true;
  for (unsigned long r = 0; r < s; ++r) {
    if (V == 0) return true;
    if (r + 1 < s) {
      V *= V;
      V -= 2 * Qk;
      mod_n(V);
      Qk *= Qk;
      mod_n(Qk);
    }
  }
  return false;
}

namespace detail {

/// Deterministic per-candidate seed so the random strong rounds are
/// reproducible run to run: mixes the residue of n with the round index.
inline std::uint64_t random_round_seed(const mpz_class& n, int round) {
  const std::uint64_t r = mpz_fdiv_ui(n.get_mpz_t(), 0xFFFFFFFFFFFFFFC5ull);  // largest u64 prime
  std::uint64_t x = r ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(round + 1));
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ull;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBull;
  x ^= x >> 31;
  return x;
}

}  // namespace detail

/// The full battery: trial division, strong base-2, perfect-square check,
/// strong Lucas, then `extra_rounds` random-base strong tests (deterministic
/// seeds). skip_trial_below lets sieved callers claim candidates have no small
/// factors below that bound.
inline PrimeCandidate classify(const mpz_class& n, int extra_rounds = 2,
                               std::uint32_t skip_trial_below = 0) {
  PrimeCandidate out;
  out.value = n;
  if (n < 2) {
    out.status = PrimeStatus::Composite;
    out.evidence = "below 2";
    return out;
  }

  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64 && mpz_fits_ulong_p(n.get_mpz_t())) {
    const std::uint64_t v = mpz_get_ui(n.get_mpz_t());
    if (is_prime_u64(v)) {
      out.status = PrimeStatus::ProvenPrime;
      out.evidence = "deterministic Miller-Rabin (complete witness set below 2^64)";
      return out;
    }
    out.status = PrimeStatus::Composite;
    for (const std::uint32_t p : detail::small_primes()) {
      if (v % p == 0 && v != p) {
        out.factor = mpz_class(p);
        out.evidence = "trial division: factor " + std::to_string(p);
        return out;
      }
    }
    for (const std::uint64_t a : detail::kU64Witnesses) {
      if (!detail::u64_strong_test(v, a)) {
        out.evidence = "strong test failed for base " + std::to_string(a);
        return out;
      }
    }
    out.evidence = "composite below 2^64";  // unreachable: some witness must fail
    return out;
  }

  if (skip_trial_below < detail::kSieveBound) {
    for (const std::uint32_t p : detail::small_primes()) {
      if (p < skip_trial_below) continue;
      if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        out.status = PrimeStatus::Composite;
        out.factor = mpz_class(p);
        out.evidence = "trial division: factor " + std::to_string(p);
        return out;
      }
    }
  }

  if (!strong_probable_prime(n, mpz_class(2))) {
    out.status = PrimeStatus::Composite;
    out.evidence = "strong test failed for base 2";
    return out;
  }

  if (mpz_perfect_square_p(n.get_mpz_t())) {
    out.status = PrimeStatus::Composite;
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), n.get_mpz_t());
    out.factor = root;
    out.evidence = "perfect square";
    return out;
  }

  if (!strong_lucas_probable_prime(n)) {
    out.status = PrimeStatus::Composite;
    out.evidence = "strong Lucas test failed (Selfridge parameters)";
    return out;
  }

  std::string extra_note;
  if (extra_rounds > 0) {
    gmp_randstate_t rng;
    gmp_randinit_mt(rng);
    for (int round = 0; round < extra_rounds; ++round) {
      gmp_randseed_ui(rng, detail::random_round_seed(n, round));
      mpz_class base;
      mpz_class span = n - 4;
      mpz_urandomm(base.get_mpz_t(), rng, span.get_mpz_t());
      base += 3;  // base in [3, n-2]
      if (!strong_probable_prime(n, base)) {
        gmp_randclear(rng);
        out.status = PrimeStatus::Composite;
        out.evidence = "strong test failed for random base (round " + std::to_string(round + 1) + ")";
        return out;
      }
    }
    gmp_randclear(rng);
    extra_note = " + " + std::to_string(extra_rounds) + " random strong round(s)";
  }

  out.status = PrimeStatus::ProbablePrime;
  out.evidence = "base-2 strong + strong Lucas (Selfridge)" + extra_note;
  return out;
}

namespace detail {

// Residues coprime to 210 = 2*3*5*7; candidate positions on the wheel.
inline const std::vector<std::uint32_t>& wheel_offsets() {
  static const std::vector<std::uint32_t> offsets = [] {
    std::vector<std::uint32_t> out;
    for (std::uint32_t r = 1; r < 210; ++r) {
      if (r % 2 != 0 && r % 3 != 0 && r % 5 != 0 && r % 7 != 0) out.push_back(r);
    }
    return out;  // 48 residues
  }();
  return offsets;
}

inline constexpr std::uint32_t kBlockSize = 1u << 16;

/// Visit candidates in [from, to) in the given direction, pre-filtered by a
/// windowed sieve over the odd primes up to kSieveBound and a mod-210 wheel.
/// `visit` returns true to stop. Candidates below 11 are handled by callers.
template <typename Visit>
void scan_candidates(const mpz_class& from, const mpz_class& to, bool ascending, Visit&& visit) {
  if (from >= to) return;
  mpz_class block_lo = ascending ? from : to - kBlockSize;
  if (block_lo < from && !ascending) block_lo = from;

  while (true) {
    mpz_class block_hi = block_lo + kBlockSize;
    if (block_hi > to) block_hi = to;
    if (block_lo >= block_hi) return;

    const auto span = static_cast<std::size_t>(mpz_get_ui(mpz_class(block_hi - block_lo).get_mpz_t()));
    std::vector<bool> composite(span, false);
    // Narrow blocks: a sieve prime much larger than the span rarely hits, so
    // skip it — classify() still trial-divides below kSieveBound.
    const std::uint32_t sieve_cap =
        span >= kSieveBound ? kSieveBound
                            : std::max<std::uint32_t>(97, static_cast<std::uint32_t>(span) * 4);
    for (const std::uint32_t p : small_primes()) {
      if (p <= 7) continue;  // the wheel already excludes these residues
      if (p > sieve_cap) break;
      const unsigned long rem = mpz_fdiv_ui(block_lo.get_mpz_t(), p);
      std::size_t first = rem == 0 ? 0 : static_cast<std::size_t>(p - rem);
      // never mark p itself
      if (mpz_cmp_ui(mpz_class(block_lo + static_cast<unsigned long>(first)).get_mpz_t(), p) == 0)
        first += p;
      for (std::size_t j = first; j < span; j += p) composite[j] = true;
    }

    // Wheel positions inside the block.
    const unsigned long base_rem = mpz_fdiv_ui(block_lo.get_mpz_t(), 210);
    std::vector<std::size_t> positions;
    positions.reserve(span / 4 + 8);
    for (std::uint32_t cycle = 0; cycle * 210 < span + 210; ++cycle) {
      for (const std::uint32_t r : wheel_offsets()) {
        const long off = static_cast<long>(cycle) * 210 + static_cast<long>(r) - static_cast<long>(base_rem);
        if (off >= 0 && static_cast<std::size_t>(off) < span)
          positions.push_back(static_cast<std::size_t>(off));
      }
    }
    std::sort(positions.begin(), positions.end());

    if (ascending) {
      for (const std::size_t off : positions) {
        if (composite[off]) continue;
        if (visit(mpz_class(block_lo + static_cast<unsigned long>(off)))) return;
      }
      block_lo = block_hi;
      if (block_lo >= to) return;
    } else {
      for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
        if (composite[*it]) continue;
        if (visit(mpz_class(block_lo + static_cast<unsigned long>(*it)))) return;
      }
      if (block_lo <= from) return;
      block_lo = block_lo - kBlockSize;
      if (block_lo < from) block_lo = from;
    }
  }
}

inline std::optional<PrimeCandidate> scan_window(const mpz_class& lo, const mpz_class& hi,
                                                 bool ascending, int extra_rounds) {
  // Small candidates (the wheel excludes 2,3,5,7) get checked directly.
  std::optional<PrimeCandidate> found;
  const mpz_class small_cap = std::min(mpz_class(11), hi);
  std::vector<mpz_class> small_list;
  for (mpz_class v = lo; v < small_cap; ++v)
    if (v == 2 || v == 3 || v == 5 || v == 7) small_list.push_back(v);

  if (ascending) {
    for (const mpz_class& v : small_list) {
      auto c = classify(v, extra_rounds);
      if (c.passed()) return c;
    }
    mpz_class scan_lo = std::max(lo, mpz_class(11));
    if (scan_lo < hi) {
      scan_candidates(scan_lo, hi, true, [&](const mpz_class& cand) {
        auto c = classify(cand, extra_rounds, kSieveBound);
        if (c.passed()) {
          found = std::move(c);
          return true;
        }
        return false;
      });
    }
    return found;
  }

  mpz_class scan_lo = std::max(lo, mpz_class(11));
  if (scan_lo < hi) {
    scan_candidates(scan_lo, hi, false, [&](const mpz_class& cand) {
      auto c = classify(cand, extra_rounds, kSieveBound);
      if (c.passed()) {
        found = std::move(c);
        return true;
      }
      return false;
    });
  }
  if (found) return found;
  for (auto it = small_list.rbegin(); it != small_list.rend(); ++it) {
    auto c = classify(*it, extra_rounds);
    if (c.passed()) return c;
  }
  return std::nullopt;
}

}  // namespace detail

/// Smallest prime (or probable prime) strictly greater than n.
inline PrimeCandidate next_prime(const mpz_class& n, int extra_rounds = 2) {
  mpz_class start = n + 1;
  if (start < 2) start = 2;
  // Expand the window until a prime appears; the gap below 2^64 is tiny and
  // above it Cramer-scale, so a few doublings always suffice.
  mpz_class span(detail::kBlockSize);
  while (true) {
    auto hit = detail::scan_window(start, start + span, true, extra_rounds);
    if (hit) return *hit;
    start += span;
    span *= 2;
  }
}

/// Largest prime (or probable prime) strictly smaller than n. Requires n >= 3.
inline PrimeCandidate prev_prime(const mpz_class& n, int extra_rounds = 2) {
  if (n <= 2) throw domain_error("prev_prime: no prime below 2");
  mpz_class hi = n;  // half-open: candidates < n
  mpz_class span(detail::kBlockSize);
  while (true) {
    mpz_class lo = hi - span;
    if (lo < 2) lo = 2;
    auto hit = detail::scan_window(lo, hi, false, extra_rounds);
    if (hit) return *hit;
    if (lo == 2) throw domain_error("prev_prime: exhausted candidates below 2");
    hi = lo;
    span *= 2;
  }
}

/// First prime at or after w.lo but below w.hi, if any.
inline std::optional<PrimeCandidate> first_prime_in_window(const SearchWindow& w, int extra_rounds = 2) {
  return detail::scan_window(w.lo, w.hi, true, extra_rounds);
}

/// Last prime below w.hi but at or after w.lo, if any.
inline std::optional<PrimeCandidate> last_prime_in_window(const SearchWindow& w, int extra_rounds = 2) {
  return detail::scan_window(w.lo, w.hi, false, extra_rounds);
}

/// Prime in the window nearest to a real target enclosed by an interval.
/// Distance comparisons use the interval endpoints; an interval too wide to
/// order the two contenders raises precision_error. Exact midpoint ties go to
/// the larger prime.
inline std::optional<PrimeCandidate> nearest_prime(const SearchWindow& w, const RealInterval& target,
                                                   int extra_rounds = 2) {
  mpz_class c;
  mpfr_get_z(c.get_mpz_t(), target.lo(), MPFR_RNDD);
  if (c < w.lo) c = w.lo - 1;
  if (c >= w.hi) c = w.hi - 1;

  std::optional<PrimeCandidate> down;
  if (c >= w.lo) down = detail::scan_window(w.lo, c + 1, false, extra_rounds);
  std::optional<PrimeCandidate> up;
  if (c + 1 < w.hi) up = detail::scan_window(c + 1, w.hi, true, extra_rounds);

  if (!down && !up) return std::nullopt;
  if (!down) return up;
  if (!up) return down;

  // target vs (down + up)/2, decided by the enclosure
  const mpq_class mid = mpq_class(down->value + up->value, 2);
  if (mpfr_cmp_q(target.lo(), mid.get_mpq_t()) > 0) return up;
  if (mpfr_cmp_q(target.hi(), mid.get_mpq_t()) < 0) return down;
  if (target.is_point() && mpfr_cmp_q(target.lo(), mid.get_mpq_t()) == 0) return up;  // tie upward
  throw precision_error("nearest_prime: target interval too wide to order candidates");
}

}  // namespace primechain::primality
