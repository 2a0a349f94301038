#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "primechain/errors.hpp"
#include "primechain/rational.hpp"

namespace primechain {

/// Controls how callers escalate working precision when a rounding decision
/// comes back undecidable.
struct PrecisionPolicy {
  mpfr_prec_t start_bits = 256;
  mpfr_prec_t max_bits = mpfr_prec_t{1} << 20;
  double growth = 2.0;

  void validate() const {
    if (start_bits < 64) throw domain_error("precision policy: start_bits must be >= 64");
    if (max_bits < start_bits) throw domain_error("precision policy: max_bits < start_bits");
    if (growth <= 1.0) throw domain_error("precision policy: growth must exceed 1");
  }

  mpfr_prec_t next(mpfr_prec_t bits) const {
    auto scaled = static_cast<mpfr_prec_t>(static_cast<double>(bits) * growth);
    if (scaled <= bits) scaled = bits + 64;
    return std::min(scaled, max_bits);
  }
};

/// How a decimal literal is to be understood: as the prefix of some longer
/// expansion (the usual case for published constants) or as an exact rational.
enum class ParseMode { Prefix, Exact };

/// A closed interval [lo, hi] with MPFR endpoints. Every operation rounds the
/// lower endpoint down and the upper endpoint up, so the interval always
/// contains the exact real result (containment is the invariant; tightness is
/// best-effort at the working precision).
class RealInterval {
 public:
  RealInterval() : RealInterval(mpfr_prec_t{64}) {}

  explicit RealInterval(mpfr_prec_t bits) {
    init(bits);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }

  RealInterval(const RealInterval& o) {
    init(mpfr_get_prec(o.lo_));
    mpfr_set(lo_, o.lo_, MPFR_RNDN);  // same precision: exact
    mpfr_set(hi_, o.hi_, MPFR_RNDN);
  }

  RealInterval(RealInterval&& o) noexcept {
    init(mpfr_get_prec(o.lo_));
    mpfr_swap(lo_, o.lo_);
    mpfr_swap(hi_, o.hi_);
  }

  RealInterval& operator=(const RealInterval& o) {
    if (this != &o) {
      set_prec_destructive(mpfr_get_prec(o.lo_));
      mpfr_set(lo_, o.lo_, MPFR_RNDN);
      mpfr_set(hi_, o.hi_, MPFR_RNDN);
    }
    return *this;
  }

  RealInterval& operator=(RealInterval&& o) noexcept {
    if (this != &o) {
      mpfr_swap(lo_, o.lo_);
      mpfr_swap(hi_, o.hi_);
    }
    return *this;
  }

  ~RealInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  /// Exact point interval holding an integer (precision widened as needed).
  static RealInterval from_integer(const mpz_class& v, mpfr_prec_t bits) {
    const auto need = static_cast<mpfr_prec_t>(mpz_sizeinbase(v.get_mpz_t(), 2)) + 2;
    RealInterval r(std::max(bits, need));
    mpfr_set_z(r.lo_, v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_, v.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  /// Interval with rational endpoints, rounded outward.
  static RealInterval from_rationals(const mpq_class& lo, const mpq_class& hi, mpfr_prec_t bits) {
    if (mpq_cmp(lo.get_mpq_t(), hi.get_mpq_t()) > 0)
      throw domain_error("interval endpoints out of order");
    RealInterval r(bits);
    mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  mpfr_srcptr lo() const { return lo_; }
  mpfr_srcptr hi() const { return hi_; }
  mpfr_ptr lo_mut() { return lo_; }
  mpfr_ptr hi_mut() { return hi_; }

  mpfr_prec_t precision_bits() const { return mpfr_get_prec(lo_); }

  bool is_point() const { return mpfr_equal_p(lo_, hi_) != 0; }
  bool is_positive() const { return mpfr_sgn(lo_) > 0; }

  bool contains(const mpq_class& v) const {
    return mpfr_cmp_q(lo_, v.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, v.get_mpq_t()) >= 0;
  }
  bool contains(const mpz_class& v) const {
    return mpfr_cmp_z(lo_, v.get_mpz_t()) <= 0 && mpfr_cmp_z(hi_, v.get_mpz_t()) >= 0;
  }
  bool contains(const RealInterval& o) const {
    return mpfr_cmp(lo_, o.lo_) <= 0 && mpfr_cmp(hi_, o.hi_) >= 0;
  }

  /// Endpoints are dyadic rationals; expose them exactly.
  mpq_class lo_rational() const { return to_q(lo_); }
  mpq_class hi_rational() const { return to_q(hi_); }
  mpq_class width_rational() const { return to_q(hi_) - to_q(lo_); }

  /// hi - lo rounded up, as a coarse magnitude probe (2^k scale).
  mpfr_exp_t width_exponent() const {
    if (is_point()) return mpfr_get_emin();
    mpfr_t w;
    mpfr_init2(w, 64);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    const mpfr_exp_t e = mpfr_zero_p(w) ? mpfr_get_emin() : mpfr_get_exp(w);
    mpfr_clear(w);
    return e;
  }

  /// Outward re-rounding to a new working precision.
  RealInterval rounded_to(mpfr_prec_t bits) const {
    RealInterval r(bits);
    mpfr_set(r.lo_, lo_, MPFR_RNDD);
    mpfr_set(r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  /// Point interval at the midpoint (a witness value, not an enclosure).
  RealInterval midpoint() const {
    RealInterval r(precision_bits() + 8);
    mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
    mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
    return r;
  }

 private:
  static mpq_class to_q(mpfr_srcptr x) {
    mpq_class q;
    mpfr_get_q(q.get_mpq_t(), x);
    return q;
  }

  void init(mpfr_prec_t bits) {
    const mpfr_prec_t p = std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN);
    mpfr_init2(lo_, p);
    mpfr_init2(hi_, p);
  }

  void set_prec_destructive(mpfr_prec_t bits) {
    mpfr_set_prec(lo_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
    mpfr_set_prec(hi_, std::max<mpfr_prec_t>(bits, MPFR_PREC_MIN));
  }

  mpfr_t lo_;
  mpfr_t hi_;
};

namespace detail {

/// base^k with every partial product rounded in one direction. All operands
/// are positive, so multiplication is monotone and the directed product
/// brackets the exact power.
inline void pow_directed(mpfr_ptr out, mpfr_srcptr base, unsigned long k, mpfr_rnd_t rnd) {
  mpfr_t acc, sq;
  mpfr_init2(acc, mpfr_get_prec(out));
  mpfr_init2(sq, mpfr_get_prec(out));
  mpfr_set_ui(acc, 1, rnd);
  mpfr_set(sq, base, rnd);
  while (k > 0) {
    if (k & 1ul) mpfr_mul(acc, acc, sq, rnd);
    k >>= 1;
    if (k > 0) mpfr_mul(sq, sq, sq, rnd);
  }
  mpfr_set(out, acc, rnd);
  mpfr_clear(acc);
  mpfr_clear(sq);
}

/// Newton iteration for v^(1/q), full working precision, round-to-nearest.
/// Starts at 2^ceil(e/q) >= root so the iteration descends monotonically.
inline void approx_root(mpfr_ptr y, mpfr_srcptr v, unsigned long q) {
  const mpfr_prec_t prec = mpfr_get_prec(y);
  const mpfr_exp_t e = mpfr_get_exp(v);  // 2^(e-1) <= v < 2^e
  const mpfr_exp_t start_exp = (e >= 0) ? (e + static_cast<mpfr_exp_t>(q) - 1) / static_cast<mpfr_exp_t>(q)
                                        : e / static_cast<mpfr_exp_t>(q);
  mpfr_set_ui_2exp(y, 1, start_exp, MPFR_RNDN);

  long cap = 16;
  for (mpfr_prec_t p = prec; p > 1; p >>= 1) cap += 4;

  mpfr_t t, next, diff;
  mpfr_init2(t, prec);
  mpfr_init2(next, prec);
  mpfr_init2(diff, prec);
  bool converged = false;
  for (long i = 0; i < cap; ++i) {
    // next = ((q-1)*y + v / y^(q-1)) / q
    pow_directed(t, y, q - 1, MPFR_RNDN);
    mpfr_div(t, v, t, MPFR_RNDN);
    mpfr_mul_ui(next, y, q - 1, MPFR_RNDN);
    mpfr_add(next, next, t, MPFR_RNDN);
    mpfr_div_ui(next, next, q, MPFR_RNDN);

    mpfr_sub(diff, next, y, MPFR_RNDN);
    mpfr_abs(diff, diff, MPFR_RNDN);
    mpfr_mul_2si(diff, diff, static_cast<long>(prec) - 24, MPFR_RNDN);
    const bool small = mpfr_cmpabs(diff, next) <= 0 || mpfr_zero_p(diff);
    mpfr_set(y, next, MPFR_RNDN);
    if (small) {
      converged = true;
      break;
    }
  }
  mpfr_clear(t);
  mpfr_clear(next);
  mpfr_clear(diff);
  if (!converged) throw precision_error("nth_root: Newton iteration failed to converge");
}

/// Nudge candidate c (at output precision) until c^q brackets v from the
/// requested side; the adjustment is a handful of ulps after Newton.
inline void certify_root(mpfr_ptr c, mpfr_srcptr v, unsigned long q, bool lower) {
  mpfr_t p;
  mpfr_init2(p, mpfr_get_prec(c));
  bool ok = false;
  for (int tries = 0; tries < 256; ++tries) {
    // Lower bound is valid when even an upper-rounded power stays <= v.
    pow_directed(p, c, q, lower ? MPFR_RNDU : MPFR_RNDD);
    const int cmp = mpfr_cmp(p, v);
    if (lower ? (cmp <= 0) : (cmp >= 0)) {
      ok = true;
      break;
    }
    const int steps = 1 << std::min(tries / 8, 16);
    for (int s = 0; s < steps; ++s) {
      if (lower)
        mpfr_nextbelow(c);
      else
        mpfr_nextabove(c);
    }
  }
  mpfr_clear(p);
  if (!ok) throw precision_error("nth_root: could not certify enclosure");
  if (mpfr_sgn(c) <= 0) throw precision_error("nth_root: certified bound collapsed to zero");
}

}  // namespace detail

/// Strips layout characters (whitespace, backslash line continuations) from a
/// decimal literal and returns the enclosing interval. Prefix mode widens the
/// last digit by one unit in the last place: "2.82" -> [2.82, 2.83].
inline RealInterval parse_decimal(std::string_view text, const PrecisionPolicy& policy = {},
                                  ParseMode mode = ParseMode::Prefix) {
  policy.validate();
  std::string digits;
  digits.reserve(text.size());
  bool negative = false;
  bool seen_any = false;
  bool seen_point = false;
  std::size_t frac_digits = 0;
  for (const char c : text) {
    if (c == '\\' || c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    if ((c == '+' || c == '-') && !seen_any && !seen_point) {
      negative = (c == '-');
      seen_any = true;
      continue;
    }
    if (c == '.') {
      if (seen_point) throw parse_error("decimal literal has two points");
      seen_point = true;
      seen_any = true;
      continue;
    }
    if (c < '0' || c > '9') throw parse_error(std::string("unexpected character '") + c + "' in decimal literal");
    digits.push_back(c);
    if (seen_point) ++frac_digits;
    seen_any = true;
  }
  if (digits.empty()) throw parse_error("decimal literal has no digits");

  mpz_class mant(digits, 10);
  mpz_class den;
  mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
  mpq_class value(mant, den);
  value.canonicalize();
  if (negative) value = -value;

  mpq_class lo = value;
  mpq_class hi = value;
  if (mode == ParseMode::Prefix) {
    mpq_class ulp(mpz_class(1), den);
    ulp.canonicalize();
    if (negative)
      lo -= ulp;  // prefix of a magnitude: the true value extends away from zero
    else
      hi += ulp;
  }

  const auto bits_needed = static_cast<mpfr_prec_t>(3.33 * static_cast<double>(digits.size())) + 64;
  const mpfr_prec_t prec = std::min(std::max(policy.start_bits, bits_needed), policy.max_bits);
  return RealInterval::from_rationals(lo, hi, prec);
}

/// x^k for positive x and k >= 1, outward rounded.
inline RealInterval pow_integer(const RealInterval& x, unsigned long k) {
  if (k == 0) throw domain_error("pow_integer: exponent must be positive");
  if (!x.is_positive()) throw domain_error("pow_integer: base interval must be positive");
  if (k == 1) return x;
  RealInterval r(x.precision_bits());
  detail::pow_directed(r.lo_mut(), x.lo(), k, MPFR_RNDD);
  detail::pow_directed(r.hi_mut(), x.hi(), k, MPFR_RNDU);
  return r;
}

/// x^(1/q) for positive x, Newton refinement plus a certified outward nudge.
inline RealInterval nth_root(const RealInterval& x, unsigned long q) {
  if (q == 0) throw domain_error("nth_root: index must be positive");
  if (!x.is_positive()) throw domain_error("nth_root: interval must be positive");
  if (q == 1) return x;

  const mpfr_prec_t prec = x.precision_bits();
  RealInterval r(prec);
  mpfr_t y;
  mpfr_init2(y, prec + 64);

  detail::approx_root(y, x.lo(), q);
  mpfr_set(r.lo_mut(), y, MPFR_RNDD);
  detail::certify_root(r.lo_mut(), x.lo(), q, /*lower=*/true);

  detail::approx_root(y, x.hi(), q);
  mpfr_set(r.hi_mut(), y, MPFR_RNDU);
  detail::certify_root(r.hi_mut(), x.hi(), q, /*lower=*/false);

  mpfr_clear(y);
  if (mpfr_cmp(r.lo(), r.hi()) > 0) throw precision_error("nth_root: enclosure inverted");
  return r;
}

/// x^(p/q): integer power first, then the root. Both stages round outward.
inline RealInterval pow_rational(const RealInterval& x, const RationalExponent& e) {
  return nth_root(pow_integer(x, e.num), e.den);
}

/// Guards for 2^x: refuse exponents past max_exponent, and refuse results
/// whose integer part alone would need more than max_result_bits.
struct Exp2Limits {
  unsigned long max_exponent = 1ul << 32;
  mpfr_prec_t max_result_bits = mpfr_prec_t{1} << 24;
};

/// 2^x, outward rounded. The output precision is widened by ceil(x.hi) bits so
/// the integer part stays fully representable (floor decisions depend on it).
inline RealInterval exp2_interval(const RealInterval& x, const Exp2Limits& limits = {}) {
  if (mpfr_cmp_ui(x.hi(), limits.max_exponent) > 0)
    throw resource_error("exp2: exponent exceeds configured guard");

  mpfr_prec_t out_prec = x.precision_bits();
  if (mpfr_sgn(x.hi()) > 0) {
    mpfr_t c;
    mpfr_init2(c, 64);
    mpfr_ceil(c, x.hi());
    const long ip = mpfr_get_si(c, MPFR_RNDN);
    mpfr_clear(c);
    out_prec += static_cast<mpfr_prec_t>(ip) + 8;
  }
  if (out_prec > limits.max_result_bits)
    throw resource_error("exp2: result precision exceeds configured guard");

  RealInterval r(out_prec);
  mpfr_exp2(r.lo_mut(), x.lo(), MPFR_RNDD);
  mpfr_exp2(r.hi_mut(), x.hi(), MPFR_RNDU);
  return r;
}

/// x * m for a positive integer m, outward rounded at widened precision.
inline RealInterval mul_integer(const RealInterval& x, const mpz_class& m) {
  if (sgn(m) <= 0) throw domain_error("mul_integer: factor must be positive");
  const auto extra = static_cast<mpfr_prec_t>(mpz_sizeinbase(m.get_mpz_t(), 2)) + 4;
  RealInterval r(x.precision_bits() + extra);
  mpfr_mul_z(r.lo_mut(), x.lo(), m.get_mpz_t(), MPFR_RNDD);
  mpfr_mul_z(r.hi_mut(), x.hi(), m.get_mpz_t(), MPFR_RNDU);
  return r;
}

/// Nearest integer to every point of x, if they all agree. A collapsed point
/// interval sitting exactly on k + 1/2 raises tie_error; a wide straddle is
/// merely undecided (nullopt) and the caller may retry at higher precision.
inline std::optional<mpz_class> round_nearest(const RealInterval& x) {
  mpz_class m;
  mpfr_get_z(m.get_mpz_t(), x.lo(), MPFR_RNDN);
  const mpq_class below = mpq_class(2 * m - 1, 2);
  const mpq_class above = mpq_class(2 * m + 1, 2);
  if (mpfr_cmp_q(x.lo(), below.get_mpq_t()) > 0 && mpfr_cmp_q(x.hi(), above.get_mpq_t()) < 0)
    return m;
  if (x.is_point() &&
      (mpfr_cmp_q(x.lo(), below.get_mpq_t()) == 0 || mpfr_cmp_q(x.lo(), above.get_mpq_t()) == 0))
    throw tie_error("round_nearest: value sits exactly on a half-integer");
  return std::nullopt;
}

/// Floor of every point of x, if the endpoints agree on it.
inline std::optional<mpz_class> floor_of(const RealInterval& x) {
  mpz_class flo, fhi;
  mpfr_get_z(flo.get_mpz_t(), x.lo(), MPFR_RNDD);
  mpfr_get_z(fhi.get_mpz_t(), x.hi(), MPFR_RNDD);
  if (flo == fhi) return flo;
  return std::nullopt;
}

/// Intersection, or nullopt when disjoint. Endpoints are copied exactly.
inline std::optional<RealInterval> intersect(const RealInterval& a, const RealInterval& b) {
  const mpfr_prec_t prec = std::max(a.precision_bits(), b.precision_bits());
  RealInterval r(prec);
  mpfr_set(r.lo_mut(), mpfr_cmp(a.lo(), b.lo()) >= 0 ? a.lo() : b.lo(), MPFR_RNDD);
  mpfr_set(r.hi_mut(), mpfr_cmp(a.hi(), b.hi()) <= 0 ? a.hi() : b.hi(), MPFR_RNDU);
  if (mpfr_cmp(r.lo(), r.hi()) > 0) return std::nullopt;
  return r;
}

/// Decimal digits shared by every value in the interval, rendered with a
/// decimal point ("43.804..."). Empty string when even the leading digit or
/// the decimal exponent is not pinned down. Positive intervals only.
inline std::string certified_decimal(const RealInterval& x, std::size_t max_digits = 80) {
  if (!x.is_positive()) return "";
  mpfr_exp_t e_lo = 0, e_hi = 0;
  char* s_lo = mpfr_get_str(nullptr, &e_lo, 10, max_digits + 2, x.lo(), MPFR_RNDD);
  char* s_hi = mpfr_get_str(nullptr, &e_hi, 10, max_digits + 2, x.hi(), MPFR_RNDU);
  std::string out;
  if (e_lo == e_hi && s_lo != nullptr && s_hi != nullptr) {
    std::string_view a(s_lo), b(s_hi);
    std::size_t n = 0;
    while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
    n = std::min(n, max_digits);
    std::string common(a.substr(0, n));
    if (!common.empty()) {
      if (e_lo >= 1 && static_cast<std::size_t>(e_lo) <= common.size()) {
        out = common.substr(0, static_cast<std::size_t>(e_lo));
        if (static_cast<std::size_t>(e_lo) < common.size())
          out += "." + common.substr(static_cast<std::size_t>(e_lo));
      } else if (e_lo <= 0) {
        out = "0." + std::string(static_cast<std::size_t>(-e_lo), '0') + common;
      }
      // e_lo beyond the digit run: integer with uncertified trailing digits; give up.
    }
  }
  if (s_lo != nullptr) mpfr_free_str(s_lo);
  if (s_hi != nullptr) mpfr_free_str(s_hi);
  return out;
}

/// Midpoint rendered to `digits` significant digits (display helper; carries
/// no containment guarantee, unlike certified_decimal).
inline std::string midpoint_decimal(const RealInterval& x, std::size_t digits) {
  const RealInterval mid = x.midpoint();
  mpfr_exp_t e = 0;
  char* s = mpfr_get_str(nullptr, &e, 10, digits, mid.lo(), MPFR_RNDN);
  if (s == nullptr) return "";
  std::string m(s);
  mpfr_free_str(s);
  std::string sign;
  if (!m.empty() && m[0] == '-') {
    sign = "-";
    m.erase(0, 1);
  }
  std::string out;
  if (e >= 1 && static_cast<std::size_t>(e) <= m.size()) {
    out = m.substr(0, static_cast<std::size_t>(e));
    if (static_cast<std::size_t>(e) < m.size()) out += "." + m.substr(static_cast<std::size_t>(e));
  } else if (e <= 0 && static_cast<std::size_t>(-e) <= 8) {
    out = "0." + std::string(static_cast<std::size_t>(-e), '0') + m;
  } else {
    out = m.substr(0, 1) + "." + m.substr(1) + "e" + std::to_string(e - 1);
  }
  return sign + out;
}

}  // namespace primechain
