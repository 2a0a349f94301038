#include <catch2/catch_amalgamated.hpp>

#include <primechain/primality.hpp>

#include <cstdint>

#include "oracles.hpp"

using namespace primechain;
using primality::PrimeStatus;
using primality::SearchWindow;

TEST_CASE("deterministic 64-bit test matches a sieve up to 100000") {
  const auto flags = testor::sieve_flags(100000);
  for (std::uint64_t n = 0; n <= 100000; ++n) {
    if (primality::is_prime_u64(n) != (flags[n] != 0)) {
      CAPTURE(n);
      REQUIRE(false);
    }
  }
  SUCCEED();
}

TEST_CASE("classify matches a sieve up to 20000 and labels small primes proven") {
  const auto flags = testor::sieve_flags(20000);
  for (std::uint64_t n = 0; n <= 20000; ++n) {
    const auto c = primality::classify(mpz_class(static_cast<unsigned long>(n)));
    if (c.passed() != (flags[n] != 0)) {
      CAPTURE(n);
      REQUIRE(false);
    }
    if (flags[n] != 0) REQUIRE(c.status == PrimeStatus::ProvenPrime);
  }
  SUCCEED();
}

TEST_CASE("zero, one, and negatives are not prime") {
  REQUIRE(primality::classify(mpz_class(0)).status == PrimeStatus::Composite);
  REQUIRE(primality::classify(mpz_class(1)).status == PrimeStatus::Composite);
  REQUIRE(primality::classify(mpz_class(-7)).status == PrimeStatus::Composite);
}

TEST_CASE("strong base-2 pseudoprimes pass the base-2 leg yet are composite") {
  // Classic strong pseudoprimes to base 2; each must fool the single-base test
  // and still be caught by the full battery.
  for (const unsigned long n : {2047ul, 3277ul, 4033ul, 4681ul, 8321ul, 15841ul}) {
    const mpz_class m(n);
    REQUIRE(primality::strong_probable_prime(m, mpz_class(2)));
    REQUIRE_FALSE(primality::is_prime_u64(n));
    REQUIRE(primality::classify(m).status == PrimeStatus::Composite);
  }
}

TEST_CASE("strong Lucas pseudoprimes pass the Lucas leg yet are composite") {
  // The strong Lucas (Selfridge) pseudoprimes below 20000. None of them pass
  // the base-2 strong test, which is exactly why the battery pairs the legs.
  for (const unsigned long n : {5459ul, 5777ul, 10877ul, 16109ul, 18971ul}) {
    const mpz_class m(n);
    REQUIRE(primality::strong_lucas_probable_prime(m));
    REQUIRE_FALSE(primality::is_prime_u64(n));
    REQUIRE(primality::classify(m).status == PrimeStatus::Composite);
  }
}

TEST_CASE("Carmichael numbers are rejected") {
  for (const unsigned long n : {561ul, 1105ul, 1729ul, 41041ul, 825265ul}) {
    REQUIRE(primality::classify(mpz_class(n)).status == PrimeStatus::Composite);
  }
}

TEST_CASE("wide composites that fool the base-2 strong test alone are caught") {
  // 2^128 + 1 is a strong pseudoprime to base 2 (its base-2 order is a power
  // of two), so only the Lucas leg can reject it.
  mpz_class f7;
  mpz_ui_pow_ui(f7.get_mpz_t(), 2, 128);
  f7 += 1;
  REQUIRE(primality::strong_probable_prime(f7, mpz_class(2)));
  REQUIRE(primality::classify(f7).status == PrimeStatus::Composite);

  // A 21-digit semiprime with no small factors exercises the mpz path.
  const mpz_class p("10000000019"), q("10000000033");
  REQUIRE(primality::classify(p * q).status == PrimeStatus::Composite);
}

TEST_CASE("large probable primes pass the battery") {
  mpz_class m127;  // 2^127 - 1, a Mersenne prime
  mpz_ui_pow_ui(m127.get_mpz_t(), 2, 127);
  m127 -= 1;
  REQUIRE(primality::classify(m127).passed());

  const mpz_class mills5("16022236204009818131831320183");
  REQUIRE(primality::classify(mills5).status == PrimeStatus::ProbablePrime);
}

TEST_CASE("next_prime and prev_prime move strictly and correctly") {
  REQUIRE(primality::next_prime(2).value == 3);
  REQUIRE(primality::next_prime(7).value == 11);
  REQUIRE(primality::prev_prime(100).value == 97);
  REQUIRE(primality::prev_prime(3).value == 2);
  REQUIRE_THROWS_AS(primality::prev_prime(2), domain_error);

  mpz_class googol_half;  // 10^50
  mpz_ui_pow_ui(googol_half.get_mpz_t(), 10, 50);
  REQUIRE(primality::next_prime(googol_half).value == googol_half + 151);
}

TEST_CASE("window scans agree with the sieve") {
  const auto flags = testor::sieve_flags(1010000);

  // The classic empty stretch: no prime in [90, 97).
  REQUIRE_FALSE(primality::first_prime_in_window(SearchWindow(90, 97)).has_value());
  REQUIRE(primality::first_prime_in_window(SearchWindow(90, 98))->value == 97);
  REQUIRE(primality::last_prime_in_window(SearchWindow(90, 98))->value == 97);

  // Enumerate every prime in [10^6, 10^6 + 10^4) through the window API and
  // compare against the sieve.
  std::vector<std::uint64_t> expect;
  for (std::uint64_t n = 1000000; n < 1010000; ++n)
    if (flags[n] != 0) expect.push_back(n);

  std::vector<std::uint64_t> got;
  mpz_class lo(1000000);
  const mpz_class hi(1010000);
  while (true) {
    auto c = primality::first_prime_in_window(SearchWindow(lo, hi));
    if (!c) break;
    got.push_back(c->value.get_ui());
    lo = c->value + 1;
  }
  REQUIRE(got == expect);

  // Descending scan finds the same extremes.
  REQUIRE(primality::last_prime_in_window(SearchWindow(mpz_class(1000000), hi))->value ==
          static_cast<unsigned long>(expect.back()));
}

TEST_CASE("nearest_prime picks the closer side and breaks ties upward") {
  // Target 4 sits exactly between 3 and 5: the tie goes up.
  const auto tie = primality::nearest_prime(
      SearchWindow(2, 8), RealInterval::from_rationals(mpq_class(4), mpq_class(4), 96));
  REQUIRE(tie.has_value());
  REQUIRE(tie->value == 5);

  // 37^(3/2) = 225.06...: 227 is closer than 223.
  const auto near = primality::nearest_prime(
      SearchWindow(221, 230), parse_decimal("225.0625766195", {}, ParseMode::Exact));
  REQUIRE(near.has_value());
  REQUIRE(near->value == 227);

  REQUIRE_FALSE(primality::nearest_prime(
                    SearchWindow(90, 97),
                    RealInterval::from_rationals(mpq_class(93), mpq_class(93), 96))
                    .has_value());
}
