#include <catch2/catch_amalgamated.hpp>

#include <primechain/chains.hpp>
#include <primechain/constants.hpp>

#include <string>

#include "oracles.hpp"

using namespace primechain;
namespace pcc = primechain::constants;

TEST_CASE("growth rule parsing round-trips and rejects nonsense") {
  const GrowthRule a = GrowthRule::parse("power:5/4");
  REQUIRE(a.kind == RuleKind::Power);
  REQUIRE(a.exponent == RationalExponent(5, 4));
  REQUIRE(a.rounding == RoundingMode::Nearest);
  REQUIRE(a.spec() == "power:5/4:nearest");

  REQUIRE(GrowthRule::parse("power:3/2:floor").spec() == "power:3/2:floor");
  REQUIRE(GrowthRule::parse("exp2").spec() == "exp2");
  REQUIRE(GrowthRule::parse("shift:10").spec() == "shift:10");
  REQUIRE(GrowthRule::parse("nn:3").spec() == "nn:3");

  REQUIRE_THROWS_AS(GrowthRule::parse("power:1/1"), domain_error);
  REQUIRE_THROWS_AS(GrowthRule::parse("warp:9"), parse_error);
  REQUIRE_THROWS_AS(GrowthRule::power(RationalExponent(2, 2)), domain_error);
  REQUIRE_THROWS_AS(GrowthRule::digit_shift(1), domain_error);
}

TEST_CASE("digit counting is exact") {
  REQUIRE(digits10(mpz_class(9)) == 1);
  REQUIRE(digits10(mpz_class(10)) == 2);
  REQUIRE(digits10(mpz_class(999983)) == 6);
  mpz_class big;
  mpz_ui_pow_ui(big.get_mpz_t(), 10, 50);
  REQUIRE(digits10(big) == 51);
}

TEST_CASE("power windows match exact integer arithmetic") {
  const auto w2 = power_window(2, RationalExponent(3, 2), RoundingMode::Nearest);
  REQUIRE(w2.lo == 2);
  REQUIRE(w2.hi == 4);

  const auto w37 = power_window(37, RationalExponent(3, 2), RoundingMode::Nearest);
  REQUIRE(w37.lo == 221);
  REQUIRE(w37.hi == 230);

  const auto w113 = power_window(113, RationalExponent(5, 4), RoundingMode::Nearest);
  REQUIRE(w113.lo == 367);
  REQUIRE(w113.hi == 371);

  const auto wf = power_window(2, RationalExponent(3, 2), RoundingMode::Floor);
  REQUIRE(wf.lo == 3);
  REQUIRE(wf.hi == 6);

  // The identity exponent has no usable window and is refused outright.
  REQUIRE_THROWS_AS(power_window(3, RationalExponent(1, 1), RoundingMode::Nearest), domain_error);
  REQUIRE_THROWS_AS(power_window(1, RationalExponent(3, 2), RoundingMode::Nearest), domain_error);
}

TEST_CASE("shift windows are the digit extensions") {
  const auto w = shift_window(733, 10);
  REQUIRE(w.lo == 7330);
  REQUIRE(w.hi == 7340);
  REQUIRE_THROWS_AS(shift_window(0, 10), domain_error);
}

TEST_CASE("pick_next chooses the nearest prime, ties upward") {
  const GrowthRule r32 = GrowthRule::power(RationalExponent(3, 2));

  const auto p37 = pick_next(37, r32, SelectionPolicy::Nearest);
  REQUIRE(p37.has_value());
  REQUIRE(p37->chosen == 227);  // |227 - 225.06| < |223 - 225.06|
  REQUIRE(p37->window_lo == 221);
  REQUIRE(p37->window_hi == 230);

  const auto p2 = pick_next(2, r32, SelectionPolicy::NextAbove);
  REQUIRE(p2.has_value());
  REQUIRE(p2->chosen == 3);

  const auto shift = pick_next(733, GrowthRule::digit_shift(10), SelectionPolicy::Nearest);
  REQUIRE(shift.has_value());
  REQUIRE(shift->chosen == 7333);

  // No stepwise law for the tower rule.
  REQUIRE_THROWS_AS(pick_next(3, GrowthRule::exp2_tower(), SelectionPolicy::Nearest), domain_error);
}

TEST_CASE("greedy extension from 2 under 3/2 reproduces the frozen chain") {
  PrimeChain chain;
  chain.rule = GrowthRule::power(RationalExponent(3, 2));
  chain.primes = {mpz_class(2)};
  const auto rep = extend_chain(chain, 7);
  REQUIRE(rep.appended == 7);
  REQUIRE_FALSE(rep.blocked());
  const std::vector<unsigned long> expect = {2, 3, 5, 11, 37, 227, 3413, 199399};
  REQUIRE(chain.primes.size() == expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) REQUIRE(chain.primes[i] == expect[i]);
  REQUIRE(chain_is_consistent(chain));
}

TEST_CASE("extension reports a dead end with its empty window") {
  PrimeChain chain;
  chain.rule = GrowthRule::power(RationalExponent(5, 4));
  chain.primes = {mpz_class(47)};
  const auto rep = extend_chain(chain, 5);
  REQUIRE(rep.appended == 0);
  REQUIRE(rep.blocked());
  REQUIRE(rep.blocked_lo == 122);  // [122, 125) holds no prime
  REQUIRE(rep.blocked_hi == 125);
}

TEST_CASE("consistency checks the pairwise feasibility law") {
  PrimeChain good;
  good.rule = GrowthRule::power(RationalExponent(3, 2));
  good.primes = {mpz_class(2), mpz_class(3), mpz_class(5), mpz_class(11), mpz_class(37),
                 mpz_class(223)};  // 223 also sits in 37's window
  REQUIRE(chain_is_consistent(good));

  PrimeChain bad = good;
  bad.primes.emplace_back(3449);  // above 223's window [3319, 3342)
  REQUIRE_FALSE(chain_is_consistent(bad));
  bad.primes.back() = 3331;  // inside the window: consistent again
  REQUIRE(chain_is_consistent(bad));

  PrimeChain shift;
  shift.rule = GrowthRule::digit_shift(10);
  shift.primes = pcc::shift10_published();
  REQUIRE(chain_is_consistent(shift));
  // |73331 - 73330| = 1 <= 10/2: a carry-neighbour still rounds there.
  PrimeChain carry;
  carry.rule = GrowthRule::digit_shift(10);
  carry.primes = {mpz_class(7333), mpz_class(73327)};
  REQUIRE(chain_is_consistent(carry));
  carry.primes.back() = 73309;  // 2*|73309 - 73330| = 42 > 10
  REQUIRE_FALSE(chain_is_consistent(carry));
}

TEST_CASE("the published 3/2 seed generates the published chain to its information boundary") {
  const RealInterval seed = parse_decimal(pcc::kSeed32);
  const GrowthRule rule = GrowthRule::power(RationalExponent(3, 2));
  const auto& published = pcc::chain32_published();
  REQUIRE(published.size() == 14);

  const auto done = generate_from_seed(seed, rule, 12);
  REQUIRE(done.completed());
  REQUIRE(done.terms.size() == 13);
  for (std::size_t i = 0; i < 13; ++i) {
    REQUIRE(done.terms[i].index == i);
    REQUIRE(done.terms[i].value == published[i]);
    REQUIRE(done.terms[i].verdict.passed());
  }

  // The 14th published value needs more seed digits than were printed.
  const auto blocked = generate_from_seed(seed, rule, 13);
  REQUIRE(blocked.outcome == GenerateOutcome::PrecisionExhausted);
  REQUIRE(blocked.undecided_index == 13);
  REQUIRE(blocked.terms.size() == 13);
}

TEST_CASE("the published 5/4 seed sustains 25 prime terms, then goes composite") {
  const RealInterval seed = parse_decimal(pcc::kSeed54);
  const GrowthRule rule = GrowthRule::power(RationalExponent(5, 4));

  const auto r = generate_from_seed(seed, rule, 33, {}, 1);
  REQUIRE(r.completed());
  REQUIRE(r.terms.size() == 34);

  for (std::size_t i = 1; i <= 25; ++i) REQUIRE(r.terms[i].verdict.passed());
  for (std::size_t i = 26; i <= 33; ++i) REQUIRE_FALSE(r.terms[i].verdict.passed());

  // All six published values occur, at these orbit indices.
  const std::vector<std::pair<unsigned long, std::size_t>> placements = {
      {113, 1}, {367, 2}, {102217, 5}, {1827697, 6}, {67201679, 7}};
  for (const auto& [value, index] : placements) REQUIRE(r.terms[index].value == value);
  REQUIRE(r.terms[8].value == mpz_class("6084503671"));
  const auto& pub = pcc::chain54_published();
  REQUIRE(pub.size() == 6);
}

TEST_CASE("digit shift seed emits the concatenation primes") {
  const auto r = generate_from_seed(parse_decimal(pcc::kSeedShift10), GrowthRule::digit_shift(10), 5);
  REQUIRE(r.completed());
  REQUIRE(r.terms.size() == 6);
  REQUIRE(r.terms[0].value == 7);
  const auto& pub = pcc::shift10_published();
  REQUIRE(pub.size() == 5);
  for (std::size_t i = 1; i < 6; ++i) {
    REQUIRE(r.terms[i].value == pub[i - 1]);
    REQUIRE(r.terms[i].verdict.passed());
  }
}

TEST_CASE("scaled n^n scan reproduces the published run and flags n = 22") {
  const RealInterval c = parse_decimal(pcc::kScaleNN);
  const auto r = scan_scaled_nn(c, pcc::kScaledNNStart, 22);
  REQUIRE(r.completed());
  REQUIRE(r.terms.size() == 20);
  const auto& pub = pcc::scaled_nn_published();
  REQUIRE(pub.size() == 19);
  for (std::size_t i = 0; i < 19; ++i) {
    REQUIRE(r.terms[i].index == pcc::kScaledNNStart + i);
    REQUIRE(r.terms[i].value == pub[i]);
    REQUIRE(r.terms[i].verdict.passed());
  }
  REQUIRE(r.terms[19].index == 22);
  REQUIRE_FALSE(r.terms[19].verdict.passed());
  REQUIRE(r.terms[19].value == mpz_class("90679274426594169303635264729"));
}

TEST_CASE("Mills ladder follows the printed constant until it runs out of digits") {
  const RealInterval A = parse_decimal(pcc::kMillsA);
  const auto& known = pcc::mills_known_primes();
  REQUIRE(known.size() == 5);

  const auto ok = verify_mills(A, 4);
  REQUIRE(ok.completed());
  REQUIRE(ok.terms.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    REQUIRE(ok.terms[i].index == i + 1);
    REQUIRE(ok.terms[i].value == known[i]);
  }

  const auto deep = verify_mills(A, 5);
  REQUIRE(deep.outcome == GenerateOutcome::PrecisionExhausted);
  REQUIRE(deep.terms.size() == 4);
}

TEST_CASE("Wright tower follows the printed alpha for three levels") {
  const RealInterval alpha = parse_decimal(pcc::kWrightAlpha);
  const auto r = verify_wright(alpha, 3);
  REQUIRE(r.completed());
  REQUIRE(r.terms.size() == 3);
  const auto& known = pcc::wright_known_primes();
  for (std::size_t i = 0; i < 3; ++i) REQUIRE(r.terms[i].value == known[i]);

  // Level 4 is a 4932-digit integer; eight printed digits cannot pin it.
  const auto deep = verify_wright(alpha, 4);
  REQUIRE(deep.outcome == GenerateOutcome::PrecisionExhausted);
  REQUIRE(deep.terms.size() == 3);
}

TEST_CASE("forward regeneration matches the known Mills and Wright primes") {
  const auto mills = regenerate_mills(5, 1);
  const auto& known = pcc::mills_known_primes();
  REQUIRE(mills.primes.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) REQUIRE(mills.primes[i] == known[i]);

  const auto wright = regenerate_wright(3);
  REQUIRE(wright.primes.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) REQUIRE(wright.primes[i] == pcc::wright_known_primes()[i]);

  REQUIRE_THROWS_AS(regenerate_wright(5), resource_error);
}

TEST_CASE("seed recovery certifies the published digits") {
  PrimeChain chain;
  chain.rule = GrowthRule::power(RationalExponent(3, 2));
  chain.primes = pcc::chain32_published();

  const RealInterval rec = recover_seed(chain);
  const std::string certified = certified_decimal(rec, 80);
  REQUIRE(testor::starts_with(certified, std::string(pcc::kSeed32)));
  REQUIRE(certified.size() >= 60);
  REQUIRE(rec.width_exponent() <= -200);

  // Seven terms pin far fewer digits.
  PrimeChain short7 = chain;
  short7.primes.resize(7);
  const RealInterval rec7 = recover_seed(short7);
  REQUIRE(testor::starts_with(certified_decimal(rec7, 80), "2.03"));

  // The midpoint of the enclosure regenerates the identical chain.
  const auto regen = generate_from_seed(rec.midpoint(), chain.rule, 12);
  REQUIRE(regen.completed());
  REQUIRE(regen.terms.size() == 13);
  for (std::size_t i = 0; i < 13; ++i) REQUIRE(regen.terms[i].value == chain.primes[i]);
}

TEST_CASE("seed recovery proves tampered chains infeasible") {
  PrimeChain chain;
  chain.rule = GrowthRule::power(RationalExponent(3, 2));
  chain.primes = {mpz_class(2), mpz_class(3),  mpz_class(5),
                  mpz_class(11), mpz_class(37), mpz_class(227),
                  mpz_class(3331)};  // 3331 needs 223, not 227
  REQUIRE_THROWS_AS(recover_seed(chain), empty_intersection_error);

  PrimeChain empty;
  empty.rule = GrowthRule::power(RationalExponent(3, 2));
  REQUIRE_THROWS_AS(recover_seed(empty), domain_error);

  PrimeChain shift;
  shift.rule = GrowthRule::digit_shift(10);
  shift.primes = {mpz_class(7)};
  REQUIRE_THROWS_AS(recover_seed(shift), domain_error);
}

TEST_CASE("recovered Mills constant sits inside the printed prefix and extends it") {
  const RealInterval rec = recover_mills_constant(pcc::mills_known_primes());
  // Five primes pin the constant beyond its 28 printed digits, so the printed
  // prefix interval contains the recovered enclosure, not the other way round.
  const RealInterval printed = parse_decimal(pcc::kMillsA);
  REQUIRE(printed.contains(rec));
  REQUIRE(testor::starts_with(certified_decimal(rec, 40), std::string(pcc::kMillsA)));
}

TEST_CASE("recovered scale constant contains the printed value") {
  const RealInterval rec = recover_scale_constant(pcc::scaled_nn_published(), pcc::kScaledNNStart);
  const RealInterval printed = parse_decimal(pcc::kScaleNN, {}, ParseMode::Exact);
  REQUIRE(rec.contains(printed.lo_rational()));
  REQUIRE(testor::starts_with(certified_decimal(rec, 60), "0.26558837294314339089712945"));

  // Incompatible floor constraints are a proof, not a numerics failure.
  REQUIRE_THROWS_AS(recover_scale_constant({mpz_class(7), mpz_class(100)}, 3),
                    empty_intersection_error);
}

TEST_CASE("generate refuses unusable seeds and rules") {
  const GrowthRule rule = GrowthRule::power(RationalExponent(3, 2));
  REQUIRE_THROWS_AS(generate_from_seed(parse_decimal("-2.5"), rule, 3), domain_error);
  REQUIRE_THROWS_AS(generate_from_seed(parse_decimal("2.5"), GrowthRule::scaled_nn(3), 3),
                    domain_error);
}
