#include <catch2/catch_amalgamated.hpp>

#include <primechain/search.hpp>

#include <algorithm>
#include <random>
#include <vector>

#include "oracles.hpp"

using namespace primechain;
using search::SearchConfig;

namespace {

std::size_t median_of(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

}  // namespace

TEST_CASE("config validation rejects broken schedules") {
  SearchConfig cfg;
  cfg.cooling_factor = 1.0;
  REQUIRE_THROWS_AS(cfg.validate(), domain_error);
  cfg = SearchConfig{};
  cfg.min_temperature = 5.0;
  REQUIRE_THROWS_AS(cfg.validate(), domain_error);
  cfg = SearchConfig{};
  cfg.restart_count = 0;
  REQUIRE_THROWS_AS(cfg.validate(), domain_error);
  cfg = SearchConfig{};
  cfg.start_min = 80;
  cfg.start_max = 40;
  REQUIRE_THROWS_AS(cfg.validate(), domain_error);
}

TEST_CASE("start window is the integer image of the real seed range") {
  SearchConfig cfg;  // seeds in [40, 60]
  const auto w = search::start_prime_window(GrowthRule::power(RationalExponent(5, 4)), cfg);
  REQUIRE(w.lo == 101);  // ceil(40^1.25)
  REQUIRE(w.hi == 167);  // floor(60^1.25) + 1
}

TEST_CASE("energy is dominated by length, with growth as tiebreak") {
  PrimeChain shorter, longer;
  shorter.rule = longer.rule = GrowthRule::power(RationalExponent(5, 4));
  shorter.primes = {mpz_class(113), mpz_class(367)};
  longer.primes = {mpz_class(113), mpz_class(367), mpz_class(1607)};
  REQUIRE(search::chain_energy(longer, 0.01) < search::chain_energy(shorter, 0.01));

  PrimeChain small_last = longer, big_last = longer;
  big_last.primes.back() = 1609;
  REQUIRE(search::chain_energy(small_last, 0.01) < search::chain_energy(big_last, 0.01));
}

TEST_CASE("annealing the 5/4 rule is deterministic and reaches the target") {
  const GrowthRule rule = GrowthRule::power(RationalExponent(5, 4));
  SearchConfig cfg;  // rng_seed = 1, target 8

  const auto a = search::anneal_chain(rule, cfg);
  const auto b = search::anneal_chain(rule, cfg);

  REQUIRE(a.reached_target);
  REQUIRE(a.best.primes.size() >= 8);
  REQUIRE(chain_is_consistent(a.best));
  for (const auto& p : a.best.primes) REQUIRE(primality::classify(p).passed());

  REQUIRE(a.best.primes == b.best.primes);
  REQUIRE(a.best_energy == b.best_energy);
  REQUIRE(a.moves_tried == b.moves_tried);
  REQUIRE(a.moves_accepted == b.moves_accepted);
  REQUIRE(a.restarts_completed == 8);

  // Frozen best for rng_seed 1: the solver's answer must never drift silently.
  const std::vector<mpz_class> frozen = {
      mpz_class(113),      mpz_class(367),      mpz_class(1607),
      mpz_class(10177),    mpz_class(102217),   mpz_class(1827697),
      mpz_class(67201679), mpz_class("6084503611")};
  REQUIRE(a.best.primes == frozen);
}

TEST_CASE("progress callbacks arrive in restart order with monotone best length") {
  const GrowthRule rule = GrowthRule::power(RationalExponent(5, 4));
  SearchConfig cfg;
  std::vector<search::SearchProgress> seen;
  search::anneal_chain(rule, cfg, [&](const search::SearchProgress& p) { seen.push_back(p); });
  REQUIRE(seen.size() == 8);
  for (std::size_t i = 0; i < seen.size(); ++i) {
    REQUIRE(seen[i].restart == static_cast<int>(i));
    if (i > 0) REQUIRE(seen[i].best_length >= seen[i - 1].best_length);
  }
  REQUIRE(seen.back().best_length >= 8);
}

TEST_CASE("target length one needs no moves") {
  SearchConfig cfg;
  cfg.target_length = 1;
  const auto out = search::anneal_chain(GrowthRule::power(RationalExponent(5, 4)), cfg);
  REQUIRE(out.reached_target);
  REQUIRE(out.best.primes.size() >= 1);
  REQUIRE(out.moves_tried == 0);
}

TEST_CASE("a zero budget exhausts before any restart runs") {
  SearchConfig cfg;
  cfg.time_budget_seconds = 0.0;
  const auto out = search::anneal_chain(GrowthRule::power(RationalExponent(5, 4)), cfg);
  REQUIRE(out.budget_exhausted);
  REQUIRE(out.restarts_completed == 0);
  REQUIRE(out.best.primes.empty());
}

TEST_CASE("seeds in [40, 50] reach a length-6 chain") {
  SearchConfig cfg;
  cfg.start_min = 40;
  cfg.start_max = 50;
  cfg.target_length = 6;
  const auto out = search::anneal_chain(GrowthRule::power(RationalExponent(5, 4)), cfg);
  REQUIRE(out.reached_target);
  REQUIRE(out.best.primes.size() >= 6);
  REQUIRE(chain_is_consistent(out.best));
}

TEST_CASE("annealing the scaled n^n rule finds an envelope-consistent chain") {
  SearchConfig cfg;
  cfg.rng_seed = 7;
  cfg.target_length = 10;
  const auto out = search::anneal_chain(GrowthRule::scaled_nn(3), cfg);
  REQUIRE(out.reached_target);

  const std::vector<mpz_class> frozen = {
      mpz_class(3),            mpz_class(31),          mpz_class(379),
      mpz_class(5669),         mpz_class(100069),      mpz_class(2038607),
      mpz_class(47075653),     mpz_class(1215104899),  mpz_class("34668360889"),
      mpz_class("1083399734077")};
  REQUIRE(out.best.primes == frozen);

  // A single scale constant c realizes every floor(c * n^n) term: take the
  // envelope midpoint and replay the run forward exactly.
  const auto env = search::detail::nn_envelope(out.best.primes, 3);
  REQUIRE(env.has_value());
  REQUIRE(env->lo < env->hi);
  const mpq_class mid = (env->lo + env->hi) / 2;
  for (std::size_t i = 0; i < out.best.primes.size(); ++i) {
    const unsigned long n = 3 + static_cast<unsigned long>(i);
    mpz_class nn;
    mpz_ui_pow_ui(nn.get_mpz_t(), n, n);
    const mpq_class scaled = mid * mpq_class(nn);
    mpz_class floor_val;
    mpz_fdiv_q(floor_val.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
    REQUIRE(floor_val == out.best.primes[i]);
  }

  const auto again = search::anneal_chain(GrowthRule::scaled_nn(3), cfg);
  REQUIRE(again.best.primes == out.best.primes);
}

TEST_CASE("annealing is at least as good as greedy from the same start draws") {
  const GrowthRule rule = GrowthRule::power(RationalExponent(5, 4));
  std::vector<std::size_t> anneal_lengths, greedy_lengths;

  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SearchConfig cfg;
    cfg.rng_seed = seed;
    const auto out = search::anneal_chain(rule, cfg);
    anneal_lengths.push_back(out.best.primes.size());

    // Greedy baseline: walk forward from the same first-restart start prime.
    const auto w = search::start_prime_window(rule, cfg);
    std::mt19937_64 g(search::detail::restart_seed(seed, 0));
    const auto start = search::detail::random_prime_in(g, w.lo, w.hi, 1);
    REQUIRE(start.has_value());
    greedy_lengths.push_back(search::greedy_chain(rule, *start, 12, SelectionPolicy::Nearest, 1)
                                 .primes.size());
  }

  REQUIRE(median_of(anneal_lengths) >= median_of(greedy_lengths));
  REQUIRE(*std::max_element(anneal_lengths.begin(), anneal_lengths.end()) >= 8);
}

TEST_CASE("greedy extension demands a prime start and reports dead ends") {
  const GrowthRule rule = GrowthRule::power(RationalExponent(5, 4));
  REQUIRE_THROWS_AS(search::greedy_extend(rule, mpz_class(48), 5), domain_error);

  const auto dead = search::greedy_extend(rule, mpz_class(47), 5);
  REQUIRE(dead.infeasible());
  REQUIRE(dead.chain.primes.size() == 1);

  const auto alive = search::greedy_chain(GrowthRule::power(RationalExponent(3, 2)), mpz_class(2), 8);
  REQUIRE(alive.primes.size() == 8);
  REQUIRE(alive.primes.back() == 199399);
}

TEST_CASE("annealing rejects rules without a search model") {
  SearchConfig cfg;
  REQUIRE_THROWS_AS(search::anneal_chain(GrowthRule::exp2_tower(), cfg), domain_error);
  REQUIRE_THROWS_AS(search::anneal_chain(GrowthRule::digit_shift(10), cfg), domain_error);
  REQUIRE_THROWS_AS(
      search::anneal_chain(GrowthRule::power(RationalExponent(3, 2), RoundingMode::Floor), cfg),
      domain_error);
}
