#include <doctest.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "factorlab/numtheory.hpp"

using namespace factorlab;

namespace {

// gcd by repeated subtraction, the definitional oracle.
std::uint32_t subtraction_gcd(std::uint32_t a, std::uint32_t b) {
  while (a != b) {
    if (a > b)
      a -= b;
    else
      b -= a;
  }
  return a;
}

std::vector<bool> sieve_through(std::uint32_t limit) {
  std::vector<bool> composite(limit + 1, false);
  composite[0] = true;
  if (limit >= 1) composite[1] = true;
  for (std::uint32_t p = 2; p * p <= limit; ++p)
    if (!composite[p])
      for (std::uint32_t m = p * p; m <= limit; m += p) composite[m] = true;
  return composite;
}

}  // namespace

TEST_CASE("gcd basics") {
  CHECK(gcd(1, 210) == 1);
  CHECK(gcd(10, 6) == 2);
  CHECK(gcd(210, 210) == 210);
  CHECK(gcd(BigInt(1) << 80, BigInt(1) << 75) == BigInt(1) << 75);
}

TEST_CASE("exact_div basics") {
  CHECK(exact_div(210, 6) == BigInt(35));
  CHECK(exact_div(210, 4) == std::nullopt);
  CHECK(exact_div(12345, 1) == BigInt(12345));
  CHECK_THROWS_AS(exact_div(5, 0), std::invalid_argument);
}

TEST_CASE("gcd and exact_div agree with the subtraction oracle, a,b <= 1000") {
  for (std::uint32_t a = 1; a <= 1000; ++a)
    for (std::uint32_t b = 1; b <= 1000; ++b) {
      std::uint32_t g = subtraction_gcd(a, b);
      REQUIRE(gcd(BigInt(a), BigInt(b)) == BigInt(g));
      auto q = exact_div(BigInt(a), BigInt(b));
      if (a % b == 0)
        REQUIRE(q == BigInt(a / b));
      else
        REQUIRE(q == std::nullopt);
    }
}

TEST_CASE("is_prime matches trial division through 2^16") {
  auto composite = sieve_through(1 << 16);
  for (std::uint32_t n = 0; n <= (1u << 16); ++n) REQUIRE(is_prime(BigInt(n)) == !composite[n]);
}

TEST_CASE("is_prime spot checks beyond the sieve") {
  CHECK_FALSE(is_prime(561));  // Carmichael: fools every Fermat base coprime to it
  CHECK(is_prime(BigInt("2305843009213693951")));       // 2^61 - 1
  CHECK_FALSE(is_prime(BigInt("147573952589676412927")));  // 2^67 - 1 = 193707721 * 761838257287
  // Above the 81-bit certification line the extended witness set takes over.
  CHECK(is_prime((BigInt(1) << 89) - 1));
  CHECK_FALSE(is_prime((BigInt(1) << 83) - 1));
  CHECK_FALSE(is_prime(BigInt("2305843009213693951") * BigInt("2305843009213693951")));
}

TEST_CASE("primes_of_bitlength: frozen values and sieve oracle") {
  CHECK(primes_of_bitlength(2).primes == std::vector<BigInt>{2, 3});
  CHECK(primes_of_bitlength(3).primes == std::vector<BigInt>{5, 7});
  CHECK(primes_of_bitlength(4).primes == std::vector<BigInt>{11, 13});
  CHECK(primes_of_bitlength(8).primes.size() == 23);

  auto composite = sieve_through(1 << 16);
  std::map<unsigned, std::vector<BigInt>> by_length;
  for (std::uint32_t n = 2; n <= (1u << 16); ++n)
    if (!composite[n]) by_length[mpz_sizeinbase(BigInt(n).get_mpz_t(), 2)].push_back(n);
  for (unsigned n = 2; n <= 16; ++n) {
    PrimeSet set = primes_of_bitlength(n);
    CHECK(set.bit_length == n);
    CHECK(set.primes == by_length[n]);
  }
}

TEST_CASE("primes_of_bitlength cap enforcement") {
  CHECK_THROWS_AS(primes_of_bitlength(1), std::invalid_argument);
  CHECK_THROWS_AS(primes_of_bitlength(kEnumerationBitCap + 1), std::invalid_argument);
  CHECK_THROWS_AS(primes_of_bitlength(10, 9), std::invalid_argument);
}

TEST_CASE("sample_prime: support and uniformity at 3 bits") {
  Rng rng = make_rng(42);
  int fives = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    BigInt p = sample_prime(3, rng);
    REQUIRE((p == 5 || p == 7));
    if (p == 5) ++fives;
  }
  double freq = static_cast<double>(fives) / trials;
  CHECK(freq > 0.45);
  CHECK(freq < 0.55);
}

TEST_CASE("sample_prime: rejection path above the enumeration cap") {
  Rng rng = make_rng(5);
  for (int i = 0; i < 30; ++i) {
    BigInt p = sample_prime(24, rng, 22);
    CHECK(mpz_sizeinbase(p.get_mpz_t(), 2) == 24);
    CHECK(is_prime(p));
  }
  CHECK_THROWS_AS(sample_prime(1, rng), std::invalid_argument);
}

TEST_CASE("sample_from draws members; empty set refused") {
  PrimeSet set = primes_of_bitlength(4);
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) {
    BigInt p = sample_from(set, rng);
    CHECK((p == 11 || p == 13));
  }
  PrimeSet empty;
  CHECK_THROWS_AS(sample_from(empty, rng), std::invalid_argument);
}

TEST_CASE("uniform_index: bounds, determinism, rough uniformity") {
  Rng rng = make_rng(3);
  CHECK_THROWS_AS(uniform_index(rng, 0), std::invalid_argument);
  for (int i = 0; i < 1000; ++i) CHECK(uniform_index(rng, 1) == 0);

  Rng a = make_rng(11), b = make_rng(11);
  for (int i = 0; i < 200; ++i) CHECK(uniform_index(a, 1000) == uniform_index(b, 1000));

  int counts[3] = {0, 0, 0};
  Rng c = make_rng(17);
  for (int i = 0; i < 30000; ++i) ++counts[uniform_index(c, 3)];
  for (int k = 0; k < 3; ++k) {
    CHECK(counts[k] > 9500);
    CHECK(counts[k] < 10500);
  }
}

TEST_CASE("trial rng streams are reproducible and distinct") {
  Rng a = make_trial_rng(9, 0), b = make_trial_rng(9, 0), c = make_trial_rng(9, 1);
  CHECK(a() == b());
  Rng a2 = make_trial_rng(9, 0);
  bool differs = false;
  for (int i = 0; i < 4; ++i)
    if (a2() != c()) differs = true;
  CHECK(differs);
}

TEST_CASE("factor_against_base: frozen examples") {
  std::vector<BigInt> base = {2, 3, 5, 7};

  auto f = factor_against_base(6, base);
  CHECK(f.indices == index_set_of({1, 2}));
  CHECK(f.remainder == 1);

  f = factor_against_base(1, base);
  CHECK(f.indices == 0);
  CHECK(f.remainder == 1);

  f = factor_against_base(385, base);  // 5 * 7 * 11
  CHECK(f.indices == index_set_of({3, 4}));
  CHECK(f.remainder == 11);
}

TEST_CASE("factor_against_base strips full prime powers") {
  std::vector<BigInt> base = {2, 3, 5, 7};
  auto f = factor_against_base(40, base);  // 2^3 * 5
  CHECK(f.indices == index_set_of({1, 3}));
  CHECK(f.remainder == 1);

  f = factor_against_base(9 * 11, base);
  CHECK(f.indices == index_set_of({2}));
  CHECK(f.remainder == 11);

  CHECK_THROWS_AS(factor_against_base(0, base), std::invalid_argument);
}

TEST_CASE("factor_against_base reconstructs squarefree divisors exactly") {
  std::vector<BigInt> base = {2, 3, 5, 7, 11};
  for (unsigned pick = 0; pick < 32; ++pick) {
    BigInt y = 1;
    for (unsigned i = 0; i < 5; ++i)
      if (pick >> i & 1) y *= base[i];
    auto f = factor_against_base(y, base);
    CHECK(f.indices == IndexSet{pick});
    CHECK(f.remainder == 1);
  }
}

TEST_CASE("decimal strings round-trip") {
  for (const char* s : {"0", "1", "35", "2305843009213693951"}) {
    CHECK(to_decimal(from_decimal(s)) == s);
  }
  BigInt big = (BigInt(1) << 200) + 12345;
  CHECK(from_decimal(to_decimal(big)) == big);
  CHECK_THROWS_AS(from_decimal(""), std::invalid_argument);
  CHECK_THROWS_AS(from_decimal("12x"), std::invalid_argument);
}
