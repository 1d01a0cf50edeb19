#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "factorlab/setfield.hpp"

namespace factorlab {

using BigInt = mpz_class;

// Every random draw in the project flows through one of these engines,
// seeded explicitly by the caller; mt19937_64 output is pinned by the
// standard, so identical seeds reproduce identical runs on any platform.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);
// Independent per-trial stream so trial results don't depend on schedule.
Rng make_trial_rng(std::uint64_t seed, std::uint64_t trial);
// Unbiased draw from {0, ..., n-1} by rejection (no stdlib distribution:
// their outputs are implementation-defined).
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

BigInt gcd(const BigInt& a, const BigInt& b);

// a / b when the division is exact, absent otherwise. b must be nonzero.
std::optional<BigInt> exact_div(const BigInt& a, const BigInt& b);

// Strong-pseudoprime test against the fixed witness set {2,3,...,37},
// deterministic for n < 3.317e24; larger inputs additionally face the
// primes up to 97 (far beyond anything this project generates).
bool is_prime(const BigInt& n);

struct PrimeSet {
  std::vector<BigInt> primes;  // ascending
  unsigned bit_length = 0;
};

inline constexpr unsigned kEnumerationBitCap = 22;

// All primes with exactly n bits, by sieve. n must be in [2, cap].
PrimeSet primes_of_bitlength(unsigned n, unsigned cap = kEnumerationBitCap);

// Uniform prime of exactly n bits: exact enumeration up to the cap,
// rejection sampling of n-bit candidates above it.
BigInt sample_prime(unsigned n, Rng& rng, unsigned cap = kEnumerationBitCap);

BigInt sample_from(const PrimeSet& set, Rng& rng);

struct BaseFactorization {
  IndexSet indices;  // base positions whose prime divides y
  BigInt remainder;  // y with every power of every base prime removed
};

// Splits y >= 1 against an ordered tuple of base primes. No base prime
// divides the remainder; y == remainder * prod(indices) exactly when y is
// squarefree over the base (always the case for divisors of the base
// product).
BaseFactorization factor_against_base(const BigInt& y, const std::vector<BigInt>& base_primes);

std::string to_decimal(const BigInt& v);
BigInt from_decimal(const std::string& s);

}  // namespace factorlab
