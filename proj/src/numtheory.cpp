#include "factorlab/numtheory.hpp"

#include <algorithm>
#include <stdexcept>

namespace factorlab {

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32)};
  return Rng(seq);
}

Rng make_trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(trial),
                    std::uint32_t(trial >> 32)};
  return Rng(seq);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_index over empty range");
  if (n == 1) return 0;
  // Reject draws from the tail that would skew the modulus.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v > limit);
  return v % n;
}

BigInt gcd(const BigInt& a, const BigInt& b) {
  BigInt g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

std::optional<BigInt> exact_div(const BigInt& a, const BigInt& b) {
  if (b == 0) throw std::invalid_argument("exact_div by zero");
  if (!mpz_divisible_p(a.get_mpz_t(), b.get_mpz_t())) return std::nullopt;
  BigInt q;
  mpz_divexact(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

namespace {

bool strong_probable_prime(const BigInt& n, const BigInt& a) {
  // n odd, n > 2, 1 < a < n-1 assumed by the caller.
  BigInt d = n - 1;
  unsigned long r = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), r);
  BigInt x;
  mpz_powm(x.get_mpz_t(), a.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n - 1) return true;
  for (unsigned long i = 1; i < r; ++i) {
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), 2, n.get_mpz_t());
    if (x == n - 1) return true;
  }
  return false;
}

// {2,...,37} is a complete witness set below 3'317'044'064'679'887'385'961'981.
constexpr unsigned kCoreWitnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
constexpr unsigned kExtraWitnesses[] = {41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

}  // namespace

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned w : kCoreWitnesses) {
    if (n == w) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), w)) return false;
  }
  const bool beyond_certified = mpz_sizeinbase(n.get_mpz_t(), 2) > 81;
  for (unsigned w : kCoreWitnesses) {
    if (!strong_probable_prime(n, BigInt(w))) return false;
  }
  if (beyond_certified) {
    for (unsigned w : kExtraWitnesses) {
      if (mpz_divisible_ui_p(n.get_mpz_t(), w)) return n == w;
      if (!strong_probable_prime(n, BigInt(w))) return false;
    }
  }
  return true;
}

PrimeSet primes_of_bitlength(unsigned n, unsigned cap) {
  if (n < 2) throw std::invalid_argument("bit length must be at least 2");
  if (n > cap) throw std::invalid_argument("bit length exceeds enumeration cap");
  const std::uint64_t lo = std::uint64_t{1} << (n - 1);
  const std::uint64_t hi = std::uint64_t{1} << n;
  std::vector<bool> composite(hi, false);
  for (std::uint64_t p = 2; p * p < hi; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t m = p * p; m < hi; m += p) composite[m] = true;
  }
  PrimeSet out;
  out.bit_length = n;
  for (std::uint64_t v = lo; v < hi; ++v) {
    if (v >= 2 && !composite[v]) out.primes.emplace_back(static_cast<unsigned long>(v));
  }
  return out;
}

BigInt sample_from(const PrimeSet& set, Rng& rng) {
  if (set.primes.empty()) throw std::invalid_argument("sampling from empty prime set");
  return set.primes[uniform_index(rng, set.primes.size())];
}

BigInt sample_prime(unsigned n, Rng& rng, unsigned cap) {
  if (n < 2) throw std::invalid_argument("bit length must be at least 2");
  if (n <= cap) {
    PrimeSet set = primes_of_bitlength(n, cap);
    return sample_from(set, rng);
  }
  // Rejection: uniform n-bit odd candidates until one is prime. Terminates
  // since every bit length holds a prime (Bertrand).
  while (true) {
    BigInt candidate = 1;  // forced top bit
    unsigned remaining = n - 1;
    while (remaining > 0) {
      const unsigned take = std::min(64u, remaining);
      const std::uint64_t mask = take == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << take) - 1;
      candidate <<= take;
      candidate |= BigInt(static_cast<unsigned long>(rng() & mask));
      remaining -= take;
    }
    mpz_setbit(candidate.get_mpz_t(), 0);
    if (is_prime(candidate)) return candidate;
  }
}

BaseFactorization factor_against_base(const BigInt& y, const std::vector<BigInt>& base_primes) {
  if (y < 1) throw std::invalid_argument("factor_against_base expects y >= 1");
  if (base_primes.size() > 64) throw std::invalid_argument("base too large for index sets");
  BaseFactorization out{0, y};
  for (std::size_t i = 0; i < base_primes.size(); ++i) {
    bool divided = false;
    while (auto q = exact_div(out.remainder, base_primes[i])) {
      out.remainder = *q;
      divided = true;
    }
    if (divided) out.indices |= IndexSet{1} << i;
  }
  return out;
}

std::string to_decimal(const BigInt& v) { return v.get_str(); }

BigInt from_decimal(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty decimal string");
  return BigInt(s);
}

}  // namespace factorlab
