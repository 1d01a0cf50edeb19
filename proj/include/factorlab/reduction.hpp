#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorlab/students.hpp"

namespace factorlab {

// The two unknown prime factors of pq are carried as placeholders; their
// individual values never enter the simulation, only their product.
inline constexpr unsigned kStarOne = 1u;
inline constexpr unsigned kStarTwo = 2u;
inline constexpr unsigned kBothStars = kStarOne | kStarTwo;

// A divisor of the blinded input as the simulated teacher sees it: some
// supplied primes plus none or some of the two placeholders. Its numeric
// value is computable exactly when the placeholders appear as a pair
// (their product is known) or not at all.
struct SymbolicDivisor {
  IndexSet known = 0;   // 1-based indices into the supplied primes
  unsigned stars = 0;

  bool operator==(const SymbolicDivisor&) const = default;
};

std::optional<BigInt> symbolic_value(const SymbolicDivisor& v, const BigInt& pq,
                                     const std::vector<BigInt>& supplied);

// A number to factor, the primes the caller throws in, and the round
// budget. The simulated base has d = supplied.size() + 2 slots.
struct BlindInstance {
  BigInt pq;
  std::vector<BigInt> supplied;
  int c = 1;

  int d() const { return static_cast<int>(supplied.size()) + 2; }
};

// One arrangement of the symbol tuple (*1, *2, p1, ..., p_{d-2}) across
// the d base positions, with the derivable-number field over positions.
struct SymbolicState {
  BlindInstance instance;
  std::vector<int> symbol_at;  // position t holds symbol id symbol_at[t]; 0 = *1, 1 = *2, i>=2 = supplied[i-2]
  AtomPartition partition;
  int round = 1;
};

SymbolicState initial_symbolic_state(const BlindInstance& instance,
                                     const std::vector<int>& arrangement);

struct SymbolicFactorList {
  std::vector<BigInt> known;  // ascending
  unsigned stars = 0;

  bool operator==(const SymbolicFactorList&) const = default;
};

struct SymbolicStepResult {
  BigInt z;                        // replies are always numerically known
  SymbolicFactorList divided_by;
  SymbolicState next;
};

// The teacher's rules replayed over base positions. Absent means ABORT:
// the rule needed the value of exactly one placeholder (a halving split
// that separates the pair, or a gcd comparison against such a candidate).
std::optional<SymbolicStepResult> symbolic_teacher_reply(const SymbolicState& state,
                                                         const BigInt& y);

struct SymbolicRound {
  BigInt y;
  std::optional<BigInt> z;
  std::optional<SymbolicFactorList> divided_by;
};

struct SymbolicTranscript {
  BigInt x;
  int c = 0;
  int width = 1;
  std::vector<SymbolicRound> rounds;
};

// Same shape as a transcript; placeholder factors appear as "*1"/"*2"
// tokens inside divided_by lists.
nlohmann::json symbolic_transcript_to_json(const SymbolicTranscript& t);

// Fills the placeholders in and yields an ordinary transcript.
Transcript substitute_stars(const SymbolicTranscript& t, const BigInt& p, const BigInt& q);

enum class PermutationOutcome { completed, aborted, factor_found };

struct PermutationTrace {
  std::vector<int> arrangement;  // symbol ids by position
  PermutationOutcome outcome = PermutationOutcome::completed;
  SymbolicTranscript transcript;  // partial when aborted mid-run
  std::optional<BigInt> factor;
};

// Factors pq by interrogating the student against every arrangement of
// {*1, *2, p1, ..., p_{d-2}} in lexicographic order: duplicated supplied
// primes make the instance vacuous (absent); a supplied prime dividing pq
// is returned outright; otherwise each answer's gcd with pq is inspected
// and arrangements whose simulation would need a lone placeholder are
// abandoned. First factor found wins.
std::optional<BigInt> blind_simulate(const BlindInstance& instance, const Student& student);

// Runs every arrangement regardless of early success; diagnostic/test view.
std::vector<PermutationTrace> blind_simulate_traced(const BlindInstance& instance,
                                                    const Student& student);

// Wraps a parallel student (round budget e) into a sequential one for
// c = 2^e - 1 rounds: parallel round i unfolds into sequential rounds
// 2^(i-1) .. 2^i - 1, which carry the distinct atom-valued answers of that
// round ascending (padded by repetition, or by 1 when there are none);
// replies within a block are collected to rebuild the parallel reply. The
// first non-obvious parallel answer is emitted for every remaining round.
Student convert_parallel_student(const Student& parallel_student, int e);

}  // namespace factorlab
