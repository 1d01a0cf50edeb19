#pragma once

#include <optional>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorlab/protocol.hpp"
#include "factorlab/setfield.hpp"

namespace factorlab {

// An ordered tuple of pairwise-distinct factors (>= 2) together with their
// product. The order matters: the halving rule splits factorizations by
// position in this tuple. Primality of the entries is the caller's
// responsibility; every game-theoretic guarantee assumes it.
struct FactorBase {
  std::vector<BigInt> primes;
  BigInt x;

  static FactorBase from_primes(std::vector<BigInt> primes);
  int size() const { return static_cast<int>(primes.size()); }
  FactorBase permuted(const std::vector<int>& perm) const;  // perm: 1-based positions
};

BigInt product_of(const FactorBase& base, IndexSet indices);

// What the teacher knows the student can already derive: every number
// obtainable from the input and the history by gcd and exact division.
// Those numbers' index sets form a field over the base positions, stored
// as its atom partition.
struct ObviousState {
  FactorBase base;
  AtomPartition partition;
  int round = 1;
};

ObviousState initial_state(const FactorBase& base);

bool is_obvious(const ObviousState& state, const BigInt& v);
// All obvious numbers, ascending (1 and x included). Guarded against
// partitions with more than 20 atoms.
std::vector<BigInt> obvious_numbers(const ObviousState& state);

struct TeacherStepResult {
  Answer z;
  std::vector<BigInt> divided_by;  // ascending
  ObviousState next;
};

// One sequential reply. Invalid answers (below 2, or not a product of
// distinct base factors) get 1. A single base factor is confirmed as is.
// Otherwise the smallest gcd with an obvious number that properly divides
// y is returned when one exists; failing that the answer's factorization
// is cut in half by base position, the first half returned and the second
// half reported as divided away.
TeacherStepResult teacher_reply(const ObviousState& state, const BigInt& y);

// Coordinate-wise replies, all judged against the round-start state; the
// state then absorbs every coordinate at once. Scalar answers to the
// parallel teacher get a scalar 1.
TeacherStepResult parallel_teacher_reply(const ObviousState& state, const Answer& y);

Teacher make_teacher(const FactorBase& base);
Teacher make_parallel_teacher(const FactorBase& base);

// Entry states for rounds 1..c reconstructed from a transcript's answers.
std::vector<ObviousState> obvious_states_through(const FactorBase& base, const Transcript& t);

// Evidence that a student told two base factors apart without the teacher
// having separated them: at round `round` some answered value shares
// exactly one of pair's factors, while every earlier divided-by set
// contains both or neither.
struct BreakWitness {
  std::vector<int> perm;     // 1-based positions into the canonical base
  int round = 0;             // 1-based
  std::pair<int, int> pair;  // 1-based canonical base indices, l < k
  Transcript transcript;
};

nlohmann::json break_witness_to_json(const BreakWitness& w);
BreakWitness break_witness_from_json(const nlohmann::json& j);

// Scans base permutations in lexicographic order, replays the protocol
// under each, and returns the first witness (least round, then least
// pair). Absent when no permutation produces one.
std::optional<BreakWitness> detect_break(const Student& student, const FactorBase& base, int c);

// Re-derives the witness condition from the stored transcript alone.
bool validate_break(const BreakWitness& w, const FactorBase& base);

}  // namespace factorlab
