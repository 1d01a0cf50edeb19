#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "factorlab/protocol.hpp"
#include "factorlab/teacher.hpp"

namespace factorlab {

// The derivable-number state as a student sees it: no base positions, just
// numbers. Atoms are pairwise coprime with product x; a number is derivable
// from the history by gcd and exact division iff it is a product of atoms.
class DivisorLattice {
 public:
  explicit DivisorLattice(BigInt x);

  void absorb(const BigInt& v);          // refine every atom by gcd with v
  void absorb(const Answer& a);          // every coordinate
  bool is_obvious(const BigInt& v) const;
  bool is_atom(const BigInt& v) const;
  const std::vector<BigInt>& atoms() const { return atoms_; }  // ascending
  const BigInt& x() const { return x_; }

 private:
  BigInt x_;
  std::vector<BigInt> atoms_;
};

// Picks which atom an obvious student answers; receives them ascending.
using AtomSelector = std::function<std::size_t(const std::vector<BigInt>& atoms)>;
AtomSelector least_atom_selector();

// Always answers x.
Student trivial_student();

// Rebuilds the lattice from the replies seen so far and answers one atom.
Student obvious_student(AtomSelector selector = least_atom_selector());

enum class OmniscientPolicy { immediate, halving };

// Knows the hidden factor tuple. "immediate" answers its first factor every
// round; "halving" keeps the first half of its remaining candidates each
// round, reaching a single factor within log2(d) rounds.
Student omniscient_student(std::vector<BigInt> hidden_factors, OmniscientPolicy policy);
Student omniscient_student(const FactorBase& hidden, OmniscientPolicy policy);

// Answers the least divisor of x found by trial division up to the budget,
// else x.
Student trial_division_student(unsigned long budget);

// Parallel: answers every atom of the current lattice, ascending, padded by
// repetition (or truncated) to the declared width.
Student parallel_obvious_student(int width);

// Parallel: coordinate 1 plays an omniscient policy, the rest play the
// atoms. Wins the parallel game; the conversion tests lean on it.
Student parallel_with_omniscient_coordinate(int width, std::vector<BigInt> hidden_factors,
                                            OmniscientPolicy policy);

struct StudentSpecContext {
  std::optional<FactorBase> hidden;  // required by the omniscient families
  int width = 1;                     // required by the parallel families
};

// Builds a student from a CLI-style spec: trivial | obvious[:least] |
// omniscient[:immediate|halving] | trialdiv[:budget] | parallel-obvious |
// parallel-omniscient[:immediate|halving]. Throws std::invalid_argument on
// anything else.
Student make_student(const std::string& spec, const StudentSpecContext& ctx);

}  // namespace factorlab
