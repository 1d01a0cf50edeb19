#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace factorlab {

// A subset of {1, ..., d} packed into a word: element i occupies bit i-1.
// All finite fields of sets handled here live over such universes (d <= 64).
using IndexSet = std::uint64_t;

struct Universe {
  int size = 0;  // elements are 1..size

  explicit Universe(int d);
  IndexSet mask() const;  // all elements set

  bool operator==(const Universe&) const = default;
};

IndexSet index_set_of(const std::vector<int>& elements);
std::vector<int> elements_of(IndexSet s);
int least_element(IndexSet s);   // 1-based; s must be nonempty
int set_size(IndexSet s);

// A finite field of sets over a universe, represented by its atoms.
// The field's members are exactly the unions of atoms (plus the empty set).
// Atoms are pairwise disjoint, cover the universe, and are kept sorted by
// least element.
struct AtomPartition {
  Universe universe;
  std::vector<IndexSet> atoms;

  bool operator==(const AtomPartition&) const = default;
};

// Coarsest field containing every generator: atoms are the classes of
// "same membership pattern across all generators".
AtomPartition generate(const std::vector<IndexSet>& generators, Universe universe);

// Whether a is a union of atoms (the empty set counts).
bool contains(const AtomPartition& partition, IndexSet a);

// Refines every atom A into A & a and A \ a, dropping empty parts.
AtomPartition refine(const AtomPartition& partition, IndexSet a);

// For a not in the field, returns (u, v) from a single atom with u in a and
// v outside it, so no field member separates u from v. Deterministic: the
// first split atom in canonical order, then least u and least v.
// Throws std::invalid_argument when contains(partition, a) holds.
std::pair<int, int> find_unseparated_pair(const AtomPartition& partition, IndexSet a);

}  // namespace factorlab
