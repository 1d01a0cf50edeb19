#include "factorlab/setfield.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace factorlab {

Universe::Universe(int d) : size(d) {
  if (d < 1 || d > 64) throw std::invalid_argument("universe size must be in [1, 64]");
}

IndexSet Universe::mask() const {
  return size == 64 ? ~IndexSet{0} : (IndexSet{1} << size) - 1;
}

IndexSet index_set_of(const std::vector<int>& elements) {
  IndexSet s = 0;
  for (int e : elements) {
    if (e < 1 || e > 64) throw std::invalid_argument("element out of range");
    s |= IndexSet{1} << (e - 1);
  }
  return s;
}

std::vector<int> elements_of(IndexSet s) {
  std::vector<int> out;
  while (s) {
    out.push_back(std::countr_zero(s) + 1);
    s &= s - 1;
  }
  return out;
}

int least_element(IndexSet s) {
  if (!s) throw std::invalid_argument("least_element of empty set");
  return std::countr_zero(s) + 1;
}

int set_size(IndexSet s) { return std::popcount(s); }

namespace {

void canonicalize(std::vector<IndexSet>& atoms) {
  std::sort(atoms.begin(), atoms.end(),
            [](IndexSet a, IndexSet b) { return std::countr_zero(a) < std::countr_zero(b); });
}

}  // namespace

AtomPartition generate(const std::vector<IndexSet>& generators, Universe universe) {
  const IndexSet full = universe.mask();
  for (IndexSet g : generators) {
    if (g & ~full) throw std::invalid_argument("generator not within universe");
  }
  AtomPartition p{universe, {full}};
  for (IndexSet g : generators) p = refine(p, g);
  return p;
}

bool contains(const AtomPartition& partition, IndexSet a) {
  if (a & ~partition.universe.mask()) return false;
  for (IndexSet atom : partition.atoms) {
    IndexSet hit = atom & a;
    if (hit != 0 && hit != atom) return false;
  }
  return true;
}

AtomPartition refine(const AtomPartition& partition, IndexSet a) {
  AtomPartition out{partition.universe, {}};
  out.atoms.reserve(partition.atoms.size() + 1);
  for (IndexSet atom : partition.atoms) {
    IndexSet in = atom & a;
    IndexSet rest = atom & ~a;
    if (in) out.atoms.push_back(in);
    if (rest) out.atoms.push_back(rest);
  }
  canonicalize(out.atoms);
  return out;
}

std::pair<int, int> find_unseparated_pair(const AtomPartition& partition, IndexSet a) {
  if (contains(partition, a))
    throw std::invalid_argument("set already lies in the field; no unseparated pair");
  for (IndexSet atom : partition.atoms) {
    IndexSet in = atom & a;
    if (in == 0 || in == atom) continue;
    return {least_element(in), least_element(atom & ~a)};
  }
  throw std::logic_error("unreachable: non-member must split some atom");
}

}  // namespace factorlab
