#include "factorlab/students.hpp"

#include <algorithm>
#include <stdexcept>

namespace factorlab {

DivisorLattice::DivisorLattice(BigInt x) : x_(std::move(x)) {
  if (x_ < 2) throw std::invalid_argument("lattice root must be at least 2");
  atoms_.push_back(x_);
}

void DivisorLattice::absorb(const BigInt& v) {
  if (v < 2) return;
  std::vector<BigInt> next;
  next.reserve(atoms_.size() + 1);
  for (const BigInt& a : atoms_) {
    BigInt g = gcd(a, v);
    if (g == 1 || g == a) {
      next.push_back(a);
      continue;
    }
    next.push_back(g);
    next.push_back(a / g);
  }
  std::sort(next.begin(), next.end());
  atoms_ = std::move(next);
}

void DivisorLattice::absorb(const Answer& a) {
  for (const BigInt& v : a.values) absorb(v);
}

bool DivisorLattice::is_obvious(const BigInt& v) const {
  if (v == 1) return true;
  if (v < 1 || !mpz_divisible_p(x_.get_mpz_t(), v.get_mpz_t())) return false;
  for (const BigInt& a : atoms_) {
    BigInt g = gcd(a, v);
    if (g != 1 && g != a) return false;
  }
  return true;
}

bool DivisorLattice::is_atom(const BigInt& v) const {
  return std::find(atoms_.begin(), atoms_.end(), v) != atoms_.end();
}

AtomSelector least_atom_selector() {
  return [](const std::vector<BigInt>&) -> std::size_t { return 0; };
}

Student trivial_student() {
  return Student{"trivial", 1, [](const BigInt& x, const std::vector<Answer>&) {
                   return Answer::scalar(x);
                 }};
}

namespace {

// Replays the replies into a fresh lattice; students own no state across
// calls. The answers that provoked the replies were atoms, so absorbing
// them would be a no-op; only replies can split anything.
DivisorLattice lattice_after(const BigInt& x, const std::vector<Answer>& replies) {
  DivisorLattice lattice(x);
  for (const Answer& z : replies) lattice.absorb(z);
  return lattice;
}

}  // namespace

Student obvious_student(AtomSelector selector) {
  return Student{"obvious", 1,
                 [selector](const BigInt& x, const std::vector<Answer>& replies) {
                   DivisorLattice lattice = lattice_after(x, replies);
                   const auto& atoms = lattice.atoms();
                   std::size_t pick = selector(atoms);
                   if (pick >= atoms.size()) throw std::out_of_range("selector out of range");
                   return Answer::scalar(atoms[pick]);
                 }};
}

namespace {

BigInt halving_answer(const std::vector<BigInt>& hidden, int round) {
  std::vector<BigInt> candidates = hidden;
  for (int r = 1;; ++r) {
    if (candidates.size() == 1) return candidates[0];
    const std::size_t keep = candidates.size() / 2;
    candidates.resize(keep);
    if (r == round) {
      BigInt v = 1;
      for (const BigInt& p : candidates) v *= p;
      return v;
    }
  }
}

}  // namespace

Student omniscient_student(std::vector<BigInt> hidden_factors, OmniscientPolicy policy) {
  if (hidden_factors.empty()) throw std::invalid_argument("omniscient student needs factors");
  const char* name = policy == OmniscientPolicy::immediate ? "omniscient:immediate"
                                                           : "omniscient:halving";
  return Student{name, 1,
                 [hidden = std::move(hidden_factors), policy](const BigInt&,
                                                              const std::vector<Answer>& replies) {
                   const int round = static_cast<int>(replies.size()) + 1;
                   if (policy == OmniscientPolicy::immediate)
                     return Answer::scalar(hidden[0]);
                   return Answer::scalar(halving_answer(hidden, round));
                 }};
}

Student omniscient_student(const FactorBase& hidden, OmniscientPolicy policy) {
  return omniscient_student(hidden.primes, policy);
}

Student trial_division_student(unsigned long budget) {
  return Student{"trialdiv", 1,
                 [budget](const BigInt& x, const std::vector<Answer>&) {
                   for (unsigned long t = 2; t <= budget; ++t) {
                     if (mpz_divisible_ui_p(x.get_mpz_t(), t)) return Answer::scalar(BigInt(t));
                   }
                   return Answer::scalar(x);
                 }};
}

namespace {

std::vector<BigInt> padded_atoms(const DivisorLattice& lattice, int width) {
  std::vector<BigInt> out = lattice.atoms();
  if (static_cast<int>(out.size()) > width) out.resize(width);
  while (static_cast<int>(out.size()) < width) out.push_back(out.back());
  return out;
}

}  // namespace

Student parallel_obvious_student(int width) {
  if (width < 1) throw std::invalid_argument("width must be positive");
  return Student{"parallel-obvious", width,
                 [width](const BigInt& x, const std::vector<Answer>& replies) {
                   DivisorLattice lattice(x);
                   for (const Answer& z : replies) lattice.absorb(z);
                   return Answer::sequence(padded_atoms(lattice, width));
                 }};
}

Student parallel_with_omniscient_coordinate(int width, std::vector<BigInt> hidden_factors,
                                            OmniscientPolicy policy) {
  if (width < 2) throw std::invalid_argument("mixed parallel student needs width >= 2");
  Student inner = omniscient_student(std::move(hidden_factors), policy);
  return Student{"parallel-omniscient", width,
                 [width, inner](const BigInt& x, const std::vector<Answer>& replies) {
                   DivisorLattice lattice(x);
                   for (const Answer& z : replies) lattice.absorb(z);
                   std::vector<BigInt> vs = padded_atoms(lattice, width - 1);
                   vs.insert(vs.begin(), inner.answer(x, replies).single());
                   return Answer::sequence(std::move(vs));
                 }};
}

namespace {

std::pair<std::string, std::string> split_spec(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos) return {spec, ""};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

OmniscientPolicy parse_policy(const std::string& params) {
  if (params.empty() || params == "immediate") return OmniscientPolicy::immediate;
  if (params == "halving") return OmniscientPolicy::halving;
  throw std::invalid_argument("unknown omniscient policy: " + params);
}

}  // namespace

Student make_student(const std::string& spec, const StudentSpecContext& ctx) {
  auto [name, params] = split_spec(spec);
  if (name == "trivial") return trivial_student();
  if (name == "obvious") {
    if (!params.empty() && params != "least")
      throw std::invalid_argument("unknown obvious selector: " + params);
    return obvious_student();
  }
  if (name == "omniscient") {
    if (!ctx.hidden) throw std::invalid_argument("omniscient student needs a known base");
    return omniscient_student(*ctx.hidden, parse_policy(params));
  }
  if (name == "trialdiv") {
    unsigned long budget = 1000;
    if (!params.empty()) budget = std::stoul(params);
    return trial_division_student(budget);
  }
  if (name == "parallel-obvious") {
    if (!params.empty()) throw std::invalid_argument("parallel-obvious takes no parameters");
    return parallel_obvious_student(ctx.width);
  }
  if (name == "parallel-omniscient") {
    if (!ctx.hidden) throw std::invalid_argument("parallel-omniscient student needs a known base");
    return parallel_with_omniscient_coordinate(ctx.width, ctx.hidden->primes, parse_policy(params));
  }
  throw std::invalid_argument("unknown student: " + name);
}

}  // namespace factorlab
