#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorlab/reduction.hpp"

namespace factorlab {

using Rational = mpq_class;

Rational make_rational(long num, long den);
nlohmann::json rational_to_json(const Rational& r);
Rational rational_from_json(const nlohmann::json& j);

// Uniform result record for every suite; rationals stay exact end to end.
struct ExperimentReport {
  std::string experiment;
  int d = 0;
  int c = 0;
  int n = 0;  // bit length or universe cap, suite-dependent
  std::string description;
  long trials = 0;
  std::uint64_t seed = 0;
  long successes = 0;
  Rational empirical = 0;
  Rational bound = 0;
  bool bound_satisfied = false;
  std::optional<std::string> counterexample;
  std::int64_t duration_ms = 0;
};

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
// Identity of a run for reproducibility comparisons: everything but the
// wall clock.
nlohmann::json report_fingerprint(const ExperimentReport& r);

void save_report(const ExperimentReport& r, const std::string& path);
// Propagates the parser's byte-offset diagnostics on malformed files.
ExperimentReport load_report(const std::string& path);

std::string csv_header();
std::string report_to_csv_row(const ExperimentReport& r);

// Builds the per-trial student from the factors the trial drew. The
// simulation itself never sees p and q, only their product.
using StudentFamily =
    std::function<Student(const BigInt& p, const BigInt& q, const std::vector<BigInt>& supplied)>;

StudentFamily omniscient_family(OmniscientPolicy policy);
StudentFamily trivial_family();
StudentFamily family_by_name(const std::string& spec);  // CLI-facing

// Monte Carlo estimate of the blinded reduction's success rate against
// 1/(4*C(d,2)): each trial draws p, q and d-2 supplied primes uniformly
// (with replacement) from D using its own (seed, trial) stream, runs
// blind_simulate, and counts sound returned factors. The bound check
// allows three binomial standard deviations below the bound.
ExperimentReport estimate_reduction_success(const StudentFamily& family,
                                            const std::string& family_name, const PrimeSet& D,
                                            int d, int c, long trials, std::uint64_t seed);

// Maps a d-element subset (ascending) to the pairs a winning student
// could tell apart; must return at least one pair of subset elements.
using PairFamily =
    std::function<std::vector<std::pair<int, int>>(const std::vector<int>& subset)>;

PairFamily least_pair_family();
PairFamily all_pairs_family();
// Deterministic arbitrary family: each subset gets a nonempty pair set
// carved out of the given stream.
PairFamily random_pair_family(std::uint64_t seed);

struct PairSamplingResult {
  Rational probability;  // Pr[{x1,x2} in F | all distinct]
  Rational bound;        // 1/C(d,2)
  bool satisfied = false;
};

// Exact enumeration of all omega^d tuples; refuses more than 10^7.
PairSamplingResult verify_pair_sampling(int omega_size, int d, const PairFamily& family);
// Independent check: counts by subset symmetry instead of enumeration.
Rational pair_sampling_oracle(int omega_size, int d, const PairFamily& family);

struct DistinctnessResult {
  Rational product;  // prod_{i<d} (1 - i/D_size)
  bool applicable = false;  // D_size >= 4*C(d,2)
  bool meets_half = false;
};

DistinctnessResult verify_distinctness_bound(long D_size, int d);

// Exhaustive re-checks of the structure lemmas: refinement growth and
// unseparated pairs over every partition of universes up to max_universe
// (at most 8), plus the never-winning runs of the derivable-only students
// with their atom-size floors, sequential and parallel.
ExperimentReport run_lemma_suite(int max_universe);

}  // namespace factorlab
