#include "factorlab/experiments.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

#include "factorlab/students.hpp"
#include "factorlab/teacher.hpp"

namespace factorlab {

namespace {

using nlohmann::json;

long pairs_of(int d) { return static_cast<long>(d) * (d - 1) / 2; }

std::string set_to_string(IndexSet s) {
  std::string out = "{";
  bool first = true;
  for (int e : elements_of(s)) {
    if (!first) out += ",";
    out += std::to_string(e);
    first = false;
  }
  return out + "}";
}

std::string partition_to_string(const AtomPartition& p) {
  std::string out;
  for (std::size_t i = 0; i < p.atoms.size(); ++i) {
    if (i) out += "|";
    out += set_to_string(p.atoms[i]);
  }
  return out;
}

// Shared pass/fail bookkeeping for exhaustive suites; only the first
// failure is narrated, the rest just counted.
struct Tally {
  long trials = 0;
  long successes = 0;
  std::optional<std::string> first_failure;

  void note(bool ok, const std::function<std::string()>& describe) {
    ++trials;
    if (ok) {
      ++successes;
      return;
    }
    if (!first_failure) first_failure = describe();
  }
};

}  // namespace

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r = Rational(BigInt(num), BigInt(den));
  r.canonicalize();
  return r;
}

nlohmann::json rational_to_json(const Rational& r) {
  json j;
  j["den"] = to_decimal(BigInt(r.get_den()));
  j["num"] = to_decimal(BigInt(r.get_num()));
  return j;
}

Rational rational_from_json(const nlohmann::json& j) {
  BigInt num = from_decimal(j.at("num").get<std::string>());
  BigInt den = from_decimal(j.at("den").get<std::string>());
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

nlohmann::json report_to_json(const ExperimentReport& r) {
  json j;
  j["bound"] = rational_to_json(r.bound);
  j["bound_satisfied"] = r.bound_satisfied;
  j["c"] = r.c;
  j["counterexample"] = r.counterexample ? json(*r.counterexample) : json(nullptr);
  j["d"] = r.d;
  j["description"] = r.description;
  j["duration_ms"] = r.duration_ms;
  j["empirical"] = rational_to_json(r.empirical);
  j["experiment"] = r.experiment;
  j["n"] = r.n;
  j["seed"] = r.seed;
  j["successes"] = r.successes;
  j["trials"] = r.trials;
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.experiment = j.at("experiment").get<std::string>();
  r.d = j.at("d").get<int>();
  r.c = j.at("c").get<int>();
  r.n = j.at("n").get<int>();
  r.description = j.at("description").get<std::string>();
  r.trials = j.at("trials").get<long>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.successes = j.at("successes").get<long>();
  r.empirical = rational_from_json(j.at("empirical"));
  r.bound = rational_from_json(j.at("bound"));
  r.bound_satisfied = j.at("bound_satisfied").get<bool>();
  const json& cex = j.at("counterexample");
  if (!cex.is_null()) r.counterexample = cex.get<std::string>();
  r.duration_ms = j.at("duration_ms").get<std::int64_t>();
  return r;
}

nlohmann::json report_fingerprint(const ExperimentReport& r) {
  json j = report_to_json(r);
  j.erase("duration_ms");
  return j;
}

void save_report(const ExperimentReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << report_to_json(r).dump(2) << '\n';
  if (!out.good()) throw std::runtime_error("failed writing " + path);
}

ExperimentReport load_report(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j = json::parse(in);  // parse errors carry the byte offset
  return report_from_json(j);
}

std::string csv_header() {
  return "experiment,d,c,n,trials,seed,successes,empirical,bound_num,bound_den,pass";
}

std::string report_to_csv_row(const ExperimentReport& r) {
  char emp[64];
  std::snprintf(emp, sizeof(emp), "%.10g", mpq_get_d(r.empirical.get_mpq_t()));
  std::ostringstream out;
  out << r.experiment << ',' << r.d << ',' << r.c << ',' << r.n << ',' << r.trials << ','
      << r.seed << ',' << r.successes << ',' << emp << ','
      << to_decimal(BigInt(r.bound.get_num())) << ',' << to_decimal(BigInt(r.bound.get_den()))
      << ',' << (r.bound_satisfied ? 1 : 0);
  return out.str();
}

StudentFamily omniscient_family(OmniscientPolicy policy) {
  return [policy](const BigInt& p, const BigInt& q, const std::vector<BigInt>& supplied) {
    // Hidden factors lead with the two secret primes, so the immediate
    // policy names one of them outright and the gcd screen catches it.
    std::vector<BigInt> hidden;
    hidden.reserve(supplied.size() + 2);
    hidden.push_back(p);
    hidden.push_back(q);
    hidden.insert(hidden.end(), supplied.begin(), supplied.end());
    return omniscient_student(std::move(hidden), policy);
  };
}

StudentFamily trivial_family() {
  return [](const BigInt&, const BigInt&, const std::vector<BigInt>&) {
    return trivial_student();
  };
}

StudentFamily family_by_name(const std::string& spec) {
  if (spec == "trivial") return trivial_family();
  if (spec == "omniscient" || spec == "omniscient:immediate")
    return omniscient_family(OmniscientPolicy::immediate);
  if (spec == "omniscient:halving") return omniscient_family(OmniscientPolicy::halving);
  throw std::invalid_argument("unknown student family: " + spec);
}

ExperimentReport estimate_reduction_success(const StudentFamily& family,
                                            const std::string& family_name, const PrimeSet& D,
                                            int d, int c, long trials, std::uint64_t seed) {
  if (d < 2) throw std::invalid_argument("need at least two base slots");
  if (c < 1) throw std::invalid_argument("round budget must be positive");
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (D.primes.size() < 2) throw std::invalid_argument("prime pool needs at least two members");

  const auto start = std::chrono::steady_clock::now();
  ExperimentReport r;
  r.experiment = "reduction-success";
  r.d = d;
  r.c = c;
  r.n = static_cast<int>(D.bit_length);
  r.description = family_name + " student family, factors drawn uniformly from the " +
                  std::to_string(D.bit_length) + "-bit primes with replacement";
  r.trials = trials;
  r.seed = seed;

  for (long trial = 0; trial < trials; ++trial) {
    Rng rng = make_trial_rng(seed, static_cast<std::uint64_t>(trial));
    BigInt p = sample_from(D, rng);
    BigInt q = sample_from(D, rng);
    std::vector<BigInt> supplied;
    supplied.reserve(static_cast<std::size_t>(d) - 2);
    for (int i = 0; i < d - 2; ++i) supplied.push_back(sample_from(D, rng));

    BlindInstance instance{p * q, supplied, c};
    std::optional<BigInt> factor = blind_simulate(instance, family(p, q, supplied));
    if (!factor) continue;
    const bool sound = *factor > 1 && *factor < instance.pq && instance.pq % *factor == 0;
    if (sound) {
      ++r.successes;
    } else if (!r.counterexample) {
      r.counterexample = "trial " + std::to_string(trial) + ": returned " + to_decimal(*factor) +
                         " for pq=" + to_decimal(instance.pq);
    }
  }

  r.empirical = Rational(BigInt(r.successes), BigInt(r.trials));
  r.empirical.canonicalize();
  r.bound = make_rational(1, 4 * pairs_of(d));
  const double b = mpq_get_d(r.bound.get_mpq_t());
  const double sigma = std::sqrt(b * (1.0 - b) / static_cast<double>(trials));
  r.bound_satisfied =
      mpq_get_d(r.empirical.get_mpq_t()) >= b - 3.0 * sigma && !r.counterexample;
  r.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return r;
}

PairFamily least_pair_family() {
  return [](const std::vector<int>& subset) {
    return std::vector<std::pair<int, int>>{{subset[0], subset[1]}};
  };
}

PairFamily all_pairs_family() {
  return [](const std::vector<int>& subset) {
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < subset.size(); ++i)
      for (std::size_t j = i + 1; j < subset.size(); ++j)
        pairs.emplace_back(subset[i], subset[j]);
    return pairs;
  };
}

PairFamily random_pair_family(std::uint64_t seed) {
  return [seed](const std::vector<int>& subset) {
    // Deterministic in (seed, subset): the same subset always gets the
    // same nonempty pair selection.
    std::vector<std::uint32_t> words;
    words.push_back(static_cast<std::uint32_t>(seed));
    words.push_back(static_cast<std::uint32_t>(seed >> 32));
    for (int e : subset) words.push_back(static_cast<std::uint32_t>(e));
    std::seed_seq seq(words.begin(), words.end());
    Rng rng(seq);

    std::vector<std::pair<int, int>> all;
    for (std::size_t i = 0; i < subset.size(); ++i)
      for (std::size_t j = i + 1; j < subset.size(); ++j)
        all.emplace_back(subset[i], subset[j]);
    const std::uint64_t mask = 1 + uniform_index(rng, (std::uint64_t{1} << all.size()) - 1);
    std::vector<std::pair<int, int>> chosen;
    for (std::size_t i = 0; i < all.size(); ++i)
      if (mask >> i & 1) chosen.push_back(all[i]);
    return chosen;
  };
}

namespace {

// Calls the family once and enforces its contract: a nonempty, duplicate
// free list of pairs drawn from the subset, reported with a < b.
std::vector<std::pair<int, int>> validated_pairs(const PairFamily& family,
                                                 const std::vector<int>& subset) {
  std::vector<std::pair<int, int>> pairs = family(subset);
  if (pairs.empty()) throw std::invalid_argument("pair family returned no pairs");
  for (auto& [a, b] : pairs) {
    if (a > b) std::swap(a, b);
    if (a == b || !std::binary_search(subset.begin(), subset.end(), a) ||
        !std::binary_search(subset.begin(), subset.end(), b))
      throw std::invalid_argument("pair family returned a pair outside its subset");
  }
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw std::invalid_argument("pair family returned a duplicate pair");
  return pairs;
}

void check_pair_sampling_args(int omega_size, int d) {
  if (d < 2) throw std::invalid_argument("need tuples of at least two draws");
  if (omega_size < d) throw std::invalid_argument("no distinct tuples: universe smaller than d");
}

}  // namespace

PairSamplingResult verify_pair_sampling(int omega_size, int d, const PairFamily& family) {
  check_pair_sampling_args(omega_size, d);
  double tuples = std::pow(static_cast<double>(omega_size), d);
  if (tuples > 1e7) throw std::invalid_argument("enumeration too large (over 10^7 tuples)");

  std::map<std::vector<int>, std::vector<std::pair<int, int>>> cache;
  long distinct = 0;
  long hits = 0;
  std::vector<int> tuple(static_cast<std::size_t>(d), 1);
  std::vector<char> seen(static_cast<std::size_t>(omega_size) + 1, 0);
  for (;;) {
    bool all_distinct = true;
    for (int v : tuple) {
      if (seen[static_cast<std::size_t>(v)]) all_distinct = false;
      seen[static_cast<std::size_t>(v)] = 1;
    }
    for (int v : tuple) seen[static_cast<std::size_t>(v)] = 0;

    if (all_distinct) {
      ++distinct;
      std::vector<int> subset = tuple;
      std::sort(subset.begin(), subset.end());
      auto it = cache.find(subset);
      if (it == cache.end()) it = cache.emplace(subset, validated_pairs(family, subset)).first;
      std::pair<int, int> drawn{std::min(tuple[0], tuple[1]), std::max(tuple[0], tuple[1])};
      if (std::binary_search(it->second.begin(), it->second.end(), drawn)) ++hits;
    }

    int pos = d - 1;
    while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == omega_size) {
      tuple[static_cast<std::size_t>(pos)] = 1;
      --pos;
    }
    if (pos < 0) break;
    ++tuple[static_cast<std::size_t>(pos)];
  }

  PairSamplingResult result;
  result.probability = Rational(BigInt(hits), BigInt(distinct));
  result.probability.canonicalize();
  result.bound = make_rational(1, pairs_of(d));
  result.satisfied = result.probability >= result.bound;
  return result;
}

Rational pair_sampling_oracle(int omega_size, int d, const PairFamily& family) {
  check_pair_sampling_args(omega_size, d);

  // Ordered distinct tuples hitting a given unordered pair {a, b} as the
  // first two draws: 2 orders for the pair, (d-2)! arrangements of the
  // rest. Summing |F(T)| over d-subsets T counts them all.
  BigInt per_pair;
  mpz_fac_ui(per_pair.get_mpz_t(), static_cast<unsigned long>(d - 2));
  per_pair *= 2;

  BigInt hits = 0;
  std::vector<int> subset(static_cast<std::size_t>(d), 0);
  std::function<void(int, int)> walk = [&](int next, int depth) {
    if (depth == d) {
      hits += per_pair * static_cast<long>(validated_pairs(family, subset).size());
      return;
    }
    for (int v = next; v <= omega_size - (d - depth - 1); ++v) {
      subset[static_cast<std::size_t>(depth)] = v;
      walk(v + 1, depth + 1);
    }
  };
  walk(1, 0);

  BigInt total;
  mpz_bin_uiui(total.get_mpz_t(), static_cast<unsigned long>(omega_size),
               static_cast<unsigned long>(d));
  BigInt dfac;
  mpz_fac_ui(dfac.get_mpz_t(), static_cast<unsigned long>(d));
  total *= dfac;

  Rational r(hits, total);
  r.canonicalize();
  return r;
}

DistinctnessResult verify_distinctness_bound(long D_size, int d) {
  if (d < 2) throw std::invalid_argument("need at least two draws");
  if (D_size < d) throw std::invalid_argument("pool smaller than the number of draws");

  DistinctnessResult result;
  result.product = 1;
  for (int i = 1; i < d; ++i) {
    result.product *= make_rational(D_size - i, D_size);
  }
  result.applicable = D_size >= 4 * pairs_of(d);
  result.meets_half = result.product >= make_rational(1, 2);
  return result;
}

namespace {

void for_each_partition(int n, const std::function<void(const AtomPartition&)>& fn) {
  // Restricted growth strings: element i+1 goes to block rgs[i], with
  // rgs[i] at most one past the largest block used so far.
  std::vector<int> rgs(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> build = [&](int i, int max_block) {
    if (i == n) {
      std::vector<IndexSet> blocks(static_cast<std::size_t>(max_block) + 1, 0);
      for (int e = 0; e < n; ++e)
        blocks[static_cast<std::size_t>(rgs[static_cast<std::size_t>(e)])] |= IndexSet{1} << e;
      fn(generate(blocks, Universe(n)));
      return;
    }
    for (int b = 0; b <= max_block + 1; ++b) {
      rgs[static_cast<std::size_t>(i)] = b;
      build(i + 1, std::max(max_block, b));
    }
  };
  build(1, 0);
}

const BigInt kSmallPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};

FactorBase first_primes_base(int d) {
  std::vector<BigInt> primes(kSmallPrimes, kSmallPrimes + d);
  return FactorBase::from_primes(std::move(primes));
}

void check_refinement_growth(int n, Tally& tally) {
  for_each_partition(n, [&](const AtomPartition& p) {
    for (IndexSet atom : p.atoms) {
      if (set_size(atom) < 2) continue;
      for (IndexSet cut = (atom - 1) & atom; cut; cut = (cut - 1) & atom) {
        // Cutting along a subset of one atom must replace exactly that
        // atom by the two parts and touch nothing else.
        AtomPartition actual = refine(p, cut);
        std::vector<IndexSet> expected;
        for (IndexSet other : p.atoms)
          if (other != atom) expected.push_back(other);
        expected.push_back(cut);
        expected.push_back(atom & ~cut);
        std::sort(expected.begin(), expected.end(),
                  [](IndexSet a, IndexSet b) { return std::countr_zero(a) < std::countr_zero(b); });
        tally.note(actual.atoms == expected, [&] {
          return "refinement mismatch: n=" + std::to_string(n) + " partition " +
                 partition_to_string(p) + " cut " + set_to_string(cut);
        });
      }
    }
  });
}

void check_unseparated_pairs(int n, Tally& tally) {
  for_each_partition(n, [&](const AtomPartition& p) {
    const IndexSet full = p.universe.mask();
    for (IndexSet a = 1; a <= full; ++a) {
      if (contains(p, a)) {
        bool threw = false;
        try {
          (void)find_unseparated_pair(p, a);
        } catch (const std::invalid_argument&) {
          threw = true;
        }
        tally.note(threw, [&] {
          return "no rejection for field member " + set_to_string(a) + " of " +
                 partition_to_string(p);
        });
        continue;
      }
      auto [u, v] = find_unseparated_pair(p, a);
      const IndexSet uv = (IndexSet{1} << (u - 1)) | (IndexSet{1} << (v - 1));
      bool ok = u >= 1 && v >= 1 && u <= n && v <= n && u != v && set_size(a & uv) == 1;
      // Every field member is a union of atoms; none may isolate u from v.
      const std::size_t atom_count = p.atoms.size();
      for (IndexSet pick = 0; ok && pick < (IndexSet{1} << atom_count); ++pick) {
        IndexSet member = 0;
        for (std::size_t i = 0; i < atom_count; ++i)
          if (pick >> i & 1) member |= p.atoms[i];
        if (set_size(member & uv) == 1) ok = false;
      }
      tally.note(ok, [&] {
        return "separated witness (" + std::to_string(u) + "," + std::to_string(v) +
               ") for a=" + set_to_string(a) + " over " + partition_to_string(p);
      });
    }
  });
}

void check_sequential_floors(int c, Tally& tally) {
  const int d = 1 << c;
  const FactorBase base = first_primes_base(d);
  const Student students[] = {trivial_student(), obvious_student()};
  for (const Student& student : students) {
    Transcript t = run_protocol(student, make_teacher(base), c, base.x);
    tally.note(!wins(t), [&] {
      return student.name + " won the sequential " + std::to_string(c) + "-round game";
    });
    tally.note(check_correcting(t), [&] {
      return "teacher reply failed the correcting check against " + student.name;
    });
    std::vector<ObviousState> states = obvious_states_through(base, t);
    for (std::size_t i = 0; i < states.size(); ++i) {
      const int floor_size = 1 << (c - static_cast<int>(i));
      for (IndexSet atom : states[i].partition.atoms) {
        tally.note(set_size(atom) >= floor_size, [&] {
          return "atom " + set_to_string(atom) + " below floor " + std::to_string(floor_size) +
                 " entering round " + std::to_string(i + 1) + " against " + student.name;
        });
      }
    }
  }
}

void check_parallel_halving(int e, Tally& tally) {
  const int d = 1 << e;
  const FactorBase base = first_primes_base(d);
  Transcript t = run_protocol(parallel_obvious_student(d), make_parallel_teacher(base), e, base.x);
  tally.note(!wins(t), [&] {
    return "derivable-only parallel student won the " + std::to_string(e) + "-round game";
  });
  tally.note(check_correcting(t), [&] {
    return "parallel teacher reply failed the correcting check at e=" + std::to_string(e);
  });
  std::vector<ObviousState> states = obvious_states_through(base, t);
  for (std::size_t i = 0; i < states.size(); ++i) {
    // Entering round i+1 the field is split into 2^i equal atoms.
    const std::size_t want_count = std::size_t{1} << i;
    const int want_size = 1 << (e - static_cast<int>(i));
    bool ok = states[i].partition.atoms.size() == want_count;
    for (IndexSet atom : states[i].partition.atoms)
      if (set_size(atom) != want_size) ok = false;
    tally.note(ok, [&] {
      return "parallel split entering round " + std::to_string(i + 1) + " at e=" +
             std::to_string(e) + " is " + partition_to_string(states[i].partition);
    });
  }
}

}  // namespace

ExperimentReport run_lemma_suite(int max_universe) {
  if (max_universe < 1 || max_universe > 8)
    throw std::invalid_argument("universe cap must be between 1 and 8");

  const auto start = std::chrono::steady_clock::now();
  Tally tally;
  for (int n = 1; n <= max_universe; ++n) {
    check_refinement_growth(n, tally);
    check_unseparated_pairs(n, tally);
  }
  for (int c = 1; (1 << c) <= max_universe; ++c) {
    check_sequential_floors(c, tally);
    check_parallel_halving(c, tally);
  }

  ExperimentReport r;
  r.experiment = "lemma-suite";
  r.n = max_universe;
  r.description =
      "exhaustive refinement growth, unseparated pairs, and derivable-only "
      "game floors over universes up to the cap";
  r.trials = tally.trials;
  r.successes = tally.successes;
  r.empirical = Rational(BigInt(tally.successes), BigInt(tally.trials));
  r.empirical.canonicalize();
  r.bound = 1;
  r.bound_satisfied = tally.successes == tally.trials;
  r.counterexample = tally.first_failure;
  r.duration_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return r;
}

}  // namespace factorlab
