#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include "factorlab/experiments.hpp"

using namespace factorlab;

namespace {

ExperimentReport sample_report() {
  ExperimentReport r;
  r.experiment = "reduction";
  r.d = 4;
  r.c = 2;
  r.n = 8;
  r.description = "omniscient:immediate over 8-bit primes";
  r.trials = 100;
  r.seed = 7;
  r.successes = 90;
  r.empirical = make_rational(9, 10);
  r.bound = make_rational(1, 24);
  r.bound_satisfied = true;
  r.duration_ms = 1234;
  return r;
}

struct TempFile {
  std::string path;
  explicit TempFile(std::string p) : path(std::move(p)) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("rationals: canonical form and exact JSON round trip") {
  Rational r = make_rational(2, 4);
  CHECK(r == make_rational(1, 2));
  CHECK(rational_to_json(r)["num"] == "1");
  CHECK(rational_to_json(r)["den"] == "2");
  CHECK_THROWS(make_rational(1, 0));

  Rational tiny = make_rational(1, 24);
  CHECK(rational_from_json(rational_to_json(tiny)) == tiny);
  Rational negative = make_rational(-3, 9);
  CHECK(rational_from_json(rational_to_json(negative)) == make_rational(-1, 3));
}

TEST_CASE("report JSON: bit-exact round trip") {
  ExperimentReport r = sample_report();
  nlohmann::json j = report_to_json(r);
  ExperimentReport back = report_from_json(j);
  CHECK(report_to_json(back).dump() == j.dump());
  CHECK(back.empirical == r.empirical);
  CHECK(back.bound == make_rational(1, 24));
  CHECK(back.duration_ms == 1234);
  CHECK_FALSE(back.counterexample.has_value());

  r.counterexample = "trial 17: returned 6 for pq = 35";
  nlohmann::json jc = report_to_json(r);
  CHECK(report_from_json(jc).counterexample == r.counterexample);
  CHECK(report_to_json(report_from_json(jc)).dump() == jc.dump());
}

TEST_CASE("report fingerprint drops only the wall clock") {
  ExperimentReport r = sample_report();
  nlohmann::json full = report_to_json(r);
  nlohmann::json print = report_fingerprint(r);
  CHECK(full.contains("duration_ms"));
  CHECK_FALSE(print.contains("duration_ms"));
  full.erase("duration_ms");
  CHECK(full.dump() == print.dump());

  ExperimentReport slower = sample_report();
  slower.duration_ms = 999999;
  CHECK(report_fingerprint(slower).dump() == print.dump());
}

TEST_CASE("reports survive the filesystem") {
  TempFile file("test_experiments_report.json");
  ExperimentReport r = sample_report();
  save_report(r, file.path);
  ExperimentReport back = load_report(file.path);
  CHECK(report_to_json(back).dump() == report_to_json(r).dump());

  SUBCASE("truncated files fail with a byte offset") {
    std::ofstream out(file.path, std::ios::trunc);
    out << "{\"experiment\": \"redu";
    out.close();
    try {
      load_report(file.path);
      FAIL("expected a parse error");
    } catch (const nlohmann::json::parse_error& e) {
      CHECK(e.byte > 0);
    }
  }

  SUBCASE("missing files are reported by name") {
    CHECK_THROWS_WITH_AS(load_report("no_such_dir/report.json"),
                         doctest::Contains("no_such_dir"), std::runtime_error);
  }
}

TEST_CASE("CSV projection") {
  CHECK(csv_header() ==
        "experiment,d,c,n,trials,seed,successes,empirical,bound_num,bound_den,pass");
  std::string row = report_to_csv_row(sample_report());
  CHECK(row == "reduction,4,2,8,100,7,90,0.9,1,24,1");
}

TEST_CASE("family_by_name dispatch") {
  BigInt p = 5, q = 7;
  std::vector<BigInt> supplied = {2, 3};
  CHECK(family_by_name("trivial")(p, q, supplied).name == "trivial");
  CHECK(family_by_name("omniscient")(p, q, supplied).name == "omniscient:immediate");
  CHECK(family_by_name("omniscient:immediate")(p, q, supplied).name == "omniscient:immediate");
  CHECK(family_by_name("omniscient:halving")(p, q, supplied).name == "omniscient:halving");
  CHECK_THROWS_AS(family_by_name("psychic"), std::invalid_argument);
}

TEST_CASE("the omniscient family names a hidden factor first") {
  StudentFamily family = omniscient_family(OmniscientPolicy::immediate);
  Student s = family(5, 7, {2, 3});
  Answer y = s.answer(210, {});
  CHECK(y.single() == 5);
}

TEST_CASE("reduction estimate: determinism and bound checking") {
  PrimeSet d8 = primes_of_bitlength(8);
  StudentFamily family = omniscient_family(OmniscientPolicy::immediate);

  ExperimentReport a = estimate_reduction_success(family, "omniscient:immediate", d8, 4, 2,
                                                  300, 20260819);
  ExperimentReport b = estimate_reduction_success(family, "omniscient:immediate", d8, 4, 2,
                                                  300, 20260819);
  CHECK(report_fingerprint(a).dump() == report_fingerprint(b).dump());
  CHECK(a.trials == 300);
  CHECK(a.bound == make_rational(1, 24));
  CHECK(a.bound_satisfied);
  CHECK_FALSE(a.counterexample.has_value());
  CHECK(a.empirical == make_rational(a.successes, a.trials));

  SUBCASE("a different seed reshuffles the trials") {
    ExperimentReport c = estimate_reduction_success(family, "omniscient:immediate", d8, 4, 2,
                                                    300, 1);
    CHECK(report_fingerprint(c).dump() != report_fingerprint(a).dump());
  }
}

TEST_CASE("reduction estimate: the trivial family only wins by accident") {
  // Trivial students never pass the gcd screen; the only successes are
  // step-2 collisions (a supplied prime equal to p or q).
  PrimeSet d8 = primes_of_bitlength(8);
  ExperimentReport r =
      estimate_reduction_success(trivial_family(), "trivial", d8, 4, 2, 200, 99);
  CHECK_FALSE(r.counterexample.has_value());
  CHECK(r.successes < 70);  // collisions hit roughly a sixth of the trials
}

TEST_CASE("reduction estimate: tiny prime pools succeed by divisibility") {
  PrimeSet tiny = primes_of_bitlength(2);  // {2, 3}
  StudentFamily family = omniscient_family(OmniscientPolicy::immediate);
  ExperimentReport r = estimate_reduction_success(family, "omniscient:immediate", tiny, 4, 2,
                                                  300, 5);
  CHECK(r.bound_satisfied);
  CHECK_FALSE(r.counterexample.has_value());
}

TEST_CASE("reduction estimate validates its inputs") {
  PrimeSet d8 = primes_of_bitlength(8);
  StudentFamily family = trivial_family();
  PrimeSet single;
  single.primes = {BigInt(5)};
  CHECK_THROWS_AS(estimate_reduction_success(family, "trivial", single, 4, 2, 10, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_reduction_success(family, "trivial", d8, 4, 2, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(estimate_reduction_success(family, "trivial", d8, 1, 2, 10, 1),
                  std::invalid_argument);
}

TEST_CASE("pair sampling: frozen probabilities") {
  CHECK(verify_pair_sampling(4, 2, least_pair_family()).probability == make_rational(1, 1));
  PairSamplingResult r = verify_pair_sampling(5, 3, least_pair_family());
  CHECK(r.probability == make_rational(1, 3));
  CHECK(r.bound == make_rational(1, 3));
  CHECK(r.satisfied);
  CHECK(verify_pair_sampling(5, 3, all_pairs_family()).probability == make_rational(1, 1));
}

TEST_CASE("pair sampling agrees with the subset-counting oracle") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull}) {
    for (int omega = 3; omega <= 5; ++omega) {
      for (int d = 2; d <= (omega < 4 ? 3 : 4); ++d) {
        PairFamily family = random_pair_family(seed);
        PairSamplingResult enumerated = verify_pair_sampling(omega, d, family);
        CHECK(enumerated.probability == pair_sampling_oracle(omega, d, family));
        CHECK(enumerated.satisfied);
      }
    }
  }
  CHECK(pair_sampling_oracle(5, 3, least_pair_family()) == make_rational(1, 3));
}

TEST_CASE("pair sampling contract enforcement") {
  CHECK_THROWS_AS(verify_pair_sampling(3, 4, least_pair_family()), std::invalid_argument);
  CHECK_THROWS_AS(verify_pair_sampling(1, 1, least_pair_family()), std::invalid_argument);
  CHECK_THROWS_AS(verify_pair_sampling(100, 4, least_pair_family()), std::invalid_argument);

  PairFamily empty = [](const std::vector<int>&) {
    return std::vector<std::pair<int, int>>{};
  };
  CHECK_THROWS_AS(verify_pair_sampling(4, 2, empty), std::invalid_argument);

  PairFamily alien = [](const std::vector<int>&) {
    return std::vector<std::pair<int, int>>{{98, 99}};
  };
  CHECK_THROWS_AS(verify_pair_sampling(4, 2, alien), std::invalid_argument);
}

TEST_CASE("distinctness bound: exact products") {
  DistinctnessResult r = verify_distinctness_bound(24, 4);
  CHECK(r.product == make_rational(24 * 23 * 22 * 21, 24 * 24 * 24 * 24));
  CHECK(r.product == make_rational(1771, 2304));
  CHECK(r.applicable);
  CHECK(r.meets_half);

  SUBCASE("vacuous below the threshold") {
    DistinctnessResult v = verify_distinctness_bound(2, 2);
    CHECK(v.product == make_rational(1, 2));
    CHECK_FALSE(v.applicable);  // 2 < 4*C(2,2)
    CHECK(v.meets_half);        // implication with a false antecedent
  }

  SUBCASE("large pools barely lose any mass") {
    DistinctnessResult big = verify_distinctness_bound(1000, 4);
    CHECK(big.product > make_rational(99, 100));
    CHECK(big.meets_half);
  }

  CHECK_THROWS_AS(verify_distinctness_bound(3, 4), std::invalid_argument);
  CHECK_THROWS_AS(verify_distinctness_bound(10, 1), std::invalid_argument);
}

TEST_CASE("lemma suite: exhaustive pass at small scale") {
  ExperimentReport r = run_lemma_suite(4);
  CHECK(r.successes == r.trials);
  CHECK(r.trials > 0);
  CHECK(r.bound_satisfied);
  CHECK_FALSE(r.counterexample.has_value());

  SUBCASE("a single-point universe passes vacuously") {
    ExperimentReport v = run_lemma_suite(1);
    CHECK(v.successes == v.trials);
    CHECK(v.bound_satisfied);
  }

  SUBCASE("identical runs fingerprint identically") {
    ExperimentReport r2 = run_lemma_suite(4);
    CHECK(report_fingerprint(r2).dump() == report_fingerprint(r).dump());
  }

  CHECK_THROWS_AS(run_lemma_suite(0), std::invalid_argument);
  CHECK_THROWS_AS(run_lemma_suite(9), std::invalid_argument);
}
