// Command-line front end: play or script the factoring games, run the
// verification suites, and drive the blinded-reduction experiments.
//
// Exit codes: 0 on a positive outcome, 1 on a negative one (lost game,
// missed bound), 2 on usage or input errors.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factorlab/experiments.hpp"
#include "factorlab/reduction.hpp"
#include "factorlab/students.hpp"
#include "factorlab/teacher.hpp"

namespace {

using namespace factorlab;

constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<BigInt> parse_number_list(const std::string& csv) {
  std::vector<BigInt> out;
  std::istringstream in(csv);
  std::string token;
  while (std::getline(in, token, ',')) {
    const auto first = token.find_first_not_of(" \t");
    const auto last = token.find_last_not_of(" \t");
    if (first == std::string::npos) throw UsageError("empty entry in number list '" + csv + "'");
    out.push_back(from_decimal(token.substr(first, last - first + 1)));
  }
  if (out.empty()) throw UsageError("expected a comma-separated list of numbers");
  return out;
}

std::vector<BigInt> parse_prime_list(const std::string& csv) {
  std::vector<BigInt> out = parse_number_list(csv);
  for (const BigInt& p : out)
    if (!is_prime(p)) throw UsageError(to_decimal(p) + " is not a prime");
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = i + 1; j < out.size(); ++j)
      if (out[i] == out[j]) throw UsageError("duplicate prime " + to_decimal(out[i]));
  return out;
}

// --seed beats FACTORLAB_SEED beats 0, so unscripted runs stay reproducible.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("FACTORLAB_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*env == '\0' || end == nullptr || *end != '\0')
      throw UsageError("FACTORLAB_SEED must be a decimal integer");
    return v;
  }
  return 0;
}

std::vector<BigInt> draw_distinct_primes(unsigned bits, int d, std::uint64_t seed) {
  PrimeSet pool = primes_of_bitlength(bits);
  if (static_cast<int>(pool.primes.size()) < d)
    throw UsageError("only " + std::to_string(pool.primes.size()) + " primes have " +
                     std::to_string(bits) + " bits; cannot draw " + std::to_string(d) +
                     " distinct ones");
  Rng rng = make_rng(seed);
  std::vector<BigInt> out;
  while (static_cast<int>(out.size()) < d) {
    BigInt p = sample_from(pool, rng);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

std::string joined(const std::vector<BigInt>& vs, const char* sep = ", ") {
  std::string s;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) s += sep;
    s += to_decimal(vs[i]);
  }
  return s;
}

std::string answer_string(const Answer& a) {
  if (!a.is_sequence) return to_decimal(a.single());
  return "(" + joined(a.values) + ")";
}

void print_transcript(const Transcript& t, bool show_divided_by) {
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const Round& r = t.rounds[i];
    std::cout << "round " << i + 1 << ": y = " << answer_string(r.y);
    if (r.z) {
      std::cout << ", z = " << answer_string(*r.z);
      if (show_divided_by) std::cout << ", divided by {" << joined(*r.divided_by) << "}";
    }
    std::cout << '\n';
  }
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
}

void write_outputs(const ExperimentReport& r, const std::string& out_path,
                   const std::string& csv_path) {
  if (!out_path.empty()) save_report(r, out_path);
  if (!csv_path.empty()) {
    std::error_code ec;
    const bool fresh =
        !std::filesystem::exists(csv_path, ec) || std::filesystem::file_size(csv_path, ec) == 0;
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw UsageError("cannot open '" + csv_path + "' for appending");
    if (fresh) out << csv_header() << '\n';
    out << report_to_csv_row(r) << '\n';
  }
}

// ---- simulate ----------------------------------------------------------

struct SimulateArgs {
  std::string primes_csv;
  unsigned bits = 0;
  int d = 0;
  std::string student;
  int rounds = 0;
  std::optional<std::uint64_t> seed;
  int width = 0;
  bool parallel = false;
  std::string out;
};

FactorBase resolve_base(const std::string& primes_csv, unsigned bits, int d,
                        const std::optional<std::uint64_t>& seed) {
  const bool explicit_base = !primes_csv.empty();
  const bool drawn_base = bits != 0 || d != 0;
  if (explicit_base == drawn_base)
    throw UsageError("give the base either as --primes or as --bits with --d");
  if (explicit_base) return FactorBase::from_primes(parse_prime_list(primes_csv));
  if (bits == 0 || d == 0) throw UsageError("--bits and --d must be given together");
  return FactorBase::from_primes(draw_distinct_primes(bits, d, resolve_seed(seed)));
}

int run_simulate(const SimulateArgs& a) {
  FactorBase base = resolve_base(a.primes_csv, a.bits, a.d, a.seed);
  StudentSpecContext ctx;
  ctx.hidden = base;
  ctx.width = a.width > 0 ? a.width : base.size();
  Student student = make_student(a.student, ctx);
  const bool parallel = a.parallel || student.width > 1;
  Teacher teacher = parallel ? make_parallel_teacher(base) : make_teacher(base);

  std::cout << "base: " << joined(base.primes) << "\n";
  std::cout << "x = " << to_decimal(base.x) << ", student '" << student.name << "', "
            << a.rounds << " round" << (a.rounds == 1 ? "" : "s")
            << (parallel ? ", parallel teacher" : "") << "\n";
  Transcript t = run_protocol(student, teacher, a.rounds, base.x);
  print_transcript(t, true);
  if (!a.out.empty()) write_json(transcript_to_json(t), a.out);

  if (auto round = wins(t)) {
    std::cout << "student '" << student.name << "' wins at round " << *round << "\n";
    return 0;
  }
  std::cout << "student '" << student.name << "' names no prime factor in " << a.rounds
            << " rounds; the teacher wins\n";
  return 1;
}

// ---- blind-factor ------------------------------------------------------

struct BlindArgs {
  std::string pq;
  std::string supplied_csv;
  std::string student;
  int rounds = 0;
};

// Demonstration-scale factorization of pq, used only to hand the omniscient
// student its script; the simulation itself still sees nothing but pq.
std::pair<BigInt, BigInt> split_semiprime(const BigInt& pq) {
  if (pq > BigInt("1000000000000"))
    throw UsageError("pq too large for the demonstration factorizer");
  if (pq >= 4)
    for (BigInt f = 2; f * f <= pq; ++f)
      if (auto rest = exact_div(pq, f)) {
        if (!is_prime(*rest)) break;
        return {f, *rest};
      }
  throw UsageError("pq must be a product of two primes");
}

Student build_blind_student(const std::string& spec, const BigInt& pq,
                            const std::vector<BigInt>& supplied) {
  if (spec.rfind("omniscient", 0) == 0) {
    const std::string policy = spec.size() > 10 && spec[10] == ':' ? spec.substr(11) : "immediate";
    OmniscientPolicy p;
    if (policy == "immediate")
      p = OmniscientPolicy::immediate;
    else if (policy == "halving")
      p = OmniscientPolicy::halving;
    else
      throw UsageError("unknown omniscient policy '" + policy + "'");
    auto [lo, hi] = split_semiprime(pq);
    std::vector<BigInt> hidden = {lo, hi};
    hidden.insert(hidden.end(), supplied.begin(), supplied.end());
    return omniscient_student(std::move(hidden), p);
  }
  Student s = make_student(spec, {});
  if (s.width != 1) throw UsageError("blind runs are sequential; pick a width-1 student");
  return s;
}

int run_blind_factor(const BlindArgs& a) {
  const BigInt pq = from_decimal(a.pq);
  const std::vector<BigInt> supplied =
      a.supplied_csv.empty() ? std::vector<BigInt>{} : parse_prime_list(a.supplied_csv);
  BlindInstance instance{pq, supplied, a.rounds};
  Student student = build_blind_student(a.student, pq, supplied);

  std::cout << "blinded run on pq = " << to_decimal(pq) << " with supplied primes {"
            << joined(supplied) << "}, student '" << student.name << "', " << a.rounds
            << " round" << (a.rounds == 1 ? "" : "s") << "\n";
  if (auto f = blind_simulate(instance, student)) {
    std::cout << "found factor " << to_decimal(*f) << " of " << to_decimal(pq) << "\n";
    return 0;
  }
  std::cout << "no factor of " << to_decimal(pq) << " surfaced; every arrangement stayed blind\n";
  return 1;
}

// ---- verify ------------------------------------------------------------

struct VerifyArgs {
  std::string suite;
  int max_universe = 6;
  int omega = 5;
  int d = 0;
  std::string pairs = "least";
  long size = 0;
  std::string out;
  std::string csv;
};

int run_verify(const VerifyArgs& a) {
  if (a.suite == "lemmas") {
    ExperimentReport r = run_lemma_suite(a.max_universe);
    std::cout << r.description << "\n";
    std::cout << r.successes << "/" << r.trials << " checks passed\n";
    if (r.counterexample) std::cout << "counterexample: " << *r.counterexample << "\n";
    write_outputs(r, a.out, a.csv);
    std::cout << (r.bound_satisfied ? "verdict: pass\n" : "verdict: FAIL\n");
    return r.bound_satisfied ? 0 : 1;
  }
  if (a.suite == "pair-sampling") {
    if (a.d <= 0) throw UsageError("pair-sampling needs --d");
    PairFamily family;
    if (a.pairs == "least")
      family = least_pair_family();
    else if (a.pairs == "all")
      family = all_pairs_family();
    else if (a.pairs.rfind("random:", 0) == 0)
      family = random_pair_family(std::stoull(a.pairs.substr(7)));
    else
      throw UsageError("--pairs must be least, all, or random:<seed>");
    PairSamplingResult r = verify_pair_sampling(a.omega, a.d, family);
    if (pair_sampling_oracle(a.omega, a.d, family) != r.probability) {
      std::cout << "enumeration and symmetry count disagree; refusing the result\n";
      return 1;
    }
    std::cout << "conditional hit probability = " << r.probability.get_str()
              << " against bound 1/C(d,2) = " << r.bound.get_str() << "\n";
    std::cout << (r.satisfied ? "verdict: pass\n" : "verdict: FAIL\n");
    return r.satisfied ? 0 : 1;
  }
  if (a.suite == "distinctness") {
    if (a.size <= 0 || a.d <= 0) throw UsageError("distinctness needs --size and --d");
    DistinctnessResult r = verify_distinctness_bound(a.size, a.d);
    std::cout << "all-distinct probability over |D| = " << a.size << ", d = " << a.d << ": "
              << r.product.get_str() << "\n";
    if (!r.applicable) {
      std::cout << "|D| is below 4*C(d,2); the 1/2 floor is not claimed there\n";
      return 0;
    }
    std::cout << (r.meets_half ? "at least 1/2: pass\n" : "below 1/2: FAIL\n");
    return r.meets_half ? 0 : 1;
  }
  throw UsageError("unknown verify suite '" + a.suite + "' (lemmas, pair-sampling, distinctness)");
}

// ---- experiment --------------------------------------------------------

struct ExperimentArgs {
  std::string suite;
  unsigned bits = 8;
  int d = 4;
  int rounds = 2;
  long trials = 1000;
  std::optional<std::uint64_t> seed;
  std::string student = "omniscient";
  std::string out;
  std::string csv;
};

int run_experiment(const ExperimentArgs& a) {
  if (a.suite != "reduction")
    throw UsageError("unknown experiment suite '" + a.suite + "' (reduction)");
  StudentFamily family = family_by_name(a.student);
  PrimeSet pool = primes_of_bitlength(a.bits);
  const std::uint64_t seed = resolve_seed(a.seed);
  ExperimentReport r =
      estimate_reduction_success(family, a.student, pool, a.d, a.rounds, a.trials, seed);
  std::cout << r.description << "\n";
  std::cout << r.successes << "/" << r.trials << " trials returned a sound factor (empirical "
            << r.empirical.get_str() << ", floor " << r.bound.get_str()
            << " less three binomial sigma), seed " << seed << "\n";
  if (r.counterexample) std::cout << "UNSOUND return: " << *r.counterexample << "\n";
  write_outputs(r, a.out, a.csv);
  std::cout << (r.bound_satisfied ? "bound check: pass\n" : "bound check: FAIL\n");
  return r.bound_satisfied ? 0 : 1;
}

// ---- play --------------------------------------------------------------

struct PlayArgs {
  std::string primes_csv;
  unsigned bits = 0;
  int d = 0;
  int rounds = 0;
  std::optional<std::uint64_t> seed;
};

int run_play(const PlayArgs& a) {
  const bool visible = !a.primes_csv.empty();
  FactorBase base = resolve_base(a.primes_csv, a.bits, a.d, a.seed);
  if (visible)
    std::cout << "base: " << joined(base.primes) << "\n";
  else
    std::cout << "base: " << a.d << " hidden primes of " << a.bits << " bits\n";
  std::cout << "x = " << to_decimal(base.x) << "\n";
  std::cout << "name a prime factor of x within " << a.rounds
            << " rounds; wrong tries get corrected\n";

  Teacher teacher = make_teacher(base);
  std::vector<Answer> answers;
  int strikes = 0;
  for (int round = 1; round <= a.rounds; ++round) {
    std::optional<BigInt> y;
    while (!y) {
      std::cout << "y_" << round << "> " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) {
        std::cout << "\ninput ended before the game did\n";
        return kUsage;
      }
      const auto first = line.find_first_not_of(" \t\r");
      const auto last = line.find_last_not_of(" \t\r");
      try {
        if (first == std::string::npos) throw std::invalid_argument("blank");
        y = from_decimal(line.substr(first, last - first + 1));
      } catch (const std::exception&) {
        if (++strikes >= 3) {
          std::cout << "three noninteger answers; giving up\n";
          return kUsage;
        }
        std::cout << "not an integer; try again\n";
      }
    }
    answers.push_back(Answer::scalar(*y));
    if (*y >= 2 && base.x % *y == 0 && is_prime(*y)) {
      std::cout << "you win at round " << round << ": " << to_decimal(*y)
                << " is a prime factor of x\n";
      return 0;
    }
    if (round < a.rounds) {
      TeacherStep step = teacher.reply(base.x, answers);
      std::cout << "teacher: z = " << answer_string(step.z);
      if (visible) std::cout << ", divided by {" << joined(step.divided_by) << "}";
      std::cout << "\n";
    }
  }
  std::cout << "no prime factor named in " << a.rounds << " rounds; the teacher wins\n";
  if (!visible) std::cout << "the hidden primes were: " << joined(base.primes) << "\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"student-teacher games that hunt for prime factors of square-free numbers"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a scripted student against the teacher");
  simulate->add_option("--primes", sim.primes_csv, "comma-separated distinct primes for the base");
  simulate->add_option("--bits", sim.bits, "bit length of randomly drawn base primes");
  simulate->add_option("--d", sim.d, "how many primes a drawn base holds");
  simulate->add_option("--student", sim.student,
                       "trivial | obvious[:least] | omniscient[:immediate|halving] | "
                       "trialdiv[:budget] | parallel-obvious | parallel-omniscient[:policy]")
      ->required();
  simulate->add_option("--rounds", sim.rounds, "rounds to play")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "seed for drawing a hidden base");
  simulate->add_option("--width", sim.width, "parallel answer width (default: base size)");
  simulate->add_flag("--parallel", sim.parallel, "use the coordinate-wise teacher");
  simulate->add_option("--out", sim.out, "write the transcript as JSON");

  BlindArgs blind;
  CLI::App* blind_factor =
      app.add_subcommand("blind-factor", "run the star-blinded simulation against pq");
  blind_factor->add_option("--pq", blind.pq, "product of the two unknown primes")->required();
  blind_factor->add_option("--supplied", blind.supplied_csv, "known primes handed to the run");
  blind_factor->add_option("--student", blind.student, "sequential student spec")->required();
  blind_factor->add_option("--rounds", blind.rounds, "rounds per arrangement")
      ->required()
      ->check(CLI::PositiveNumber);

  VerifyArgs ver;
  CLI::App* verify = app.add_subcommand("verify", "exact structure checks");
  verify->add_option("--suite", ver.suite, "lemmas | pair-sampling | distinctness")->required();
  verify->add_option("--max-universe", ver.max_universe, "largest universe for the lemma suite");
  verify->add_option("--omega", ver.omega, "sample-space size for pair-sampling");
  verify->add_option("--d", ver.d, "draws per trial");
  verify->add_option("--pairs", ver.pairs, "least | all | random:<seed>");
  verify->add_option("--size", ver.size, "|D| for the distinctness bound");
  verify->add_option("--out", ver.out, "write the report as JSON");
  verify->add_option("--csv", ver.csv, "append the report to a CSV file");

  ExperimentArgs exp;
  CLI::App* experiment = app.add_subcommand("experiment", "seeded statistical runs");
  experiment->add_option("--suite", exp.suite, "reduction")->required();
  experiment->add_option("--bits", exp.bits, "bit length of the prime pool");
  experiment->add_option("--d", exp.d, "tuple size per trial");
  experiment->add_option("--rounds", exp.rounds, "rounds per run");
  experiment->add_option("--trials", exp.trials, "number of trials")->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exp.seed, "master seed (default FACTORLAB_SEED or 0)");
  experiment->add_option("--student", exp.student, "family: trivial | omniscient[:policy]");
  experiment->add_option("--out", exp.out, "write the report as JSON");
  experiment->add_option("--csv", exp.csv, "append the report to a CSV file");

  PlayArgs play;
  CLI::App* play_cmd = app.add_subcommand("play", "be the student yourself");
  play_cmd->add_option("--primes", play.primes_csv, "visible base: these exact primes");
  play_cmd->add_option("--bits", play.bits, "hidden base: prime bit length");
  play_cmd->add_option("--d", play.d, "hidden base: number of primes");
  play_cmd->add_option("--rounds", play.rounds, "rounds before the teacher wins")
      ->required()
      ->check(CLI::PositiveNumber);
  play_cmd->add_option("--seed", play.seed, "seed for the hidden base draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*simulate) return run_simulate(sim);
    if (*blind_factor) return run_blind_factor(blind);
    if (*verify) return run_verify(ver);
    if (*experiment) return run_experiment(exp);
    if (*play_cmd) return run_play(play);
    std::cerr << "error: no subcommand selected\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return kUsage;
  }
}
