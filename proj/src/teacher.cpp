#include "factorlab/teacher.hpp"

#include <algorithm>
#include <stdexcept>

namespace factorlab {

FactorBase FactorBase::from_primes(std::vector<BigInt> primes) {
  if (primes.empty()) throw std::invalid_argument("factor base must be nonempty");
  if (primes.size() > 64) throw std::invalid_argument("factor base too large");
  FactorBase base;
  base.x = 1;
  for (const BigInt& p : primes) {
    if (p < 2) throw std::invalid_argument("factor base entries must be at least 2");
    base.x *= p;
  }
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (std::size_t j = i + 1; j < primes.size(); ++j) {
      if (primes[i] == primes[j]) throw std::invalid_argument("factor base entries must be distinct");
    }
  }
  base.primes = std::move(primes);
  return base;
}

FactorBase FactorBase::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != size()) throw std::invalid_argument("permutation size mismatch");
  std::vector<BigInt> out(primes.size());
  std::vector<bool> seen(primes.size(), false);
  for (std::size_t t = 0; t < perm.size(); ++t) {
    int p = perm[t];
    if (p < 1 || p > size() || seen[p - 1]) throw std::invalid_argument("not a permutation");
    seen[p - 1] = true;
    out[t] = primes[p - 1];
  }
  FactorBase b;
  b.primes = std::move(out);
  b.x = x;
  return b;
}

BigInt product_of(const FactorBase& base, IndexSet indices) {
  BigInt v = 1;
  for (int e : elements_of(indices)) v *= base.primes[e - 1];
  return v;
}

ObviousState initial_state(const FactorBase& base) {
  Universe u(base.size());
  return ObviousState{base, AtomPartition{u, {u.mask()}}, 1};
}

namespace {

// y's index set when y is a product of distinct base factors; absent
// otherwise. The distinction drives the invalid-answer rule.
std::optional<IndexSet> divisor_index_set(const FactorBase& base, const BigInt& y,
                                          BaseFactorization& bf) {
  if (y < 1) return std::nullopt;
  bf = factor_against_base(y, base.primes);
  if (y < 2 || bf.remainder != 1 || y != product_of(base, bf.indices)) return std::nullopt;
  return bf.indices;
}

struct CoordReply {
  BigInt z;
  std::vector<BigInt> divided_by;        // ascending
  std::vector<IndexSet> refinements;     // index sets the state absorbs
};

CoordReply reply_to_value(const ObviousState& state, const BigInt& y) {
  CoordReply out{BigInt(1), {}, {}};
  BaseFactorization bf{0, 0};
  auto indices = divisor_index_set(state.base, y, bf);
  if (!indices) {
    // Not a usable divisor; still absorb whatever base support it exposed.
    if (y >= 1 && bf.indices) out.refinements.push_back(bf.indices);
    return out;
  }
  const IndexSet s = *indices;
  if (set_size(s) == 1) {
    // The answer is a base factor itself; confirm it.
    out.z = y;
    out.refinements.push_back(s);
    return out;
  }
  // Candidate proper gcds with obvious numbers, one per atom the answer
  // meets. Unions of several candidates are always numerically larger, so
  // the minimum over single atoms is the minimum over the whole field.
  std::vector<IndexSet> met;
  for (IndexSet atom : state.partition.atoms) {
    if (atom & s) met.push_back(atom & s);
  }
  if (met.size() >= 2) {
    BigInt best;
    IndexSet best_set = 0;
    for (IndexSet part : met) {
      BigInt v = product_of(state.base, part);
      if (best_set == 0 || v < best) {
        best = v;
        best_set = part;
      }
    }
    out.z = best;
    out.refinements.push_back(s);
    out.refinements.push_back(best_set);
    return out;
  }
  // The whole factorization sits inside one atom: halve it by position.
  std::vector<int> positions = elements_of(s);
  const std::size_t take = positions.size() / 2;
  IndexSet first_half = 0;
  for (std::size_t i = 0; i < take; ++i) first_half |= IndexSet{1} << (positions[i] - 1);
  out.z = product_of(state.base, first_half);
  for (std::size_t i = take; i < positions.size(); ++i)
    out.divided_by.push_back(state.base.primes[positions[i] - 1]);
  std::sort(out.divided_by.begin(), out.divided_by.end());
  out.refinements.push_back(s);
  out.refinements.push_back(first_half);
  return out;
}

ObviousState advance(const ObviousState& state, const std::vector<IndexSet>& refinements) {
  ObviousState next = state;
  for (IndexSet r : refinements) next.partition = refine(next.partition, r);
  next.round = state.round + 1;
  return next;
}

}  // namespace

bool is_obvious(const ObviousState& state, const BigInt& v) {
  if (v == 1) return true;
  BaseFactorization bf{0, 0};
  auto indices = divisor_index_set(state.base, v, bf);
  return indices && contains(state.partition, *indices);
}

std::vector<BigInt> obvious_numbers(const ObviousState& state) {
  const std::size_t n = state.partition.atoms.size();
  if (n > 20) throw std::invalid_argument("too many atoms to enumerate obvious numbers");
  std::vector<BigInt> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << n); ++pick) {
    IndexSet s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick >> i & 1) s |= state.partition.atoms[i];
    }
    out.push_back(product_of(state.base, s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

TeacherStepResult teacher_reply(const ObviousState& state, const BigInt& y) {
  CoordReply r = reply_to_value(state, y);
  return TeacherStepResult{Answer::scalar(r.z), std::move(r.divided_by),
                           advance(state, r.refinements)};
}

TeacherStepResult parallel_teacher_reply(const ObviousState& state, const Answer& y) {
  if (!y.is_sequence) {
    // A lone number where a sequence belongs earns a 1 and teaches nothing.
    return TeacherStepResult{Answer::scalar(BigInt(1)), {}, advance(state, {})};
  }
  std::vector<BigInt> zs;
  std::vector<BigInt> divided;
  std::vector<IndexSet> refinements;
  for (const BigInt& v : y.values) {
    CoordReply r = reply_to_value(state, v);  // round-start state for every coordinate
    zs.push_back(std::move(r.z));
    divided.insert(divided.end(), r.divided_by.begin(), r.divided_by.end());
    refinements.insert(refinements.end(), r.refinements.begin(), r.refinements.end());
  }
  std::sort(divided.begin(), divided.end());
  divided.erase(std::unique(divided.begin(), divided.end()), divided.end());
  return TeacherStepResult{Answer::sequence(std::move(zs)), std::move(divided),
                           advance(state, refinements)};
}

namespace {

TeacherStepResult step_answer(const ObviousState& state, const Answer& a, bool parallel) {
  if (parallel) return parallel_teacher_reply(state, a);
  if (a.is_sequence) {
    // Sequence answers are not numbers to the sequential teacher.
    return TeacherStepResult{Answer::scalar(BigInt(1)), {}, advance(state, {})};
  }
  return teacher_reply(state, a.single());
}

Teacher make_teacher_impl(const FactorBase& base, bool parallel, const char* name) {
  return Teacher{name, [base, parallel](const BigInt& x, const std::vector<Answer>& answers) {
                   if (x != base.x) throw std::invalid_argument("teacher built for a different input");
                   if (answers.empty()) throw std::invalid_argument("no answer to reply to");
                   ObviousState state = initial_state(base);
                   for (std::size_t j = 0; j + 1 < answers.size(); ++j)
                     state = step_answer(state, answers[j], parallel).next;
                   TeacherStepResult r = step_answer(state, answers.back(), parallel);
                   return TeacherStep{std::move(r.z), std::move(r.divided_by)};
                 }};
}

}  // namespace

Teacher make_teacher(const FactorBase& base) { return make_teacher_impl(base, false, "obvious-correcting"); }

Teacher make_parallel_teacher(const FactorBase& base) {
  return make_teacher_impl(base, true, "obvious-correcting-parallel");
}

std::vector<ObviousState> obvious_states_through(const FactorBase& base, const Transcript& t) {
  std::vector<ObviousState> states;
  ObviousState state = initial_state(base);
  const bool parallel = t.width > 1;
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    states.push_back(state);
    if (i + 1 < t.rounds.size()) state = step_answer(state, t.rounds[i].y, parallel).next;
  }
  return states;
}

nlohmann::json break_witness_to_json(const BreakWitness& w) {
  nlohmann::json j;
  j["perm"] = w.perm;
  j["round"] = w.round;
  j["pair"] = {w.pair.first, w.pair.second};
  j["transcript"] = transcript_to_json(w.transcript);
  return j;
}

BreakWitness break_witness_from_json(const nlohmann::json& j) {
  BreakWitness w;
  w.perm = j.at("perm").get<std::vector<int>>();
  w.round = j.at("round").get<int>();
  w.pair = {j.at("pair").at(0).get<int>(), j.at("pair").at(1).get<int>()};
  w.transcript = transcript_from_json(j.at("transcript"));
  return w;
}

namespace {

bool pair_breaks_at(const Transcript& t, int round, const BigInt& pl, const BigInt& pk) {
  const BigInt product = pl * pk;
  bool hit = false;
  for (const BigInt& v : t.rounds[round - 1].y.values) {
    if (v < 1) continue;
    BigInt g = gcd(v, product);
    if (g == pl || g == pk) hit = true;
  }
  if (!hit) return false;
  for (int j = 1; j < round; ++j) {
    const auto& db = t.rounds[j - 1].divided_by;
    if (!db) return false;  // malformed prefix
    const bool has_l = std::find(db->begin(), db->end(), pl) != db->end();
    const bool has_k = std::find(db->begin(), db->end(), pk) != db->end();
    if (has_l != has_k) return false;
  }
  return true;
}

}  // namespace

std::optional<BreakWitness> detect_break(const Student& student, const FactorBase& base, int c) {
  const int d = base.size();
  std::vector<int> perm(d);
  for (int i = 0; i < d; ++i) perm[i] = i + 1;
  do {
    FactorBase permuted = base.permuted(perm);
    Teacher teacher = student.width > 1 ? make_parallel_teacher(permuted) : make_teacher(permuted);
    Transcript t = run_protocol(student, teacher, c, base.x);
    for (int round = 1; round <= c; ++round) {
      for (int l = 1; l <= d; ++l) {
        for (int k = l + 1; k <= d; ++k) {
          if (pair_breaks_at(t, round, base.primes[l - 1], base.primes[k - 1]))
            return BreakWitness{perm, round, {l, k}, std::move(t)};
        }
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

bool validate_break(const BreakWitness& w, const FactorBase& base) {
  const int d = base.size();
  if (w.round < 1 || w.round > static_cast<int>(w.transcript.rounds.size())) return false;
  if (w.pair.first < 1 || w.pair.second <= w.pair.first || w.pair.second > d) return false;
  return pair_breaks_at(w.transcript, w.round, base.primes[w.pair.first - 1],
                        base.primes[w.pair.second - 1]);
}

}  // namespace factorlab
