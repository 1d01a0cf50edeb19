#include "factorlab/reduction.hpp"

#include <algorithm>
#include <stdexcept>

namespace factorlab {

std::optional<BigInt> symbolic_value(const SymbolicDivisor& v, const BigInt& pq,
                                     const std::vector<BigInt>& supplied) {
  if (v.stars != 0 && v.stars != kBothStars) return std::nullopt;
  BigInt out = v.stars == kBothStars ? pq : BigInt(1);
  for (int i : elements_of(v.known)) out *= supplied[i - 1];
  return out;
}

SymbolicState initial_symbolic_state(const BlindInstance& instance,
                                     const std::vector<int>& arrangement) {
  const int d = instance.d();
  if (static_cast<int>(arrangement.size()) != d)
    throw std::invalid_argument("arrangement size mismatch");
  std::vector<bool> seen(d, false);
  for (int id : arrangement) {
    if (id < 0 || id >= d || seen[id])
      throw std::invalid_argument("arrangement is not a permutation of the symbol ids");
    seen[id] = true;
  }
  Universe u(d);
  return SymbolicState{instance, arrangement, AtomPartition{u, {u.mask()}}, 1};
}

namespace {

struct PositionView {
  int star_pos[2] = {-1, -1};  // 0-based positions of *1, *2

  explicit PositionView(const SymbolicState& s) {
    for (std::size_t t = 0; t < s.symbol_at.size(); ++t) {
      if (s.symbol_at[t] == 0) star_pos[0] = static_cast<int>(t);
      if (s.symbol_at[t] == 1) star_pos[1] = static_cast<int>(t);
    }
  }
};

unsigned stars_in(IndexSet positions, const PositionView& view) {
  unsigned stars = 0;
  if (view.star_pos[0] >= 0 && (positions >> view.star_pos[0] & 1)) stars |= kStarOne;
  if (view.star_pos[1] >= 0 && (positions >> view.star_pos[1] & 1)) stars |= kStarTwo;
  return stars;
}

// Value of a position set; absent when it holds exactly one placeholder.
std::optional<BigInt> position_value(const SymbolicState& s, const PositionView& view,
                                     IndexSet positions) {
  const unsigned stars = stars_in(positions, view);
  if (stars != 0 && stars != kBothStars) return std::nullopt;
  BigInt out = stars == kBothStars ? s.instance.pq : BigInt(1);
  for (int pos : elements_of(positions)) {
    const int id = s.symbol_at[pos - 1];
    if (id >= 2) out *= s.instance.supplied[id - 2];
  }
  return out;
}

SymbolicFactorList factor_list_of(const SymbolicState& s, const PositionView& view,
                                  IndexSet positions) {
  SymbolicFactorList out;
  out.stars = stars_in(positions, view);
  for (int pos : elements_of(positions)) {
    const int id = s.symbol_at[pos - 1];
    if (id >= 2) out.known.push_back(s.instance.supplied[id - 2]);
  }
  std::sort(out.known.begin(), out.known.end());
  return out;
}

struct Intake {
  bool valid = false;      // y is a product of distinct base slots
  IndexSet positions = 0;  // slots of y when valid, divisible support otherwise
};

// Maps a student's number onto base positions. Callers have already ruled
// out a proper gcd with pq, so the placeholder part is none or the pair.
Intake intake_answer(const SymbolicState& s, const PositionView& view, const BigInt& y) {
  Intake out;
  if (y < 1) return out;
  BigInt r = y;
  IndexSet support = 0;
  bool multiplicity_ok = true;
  for (std::size_t i = 0; i < s.instance.supplied.size(); ++i) {
    int hits = 0;
    while (auto q = exact_div(r, s.instance.supplied[i])) {
      r = *q;
      ++hits;
    }
    if (hits > 0) {
      // Slot of supplied prime i+1 in this arrangement.
      for (std::size_t t = 0; t < s.symbol_at.size(); ++t) {
        if (s.symbol_at[t] == static_cast<int>(i) + 2) support |= IndexSet{1} << t;
      }
    }
    if (hits > 1) multiplicity_ok = false;
  }
  bool stars = false;
  if (auto q = exact_div(r, s.instance.pq)) {
    stars = true;
    r = *q;
  }
  if (stars) {
    support |= IndexSet{1} << view.star_pos[0];
    support |= IndexSet{1} << view.star_pos[1];
  }
  out.positions = support;
  out.valid = y >= 2 && multiplicity_ok && r == 1;
  return out;
}

}  // namespace

std::optional<SymbolicStepResult> symbolic_teacher_reply(const SymbolicState& state,
                                                         const BigInt& y) {
  const PositionView view(state);
  const Intake in = intake_answer(state, view, y);

  auto advance = [&](std::initializer_list<IndexSet> refinements) {
    SymbolicState next = state;
    for (IndexSet r : refinements) next.partition = refine(next.partition, r);
    next.round = state.round + 1;
    return next;
  };

  if (!in.valid) {
    return SymbolicStepResult{BigInt(1), {}, advance({in.positions})};
  }
  const IndexSet s = in.positions;
  if (set_size(s) == 1) {
    // A single base slot: confirmed as is. (A lone placeholder cannot get
    // here; its gcd with pq would already have produced the factor.)
    return SymbolicStepResult{y, {}, advance({s})};
  }
  std::vector<IndexSet> met;
  for (IndexSet atom : state.partition.atoms) {
    if (atom & s) met.push_back(atom & s);
  }
  if (met.size() >= 2) {
    // Smallest proper gcd with an obvious number; comparing candidates
    // needs every candidate's value.
    BigInt best;
    IndexSet best_set = 0;
    for (IndexSet part : met) {
      auto v = position_value(state, view, part);
      if (!v) return std::nullopt;  // ABORT: candidate splits the pair
      if (best_set == 0 || *v < best) {
        best = *v;
        best_set = part;
      }
    }
    return SymbolicStepResult{best, {}, advance({s, best_set})};
  }
  // Halve by position within the single atom the answer occupies.
  std::vector<int> positions = elements_of(s);
  const std::size_t take = positions.size() / 2;
  IndexSet first_half = 0;
  for (std::size_t i = 0; i < take; ++i) first_half |= IndexSet{1} << (positions[i] - 1);
  auto z = position_value(state, view, first_half);
  if (!z) return std::nullopt;  // ABORT: the split would divide by one placeholder
  return SymbolicStepResult{*z, factor_list_of(state, view, s & ~first_half),
                            advance({s, first_half})};
}

nlohmann::json symbolic_transcript_to_json(const SymbolicTranscript& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const SymbolicRound& r : t.rounds) {
    nlohmann::json jr;
    jr["y"] = to_decimal(r.y);
    jr["z"] = r.z ? nlohmann::json(to_decimal(*r.z)) : nlohmann::json(nullptr);
    if (r.divided_by) {
      nlohmann::json db = nlohmann::json::array();
      for (const BigInt& v : r.divided_by->known) db.push_back(to_decimal(v));
      if (r.divided_by->stars & kStarOne) db.push_back("*1");
      if (r.divided_by->stars & kStarTwo) db.push_back("*2");
      jr["divided_by"] = db;
    } else {
      jr["divided_by"] = nullptr;
    }
    rounds.push_back(std::move(jr));
  }
  nlohmann::json out;
  out["x"] = to_decimal(t.x);
  out["c"] = t.c;
  out["width"] = t.width;
  out["rounds"] = std::move(rounds);
  return out;
}

Transcript substitute_stars(const SymbolicTranscript& t, const BigInt& p, const BigInt& q) {
  Transcript out;
  out.x = t.x;
  out.c = t.c;
  out.width = t.width;
  for (const SymbolicRound& r : t.rounds) {
    Round round;
    round.y = Answer::scalar(r.y);
    if (r.z) round.z = Answer::scalar(*r.z);
    if (r.divided_by) {
      std::vector<BigInt> db = r.divided_by->known;
      if (r.divided_by->stars & kStarOne) db.push_back(p);
      if (r.divided_by->stars & kStarTwo) db.push_back(q);
      std::sort(db.begin(), db.end());
      round.divided_by = std::move(db);
    }
    out.rounds.push_back(std::move(round));
  }
  return out;
}

namespace {

BigInt blind_input(const BlindInstance& instance) {
  BigInt x = instance.pq;
  for (const BigInt& p : instance.supplied) x *= p;
  return x;
}

PermutationTrace run_arrangement(const BlindInstance& instance, const Student& student,
                                 const std::vector<int>& arrangement) {
  PermutationTrace trace;
  trace.arrangement = arrangement;
  const BigInt x = blind_input(instance);
  trace.transcript.x = x;
  trace.transcript.c = instance.c;
  SymbolicState state = initial_symbolic_state(instance, arrangement);
  std::vector<Answer> replies;
  for (int i = 1; i <= instance.c; ++i) {
    Answer y = student.answer(x, replies);
    SymbolicRound round;
    round.y = y.is_sequence ? BigInt(0) : y.single();
    for (const BigInt& v : y.values) {
      if (v < 1) continue;
      BigInt g = gcd(v, instance.pq);
      if (g > 1 && g < instance.pq) {
        trace.transcript.rounds.push_back(std::move(round));
        trace.outcome = PermutationOutcome::factor_found;
        trace.factor = g;
        return trace;
      }
    }
    if (i < instance.c) {
      if (y.is_sequence) {
        // Sequential game only; a sequence is not a number.
        round.z = BigInt(1);
        round.divided_by = SymbolicFactorList{};
        replies.push_back(Answer::scalar(BigInt(1)));
        state.round += 1;
      } else {
        auto step = symbolic_teacher_reply(state, y.single());
        if (!step) {
          trace.transcript.rounds.push_back(std::move(round));
          trace.outcome = PermutationOutcome::aborted;
          return trace;
        }
        round.z = step->z;
        round.divided_by = step->divided_by;
        replies.push_back(Answer::scalar(step->z));
        state = std::move(step->next);
      }
    }
    trace.transcript.rounds.push_back(std::move(round));
  }
  trace.outcome = PermutationOutcome::completed;
  return trace;
}

// Shared preamble: distinctness of the supplied primes, then direct hits.
std::optional<std::optional<BigInt>> preamble(const BlindInstance& instance) {
  if (instance.c < 1) throw std::invalid_argument("round budget must be positive");
  if (instance.pq < 4) throw std::invalid_argument("pq must be a product of two primes");
  for (std::size_t i = 0; i < instance.supplied.size(); ++i) {
    if (instance.supplied[i] < 2) throw std::invalid_argument("supplied primes must be at least 2");
    for (std::size_t j = i + 1; j < instance.supplied.size(); ++j) {
      if (instance.supplied[i] == instance.supplied[j])
        return std::optional<std::optional<BigInt>>{std::optional<BigInt>{}};  // vacuous
    }
  }
  for (const BigInt& p : instance.supplied) {
    if (p > 1 && p < instance.pq && mpz_divisible_p(instance.pq.get_mpz_t(), p.get_mpz_t()))
      return std::optional<std::optional<BigInt>>{std::optional<BigInt>{p}};
  }
  return std::nullopt;  // proceed to the permutation loop
}

std::vector<int> identity_arrangement(int d) {
  std::vector<int> ids(d);
  for (int i = 0; i < d; ++i) ids[i] = i;
  return ids;
}

}  // namespace

std::optional<BigInt> blind_simulate(const BlindInstance& instance, const Student& student) {
  if (auto early = preamble(instance)) return *early;
  std::vector<int> ids = identity_arrangement(instance.d());
  do {
    PermutationTrace trace = run_arrangement(instance, student, ids);
    if (trace.outcome == PermutationOutcome::factor_found) return trace.factor;
  } while (std::next_permutation(ids.begin(), ids.end()));
  return std::nullopt;
}

std::vector<PermutationTrace> blind_simulate_traced(const BlindInstance& instance,
                                                    const Student& student) {
  if (auto early = preamble(instance)) {
    (void)early;
    return {};
  }
  std::vector<PermutationTrace> traces;
  std::vector<int> ids = identity_arrangement(instance.d());
  do {
    traces.push_back(run_arrangement(instance, student, ids));
  } while (std::next_permutation(ids.begin(), ids.end()));
  return traces;
}

namespace {

// The parallel prefix as reconstructed inside the converted student: the
// lattice entering block k, the parallel replies so far, and the answer
// list for block k (or the stall value).
struct BlockPlan {
  std::optional<BigInt> stall;
  std::vector<BigInt> answers;  // one per round of the block
};

BlockPlan plan_block(const DivisorLattice& lattice, const Answer& y_par, std::size_t slots) {
  BlockPlan plan;
  for (const BigInt& v : y_par.values) {
    if (!lattice.is_obvious(v)) {
      plan.stall = v;
      return plan;
    }
  }
  std::vector<BigInt> atoms;
  for (const BigInt& v : y_par.values) {
    if (lattice.is_atom(v)) atoms.push_back(v);
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  if (atoms.size() > slots) atoms.resize(slots);
  if (atoms.empty()) atoms.push_back(BigInt(1));  // inert filler
  while (atoms.size() < slots) atoms.push_back(atoms.back());
  plan.answers = std::move(atoms);
  return plan;
}

// Replies the parallel teacher would give to obvious answers the student
// can derive alone: invalid numbers get 1, a prime base factor is echoed,
// and a multi-atom product gets its least atom. Single atoms are the ones
// that consume a real teacher round.
BigInt self_reply(const DivisorLattice& lattice, const BigInt& v) {
  if (v < 2 || !mpz_divisible_p(lattice.x().get_mpz_t(), v.get_mpz_t())) return BigInt(1);
  if (is_prime(v)) return v;
  for (const BigInt& a : lattice.atoms()) {
    if (a < v && mpz_divisible_p(v.get_mpz_t(), a.get_mpz_t())) return a;
  }
  return BigInt(1);  // unreachable for obvious non-atom composites
}

}  // namespace

Student convert_parallel_student(const Student& parallel_student, int e) {
  if (e < 1 || e > 20) throw std::invalid_argument("parallel round budget out of range");
  return Student{
      "converted:" + parallel_student.name, 1,
      [sp = parallel_student, e](const BigInt& x, const std::vector<Answer>& replies) {
        const std::size_t r = replies.size() + 1;
        DivisorLattice lattice(x);
        std::vector<Answer> parallel_replies;
        for (int k = 1; k <= e; ++k) {
          const std::size_t block_start = std::size_t{1} << (k - 1);
          const std::size_t slots = block_start;
          Answer y_par = sp.answer(x, parallel_replies);
          BlockPlan plan = plan_block(lattice, y_par, slots);
          if (plan.stall) return Answer::scalar(*plan.stall);
          if (r < block_start + slots || k == e)
            return Answer::scalar(plan.answers[std::min(r - block_start, slots - 1)]);
          // Rebuild the parallel reply: atom answers took real rounds
          // whose replies sit in this block; everything else is derivable.
          std::vector<BigInt> zs;
          for (const BigInt& v : y_par.values) {
            auto slot = std::find(plan.answers.begin(), plan.answers.end(), v);
            if (lattice.is_atom(v) && slot != plan.answers.end()) {
              const std::size_t round_index = block_start + (slot - plan.answers.begin());
              zs.push_back(replies[round_index - 1].single());
            } else {
              zs.push_back(self_reply(lattice, v));
            }
          }
          for (const BigInt& v : y_par.values) lattice.absorb(v);
          for (const BigInt& z : zs) lattice.absorb(z);
          parallel_replies.push_back(Answer::sequence(std::move(zs)));
        }
        throw std::logic_error("unreachable: round beyond final block");
      }};
}

}  // namespace factorlab
