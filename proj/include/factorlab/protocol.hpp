#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "factorlab/numtheory.hpp"

namespace factorlab {

// One student answer or teacher reply: a single number in the sequential
// game, a sequence of numbers in the parallel one.
struct Answer {
  bool is_sequence = false;
  std::vector<BigInt> values;  // exactly one element when scalar

  static Answer scalar(BigInt v);
  static Answer sequence(std::vector<BigInt> vs);
  const BigInt& single() const;  // scalar accessor, throws on sequences
  bool operator==(const Answer&) const = default;
};

struct Round {
  Answer y;
  std::optional<Answer> z;                        // absent in the final round
  std::optional<std::vector<BigInt>> divided_by;  // ascending; absent in the final round

  bool operator==(const Round&) const = default;
};

// Record of one full interrogation: the (2c-1)-tuple y1, z1, ..., yc laid
// out as c rounds. width > 1 marks a parallel game.
struct Transcript {
  BigInt x;
  int c = 0;
  int width = 1;
  std::vector<Round> rounds;

  bool operator==(const Transcript&) const = default;
};

// Students and teachers are pure functions of the visible history, so any
// transcript can be replayed exactly.
struct Student {
  std::string name;
  int width = 1;
  std::function<Answer(const BigInt& x, const std::vector<Answer>& replies)> answer;
};

struct TeacherStep {
  Answer z;
  std::vector<BigInt> divided_by;  // ascending
};

struct Teacher {
  std::string name;
  std::function<TeacherStep(const BigInt& x, const std::vector<Answer>& answers)> reply;
};

// Raised when a student or teacher throws mid-run; remembers where.
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(int round, const std::string& role, const std::string& what);
  int round() const { return round_; }

 private:
  int round_;
};

// Plays c rounds: y_i from the student, then z_i from the teacher for
// i < c (a one-round game never consults the teacher).
Transcript run_protocol(const Student& student, const Teacher& teacher, int c, const BigInt& x);

// Least round whose answer contains a prime divisor of x, if any.
std::optional<int> wins(const Transcript& t);

// Whether every reply falsifies the claim "this answer witnesses a prime
// factor" whenever falsification is possible: a composite divisor >= 2 must
// be answered with one of its proper divisors. Invalid answers (< 2 or not
// dividing x) are unconstrained, as is a round already containing a prime
// divisor. Parallel rounds apply this coordinate-wise.
bool check_correcting(const Transcript& t);

nlohmann::json transcript_to_json(const Transcript& t);
Transcript transcript_from_json(const nlohmann::json& j);

}  // namespace factorlab
