#include "factorlab/protocol.hpp"

#include <utility>

namespace factorlab {

Answer Answer::scalar(BigInt v) { return Answer{false, {std::move(v)}}; }

Answer Answer::sequence(std::vector<BigInt> vs) { return Answer{true, std::move(vs)}; }

const BigInt& Answer::single() const {
  if (is_sequence || values.size() != 1) throw std::logic_error("answer is not a scalar");
  return values[0];
}

ProtocolError::ProtocolError(int round, const std::string& role, const std::string& what)
    : std::runtime_error("round " + std::to_string(round) + ": " + role + ": " + what),
      round_(round) {}

Transcript run_protocol(const Student& student, const Teacher& teacher, int c, const BigInt& x) {
  if (c < 1) throw std::invalid_argument("round count must be positive");
  if (x < 2) throw std::invalid_argument("protocol input must be at least 2");
  Transcript t{x, c, student.width, {}};
  t.rounds.reserve(c);
  std::vector<Answer> answers;
  std::vector<Answer> replies;
  for (int i = 1; i <= c; ++i) {
    Round round;
    try {
      round.y = student.answer(x, replies);
    } catch (const std::exception& e) {
      throw ProtocolError(i, "student", e.what());
    }
    answers.push_back(round.y);
    if (i < c) {
      TeacherStep step;
      try {
        step = teacher.reply(x, answers);
      } catch (const std::exception& e) {
        throw ProtocolError(i, "teacher", e.what());
      }
      round.z = step.z;
      round.divided_by = std::move(step.divided_by);
      replies.push_back(*round.z);
    }
    t.rounds.push_back(std::move(round));
  }
  return t;
}

namespace {

bool prime_divisor_of(const BigInt& v, const BigInt& x) {
  return v >= 2 && mpz_divisible_p(x.get_mpz_t(), v.get_mpz_t()) && is_prime(v);
}

}  // namespace

std::optional<int> wins(const Transcript& t) {
  for (int i = 0; i < static_cast<int>(t.rounds.size()); ++i) {
    for (const BigInt& v : t.rounds[i].y.values) {
      if (prime_divisor_of(v, t.x)) return i + 1;
    }
  }
  return std::nullopt;
}

bool check_correcting(const Transcript& t) {
  for (const Round& round : t.rounds) {
    if (!round.z) continue;
    bool any_winning = false;
    for (const BigInt& v : round.y.values) {
      if (prime_divisor_of(v, t.x)) any_winning = true;
    }
    if (any_winning) continue;
    for (std::size_t j = 0; j < round.y.values.size(); ++j) {
      const BigInt& y = round.y.values[j];
      if (y < 2 || !mpz_divisible_p(t.x.get_mpz_t(), y.get_mpz_t())) continue;
      // Composite divisor: the paired reply must exhibit a proper divisor.
      if (j >= round.z->values.size()) return false;
      const BigInt& z = round.z->values[j];
      if (!(z > 1 && z < y && mpz_divisible_p(y.get_mpz_t(), z.get_mpz_t()))) return false;
    }
  }
  return true;
}

namespace {

nlohmann::json answer_to_json(const Answer& a) {
  if (!a.is_sequence) return to_decimal(a.single());
  nlohmann::json arr = nlohmann::json::array();
  for (const BigInt& v : a.values) arr.push_back(to_decimal(v));
  return arr;
}

Answer answer_from_json(const nlohmann::json& j) {
  if (j.is_string()) return Answer::scalar(from_decimal(j.get<std::string>()));
  if (!j.is_array()) throw std::invalid_argument("answer must be a string or array");
  std::vector<BigInt> vs;
  for (const auto& e : j) vs.push_back(from_decimal(e.get<std::string>()));
  return Answer::sequence(std::move(vs));
}

}  // namespace

nlohmann::json transcript_to_json(const Transcript& t) {
  nlohmann::json rounds = nlohmann::json::array();
  for (const Round& r : t.rounds) {
    nlohmann::json jr;
    jr["y"] = answer_to_json(r.y);
    jr["z"] = r.z ? answer_to_json(*r.z) : nlohmann::json(nullptr);
    if (r.divided_by) {
      nlohmann::json db = nlohmann::json::array();
      for (const BigInt& v : *r.divided_by) db.push_back(to_decimal(v));
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

Transcript transcript_from_json(const nlohmann::json& j) {
  Transcript t;
  t.x = from_decimal(j.at("x").get<std::string>());
  t.c = j.at("c").get<int>();
  t.width = j.at("width").get<int>();
  for (const auto& jr : j.at("rounds")) {
    Round r;
    r.y = answer_from_json(jr.at("y"));
    if (!jr.at("z").is_null()) r.z = answer_from_json(jr.at("z"));
    if (!jr.at("divided_by").is_null()) {
      std::vector<BigInt> db;
      for (const auto& e : jr.at("divided_by")) db.push_back(from_decimal(e.get<std::string>()));
      r.divided_by = std::move(db);
    }
    t.rounds.push_back(std::move(r));
  }
  return t;
}

}  // namespace factorlab
