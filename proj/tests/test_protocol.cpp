#include <doctest.h>

#include <stdexcept>
#include <vector>

#include "factorlab/protocol.hpp"
#include "factorlab/students.hpp"
#include "factorlab/teacher.hpp"

using namespace factorlab;

namespace {

Student fixed_answers(std::vector<BigInt> answers) {
  return Student{"fixed", 1, [answers](const BigInt&, const std::vector<Answer>& replies) {
                   std::size_t i = replies.size();
                   return Answer::scalar(answers[std::min(i, answers.size() - 1)]);
                 }};
}

Transcript scalar_transcript(BigInt x, std::vector<BigInt> ys,
                             std::vector<std::optional<BigInt>> zs) {
  Transcript t;
  t.x = std::move(x);
  t.c = static_cast<int>(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    Round r;
    r.y = Answer::scalar(ys[i]);
    if (i < zs.size() && zs[i]) {
      r.z = Answer::scalar(*zs[i]);
      r.divided_by = std::vector<BigInt>{};
    }
    t.rounds.push_back(std::move(r));
  }
  return t;
}

}  // namespace

TEST_CASE("Answer scalar and sequence accessors") {
  Answer s = Answer::scalar(7);
  CHECK_FALSE(s.is_sequence);
  CHECK(s.single() == 7);

  Answer q = Answer::sequence({2, 3});
  CHECK(q.is_sequence);
  CHECK_THROWS_AS(q.single(), std::logic_error);
}

TEST_CASE("run_protocol: one round never consults the teacher") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Teacher poisoned{"poisoned", [](const BigInt&, const std::vector<Answer>&) -> TeacherStep {
                     throw std::runtime_error("must not be called");
                   }};
  Transcript t = run_protocol(trivial_student(), poisoned, 1, base.x);
  CHECK(t.rounds.size() == 1);
  CHECK(t.rounds[0].y.single() == 210);
  CHECK_FALSE(t.rounds[0].z.has_value());
  CHECK_FALSE(t.rounds[0].divided_by.has_value());
}

TEST_CASE("run_protocol: trivial student over two rounds") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Transcript t = run_protocol(trivial_student(), make_teacher(base), 2, base.x);
  REQUIRE(t.rounds.size() == 2);
  CHECK(t.rounds[0].y.single() == 210);
  CHECK(t.rounds[0].z->single() == 6);
  CHECK(*t.rounds[0].divided_by == std::vector<BigInt>{5, 7});
  CHECK(t.rounds[1].y.single() == 210);
  CHECK_FALSE(t.rounds[1].z.has_value());
  CHECK_FALSE(wins(t).has_value());
  CHECK(check_correcting(t));
}

TEST_CASE("run_protocol: immediate prime answer wins round 1") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Transcript t = run_protocol(fixed_answers({7}), make_teacher(base), 2, base.x);
  CHECK(wins(t) == 1);
  CHECK(t.rounds[0].z->single() == 7);  // confirmation reply, run continues
}

TEST_CASE("run_protocol validates its inputs") {
  auto base = FactorBase::from_primes({2, 3});
  CHECK_THROWS_AS(run_protocol(trivial_student(), make_teacher(base), 0, base.x),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_protocol(trivial_student(), make_teacher(base), 1, BigInt(1)),
                  std::invalid_argument);
}

TEST_CASE("errors carry the round index and role") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Student flaky{"flaky", 1, [](const BigInt& x, const std::vector<Answer>& replies) {
                  if (replies.size() == 1) throw std::runtime_error("boom");
                  return Answer::scalar(x);
                }};
  try {
    run_protocol(flaky, make_teacher(base), 3, base.x);
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.round() == 2);
    CHECK(std::string(e.what()).find("student") != std::string::npos);
  }

  Teacher broken{"broken", [](const BigInt&, const std::vector<Answer>&) -> TeacherStep {
                   throw std::runtime_error("teacher boom");
                 }};
  try {
    run_protocol(trivial_student(), broken, 2, base.x);
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.round() == 1);
    CHECK(std::string(e.what()).find("teacher") != std::string::npos);
  }
}

TEST_CASE("wins: least prime-divisor round") {
  auto t = scalar_transcript(210, {210, 5}, {BigInt(6)});
  CHECK(wins(t) == 2);

  auto loss = scalar_transcript(210, {210, 210}, {BigInt(6)});
  CHECK_FALSE(wins(loss).has_value());

  auto invalid = scalar_transcript(210, {4, 210}, {BigInt(1)});
  CHECK_FALSE(wins(invalid).has_value());  // 4 does not divide 210

  Transcript parallel;
  parallel.x = 210;
  parallel.c = 1;
  parallel.width = 3;
  Round r;
  r.y = Answer::sequence({4, 6, 5});
  parallel.rounds.push_back(r);
  CHECK(wins(parallel) == 1);
}

TEST_CASE("check_correcting: counterexamples must properly divide") {
  CHECK(check_correcting(scalar_transcript(210, {210, 210}, {BigInt(6)})));
  CHECK_FALSE(check_correcting(scalar_transcript(210, {210, 210}, {BigInt(210)})));
  CHECK(check_correcting(scalar_transcript(210, {11, 210}, {BigInt(1)})));  // 11 does not divide x
  CHECK(check_correcting(scalar_transcript(210, {1, 210}, {BigInt(1)})));   // y < 2 unconstrained
  CHECK_FALSE(check_correcting(scalar_transcript(210, {6, 210}, {BigInt(1)})));
  CHECK(check_correcting(scalar_transcript(210, {7, 210}, {BigInt(7)})));  // winning round exempt
}

TEST_CASE("transcript JSON: schema shape") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Transcript t = run_protocol(trivial_student(), make_teacher(base), 2, base.x);
  nlohmann::json j = transcript_to_json(t);

  CHECK(j["x"] == "210");
  CHECK(j["c"] == 2);
  CHECK(j["width"] == 1);
  REQUIRE(j["rounds"].size() == 2);
  CHECK(j["rounds"][0]["y"] == "210");
  CHECK(j["rounds"][0]["z"] == "6");
  CHECK(j["rounds"][0]["divided_by"] == nlohmann::json::array({"5", "7"}));
  CHECK(j["rounds"][1]["z"].is_null());
  CHECK(j["rounds"][1]["divided_by"].is_null());
}

TEST_CASE("transcript JSON: round trip and parallel answers") {
  auto base = FactorBase::from_primes({2, 3, 5, 7});
  Transcript t = run_protocol(parallel_obvious_student(4), make_parallel_teacher(base), 2, base.x);
  nlohmann::json j = transcript_to_json(t);
  CHECK(j["rounds"][0]["y"].is_array());

  Transcript back = transcript_from_json(j);
  CHECK(back == t);
  CHECK(transcript_to_json(back).dump() == j.dump());

  nlohmann::json bad = j;
  bad["rounds"][0]["y"] = 210;  // integers must be decimal strings
  CHECK_THROWS(transcript_from_json(bad));
}

TEST_CASE("replay: identical runs serialize identically") {
  auto base = FactorBase::from_primes({2, 3, 5, 7, 11});
  for (const Student& s : {trivial_student(), obvious_student(),
                           trial_division_student(100)}) {
    Transcript a = run_protocol(s, make_teacher(base), 3, base.x);
    Transcript b = run_protocol(s, make_teacher(base), 3, base.x);
    CHECK(transcript_to_json(a).dump() == transcript_to_json(b).dump());
  }
}
