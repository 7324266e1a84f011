#include "atp/proof_io.hpp"

#include <doctest.h>

#include <sstream>

using namespace atp;

namespace {

Rational R(const char* text) { return parse_rational(text); }

Proof example_two() {
  std::vector<Rational> xs{R("1.28"), R("1"), R("1.28")};
  return replay(Annotation::parse("1100100"), R("8/5"), R("3.28"), xs);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_SUITE("proof_io") {

TEST_CASE("class notation") {
  const SimpleClass c({{Quantifier::Exists, R("1.28"), R("1.28")}, {Quantifier::Forall, R("0"), R("1")}}, R("2"));
  CHECK(class_notation(c) == "(∃ n^{1.28})^{1.28}(∀ n^0)^1 DTS[n^2]");
  CHECK(class_notation(SimpleClass::dts(R("1/3"))) == "DTS[n^{0.3333333333}]");
}

TEST_CASE("json round trip is exact") {
  const Proof p = example_two();
  const std::string text = write_proof_json(p);
  CHECK(text.find("\"c\": \"8/5\"") != std::string::npos);
  CHECK(read_proof_json(text) == p);
  CHECK(class_from_json(to_json(p.lines[2])) == p.lines[2]);
}

TEST_CASE("malformed json is rejected") {
  CHECK_THROWS_AS(read_proof_json("{"), ProofFormatError);
  CHECK_THROWS_AS(read_proof_json("{\"c\": \"8/5\"}"), ProofFormatError);
  auto j = to_json(example_two());
  j["c"] = "eight";
  CHECK_THROWS_AS(proof_from_json(j), ProofFormatError);
  j = to_json(example_two());
  j["annotation"] = "1000";
  CHECK_THROWS_AS(proof_from_json(j), ProofFormatError);
  j = to_json(example_two());
  j["outer"] = "sometimes";
  CHECK_THROWS_AS(proof_from_json(j), ProofFormatError);
}

TEST_CASE("pretty print of the square-root-two shape") {
  // c = 7/5 stands in for the irrational square root of two.
  std::vector<Rational> xs{R("0.98")};
  const Proof p = replay(Annotation::parse("100"), R("7/5"), R("1.96"), xs);
  const auto rows = lines_of(pretty_print(p));
  std::vector<std::string> body;
  for (const auto& r : rows) {
    if (!r.empty() && r[0] != '#') body.push_back(r);
  }
  REQUIRE(body.size() == 5);
  CHECK(body[0] == "  DTS[n^{1.96}]");
  CHECK(body[1].find("Speedup, x = 0.98") != std::string::npos);
  CHECK(body[2].find("Slowdown") != std::string::npos);
  CHECK(body[3].find("Slowdown") != std::string::npos);
  CHECK(body.back() == "DTS[n^{1.96}] ⊆ DTS[n^{1.96}]");
}

TEST_CASE("pretty print shows the combining steps") {
  const std::string text = pretty_print(example_two());
  CHECK(text.find("Combining ∀ quantifiers") != std::string::npos);
  CHECK(text.find("Combining ∃ quantifiers") != std::string::npos);
  CHECK(text.find("# c = 8/5") != std::string::npos);
}

TEST_CASE("pretty output parses back to an equal proof") {
  const Proof p = example_two();
  CHECK(parse_pretty(pretty_print(p)) == p);
}

TEST_CASE("pretty output with an edited row is rejected") {
  std::string text = pretty_print(example_two());
  const auto at = text.find("DTS[n^{2.56}]");
  REQUIRE(at != std::string::npos);
  text.replace(at, 13, "DTS[n^{2.57}]");
  CHECK_THROWS_AS(parse_pretty(text), ProofFormatError);
  CHECK_THROWS_AS(parse_pretty("# nothing here\n"), ProofFormatError);
}

}
