#include "atp/derivation.hpp"
#include "atp/proof_io.hpp"

#include <doctest.h>

#include <random>

using namespace atp;

namespace {

Rational frac(long num, long den) {
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Rational R(const char* text) { return parse_rational(text); }

constexpr Quantifier E = Quantifier::Exists;
constexpr Quantifier A = Quantifier::Forall;

SimpleClass cls(std::vector<QuantifierBlock> blocks, const char* dts) {
  return SimpleClass(std::move(blocks), R(dts));
}

QuantifierBlock blk(Quantifier q, const char* speed, const char* input) { return {q, R(speed), R(input)}; }

// Second worked example at c: start at c^2/2 + 2, guess c^2/2, 1, c^2/2.
Proof example_two(const Rational& c) {
  const Rational h = c * c / 2;
  std::vector<Rational> xs{h, Rational(1), h};
  return replay(Annotation::parse("1100100"), c, h + 2, xs);
}

}  // namespace

TEST_SUITE("derivation") {

TEST_CASE("class invariants") {
  CHECK_THROWS_AS(cls({blk(E, "-1", "1")}, "1"), DerivationError);
  CHECK_THROWS_AS(cls({blk(E, "1", "1/2")}, "1"), DerivationError);
  CHECK_THROWS_AS(SimpleClass({blk(E, "1", "2")}, R("1"), R("3")), DerivationError);
  CHECK(SimpleClass::dts(R("2")).is_dts());
  auto d = SimpleClass::with_default_inputs({{E, R("1/2")}, {A, R("3")}}, R("1"));
  CHECK(d.blocks()[0].input == 1);
  CHECK(d.blocks()[1].input == 3);
  CHECK(d.dts_input() == 3);
}

TEST_CASE("speedup rule 0") {
  CHECK(apply_speedup0(SimpleClass::dts(R("2")), R("1"), A) ==
        cls({blk(A, "1", "1"), blk(E, "0", "1")}, "1"));
  CHECK(apply_speedup0(SimpleClass::dts(R("3.28")), R("1.28"), E) ==
        cls({blk(E, "1.28", "1.28"), blk(A, "0", "1")}, "2"));
  CHECK(apply_speedup0(SimpleClass::dts(R("1")), R("0.5"), E) ==
        cls({blk(E, "0.5", "1"), blk(A, "0", "1")}, "0.5"));
  CHECK_THROWS_AS(apply_speedup0(SimpleClass::dts(R("2")), R("2"), E), DerivationError);
  CHECK_THROWS_AS(apply_speedup0(SimpleClass::dts(R("2")), R("0"), E), DerivationError);
  CHECK_THROWS_AS(apply_speedup0(cls({blk(E, "1", "1")}, "2"), R("1"), E), DerivationError);
}

TEST_CASE("speedup rule 1") {
  CHECK(apply_speedup1(cls({blk(E, "1.28", "1.28"), blk(A, "0", "1")}, "2"), R("1")) ==
        cls({blk(E, "1.28", "1.28"), blk(A, "1", "1"), blk(E, "0", "1")}, "1"));
  CHECK(apply_speedup1(cls({blk(E, "1.28", "1.28")}, "2.56"), R("1.28")) ==
        cls({blk(E, "1.28", "1.28"), blk(A, "0", "1.28")}, "1.28"));
  CHECK(apply_speedup1(cls({blk(A, "1", "1")}, "1"), R("0.5")) ==
        cls({blk(A, "1", "1"), blk(E, "0", "1")}, "0.5"));
  CHECK_THROWS_AS(apply_speedup1(SimpleClass::dts(R("2")), R("1")), DerivationError);
  CHECK_THROWS_AS(apply_speedup1(cls({blk(A, "1", "1")}, "1"), R("1")), DerivationError);
}

TEST_CASE("speedup rule 2 and combining") {
  const auto before = cls({blk(E, "1.28", "1.28")}, "2.56");
  // Rule 2 guesses with the opposite quantifier, so nothing merges.
  const auto two = apply_speedup2(before, R("1.28"));
  CHECK(two == cls({blk(E, "1.28", "1.28"), blk(A, "1.28", "1.28"), blk(E, "0", "1.28")}, "1.28"));
  CHECK(two.alternating());
  CHECK(combine_adjacent(two) == two);
  // With the same quantifier the raw output merges into Rule 1's result.
  const auto raw = apply_speedup_lemma(before, R("1.28"), E);
  CHECK(raw == cls({blk(E, "1.28", "1.28"), blk(E, "1.28", "1.28"), blk(A, "0", "1.28")}, "1.28"));
  CHECK_FALSE(raw.alternating());
  CHECK(combine_adjacent(raw) == apply_speedup1(before, R("1.28")));
  CHECK(apply_speedup2(cls({blk(A, "1", "1")}, "2"), R("1")) ==
        cls({blk(A, "1", "1"), blk(E, "1", "1"), blk(A, "0", "1")}, "1"));
}

TEST_CASE("the raw speedup lemma is rule 2's shape with a chosen polarity") {
  const auto before = cls({blk(E, "1.28", "1.28"), blk(A, "0", "1")}, "2");
  const auto raw = apply_speedup_lemma(before, R("1"), A);
  CHECK(raw == cls({blk(E, "1.28", "1.28"), blk(A, "0", "1"), blk(A, "1", "1"), blk(E, "0", "1")}, "1"));
  CHECK(combine_adjacent(raw) == apply_speedup1(before, R("1")));
}

TEST_CASE("combine_adjacent") {
  const auto alt = cls({blk(E, "1", "1"), blk(A, "2", "2")}, "1");
  CHECK(combine_adjacent(alt) == alt);
  CHECK(combine_adjacent(cls({blk(E, "2", "2"), blk(E, "1", "1")}, "1")) == cls({blk(E, "2", "1")}, "1"));
  const auto three = cls({blk(E, "1", "3"), blk(E, "4", "2"), blk(E, "2", "5")}, "1");
  CHECK(combine_adjacent(three) == cls({blk(E, "4", "5")}, "1"));
  CHECK(combine_adjacent(combine_adjacent(three)) == combine_adjacent(three));
}

TEST_CASE("slowdown") {
  CHECK(apply_slowdown(cls({blk(E, "1.28", "1.28"), blk(A, "1", "1"), blk(E, "0", "1")}, "1"), R("1.6")) ==
        cls({blk(E, "1.28", "1.28"), blk(A, "1", "1")}, "1.6"));
  // 2/c^2 = 50/49 and 2/c = 10/7 at c = 7/5.
  CHECK(apply_slowdown(cls({blk(E, "50/49", "50/49"), blk(A, "50/49", "50/49")}, "50/49"), R("7/5")) ==
        cls({blk(E, "50/49", "50/49")}, "10/7"));
  CHECK(apply_slowdown(cls({blk(A, "1", "1")}, "1"), R("1")) == SimpleClass::dts(R("1")));
  // The outer input of the removed block counts: here it dominates.
  CHECK(apply_slowdown(cls({blk(E, "1", "3"), blk(A, "0", "1")}, "1"), R("2")).dts_speed() == 6);
  CHECK_THROWS_AS(apply_slowdown(SimpleClass::dts(R("2")), R("2")), DerivationError);
  CHECK_THROWS_AS(apply_slowdown(cls({blk(A, "1", "1")}, "1"), R("1/2")), DerivationError);
}

TEST_CASE("rule sequences") {
  const auto rules = rule_sequence(Annotation::parse("1100100"));
  CHECK(rules == std::vector<Rule>{Rule::Speedup0, Rule::Speedup1, Rule::Slowdown, Rule::Slowdown, Rule::Speedup1,
                                   Rule::Slowdown, Rule::Slowdown});
  int depth = 0;
  for (Rule r : rules) depth += block_delta(r);
  CHECK(depth == 0);
}

TEST_CASE("replay of the square-root-two annotation") {
  std::vector<Rational> xs{Rational(1)};
  const auto proof = replay(Annotation::parse("100"), R("7/5"), R("2"), xs);
  REQUIRE(proof.lines.size() == 4);
  CHECK(proof.lines.back() == SimpleClass::dts(R("49/25")));
  CHECK(proof.wins());
  CHECK(verify_proof(proof).empty());

  const auto lost = replay(Annotation::parse("100"), R("3/2"), R("2"), xs);
  CHECK(lost.lines.back().dts_speed() == R("9/4"));
  CHECK_FALSE(lost.wins());
}

TEST_CASE("replay of the second worked example") {
  const auto proof = example_two(R("8/5"));
  REQUIRE(proof.lines.size() == 8);
  CHECK(proof.initial_speed == R("3.28"));
  CHECK(proof.lines.back() == SimpleClass::dts(R("3.2768")));
  CHECK(proof.margin() == R("3.28") - R("3.2768"));
  CHECK(verify_proof(proof).empty());
  CHECK(proof.lines[3] == cls({blk(E, "1.28", "1.28"), blk(A, "1", "1")}, "1.6"));
  CHECK(proof.lines[4] == cls({blk(E, "1.28", "1.28")}, "2.56"));
}

TEST_CASE("losing parameters are reported") {
  // c^2/2 + 2 = 3.29605 but c^4/2 = 3.3597... at c = 1.61
  const auto proof = example_two(R("1.61"));
  CHECK_FALSE(proof.wins());
  const auto v = verify_proof(proof);
  REQUIRE(v.size() == 1);
  CHECK(v[0].line == 7);
  CHECK(v[0].message.find("exceeds first exponent") != std::string::npos);
}

TEST_CASE("tampering is detected at the changed line") {
  auto proof = example_two(R("8/5"));
  const auto& old = proof.lines[4];
  proof.lines[4] = SimpleClass(old.blocks(), old.dts_speed() + R("0.01"), old.dts_input());
  const auto v = verify_proof(proof);
  REQUIRE_FALSE(v.empty());
  CHECK(v[0].line == 4);

  auto fewer = example_two(R("8/5"));
  fewer.speedup_params.pop_back();
  CHECK_FALSE(verify_proof(fewer).empty());

  auto flipped = example_two(R("8/5"));
  flipped.lines[1] = apply_speedup0(flipped.lines[0], R("1.28"), A);
  CHECK_FALSE(verify_proof(flipped).empty());
}

TEST_CASE("replay guards its preconditions") {
  const auto ann = Annotation::parse("100");
  std::vector<Rational> one{Rational(1)};
  std::vector<Rational> none;
  std::vector<Rational> big{Rational(2)};
  CHECK_THROWS_AS(replay(ann, R("1/2"), R("2"), one), DerivationError);
  CHECK_THROWS_AS(replay(ann, R("3/2"), R("1/2"), one), DerivationError);
  CHECK_THROWS_AS(replay(ann, R("3/2"), R("2"), none), DerivationError);
  CHECK_THROWS_AS(replay(ann, R("3/2"), R("2"), big), DerivationError);
}

TEST_CASE("rule 2 sequences replay") {
  const std::vector<RuleApplication> steps{{Rule::Speedup0, R("1")}, {Rule::Speedup2, R("1/2")},
                                           {Rule::Slowdown, std::nullopt}, {Rule::Slowdown, std::nullopt},
                                           {Rule::Slowdown, std::nullopt}, {Rule::Slowdown, std::nullopt}};
  const auto lines = replay_rules(steps, R("6/5"), R("3"));
  REQUIRE(lines.size() == 7);
  CHECK(lines[2].depth() == 4);
  CHECK(lines[2].alternating());
  CHECK(lines.back().is_dts());
  for (const auto& l : lines) CHECK(l.alternating());
}

TEST_CASE("random valid parameters always replay to verifiable proofs") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> pct(1, 99);
  for (const char* text : {"100", "1100100", "11010010100", "1110001010100"}) {
    const auto ann = Annotation::parse(text);
    const auto rules = rule_sequence(ann);
    for (int trial = 0; trial < 20; ++trial) {
      const Rational c = frac(100 + pct(rng), 100);
      const Rational start = frac(100 + 3 * pct(rng), 100);
      std::vector<Rational> xs;
      SimpleClass line = SimpleClass::dts(start);
      for (Rule r : rules) {
        std::optional<Rational> x;
        if (is_speedup(r)) {
          x = line.dts_speed() * frac(pct(rng), 100);
          xs.push_back(*x);
        }
        line = apply_rule(line, {r, x}, c);
      }
      const auto proof = replay(ann, c, start, xs);
      for (const auto& v : verify_proof(proof)) {
        // Only the win condition may fail for arbitrary parameters.
        CHECK_FALSE(proof.wins());
        CHECK(v.message.find("exceeds first exponent") != std::string::npos);
      }
      for (const auto& l : proof.lines) CHECK(l.alternating());
    }
  }
}

}
