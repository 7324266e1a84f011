#include "atp/search.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

using namespace atp;

namespace {

Rational R(const char* text) { return parse_rational(text); }

// All normal-form rule sequences with at most `steps` rules.
std::vector<std::vector<Rule>> rule_sequences(std::size_t steps) {
  std::vector<std::vector<Rule>> out;
  std::vector<Rule> seq{Rule::Speedup0};
  std::function<void(int)> grow = [&](int depth) {
    if (depth == 0) {
      out.push_back(seq);
      return;
    }
    if (seq.size() == steps) return;
    for (Rule r : {Rule::Speedup1, Rule::Speedup2, Rule::Slowdown}) {
      const int next = depth + block_delta(r);
      if (next == 0 && seq.size() + 1 < 3) continue;
      seq.push_back(r);
      grow(next);
      seq.pop_back();
    }
  };
  grow(2);
  return out;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("square-root-two annotation") {
  const auto r = best_c(Annotation::parse("100"));
  CHECK(std::abs(r.best_c - std::sqrt(2.0)) <= 1e-6);
  // The exact bracket straddles the threshold c^2 = 2.
  CHECK(r.feasible_c * r.feasible_c <= 2);
  CHECK(r.infeasible_c * r.infeasible_c > 2);
  CHECK(r.infeasible_c - r.feasible_c <= from_double(1e-6));
  CHECK(r.certificate.c == r.feasible_c);
  CHECK(verify_proof(r.certificate).empty());
  CHECK(r.stats.solves >= 20);
}

TEST_CASE("second worked example reaches the root of c^4 - c^2 - 4") {
  const auto r = best_c(Annotation::parse("1100100"));
  auto f = [](const Rational& c) -> Rational { return c * c * c * c - c * c - 4; };
  CHECK(f(r.feasible_c) <= 0);
  CHECK(f(r.infeasible_c) > 0);
  CHECK(std::abs(r.best_c - 1.6004) < 1e-4);
  CHECK(verify_proof(r.certificate).empty());
}

TEST_CASE("two-speedup annotation sits between the family bounds") {
  const auto r = best_c(Annotation::parse("11000"));
  CHECK(r.best_c > 1.4142);
  CHECK(r.best_c < 1.6180);
  const auto fam = family_sweep(fvm_members(2, 2));
  CHECK(fam.at(0).result.best_c == r.best_c);
  CHECK(fam.at(0).member.label == "k=2");
}

TEST_CASE("coarser precision gives a wider bracket around the same value") {
  SearchOptions opts;
  opts.precision = 1e-3;
  const auto coarse = best_c(Annotation::parse("100"), opts);
  CHECK(coarse.infeasible_c - coarse.feasible_c <= from_double(1e-3));
  CHECK(std::abs(coarse.best_c - std::sqrt(2.0)) <= 1e-3);
}

TEST_CASE("bracket ends are confirmed") {
  SearchOptions opts;
  opts.lo = R("3/2");
  CHECK_THROWS_AS(best_c(Annotation::parse("100"), opts), SearchError);
  opts.lo = 1;
  opts.hi = R("6/5");
  CHECK_THROWS_AS(best_c(Annotation::parse("100"), opts), SearchError);
  opts.hi = R("1/2");
  CHECK_THROWS_AS(best_c(Annotation::parse("100"), opts), std::invalid_argument);
  opts = {};
  opts.precision = 0;
  CHECK_THROWS_AS(best_c(Annotation::parse("100"), opts), std::invalid_argument);
}

TEST_CASE("rule sequences of an annotation give the annotation's value") {
  for (const char* text : {"100", "11000", "1100100"}) {
    const auto ann = Annotation::parse(text);
    const auto rules = rule_sequence(ann);
    const auto a = best_c(ann);
    const auto b = best_c(std::span<const Rule>(rules));
    CHECK(a.feasible_c == b.feasible_c);
    CHECK(a.infeasible_c == b.infeasible_c);
  }
}

TEST_CASE("rule 2 is never needed up to nine steps") {
  double best_rule1 = 0;
  for (std::size_t length = 3; length <= 9; length += 2) {
    for (const auto& ann : enumerate(length)) best_rule1 = std::max(best_rule1, best_c(ann).best_c);
  }
  std::size_t with_rule2 = 0;
  for (const auto& seq : rule_sequences(9)) {
    if (std::find(seq.begin(), seq.end(), Rule::Speedup2) == seq.end()) continue;
    ++with_rule2;
    std::string name;
    for (Rule r : seq) name += rule_name(r) + std::string(" ");
    CAPTURE(name);
    CHECK(best_c(std::span<const Rule>(seq)).best_c <= best_rule1 + 1e-6);
  }
  CHECK(with_rule2 > 10);
}

TEST_CASE("family members") {
  const auto w = w_members(0, 1, 1, 2);
  REQUIRE(w.size() == 4);
  CHECK(w[0].label == "outer=0,inner=1");
  CHECK(w[0].annotation.to_string() == "10100");
  CHECK(w[3].annotation == family_w(1, 2));
  CHECK_THROWS(fvm_members(0, 3));
  CHECK_THROWS(fvm_members(3, 2));
  CHECK_THROWS(w_members(2, 1, 1, 1));
}

TEST_CASE("partition covers every annotation exactly once") {
  for (std::size_t depth : {1, 3, 6, 20}) {
    std::multiset<std::string> seen;
    for (const auto& shard : partition(13, depth)) {
      for (const auto& a : enumerate(shard.length, shard.prefix)) seen.insert(a.to_string());
    }
    std::multiset<std::string> all;
    for (std::size_t length = 3; length <= 13; length += 2) {
      for (const auto& a : enumerate(length)) all.insert(a.to_string());
    }
    CHECK(seen == all);
  }
  CHECK_THROWS(partition(8, 2));
}

TEST_CASE("config hash tracks every setting") {
  SearchOptions a;
  SearchOptions b;
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.precision = 1e-5;
  CHECK(config_hash(a) != config_hash(b));
  b = {};
  b.solver.pivot_rule = PivotRule::Bland;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("report rows") {
  CHECK(report({}).rows.empty());
  CHECK_FALSE(report({}).frontier);
  CHECK(report_text(report({})) == "length  count  max_best_c  argmax  certificate\n");
  CHECK(report_csv(report({})) == "length,count,max_best_c,argmax,certificate\n");

  std::vector<LedgerRecord> recs(3);
  recs[0].annotation = "100";
  recs[0].length = 3;
  recs[0].best_c = 1.4142135;
  recs[0].certificate = "100.json";
  recs[1].annotation = "11000";
  recs[1].length = 5;
  recs[1].best_c = 1.52;
  recs[1].certificate = "11000.json";
  recs[2].annotation = "10100";
  recs[2].length = 5;
  recs[2].best_c = 1.45;
  recs[2].certificate = "10100.json";
  const auto rep = report(recs, "certs");
  REQUIRE(rep.rows.size() == 2);
  CHECK(rep.rows[1].count == 2);
  CHECK(rep.rows[1].argmax == "11000");
  CHECK(rep.rows[1].certificate == "certs/11000.json");
  CHECK(rep.frontier->argmax == "11000");
  CHECK(report_csv(rep) ==
        "length,count,max_best_c,argmax,certificate\n"
        "3,1,1.414213500,100,certs/100.json\n"
        "5,2,1.520000000,11000,certs/11000.json\n");
  CHECK(report_text(rep).find("frontier: 1.520000 at 11000 (length 5)") != std::string::npos);
}

}
