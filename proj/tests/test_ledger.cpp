#include "atp/ledger.hpp"
#include "atp/proof_io.hpp"
#include "atp/search.hpp"
#include "scratch.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace atp;
namespace fs = std::filesystem;

namespace {

LedgerMeta meta_for(std::size_t max_length, const SearchOptions& opts = {}) {
  return {max_length, opts.precision, config_hash(opts)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExhaustiveSummary run(const fs::path& path, std::size_t max_length, std::size_t workers = 1,
                      std::optional<std::size_t> limit = std::nullopt) {
  Ledger ledger(path, meta_for(max_length));
  ExhaustiveOptions opts;
  opts.max_length = max_length;
  opts.workers = workers;
  opts.prefix_depth = 4;
  opts.max_new_records = limit;
  return exhaustive(ledger, opts);
}

}  // namespace

TEST_SUITE("ledger") {

TEST_CASE("record lines round trip") {
  LedgerRecord r;
  r.annotation = "100";
  r.length = 3;
  r.best_c = 1.4142135;
  r.feasible_c = Rational(741455, 524288);
  r.infeasible_c = Rational(1482911, 1048576);
  r.certificate = "100.json";
  r.solves = 22;
  r.pivots = 80;
  CHECK(record_from_line(record_to_line(r)) == r);
  CHECK(record_to_line(r).find('\n') == std::string::npos);
  CHECK_THROWS_AS(record_from_line("{\"annotation\": \"100\"}"), LedgerError);
  CHECK_THROWS_AS(record_from_line("not json"), LedgerError);
}

TEST_CASE("exhaustive run to length seven") {
  Scratch dir("ledger7");
  const auto summary = run(dir / "l.jsonl", 7);
  CHECK(summary.total == 8);
  CHECK(summary.computed == 8);
  CHECK_FALSE(summary.stopped_early);

  const auto contents = read_ledger(dir / "l.jsonl");
  REQUIRE(contents.meta);
  CHECK(contents.meta->max_length == 7);
  CHECK(contents.records.size() == 8);
  CHECK(audit_certificates(dir / "l.jsonl").empty());

  const auto rep = report(contents.records);
  REQUIRE(rep.rows.size() == 3);
  CHECK(rep.rows[2].argmax == "1100100");
  CHECK(std::abs(rep.rows[2].max_best_c - 1.6004) < 1e-3);
  for (std::size_t i = 1; i < rep.rows.size(); ++i) CHECK(rep.rows[i].max_best_c >= rep.rows[i - 1].max_best_c);
}

TEST_CASE("rerunning a finished ledger computes nothing") {
  Scratch dir("rerun");
  run(dir / "l.jsonl", 5);
  const std::string before = slurp(dir / "l.jsonl");
  const auto again = run(dir / "l.jsonl", 5);
  CHECK(again.computed == 0);
  CHECK(again.already_present == 3);
  CHECK(slurp(dir / "l.jsonl") == before);
}

TEST_CASE("a cut-off final line is dropped on resume") {
  Scratch dir("truncated");
  const auto path = dir / "l.jsonl";
  run(path, 7, 1, 4);
  const auto full = read_ledger(path).records.size();
  CHECK(full == 4);
  {
    std::ofstream out(path, std::ios::app | std::ios::binary);
    out << "{\"annotation\": \"110";
  }
  const auto damaged = read_ledger(path);
  CHECK(damaged.truncated_tail);
  CHECK(damaged.records.size() == full);
  {
    Ledger ledger(path, meta_for(7));
    CHECK(ledger.resumed_with_truncation());
    CHECK(ledger.size() == full);
  }
  CHECK_FALSE(read_ledger(path).truncated_tail);
  const auto rest = run(path, 7);
  CHECK(rest.already_present == 4);
  CHECK(rest.computed == 4);
  CHECK(audit_certificates(path).empty());
}

TEST_CASE("damage in the middle of a ledger is an error") {
  Scratch dir("middle");
  const auto path = dir / "l.jsonl";
  run(path, 5);
  std::string text = slurp(path);
  const auto second = text.find('\n', text.find('\n') + 1);
  text.insert(second + 1, "garbage\n");
  std::ofstream(path, std::ios::binary) << text;
  CHECK_THROWS_AS(read_ledger(path), LedgerError);
}

TEST_CASE("metadata must match on resume") {
  Scratch dir("meta");
  const auto path = dir / "l.jsonl";
  run(path, 5);
  CHECK_THROWS_AS(Ledger(path, meta_for(7)), LedgerError);
  SearchOptions other;
  other.precision = 1e-4;
  CHECK_THROWS_AS(Ledger(path, meta_for(5, other)), LedgerError);
}

TEST_CASE("merging a seed ledger imports verified records") {
  Scratch dir("merge");
  run(dir / "seed.jsonl", 5);
  Ledger target(dir / "t.jsonl", meta_for(7));
  CHECK(target.merge_from(dir / "seed.jsonl") == 3);
  CHECK(target.size() == 3);
  CHECK(target.merge_from(dir / "seed.jsonl") == 0);
  CHECK(fs::exists(target.certificate_dir() / "11000.json"));
}

TEST_CASE("a forged seed certificate blocks the merge") {
  Scratch dir("forged");
  run(dir / "seed.jsonl", 5);
  const auto cert = certificate_dir(dir / "seed.jsonl") / "10100.json";
  Proof p = read_proof_json(slurp(cert));
  const auto& old = p.lines[2];
  p.lines[2] = SimpleClass(old.blocks(), old.dts_speed() / 2, old.dts_input());
  std::ofstream(cert, std::ios::binary) << write_proof_json(p);

  const auto problems = audit_certificates(dir / "seed.jsonl");
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].annotation == "10100");

  Ledger target(dir / "t.jsonl", meta_for(5));
  CHECK_THROWS_AS(target.merge_from(dir / "seed.jsonl"), LedgerError);
}

TEST_CASE("missing certificates are reported") {
  Scratch dir("missing");
  run(dir / "l.jsonl", 5);
  fs::remove(certificate_dir(dir / "l.jsonl") / "100.json");
  const auto problems = audit_certificates(dir / "l.jsonl");
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].message.find("missing") != std::string::npos);
}

TEST_CASE("worker count does not change the results") {
  Scratch dir("workers");
  run(dir / "one.jsonl", 9, 1);
  run(dir / "three.jsonl", 9, 3);
  CHECK(canonical_text(read_ledger(dir / "one.jsonl").records) ==
        canonical_text(read_ledger(dir / "three.jsonl").records));
}

TEST_CASE("cancel flag stops the run") {
  Scratch dir("cancel");
  Ledger ledger(dir / "l.jsonl", meta_for(9));
  std::atomic<bool> cancel{false};
  ExhaustiveOptions opts;
  opts.max_length = 9;
  opts.cancel = &cancel;
  std::size_t calls = 0;
  opts.progress = [&](std::size_t done, std::size_t total) {
    CHECK(total == 22);
    if (++calls == 5) cancel = true;
    CHECK(done == calls);
  };
  const auto s = exhaustive(ledger, opts);
  CHECK(s.stopped_early);
  CHECK(s.computed == 5);
  CHECK(ledger.size() == 5);
}

}
