#pragma once

#include "atp/annotation.hpp"
#include "atp/derivation.hpp"
#include "atp/ledger.hpp"
#include "atp/lp_solver.hpp"

#include <atomic>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atp {

class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchOptions {
  double precision = 1e-6;
  SolverConfig solver;
  /// Bisection bracket; feasibility is confirmed at lo and infeasibility at hi.
  Rational lo{1};
  Rational hi{2};

  void validate() const;
};

struct SearchStats {
  std::size_t solves = 0;
  std::size_t pivots = 0;
  std::size_t exact_retries = 0;
  double seconds = 0.0;
};

struct SearchResult {
  Annotation annotation;
  /// Midpoint of the final bracket.
  double best_c = 0.0;
  Rational feasible_c;
  Rational infeasible_c;
  /// Verified proof at feasible_c.
  Proof certificate;
  SearchStats stats;
};

/// Bisects c over the bracket until its width is at most the precision.
/// Throws SearchError if the bracket ends are not feasible / infeasible as
/// expected or the certificate fails to verify.
SearchResult best_c(const Annotation& annotation, const SearchOptions& options = {});

struct RuleSearchResult {
  double best_c = 0.0;
  Rational feasible_c;
  Rational infeasible_c;
  SearchStats stats;
};

/// Same bisection over an arbitrary normal-form rule sequence (Rule 2
/// allowed). No certificate: the LP solution is the evidence.
RuleSearchResult best_c(std::span<const Rule> rules, const SearchOptions& options = {});

/// Identifies the configuration that produced a ledger's records.
std::string config_hash(const SearchOptions& options);

LedgerRecord to_record(const SearchResult& result);

struct Shard {
  std::size_t length = 0;
  std::string prefix;
};

/// Disjoint prefixes covering every annotation of length 3..max_length.
std::vector<Shard> partition(std::size_t max_length, std::size_t prefix_depth);

struct ExhaustiveOptions {
  std::size_t max_length = 0;
  SearchOptions search;
  std::size_t workers = 1;
  std::size_t prefix_depth = 6;
  /// Stop cleanly once this many new records have been written.
  std::optional<std::size_t> max_new_records;
  /// Polled between annotations; set it to stop early.
  const std::atomic<bool>* cancel = nullptr;
  /// Called after every annotation (done counts ones already in the ledger).
  std::function<void(std::size_t done, std::size_t total)> progress;
};

struct ExhaustiveSummary {
  std::size_t total = 0;
  std::size_t already_present = 0;
  std::size_t computed = 0;
  bool stopped_early = false;
};

/// best_c for every annotation of odd length 3..max_length not already in the
/// ledger, spread over a worker pool by prefix shard.
ExhaustiveSummary exhaustive(Ledger& ledger, const ExhaustiveOptions& options);

struct FamilyMember {
  std::string label;
  Annotation annotation;
};

std::vector<FamilyMember> fvm_members(std::size_t k_from, std::size_t k_to);
std::vector<FamilyMember> w_members(std::size_t outer_from, std::size_t outer_to, std::size_t inner_from,
                                    std::size_t inner_to);

struct FamilyPoint {
  FamilyMember member;
  SearchResult result;
};

std::vector<FamilyPoint> family_sweep(const std::vector<FamilyMember>& members, const SearchOptions& options = {});

struct ReportRow {
  std::size_t length = 0;
  std::size_t count = 0;
  double max_best_c = 0.0;
  std::string argmax;
  std::string certificate;
};

struct Report {
  std::vector<ReportRow> rows;   // one per length, ascending
  std::optional<ReportRow> frontier;  // best over all lengths
};

/// Per-length maxima; ties go to the smaller annotation. `cert_dir` is
/// prefixed to certificate file names when non-empty.
Report report(const std::vector<LedgerRecord>& records, const std::filesystem::path& cert_dir = {});
std::string report_text(const Report& report);
std::string report_csv(const Report& report);

}  // namespace atp
