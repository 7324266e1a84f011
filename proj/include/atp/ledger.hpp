#pragma once

#include "atp/derivation.hpp"
#include "atp/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace atp {

class LedgerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Written once as the first line of a ledger.
struct LedgerMeta {
  std::size_t max_length = 0;
  double precision = 1e-6;
  std::string config_hash;

  bool operator==(const LedgerMeta&) const = default;
};

/// One line of the ledger. Timing is deliberately absent so that two runs
/// with the same settings write identical records.
struct LedgerRecord {
  std::string annotation;
  std::size_t length = 0;
  double best_c = 0.0;
  Rational feasible_c;
  Rational infeasible_c;
  /// File name inside the ledger's certificate directory.
  std::string certificate;
  std::size_t solves = 0;
  std::size_t pivots = 0;
  std::size_t exact_retries = 0;

  bool operator==(const LedgerRecord&) const = default;
};

std::string record_to_line(const LedgerRecord& record);
LedgerRecord record_from_line(const std::string& line);
std::string meta_to_line(const LedgerMeta& meta);

struct LedgerContents {
  std::optional<LedgerMeta> meta;
  std::vector<LedgerRecord> records;
  /// Byte offset just past the last well-formed line.
  std::uintmax_t valid_bytes = 0;
  bool truncated_tail = false;
};

/// Reads a ledger file. A malformed final line (a write cut short) is
/// reported through truncated_tail; a malformed line anywhere else throws.
LedgerContents read_ledger(const std::filesystem::path& path);

/// Certificates live next to the ledger in "<ledger file name>.certs/".
std::filesystem::path certificate_dir(const std::filesystem::path& ledger_path);

/// Record lines sorted by (length, annotation), one per line. Two ledgers
/// describe the same results iff these strings are equal.
std::string canonical_text(std::vector<LedgerRecord> records);

/// Append-only JSON-lines ledger keyed by annotation string. Safe to append
/// from several threads; each record is written with one call and flushed.
class Ledger {
 public:
  /// Creates the file (and certificate directory) or resumes an existing one.
  /// Resuming drops a cut-off final line and requires matching metadata.
  /// Throws LedgerError.
  Ledger(std::filesystem::path path, const LedgerMeta& meta);

  const std::filesystem::path& path() const noexcept { return path_; }
  const LedgerMeta& meta() const noexcept { return meta_; }
  std::filesystem::path certificate_dir() const { return atp::certificate_dir(path_); }

  bool contains(const std::string& annotation) const;
  std::size_t size() const;
  /// Snapshot sorted by (length, annotation).
  std::vector<LedgerRecord> records() const;
  bool resumed_with_truncation() const noexcept { return truncated_on_open_; }

  /// Writes the certificate (atomically, via rename) and then the record.
  /// Ignores an annotation that is already present. Throws LedgerError.
  void append(LedgerRecord record, const Proof& certificate);

  /// Copies records (and their certificates) from another ledger that are not
  /// yet present. Each imported certificate must verify at the record's
  /// feasible endpoint. Returns the number imported. Throws LedgerError.
  std::size_t merge_from(const std::filesystem::path& other);

 private:
  std::filesystem::path path_;
  LedgerMeta meta_;
  bool truncated_on_open_ = false;
  mutable std::mutex mutex_;
  std::ofstream out_;
  std::map<std::string, LedgerRecord> by_annotation_;
};

struct LedgerProblem {
  std::string annotation;
  std::string message;
};

/// Checks every record's certificate: present, parseable, same annotation,
/// c equal to the feasible endpoint, and valid under verify_proof.
std::vector<LedgerProblem> audit_certificates(const std::filesystem::path& ledger_path);

}  // namespace atp
