#include "atp/ledger.hpp"

#include "atp/proof_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <sstream>

namespace atp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LedgerError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool record_less(const LedgerRecord& a, const LedgerRecord& b) {
  if (a.length != b.length) return a.length < b.length;
  return a.annotation < b.annotation;
}

std::optional<std::string> certificate_problem(const LedgerRecord& record, const fs::path& file) {
  if (!fs::exists(file)) return "certificate " + file.string() + " is missing";
  std::optional<Proof> parsed;
  try {
    parsed = read_proof_json(read_file(file));
  } catch (const std::exception& e) {
    return std::string("certificate does not parse: ") + e.what();
  }
  const Proof& proof = *parsed;
  if (proof.annotation.to_string() != record.annotation) return "certificate is for " + proof.annotation.to_string();
  if (proof.c != record.feasible_c) {
    return "certificate c = " + to_string(proof.c) + " differs from feasible endpoint " + to_string(record.feasible_c);
  }
  auto violations = verify_proof(proof);
  if (!violations.empty()) return "certificate fails verification: " + violations.front().message;
  return std::nullopt;
}

}  // namespace

std::string record_to_line(const LedgerRecord& r) {
  json j{{"annotation", r.annotation},
         {"length", r.length},
         {"best_c", r.best_c},
         {"feasible_c", to_string(r.feasible_c)},
         {"infeasible_c", to_string(r.infeasible_c)},
         {"certificate", r.certificate},
         {"solves", r.solves},
         {"pivots", r.pivots},
         {"exact_retries", r.exact_retries}};
  return j.dump();
}

LedgerRecord record_from_line(const std::string& line) {
  try {
    json j = json::parse(line);
    LedgerRecord r;
    r.annotation = j.at("annotation").get<std::string>();
    r.length = j.at("length").get<std::size_t>();
    r.best_c = j.at("best_c").get<double>();
    r.feasible_c = parse_rational(j.at("feasible_c").get<std::string>());
    r.infeasible_c = parse_rational(j.at("infeasible_c").get<std::string>());
    r.certificate = j.at("certificate").get<std::string>();
    r.solves = j.value("solves", std::size_t{0});
    r.pivots = j.value("pivots", std::size_t{0});
    r.exact_retries = j.value("exact_retries", std::size_t{0});
    if (r.annotation.size() != r.length) throw LedgerError("length field disagrees with annotation");
    return r;
  } catch (const LedgerError&) {
    throw;
  } catch (const std::exception& e) {
    throw LedgerError(std::string("malformed ledger record: ") + e.what());
  }
}

std::string meta_to_line(const LedgerMeta& meta) {
  json j{{"type", "meta"},
         {"max_length", meta.max_length},
         {"precision", meta.precision},
         {"config_hash", meta.config_hash}};
  return j.dump();
}

namespace {

std::optional<LedgerMeta> meta_from_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!j.is_object() || j.value("type", "") != "meta") return std::nullopt;
  try {
    return LedgerMeta{j.at("max_length").get<std::size_t>(), j.at("precision").get<double>(),
                      j.at("config_hash").get<std::string>()};
  } catch (const std::exception& e) {
    throw LedgerError(std::string("malformed ledger metadata: ") + e.what());
  }
}

}  // namespace

LedgerContents read_ledger(const fs::path& path) {
  LedgerContents contents;
  const std::string text = read_file(path);
  std::size_t pos = 0;
  std::size_t line_number = 0;
  while (pos < text.size()) {
    const std::size_t end = text.find('\n', pos);
    ++line_number;
    if (end == std::string::npos) {
      // No newline: the writer was interrupted mid-record.
      contents.truncated_tail = true;
      break;
    }
    const std::string line = text.substr(pos, end - pos);
    const bool last = end + 1 >= text.size();
    if (!line.empty()) {
      try {
        if (auto meta = meta_from_line(line)) {
          if (contents.meta) throw LedgerError("second metadata line");
          contents.meta = *meta;
        } else {
          contents.records.push_back(record_from_line(line));
        }
      } catch (const LedgerError& e) {
        if (last) {
          contents.truncated_tail = true;
          break;
        }
        throw LedgerError(path.string() + ":" + std::to_string(line_number) + ": " + e.what());
      }
    }
    pos = end + 1;
    contents.valid_bytes = pos;
  }
  return contents;
}

fs::path certificate_dir(const fs::path& ledger_path) {
  fs::path dir = ledger_path;
  dir += ".certs";
  return dir;
}

std::string canonical_text(std::vector<LedgerRecord> records) {
  std::sort(records.begin(), records.end(), record_less);
  std::string out;
  for (const auto& r : records) out += record_to_line(r) + "\n";
  return out;
}

Ledger::Ledger(fs::path path, const LedgerMeta& meta) : path_(std::move(path)), meta_(meta) {
  std::error_code ec;
  const bool existing = fs::exists(path_, ec) && fs::file_size(path_, ec) > 0;
  bool write_meta = true;
  if (existing) {
    LedgerContents contents = read_ledger(path_);
    if (contents.truncated_tail) {
      fs::resize_file(path_, contents.valid_bytes, ec);
      if (ec) throw LedgerError("cannot truncate " + path_.string() + ": " + ec.message());
      truncated_on_open_ = true;
    }
    if (contents.meta) {
      if (contents.meta->precision != meta.precision || contents.meta->config_hash != meta.config_hash ||
          contents.meta->max_length != meta.max_length) {
        throw LedgerError("ledger " + path_.string() +
                          " was written with different settings; use a fresh ledger and --seed-results");
      }
      write_meta = false;
    } else if (!contents.records.empty()) {
      throw LedgerError("ledger " + path_.string() + " has records but no metadata line");
    }
    for (auto& r : contents.records) by_annotation_.emplace(r.annotation, std::move(r));
  }
  fs::create_directories(certificate_dir(), ec);
  if (ec) throw LedgerError("cannot create " + certificate_dir().string() + ": " + ec.message());
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw LedgerError("cannot open ledger " + path_.string() + " for writing");
  if (write_meta) {
    out_ << meta_to_line(meta_) << '\n';
    out_.flush();
    if (!out_) throw LedgerError("write to " + path_.string() + " failed");
  }
}

bool Ledger::contains(const std::string& annotation) const {
  std::lock_guard lock(mutex_);
  return by_annotation_.contains(annotation);
}

std::size_t Ledger::size() const {
  std::lock_guard lock(mutex_);
  return by_annotation_.size();
}

std::vector<LedgerRecord> Ledger::records() const {
  std::vector<LedgerRecord> out;
  {
    std::lock_guard lock(mutex_);
    for (const auto& [key, record] : by_annotation_) out.push_back(record);
  }
  std::sort(out.begin(), out.end(), record_less);
  return out;
}

void Ledger::append(LedgerRecord record, const Proof& certificate) {
  std::lock_guard lock(mutex_);
  if (by_annotation_.contains(record.annotation)) return;
  if (record.certificate.empty()) record.certificate = record.annotation + ".json";
  const fs::path target = certificate_dir() / record.certificate;
  fs::path temp = target;
  temp += ".tmp";
  {
    std::ofstream cert(temp, std::ios::binary | std::ios::trunc);
    cert << write_proof_json(certificate);
    cert.flush();
    if (!cert) throw LedgerError("cannot write certificate " + temp.string());
  }
  std::error_code ec;
  fs::rename(temp, target, ec);
  if (ec) throw LedgerError("cannot move certificate into place: " + ec.message());

  const std::string line = record_to_line(record) + "\n";
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) throw LedgerError("write to " + path_.string() + " failed");
  by_annotation_.emplace(record.annotation, std::move(record));
}

std::size_t Ledger::merge_from(const fs::path& other) {
  LedgerContents contents = read_ledger(other);
  if (contents.meta &&
      (contents.meta->precision != meta_.precision || contents.meta->config_hash != meta_.config_hash)) {
    throw LedgerError("seed ledger " + other.string() + " was produced with different solver settings");
  }
  const fs::path other_certs = atp::certificate_dir(other);
  std::size_t imported = 0;
  for (const auto& record : contents.records) {
    if (record.length > meta_.max_length || contains(record.annotation)) continue;
    const fs::path file = other_certs / record.certificate;
    if (auto problem = certificate_problem(record, file)) {
      throw LedgerError("seed record " + record.annotation + ": " + *problem);
    }
    append(record, read_proof_json(read_file(file)));
    ++imported;
  }
  return imported;
}

std::vector<LedgerProblem> audit_certificates(const fs::path& ledger_path) {
  LedgerContents contents = read_ledger(ledger_path);
  const fs::path dir = atp::certificate_dir(ledger_path);
  std::vector<LedgerProblem> problems;
  for (const auto& record : contents.records) {
    if (auto problem = certificate_problem(record, dir / record.certificate)) {
      problems.push_back({record.annotation, *problem});
    }
  }
  return problems;
}

}  // namespace atp
