#include "atp/search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace atp {

void SearchOptions::validate() const {
  if (!(precision > 0) || !std::isfinite(precision)) throw std::invalid_argument("precision must be positive");
  if (lo < 1) throw std::invalid_argument("bracket must start at c >= 1");
  if (!(lo < hi)) throw std::invalid_argument("bracket must satisfy lo < hi");
  solver.validate();
}

namespace {

struct Bracket {
  Rational lo;
  Rational hi;
  LpSolution at_lo;
};

using Probe = std::function<LpSolution(const Rational&)>;

Bracket bisect(const Probe& probe, const SearchOptions& options, const std::string& what) {
  LpSolution low = probe(options.lo);
  if (!low.feasible()) {
    throw SearchError(what + ": LP infeasible at the bracket's lower end c = " + to_string(options.lo));
  }
  if (probe(options.hi).feasible()) {
    throw SearchError(what + ": LP feasible at the bracket's upper end c = " + to_string(options.hi));
  }
  Bracket b{options.lo, options.hi, std::move(low)};
  const Rational width = from_double(options.precision);
  while (b.hi - b.lo > width) {
    Rational mid = (b.lo + b.hi) / 2;
    LpSolution s = probe(mid);
    if (s.feasible()) {
      b.lo = std::move(mid);
      b.at_lo = std::move(s);
    } else {
      b.hi = std::move(mid);
    }
  }
  return b;
}

Probe counting_probe(std::function<LinearProgram(const Rational&)> build, const SolverConfig& config,
                     SearchStats& stats) {
  return [build = std::move(build), &config, &stats](const Rational& c) {
    LpSolution s = solve(build(c), config);
    ++stats.solves;
    stats.pivots += s.stats.iterations;
    if (s.stats.exact_retry) ++stats.exact_retries;
    return s;
  };
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string format_double(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

}  // namespace

SearchResult best_c(const Annotation& annotation, const SearchOptions& options) {
  options.validate();
  const auto start = std::chrono::steady_clock::now();
  SearchStats stats;
  Probe probe = counting_probe([&](const Rational& c) { return build_lp(annotation, c); }, options.solver, stats);
  Bracket b = bisect(probe, options, annotation.to_string());
  Proof certificate = [&] {
    try {
      return extract_proof(annotation, b.lo, b.at_lo);
    } catch (const ExtractionError& e) {
      throw SearchError(annotation.to_string() + ": no certificate at c = " + to_string(b.lo) + ": " + e.what());
    }
  }();
  stats.seconds = seconds_since(start);
  const double mid = to_double((b.lo + b.hi) / 2);
  return SearchResult{annotation, mid, std::move(b.lo), std::move(b.hi), std::move(certificate), stats};
}

RuleSearchResult best_c(std::span<const Rule> rules, const SearchOptions& options) {
  options.validate();
  const auto start = std::chrono::steady_clock::now();
  RuleSearchResult result;
  std::vector<Rule> owned(rules.begin(), rules.end());
  Probe probe = counting_probe([&](const Rational& c) { return build_lp(owned, c); }, options.solver, result.stats);
  std::string name;
  for (Rule r : owned) name += is_speedup(r) ? "1" : "0";
  Bracket b = bisect(probe, options, name);
  result.feasible_c = b.lo;
  result.infeasible_c = b.hi;
  result.best_c = to_double((b.lo + b.hi) / 2);
  result.stats.seconds = seconds_since(start);
  return result;
}

std::string config_hash(const SearchOptions& options) {
  const SolverConfig& s = options.solver;
  std::string text = "precision=" + format_double("%.17g", options.precision) + ";lo=" + to_string(options.lo) +
                     ";hi=" + to_string(options.hi) + ";tol=" + format_double("%.17g", s.feasibility_tolerance) +
                     ";pivot=" + (s.pivot_rule == PivotRule::Bland ? "bland" : "dantzig") +
                     ";exact=" + (s.exact_mode ? "1" : "0") + ";max_iter=" + std::to_string(s.max_iterations) +
                     ";max_bits=" + std::to_string(s.max_bits) + ";certify=" + (s.certify ? "1" : "0");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

LedgerRecord to_record(const SearchResult& result) {
  LedgerRecord r;
  r.annotation = result.annotation.to_string();
  r.length = result.annotation.size();
  r.best_c = result.best_c;
  r.feasible_c = result.feasible_c;
  r.infeasible_c = result.infeasible_c;
  r.certificate = r.annotation + ".json";
  r.solves = result.stats.solves;
  r.pivots = result.stats.pivots;
  r.exact_retries = result.stats.exact_retries;
  return r;
}

std::vector<Shard> partition(std::size_t max_length, std::size_t prefix_depth) {
  if (max_length < 3 || max_length % 2 == 0) throw std::invalid_argument("max length must be odd and at least 3");
  std::vector<Shard> shards;
  for (std::size_t length = 3; length <= max_length; length += 2) {
    std::set<std::string> prefixes;
    enumerate(length, {}, [&](const Annotation& a) {
      prefixes.insert(a.to_string().substr(0, std::min(prefix_depth, length)));
      return true;
    });
    for (const auto& p : prefixes) shards.push_back({length, p});
  }
  return shards;
}

ExhaustiveSummary exhaustive(Ledger& ledger, const ExhaustiveOptions& options) {
  options.search.validate();
  const std::vector<Shard> shards = partition(options.max_length, std::max<std::size_t>(options.prefix_depth, 1));
  ExhaustiveSummary summary;
  for (std::size_t length = 3; length <= options.max_length; length += 2) {
    summary.total += count(length).get_ui();
  }

  std::atomic<std::size_t> next_shard{0};
  std::atomic<std::size_t> done{0};
  std::atomic<std::size_t> already{0};
  std::atomic<std::size_t> computed{0};
  std::atomic<std::size_t> reserved{0};
  std::atomic<bool> stop{false};
  std::mutex side_mutex;
  std::exception_ptr failure;

  auto work = [&] {
    try {
      while (!stop.load()) {
        const std::size_t i = next_shard.fetch_add(1);
        if (i >= shards.size()) break;
        enumerate(shards[i].length, shards[i].prefix, [&](const Annotation& a) {
          if (stop.load() || (options.cancel && options.cancel->load())) {
            stop = true;
            return false;
          }
          if (ledger.contains(a.to_string())) {
            ++already;
          } else {
            if (options.max_new_records && reserved.fetch_add(1) >= *options.max_new_records) {
              stop = true;
              return false;
            }
            SearchResult r = best_c(a, options.search);
            ledger.append(to_record(r), r.certificate);
            ++computed;
          }
          const std::size_t now = ++done;
          if (options.progress) {
            std::lock_guard lock(side_mutex);
            options.progress(now, summary.total);
          }
          return true;
        });
      }
    } catch (...) {
      std::lock_guard lock(side_mutex);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  const std::size_t workers = std::max<std::size_t>(options.workers, 1);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  summary.already_present = already.load();
  summary.computed = computed.load();
  summary.stopped_early = stop.load() || summary.already_present + summary.computed < summary.total;
  return summary;
}

std::vector<FamilyMember> fvm_members(std::size_t k_from, std::size_t k_to) {
  if (k_from < 1 || k_from > k_to) throw std::invalid_argument("family range must satisfy 1 <= from <= to");
  std::vector<FamilyMember> out;
  for (std::size_t k = k_from; k <= k_to; ++k) out.push_back({"k=" + std::to_string(k), family_fvm(k)});
  return out;
}

std::vector<FamilyMember> w_members(std::size_t outer_from, std::size_t outer_to, std::size_t inner_from,
                                    std::size_t inner_to) {
  if (outer_from > outer_to) throw std::invalid_argument("outer range must satisfy from <= to");
  if (inner_from > inner_to) throw std::invalid_argument("inner range must satisfy from <= to");
  std::vector<FamilyMember> out;
  for (std::size_t outer = outer_from; outer <= outer_to; ++outer) {
    for (std::size_t inner = inner_from; inner <= inner_to; ++inner) {
      out.push_back({"outer=" + std::to_string(outer) + ",inner=" + std::to_string(inner), family_w(outer, inner)});
    }
  }
  return out;
}

std::vector<FamilyPoint> family_sweep(const std::vector<FamilyMember>& members, const SearchOptions& options) {
  std::vector<FamilyPoint> out;
  out.reserve(members.size());
  for (const auto& m : members) out.push_back({m, best_c(m.annotation, options)});
  return out;
}

Report report(const std::vector<LedgerRecord>& records, const std::filesystem::path& cert_dir) {
  std::vector<LedgerRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const LedgerRecord& a, const LedgerRecord& b) {
    return a.length != b.length ? a.length < b.length : a.annotation < b.annotation;
  });
  std::map<std::size_t, ReportRow> by_length;
  for (const auto& r : sorted) {
    auto [it, fresh] = by_length.try_emplace(r.length);
    ReportRow& row = it->second;
    row.length = r.length;
    ++row.count;
    if (fresh || r.best_c > row.max_best_c) {
      row.max_best_c = r.best_c;
      row.argmax = r.annotation;
      row.certificate = cert_dir.empty() ? r.certificate : (cert_dir / r.certificate).string();
    }
  }
  Report out;
  for (auto& [length, row] : by_length) {
    if (!out.frontier || row.max_best_c > out.frontier->max_best_c) out.frontier = row;
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string report_text(const Report& report) {
  std::vector<std::vector<std::string>> table{{"length", "count", "max_best_c", "argmax", "certificate"}};
  for (const auto& r : report.rows) {
    table.push_back({std::to_string(r.length), std::to_string(r.count), format_double("%.6f", r.max_best_c), r.argmax,
                     r.certificate});
  }
  std::vector<std::size_t> width(5, 0);
  for (const auto& row : table) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  std::string out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::string cell = row[i];
      if (i + 1 < row.size()) cell.resize(width[i] + 2, ' ');
      line += cell;
    }
    out += line + "\n";
  }
  if (report.frontier) {
    out += "frontier: " + format_double("%.6f", report.frontier->max_best_c) + " at " + report.frontier->argmax +
           " (length " + std::to_string(report.frontier->length) + ")\n";
  }
  return out;
}

std::string report_csv(const Report& report) {
  std::string out = "length,count,max_best_c,argmax,certificate\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.length) + "," + std::to_string(r.count) + "," + format_double("%.9f", r.max_best_c) + "," +
           r.argmax + "," + r.certificate + "\n";
  }
  return out;
}

}  // namespace atp
