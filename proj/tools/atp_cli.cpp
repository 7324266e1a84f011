// atp: command-line front end for the alternation-trading proof search.
//
// Exit status: 0 success, 1 domain failure (invalid input, infeasible,
// verification failure, interrupted search), 2 usage error.

#include "atp/lp_model.hpp"
#include "atp/lp_solver.hpp"
#include "atp/proof_io.hpp"
#include "atp/search.hpp"

#include <CLI11.hpp>

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

using namespace atp;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver and search settings; environment first, flags on top.
struct Settings {
  SolverConfig solver;
  double precision = 1e-6;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  std::string pivot = "dantzig";
  bool no_certify = false;
};

template <class T>
T env_number(const char* name, T fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  std::istringstream in(raw);
  T value{};
  if (!(in >> value) || !in.eof()) throw UsageError(std::string("environment variable ") + name + " is not a number");
  return value;
}

Settings settings_from_env() {
  Settings s;
  s.solver.feasibility_tolerance = env_number("ATP_TOLERANCE", s.solver.feasibility_tolerance);
  s.solver.max_iterations = env_number("ATP_MAX_ITER", s.solver.max_iterations);
  s.solver.max_bits = env_number("ATP_MAX_BITS", s.solver.max_bits);
  s.solver.exact_mode = env_number("ATP_EXACT", 0) != 0;
  s.precision = env_number("ATP_PRECISION", s.precision);
  s.workers = env_number("ATP_WORKERS", s.workers);
  if (const char* pivot = std::getenv("ATP_PIVOT"); pivot && *pivot) s.pivot = pivot;
  return s;
}

void add_solver_flags(CLI::App* cmd, Settings& s) {
  cmd->add_option("--tolerance", s.solver.feasibility_tolerance, "float-mode feasibility tolerance [ATP_TOLERANCE]");
  cmd->add_option("--pivot", s.pivot, "pivot rule: dantzig or bland [ATP_PIVOT]")
      ->check(CLI::IsMember({"dantzig", "bland"}));
  cmd->add_flag("--exact", s.solver.exact_mode, "pivot in exact rational arithmetic [ATP_EXACT]");
  cmd->add_option("--max-iterations", s.solver.max_iterations, "simplex iteration cap [ATP_MAX_ITER]");
  cmd->add_option("--max-bits", s.solver.max_bits, "exact-mode entry size cap in bits [ATP_MAX_BITS]");
  cmd->add_flag("--no-certify", s.no_certify, "skip exact re-solve of float bases");
}

void add_precision_flag(CLI::App* cmd, Settings& s) {
  cmd->add_option("--precision", s.precision, "bracket width for the search on c [ATP_PRECISION]")
      ->check(CLI::PositiveNumber);
}

SearchOptions search_options(Settings& s) {
  if (s.pivot != "dantzig" && s.pivot != "bland") throw UsageError("unknown pivot rule '" + s.pivot + "'");
  s.solver.pivot_rule = s.pivot == "bland" ? PivotRule::Bland : PivotRule::Dantzig;
  s.solver.certify = !s.no_certify;
  SearchOptions options;
  options.precision = s.precision;
  options.solver = s.solver;
  try {
    options.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return options;
}

Annotation parse_annotation(const std::string& text) {
  try {
    return Annotation::parse(text);
  } catch (const InvalidAnnotation& e) {
    throw DomainFailure(std::string("invalid annotation '") + text + "': " + e.what());
  }
}

SearchResult search_one(const Annotation& annotation, const SearchOptions& options) {
  try {
    return best_c(annotation, options);
  } catch (const SearchError& e) {
    throw DomainFailure(e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainFailure("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.flush();
  if (!out) throw DomainFailure("cannot write " + path);
}

// JSON certificates, or the printed derivation form (starts with '#').
Proof load_proof(const std::string& path) {
  const std::string text = read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  try {
    if (first != std::string::npos && text[first] == '#') return parse_pretty(text);
    return read_proof_json(text);
  } catch (const ProofFormatError& e) {
    throw DomainFailure(path + ": " + e.what());
  }
}

int digits_for(double precision) {
  return std::clamp(static_cast<int>(std::ceil(-std::log10(precision))), 1, 17);
}

std::string fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  auto number = [&](const std::string& part) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos) {
      throw UsageError("bad range '" + text + "', expected N or FROM:TO");
    }
    return static_cast<std::size_t>(std::stoul(part));
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    auto n = number(text);
    return {n, n};
  }
  return {number(text.substr(0, colon)), number(text.substr(colon + 1))};
}

class Progress {
 public:
  explicit Progress(std::string label) : label_(std::move(label)), enabled_(isatty(STDERR_FILENO) != 0) {}
  void update(std::size_t done, std::size_t total) {
    if (!enabled_) return;
    const auto now = std::chrono::steady_clock::now();
    if (done != total && now - last_ < std::chrono::milliseconds(250)) return;
    last_ = now;
    std::fprintf(stderr, "\r%s %zu/%zu", label_.c_str(), done, total);
    if (done == total) std::fputc('\n', stderr);
    std::fflush(stderr);
  }
  void finish() {
    if (enabled_) std::fputc('\n', stderr);
  }

 private:
  std::string label_;
  bool enabled_;
  std::chrono::steady_clock::time_point last_{};
};

// --- commands --------------------------------------------------------------

int run_best_c(const std::string& annotation_text, std::string certificate_path, Settings& s) {
  const SearchOptions options = search_options(s);
  const Annotation annotation = parse_annotation(annotation_text);
  const SearchResult r = search_one(annotation, options);
  if (certificate_path.empty()) certificate_path = annotation.to_string() + ".proof.json";
  write_text(certificate_path, write_proof_json(r.certificate));
  const int digits = digits_for(options.precision);
  std::cout << "annotation " << annotation.to_string() << "\n"
            << "best_c " << fixed(r.best_c, digits) << "\n"
            << "bracket " << to_decimal(r.feasible_c, 12) << " " << to_decimal(r.infeasible_c, 12) << "\n"
            << "bracket_exact " << to_string(r.feasible_c) << " " << to_string(r.infeasible_c) << "\n"
            << "certificate " << certificate_path << "\n";
  std::cerr << "solves " << r.stats.solves << ", pivots " << r.stats.pivots << ", exact retries "
            << r.stats.exact_retries << ", " << fixed(r.stats.seconds, 3) << " s\n";
  return 0;
}

struct SearchArgs {
  std::size_t max_length = 0;
  std::string ledger = "ledger.jsonl";
  std::string seed;
  std::size_t prefix_depth = 6;
  std::size_t max_records = 0;
  bool csv = false;
};

int run_search(const SearchArgs& a, Settings& s) {
  if (a.max_length < 3 || a.max_length % 2 == 0) throw UsageError("--max-length must be odd and at least 3");
  ExhaustiveOptions options;
  options.max_length = a.max_length;
  options.search = search_options(s);
  options.workers = s.workers;
  options.prefix_depth = a.prefix_depth;
  if (a.max_records > 0) options.max_new_records = a.max_records;
  options.cancel = &g_interrupted;
  Progress progress("annotations");
  options.progress = [&](std::size_t done, std::size_t total) { progress.update(done, total); };

  const LedgerMeta meta{a.max_length, options.search.precision, config_hash(options.search)};
  ExhaustiveSummary summary;
  std::vector<LedgerRecord> records;
  std::filesystem::path cert_dir;
  try {
    Ledger ledger(a.ledger, meta);
    if (ledger.resumed_with_truncation()) std::cerr << "dropped a cut-off final record from " << a.ledger << "\n";
    if (!a.seed.empty()) std::cerr << "merged " << ledger.merge_from(a.seed) << " records from " << a.seed << "\n";
    std::signal(SIGINT, on_sigint);
    summary = exhaustive(ledger, options);
    std::signal(SIGINT, SIG_DFL);
    records = ledger.records();
    cert_dir = ledger.certificate_dir();
  } catch (const LedgerError& e) {
    throw DomainFailure(e.what());
  } catch (const SearchError& e) {
    throw DomainFailure(e.what());
  }
  std::cerr << summary.computed << " computed, " << summary.already_present << " already in ledger, "
            << summary.total << " total\n";
  const Report rep = report(records, cert_dir);
  std::cout << (a.csv ? report_csv(rep) : report_text(rep));
  if (g_interrupted) {
    std::cerr << "interrupted; rerun the same command to resume\n";
    return 1;
  }
  if (summary.stopped_early) std::cerr << "stopped after " << summary.computed << " new records; rerun to continue\n";
  return 0;
}

int run_enumerate(std::size_t length, const std::string& prefix, bool count_only) {
  try {
    if (count_only) {
      if (prefix.empty()) {
        std::cout << count(length).get_str() << "\n";
      } else {
        std::size_t n = 0;
        enumerate(length, prefix, [&](const Annotation&) { return ++n, true; });
        std::cout << n << "\n";
      }
      return 0;
    }
    enumerate(length, prefix, [](const Annotation& a) {
      std::cout << a.to_string() << "\n";
      return true;
    });
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return 0;
}

int run_family(const std::string& kind, const std::string& k_range, const std::string& outer_range,
               const std::string& inner_range, bool csv, Settings& s) {
  const SearchOptions options = search_options(s);
  std::vector<FamilyMember> members;
  try {
    if (kind == "fvm") {
      auto [from, to] = parse_range(k_range);
      members = fvm_members(from, to);
    } else {
      auto [outer_from, outer_to] = parse_range(outer_range);
      auto [inner_from, inner_to] = parse_range(inner_range);
      members = w_members(outer_from, outer_to, inner_from, inner_to);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const int digits = digits_for(options.precision);
  std::cout << (csv ? "parameter,annotation,best_c,feasible_c,delta\n" : "");
  std::optional<double> previous;
  bool monotone = true;
  Progress progress("members");
  for (std::size_t i = 0; i < members.size(); ++i) {
    const SearchResult r = search_one(members[i].annotation, options);
    progress.update(i + 1, members.size());
    const std::string delta = previous ? fixed(r.best_c - *previous, digits) : "";
    if (previous && r.best_c < *previous) monotone = false;
    previous = r.best_c;
    const std::string param = csv ? "\"" + members[i].label + "\"" : members[i].label;
    if (csv) {
      std::cout << param << "," << members[i].annotation.to_string() << "," << fixed(r.best_c, digits) << ","
                << to_string(r.feasible_c) << "," << delta << "\n";
    } else {
      std::cout << param << "  " << members[i].annotation.to_string() << "  " << fixed(r.best_c, digits)
                << (delta.empty() ? "" : "  " + delta) << "\n";
    }
    std::cout.flush();
  }
  std::cerr << (monotone ? "best_c nondecreasing along the sweep\n" : "best_c decreases somewhere in the sweep\n");
  return 0;
}

int run_verify(const std::string& path) {
  const Proof proof = load_proof(path);
  const auto violations = verify_proof(proof);
  if (violations.empty()) {
    std::cout << "valid: " << proof.annotation.to_string() << " at c = " << to_string(proof.c) << "\n";
    return 0;
  }
  std::cout << "invalid: " << violations.size() << " violation" << (violations.size() == 1 ? "" : "s") << "\n";
  for (const auto& v : violations) {
    if (v.line) {
      std::cout << "line " << *v.line << ": " << v.message << "\n";
    } else {
      std::cout << v.message << "\n";
    }
  }
  return 1;
}

int run_print(const std::string& path) {
  std::cout << pretty_print(load_proof(path));
  return 0;
}

int run_export_lp(const std::string& annotation_text, const std::string& c_text, const std::string& output) {
  const Annotation annotation = parse_annotation(annotation_text);
  Rational c;
  try {
    c = parse_rational(c_text);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--c: ") + e.what());
  }
  if (c < 1) throw UsageError("--c must be at least 1");
  const std::string text = to_lp_text(build_lp(annotation, c), annotation.to_string() + " at c = " + to_string(c));
  if (output.empty() || output == "-") {
    std::cout << text;
  } else {
    write_text(output, text);
  }
  return 0;
}

int run(int argc, char** argv) {
  Settings s = settings_from_env();

  CLI::App app{"Search and verify alternation-trading proofs of time-space lower bounds"};
  app.name("atp");
  app.require_subcommand(1);

  std::string annotation_text, certificate_path, proof_path, c_text, output, prefix, kind;
  std::size_t length = 0;
  bool count_only = false, csv = false;
  SearchArgs search_args;
  std::string k_range = "1:8", outer_range = "1:3", inner_range = "0:2";

  auto* best = app.add_subcommand("best-c", "bisect the best exponent c for one annotation");
  best->add_option("annotation", annotation_text, "annotation, e.g. 1100100 or [1,0,0]")->required();
  best->add_option("--certificate", certificate_path, "where to write the proof (default <annotation>.proof.json)");
  add_precision_flag(best, s);
  add_solver_flags(best, s);

  auto* search = app.add_subcommand("search", "exhaustive search over all annotations up to a length");
  search->add_option("--max-length", search_args.max_length, "longest annotation (odd, >= 3)")->required();
  search->add_option("--ledger", search_args.ledger, "JSON-lines ledger, resumed if present");
  search->add_option("--seed-results", search_args.seed, "merge records from another ledger first");
  search->add_option("--workers", s.workers, "worker threads [ATP_WORKERS]")->check(CLI::PositiveNumber);
  search->add_option("--prefix-depth", search_args.prefix_depth, "annotation prefix length used to shard work");
  search->add_option("--max-records", search_args.max_records, "stop after this many new records (0 = no limit)");
  search->add_flag("--csv", search_args.csv, "print the summary as CSV");
  add_precision_flag(search, s);
  add_solver_flags(search, s);

  auto* enumerate_cmd = app.add_subcommand("enumerate", "list valid annotations of one length");
  enumerate_cmd->add_option("--length", length, "annotation length (odd, >= 3)")->required();
  enumerate_cmd->add_option("--prefix", prefix, "only annotations starting with this bit string");
  enumerate_cmd->add_flag("--count-only", count_only, "print only the number of annotations");

  auto* family = app.add_subcommand("family", "best c along an annotation family");
  family->add_option("kind", kind, "fvm or w")->required()->check(CLI::IsMember({"fvm", "w"}));
  family->add_option("--k", k_range, "fvm parameter range FROM:TO");
  family->add_option("--outer", outer_range, "w outer range FROM:TO");
  family->add_option("--inner", inner_range, "w inner range FROM:TO");
  family->add_flag("--csv", csv, "print CSV");
  add_precision_flag(family, s);
  add_solver_flags(family, s);

  auto* verify = app.add_subcommand("verify", "check a proof file in exact arithmetic");
  verify->add_option("proof", proof_path, "proof JSON (or printed derivation)")->required();

  auto* print = app.add_subcommand("print", "print a proof file as a derivation");
  print->add_option("proof", proof_path, "proof JSON")->required();

  auto* export_lp = app.add_subcommand("export-lp", "write the LP for an annotation at a fixed c");
  export_lp->add_option("annotation", annotation_text, "annotation")->required();
  export_lp->add_option("--c", c_text, "exponent c, e.g. 1.4 or 7/5")->required();
  export_lp->add_option("--output,-o", output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::string message = e.what();
    throw UsageError(message.empty() ? "bad arguments" : message);
  }

  if (*best) return run_best_c(annotation_text, certificate_path, s);
  if (*search) return run_search(search_args, s);
  if (*enumerate_cmd) return run_enumerate(length, prefix, count_only);
  if (*family) return run_family(kind, k_range, outer_range, inner_range, csv, s);
  if (*verify) return run_verify(proof_path);
  if (*print) return run_print(proof_path);
  if (*export_lp) return run_export_lp(annotation_text, c_text, output);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "atp: usage error: " << e.what() << "\n";
    return 2;
  } catch (const DomainFailure& e) {
    std::cerr << "atp: " << e.what() << "\n";
    return 1;
  } catch (const IterationLimitError& e) {
    std::cerr << "atp: " << e.what() << "\n";
    return 1;
  } catch (const PrecisionLimitError& e) {
    std::cerr << "atp: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "atp: " << e.what() << "\n";
    return 1;
  }
}
