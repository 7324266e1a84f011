#pragma once

#include "atp/annotation.hpp"
#include "atp/derivation.hpp"
#include "atp/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atp {

enum class Relation { LessEqual, Equal, GreaterEqual };

struct LinearTerm {
  std::size_t column = 0;
  Rational coefficient;
};

struct Constraint {
  std::vector<LinearTerm> terms;
  Relation relation = Relation::GreaterEqual;
  Rational rhs;
  std::string label;
};

/// Column layout of a proof LP. Line i runs from 0 to lines()-1; slot 1 is the
/// DTS part of the line, slots 2.. are quantifier blocks innermost first. The
/// a-column of a slot is its runtime exponent and the b-column the exponent of
/// the input it reads (the superscript in front of it; 1 for the outermost).
class VarIndex {
 public:
  VarIndex() = default;
  VarIndex(std::size_t lines, std::size_t slots, const std::vector<bool>& speedup_line);

  std::size_t lines() const noexcept { return lines_; }
  std::size_t slots() const noexcept { return slots_; }
  std::size_t num_columns() const noexcept { return 2 * lines_ * slots_ + x_lines_.size(); }

  std::size_t a(std::size_t line, std::size_t slot) const;
  std::size_t b(std::size_t line, std::size_t slot) const;
  /// Column of the speedup parameter used to produce `line`, if any.
  std::optional<std::size_t> x(std::size_t line) const;
  /// Lines produced by a speedup, in order; the k-th owns x column 2*lines*slots+k.
  const std::vector<std::size_t>& x_lines() const noexcept { return x_lines_; }

  std::string column_name(std::size_t column) const;

 private:
  std::size_t lines_ = 0;
  std::size_t slots_ = 0;
  std::vector<std::size_t> x_lines_;
  std::vector<std::optional<std::size_t>> x_of_line_;
};

/// Minimise objective . v subject to the constraints and v >= 0.
struct LinearProgram {
  std::size_t num_vars = 0;
  std::vector<Constraint> constraints;
  std::vector<Rational> objective;
  VarIndex index;
  Rational c;
  std::vector<Rule> rules;
};

enum class LpStatus { Feasible, Infeasible, Unbounded };

struct SolverStats {
  std::size_t iterations = 0;
  std::size_t phase1_iterations = 0;
  std::size_t presolve_fixed = 0;
  std::size_t presolve_merged = 0;
  std::size_t reduced_rows = 0;
  std::size_t reduced_columns = 0;
  bool exact = false;        // every pivot done in rational arithmetic
  bool certified = false;    // float basis re-solved exactly and found feasible
  bool exact_retry = false;  // float answer was doubtful and exact mode decided
};

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  /// One value per LP column; exact whenever feasible() and the solve was
  /// exact or certified.
  std::vector<Rational> values;
  Rational objective;
  SolverStats stats;

  bool feasible() const noexcept { return status == LpStatus::Feasible; }
};

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Compiles the annotation's rules at exponent c into the LP. Every max{u,v}
/// target t becomes t >= u, t >= v; the objective is the sum of all a-, b- and
/// x-columns. Throws std::invalid_argument for c < 1.
LinearProgram build_lp(const Annotation& annotation, const Rational& c);

/// Same construction for an explicit rule sequence, which may use Rule 2. The
/// sequence must be normal form: block count positive strictly inside, zero at
/// both ends. Throws std::invalid_argument otherwise.
LinearProgram build_lp(std::span<const Rule> rules, const Rational& c);

/// The LP point corresponding to a sequence of proof lines and parameters
/// (plug-in map). Lines must have the block counts the LP expects.
std::vector<Rational> lp_point(const LinearProgram& lp, std::span<const SimpleClass> lines,
                               std::span<const Rational> xs);
std::vector<Rational> lp_point(const LinearProgram& lp, const Proof& proof);

/// Default inward nudge for parameters that sit on a closed-interval endpoint.
Rational default_nudge();

/// Reads the initial exponent and the speedup parameters out of a feasible
/// solution, moves each parameter strictly inside (0, current DTS exponent)
/// by at most `nudge`, replays, and checks the result with verify_proof.
/// Throws ExtractionError.
Proof extract_proof(const Annotation& annotation, const Rational& c, const LpSolution& solution,
                    const Rational& nudge = default_nudge());

/// CPLEX-style LP text (objective, constraints, bounds) for external solvers.
std::string to_lp_text(const LinearProgram& lp, const std::string& title = {});

}  // namespace atp
