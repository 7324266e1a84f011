#pragma once

#include "atp/lp_model.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace atp {

enum class PivotRule {
  Bland,    // smallest improving index; never cycles
  Dantzig,  // most negative reduced cost, falls back to Bland on long degenerate runs
};

struct SolverConfig {
  double feasibility_tolerance = 1e-9;
  PivotRule pivot_rule = PivotRule::Dantzig;
  /// Pivot in rational arithmetic throughout; verdicts carry no tolerance.
  bool exact_mode = false;
  std::size_t max_iterations = 100000;
  /// Exact mode refuses tableau entries wider than this many bits.
  std::size_t max_bits = 4096;
  /// Float mode: re-solve the final basis exactly so that a feasible verdict
  /// comes with values satisfying every constraint with no tolerance, and an
  /// infeasible verdict with an exactly optimal phase-1 basis of positive
  /// value. A basis failing its check, or a float run that stalls past a
  /// size-based budget, is handed to exact mode.
  bool certify = true;

  /// Throws std::invalid_argument for a non-positive tolerance or iteration cap.
  void validate() const;
};

class IterationLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PrecisionLimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two-phase dense simplex after a presolve that substitutes fixed columns and
/// merges columns tied by x_i = x_j rows. Deterministic for a given config.
LpSolution solve(const LinearProgram& lp, const SolverConfig& config = {});

struct PointViolation {
  std::optional<std::size_t> constraint;  // index into lp.constraints
  std::optional<std::size_t> column;      // negative column
  std::string message;
};

/// Exact evaluation of every constraint and of v >= 0 at `values`.
std::optional<PointViolation> check_point(const LinearProgram& lp, std::span<const Rational> values);

}  // namespace atp
