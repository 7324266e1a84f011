#include "atp/lp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <type_traits>

namespace atp {

void SolverConfig::validate() const {
  if (!(feasibility_tolerance > 0)) throw std::invalid_argument("feasibility tolerance must be positive");
  if (max_iterations == 0) throw std::invalid_argument("max_iterations must be positive");
  if (max_bits == 0) throw std::invalid_argument("max_bits must be positive");
}

namespace {

constexpr std::size_t kDegenerateStreak = 50;

using SparseRow = std::vector<std::pair<std::size_t, Rational>>;

// ---------------------------------------------------------------------------
// Presolve

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void attach(std::size_t child, std::size_t root) { parent_[find(child)] = find(root); }

 private:
  std::vector<std::size_t> parent_;
};

struct Presolved {
  bool infeasible = false;
  bool unbounded = false;
  std::size_t fixed_count = 0;
  std::size_t merged_count = 0;

  std::vector<SparseRow> rows;  // over reduced columns
  std::vector<Relation> relations;
  std::vector<Rational> rhs;
  std::vector<Rational> cost;  // per reduced column

  std::vector<std::optional<Rational>> fixed;         // per original root
  std::vector<std::size_t> root;                      // original column -> root
  std::vector<std::optional<std::size_t>> reduced_of;  // root -> reduced column
};

bool satisfied(const Rational& lhs, Relation rel, const Rational& rhs) {
  switch (rel) {
    case Relation::LessEqual: return lhs <= rhs;
    case Relation::Equal: return lhs == rhs;
    case Relation::GreaterEqual: return lhs >= rhs;
  }
  return false;
}

Presolved presolve(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars;
  Presolved out;
  UnionFind sets(n);
  std::vector<std::optional<Rational>> fixed(n);

  struct WorkRow {
    SparseRow terms;
    Relation relation;
    Rational rhs;
    bool active = true;
  };
  std::vector<WorkRow> work;
  work.reserve(lp.constraints.size());
  for (const auto& con : lp.constraints) {
    WorkRow row{{}, con.relation, con.rhs, true};
    for (const auto& term : con.terms) {
      if (term.column >= n) throw std::invalid_argument("constraint '" + con.label + "' references column " +
                                                        std::to_string(term.column) + " beyond the LP");
      row.terms.emplace_back(term.column, term.coefficient);
    }
    work.push_back(std::move(row));
  }

  auto normalize = [&](WorkRow& row) {
    std::map<std::size_t, Rational> merged;
    for (auto& [col, coef] : row.terms) {
      const std::size_t r = sets.find(col);
      if (fixed[r]) {
        row.rhs -= coef * *fixed[r];
      } else {
        merged[r] += coef;
      }
    }
    row.terms.clear();
    for (auto& [col, coef] : merged) {
      if (coef != 0) row.terms.emplace_back(col, std::move(coef));
    }
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& row : work) {
      if (!row.active) continue;
      normalize(row);
      if (row.terms.empty()) {
        if (!satisfied(Rational(0), row.relation, row.rhs)) {
          out.infeasible = true;
          return out;
        }
        row.active = false;
        continue;
      }
      if (row.terms.size() == 1) {
        const auto& [col, coef] = row.terms.front();
        Rational bound = row.rhs / coef;
        Relation rel = row.relation;
        if (coef < 0 && rel != Relation::Equal) {
          rel = rel == Relation::LessEqual ? Relation::GreaterEqual : Relation::LessEqual;
        }
        if (rel == Relation::Equal) {
          if (bound < 0) {
            out.infeasible = true;
            return out;
          }
          fixed[col] = bound;
          ++out.fixed_count;
          row.active = false;
          changed = true;
        } else if (rel == Relation::GreaterEqual && bound <= 0) {
          row.active = false;
        } else if (rel == Relation::LessEqual && bound < 0) {
          out.infeasible = true;
          return out;
        }
        continue;
      }
      if (row.terms.size() == 2 && row.relation == Relation::Equal && row.rhs == 0 &&
          row.terms[0].second == -row.terms[1].second) {
        sets.attach(row.terms[1].first, row.terms[0].first);
        ++out.merged_count;
        row.active = false;
        changed = true;
      }
    }
  }

  out.root.resize(n);
  out.fixed.resize(n);
  out.reduced_of.assign(n, std::nullopt);
  for (std::size_t j = 0; j < n; ++j) {
    out.root[j] = sets.find(j);
    out.fixed[j] = fixed[j];
  }

  std::vector<Rational> root_cost(n, Rational(0));
  for (std::size_t j = 0; j < n; ++j) {
    if (!fixed[out.root[j]]) root_cost[out.root[j]] += lp.objective[j];
  }

  for (auto& row : work) {
    if (!row.active) continue;
    for (auto& [col, coef] : row.terms) {
      if (!out.reduced_of[col]) {
        out.reduced_of[col] = out.cost.size();
        out.cost.push_back(root_cost[col]);
      }
      col = *out.reduced_of[col];
    }
    out.rows.push_back(std::move(row.terms));
    out.relations.push_back(row.relation);
    out.rhs.push_back(std::move(row.rhs));
  }
  // A free-standing root with negative cost runs off to infinity.
  for (std::size_t j = 0; j < n; ++j) {
    if (out.root[j] == j && !fixed[j] && !out.reduced_of[j] && root_cost[j] < 0) out.unbounded = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Standard form shared by the float and rational tableaux

enum class ColumnKind { Structural, Slack, Surplus, Artificial };

struct StandardForm {
  std::size_t rows = 0;
  std::size_t structural = 0;
  std::vector<ColumnKind> kinds;
  std::vector<std::size_t> owner_row;  // aux column -> row
  std::vector<SparseRow> matrix;       // sign-normalised structural part
  std::vector<Rational> rhs;           // >= 0
  std::vector<std::size_t> initial_basis;
};

StandardForm standard_form(const Presolved& p) {
  StandardForm sf;
  sf.rows = p.rows.size();
  sf.structural = p.cost.size();
  sf.kinds.assign(sf.structural, ColumnKind::Structural);
  sf.owner_row.assign(sf.structural, 0);
  sf.initial_basis.resize(sf.rows);
  for (std::size_t r = 0; r < sf.rows; ++r) {
    SparseRow row = p.rows[r];
    Rational rhs = p.rhs[r];
    Relation rel = p.relations[r];
    if (rhs < 0) {
      for (auto& [col, coef] : row) coef = -coef;
      rhs = -rhs;
      if (rel == Relation::LessEqual) {
        rel = Relation::GreaterEqual;
      } else if (rel == Relation::GreaterEqual) {
        rel = Relation::LessEqual;
      }
    }
    sf.matrix.push_back(std::move(row));
    sf.rhs.push_back(std::move(rhs));
    auto add_column = [&](ColumnKind kind) {
      sf.kinds.push_back(kind);
      sf.owner_row.push_back(r);
      return sf.kinds.size() - 1;
    };
    switch (rel) {
      case Relation::LessEqual: sf.initial_basis[r] = add_column(ColumnKind::Slack); break;
      case Relation::GreaterEqual:
        add_column(ColumnKind::Surplus);
        sf.initial_basis[r] = add_column(ColumnKind::Artificial);
        break;
      case Relation::Equal: sf.initial_basis[r] = add_column(ColumnKind::Artificial); break;
    }
  }
  return sf;
}

// ---------------------------------------------------------------------------
// Dense tableau

template <class T>
struct Numeric;

template <>
struct Numeric<double> {
  static double from(const Rational& q) { return q.get_d(); }
  static bool is_zero(double v) { return v == 0.0; }
  static double flush(double v) { return std::fabs(v) < 1e-12 ? 0.0 : v; }
};

template <>
struct Numeric<Rational> {
  static Rational from(const Rational& q) { return q; }
  static bool is_zero(const Rational& v) { return sgn(v) == 0; }
  static const Rational& flush(const Rational& v) { return v; }
};

enum class Phase { One, Two };

struct TableauOutcome {
  LpStatus status = LpStatus::Infeasible;
  double phase1_objective = 0.0;
  std::vector<std::size_t> basis;
  std::vector<Rational> values;  // structural values, exact only for Rational
  std::vector<double> approx;    // structural values as doubles
  std::size_t iterations = 0;
  std::size_t phase1_iterations = 0;
};

template <class T>
class Tableau {
 public:
  Tableau(const StandardForm& sf, const std::vector<Rational>& cost, const SolverConfig& cfg)
      : sf_(sf), cost_(cost), cfg_(cfg), width_(sf.kinds.size() + 1), cells_(sf.rows * width_, T(0)),
        objective_(width_, T(0)), basis_(sf.initial_basis) {
    for (std::size_t r = 0; r < sf.rows; ++r) {
      for (const auto& [col, coef] : sf.matrix[r]) at(r, col) = Numeric<T>::from(coef);
      at(r, rhs_col()) = Numeric<T>::from(sf.rhs[r]);
    }
    for (std::size_t col = sf.structural; col < sf.kinds.size(); ++col) {
      at(sf.owner_row[col], col) = sf.kinds[col] == ColumnKind::Surplus ? T(-1) : T(1);
    }
    if constexpr (std::is_same_v<T, double>) {
      cost_tol_ = 1e-10;
      pivot_tol_ = 1e-9;
    }
  }

  void set_iteration_cap(std::size_t cap) { iteration_cap_ = cap; }

  TableauOutcome run() {
    TableauOutcome out;
    // Phase 1: minimise the sum of artificial variables.
    std::fill(objective_.begin(), objective_.end(), T(0));
    for (std::size_t col = 0; col < sf_.kinds.size(); ++col) {
      if (sf_.kinds[col] == ColumnKind::Artificial) objective_[col] = T(1);
    }
    for (std::size_t r = 0; r < sf_.rows; ++r) {
      if (sf_.kinds[basis_[r]] == ColumnKind::Artificial) subtract_row_from_objective(r, T(1));
    }
    iterate(Phase::One);
    out.phase1_iterations = iterations_;
    T phase1 = -objective_[rhs_col()];
    if constexpr (std::is_same_v<T, double>) {
      out.phase1_objective = std::max(0.0, phase1);
      if (phase1 > cfg_.feasibility_tolerance) {
        out.status = LpStatus::Infeasible;
        out.iterations = iterations_;
        out.basis = basis_;
        return out;
      }
    } else {
      out.phase1_objective = phase1.get_d();
      if (sgn(phase1) > 0) {
        out.status = LpStatus::Infeasible;
        out.iterations = iterations_;
        out.basis = basis_;
        return out;
      }
    }

    // Move zero-level artificials out of the basis where a real column can replace them.
    for (std::size_t r = 0; r < sf_.rows; ++r) {
      if (sf_.kinds[basis_[r]] != ColumnKind::Artificial) continue;
      for (std::size_t col = 0; col < sf_.kinds.size(); ++col) {
        if (sf_.kinds[col] == ColumnKind::Artificial) continue;
        if (magnitude_above(at(r, col), pivot_tol_)) {
          pivot(r, col);
          break;
        }
      }
    }

    // Phase 2: the real objective; artificial columns may no longer enter.
    std::fill(objective_.begin(), objective_.end(), T(0));
    for (std::size_t col = 0; col < sf_.structural; ++col) objective_[col] = Numeric<T>::from(cost_[col]);
    for (std::size_t r = 0; r < sf_.rows; ++r) {
      const std::size_t b = basis_[r];
      if (b < sf_.structural && !Numeric<T>::is_zero(objective_[b])) {
        T factor = objective_[b];
        subtract_row_from_objective(r, factor);
      }
    }
    out.status = iterate(Phase::Two) ? LpStatus::Feasible : LpStatus::Unbounded;
    out.iterations = iterations_;
    out.basis = basis_;
    out.values.assign(sf_.structural, Rational(0));
    out.approx.assign(sf_.structural, 0.0);
    for (std::size_t r = 0; r < sf_.rows; ++r) {
      if (basis_[r] >= sf_.structural) continue;
      if constexpr (std::is_same_v<T, double>) {
        out.approx[basis_[r]] = at(r, rhs_col());
      } else {
        out.values[basis_[r]] = at(r, rhs_col());
        out.approx[basis_[r]] = at(r, rhs_col()).get_d();
      }
    }
    return out;
  }

 private:
  std::size_t rhs_col() const { return width_ - 1; }
  T& at(std::size_t r, std::size_t c) { return cells_[r * width_ + c]; }

  static bool magnitude_above(const T& v, const T& tol) {
    if constexpr (std::is_same_v<T, double>) {
      return std::fabs(v) > tol;
    } else {
      (void)tol;
      return sgn(v) != 0;
    }
  }

  void subtract_row_from_objective(std::size_t r, const T& factor) {
    for (std::size_t c = 0; c < width_; ++c) {
      if (!Numeric<T>::is_zero(at(r, c))) objective_[c] -= factor * at(r, c);
    }
  }

  bool may_enter(std::size_t col, Phase phase) const {
    return phase == Phase::One || sf_.kinds[col] != ColumnKind::Artificial;
  }

  // Returns false when phase 2 finds an unbounded ray.
  bool iterate(Phase phase) {
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_ >= iteration_cap_) {
        throw IterationLimitError("simplex exceeded " + std::to_string(iteration_cap_) + " iterations");
      }
      const bool bland = cfg_.pivot_rule == PivotRule::Bland || degenerate_run > kDegenerateStreak;
      std::optional<std::size_t> entering;
      for (std::size_t col = 0; col + 1 < width_; ++col) {
        if (!may_enter(col, phase)) continue;
        if (!(objective_[col] < -cost_tol_)) continue;
        if (!entering || (!bland && objective_[col] < objective_[*entering])) entering = col;
        if (bland) break;
      }
      if (!entering) return true;

      std::optional<std::size_t> leaving;
      T best_ratio{};
      for (std::size_t r = 0; r < sf_.rows; ++r) {
        const T& coef = at(r, *entering);
        if (!(coef > pivot_tol_)) continue;
        T ratio = at(r, rhs_col()) / coef;
        if (!leaving || ratio < best_ratio || (ratio == best_ratio && basis_[r] < basis_[*leaving])) {
          leaving = r;
          best_ratio = ratio;
        }
      }
      if (!leaving) return false;
      if constexpr (std::is_same_v<T, double>) {
        // Among rows whose ratio is within rounding of the minimum, prefer the
        // largest pivot element (Harris); Bland keeps its index tie-break.
        if (!bland) {
          const double slack = 1e-11;
          for (std::size_t r = 0; r < sf_.rows; ++r) {
            const double coef = at(r, *entering);
            if (!(coef > pivot_tol_)) continue;
            if (at(r, rhs_col()) / coef <= best_ratio + slack / coef && coef > at(*leaving, *entering)) leaving = r;
          }
        }
      }
      if constexpr (std::is_same_v<T, double>) {
        degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      } else {
        degenerate_run = sgn(best_ratio) == 0 ? degenerate_run + 1 : 0;
      }
      pivot(*leaving, *entering);
      ++iterations_;
    }
  }

  void pivot(std::size_t row, std::size_t col) {
    const T pivot_value = at(row, col);
    std::vector<std::size_t> support;
    for (std::size_t c = 0; c < width_; ++c) {
      if (Numeric<T>::is_zero(at(row, c))) continue;
      if (c == col) {
        at(row, c) = T(1);
      } else {
        at(row, c) = Numeric<T>::flush(at(row, c) / pivot_value);
      }
      if (!Numeric<T>::is_zero(at(row, c))) support.push_back(c);
    }
    auto eliminate = [&](T* target) {
      if (Numeric<T>::is_zero(target[col])) return;
      const T factor = target[col];
      for (std::size_t c : support) {
        target[c] = Numeric<T>::flush(target[c] - factor * at(row, c));
        if constexpr (std::is_same_v<T, Rational>) {
          if (bit_length(target[c]) > cfg_.max_bits) {
            throw PrecisionLimitError("exact simplex entry exceeds " + std::to_string(cfg_.max_bits) + " bits");
          }
        }
      }
      target[col] = T(0);
    };
    for (std::size_t r = 0; r < sf_.rows; ++r) {
      if (r != row) eliminate(&cells_[r * width_]);
    }
    eliminate(objective_.data());
    basis_[row] = col;
    if constexpr (std::is_same_v<T, double>) {
      // Rounding can push a basic value just below zero; left alone it turns
      // later ratio tests negative.
      for (std::size_t r = 0; r < sf_.rows; ++r) {
        double& v = at(r, rhs_col());
        if (v < 0 && v > -1e-9) v = 0.0;
      }
    }
  }

  const StandardForm& sf_;
  const std::vector<Rational>& cost_;
  const SolverConfig& cfg_;
  std::size_t width_;
  std::vector<T> cells_;
  std::vector<T> objective_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
  std::size_t iteration_cap_ = cfg_.max_iterations;
  T cost_tol_{0};
  T pivot_tol_{0};
};

using DenseMatrix = std::vector<std::vector<Rational>>;

// Column k of the result is column basis[k] of the standard form.
DenseMatrix basis_matrix(const StandardForm& sf, const std::vector<std::size_t>& basis) {
  const std::size_t m = sf.rows;
  DenseMatrix mat(m, std::vector<Rational>(m, Rational(0)));
  std::vector<std::optional<std::size_t>> structural_pos(sf.structural);
  for (std::size_t k = 0; k < m; ++k) {
    if (basis[k] < sf.structural) structural_pos[basis[k]] = k;
  }
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto& [col, coef] : sf.matrix[r]) {
      if (structural_pos[col]) mat[r][*structural_pos[col]] = coef;
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t col = basis[k];
    if (col < sf.structural) continue;
    mat[sf.owner_row[col]][k] = sf.kinds[col] == ColumnKind::Surplus ? Rational(-1) : Rational(1);
  }
  return mat;
}

// Gauss-Jordan elimination for mat * z = rhs; nothing if mat is singular.
std::optional<std::vector<Rational>> solve_dense(DenseMatrix mat, std::vector<Rational> rhs) {
  const std::size_t m = mat.size();
  std::vector<std::size_t> row_of_var(m);
  std::vector<bool> used(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    std::optional<std::size_t> pivot_row;
    for (std::size_t r = 0; r < m; ++r) {
      if (!used[r] && sgn(mat[r][k]) != 0) {
        pivot_row = r;
        break;
      }
    }
    if (!pivot_row) return std::nullopt;
    const std::size_t pr = *pivot_row;
    used[pr] = true;
    row_of_var[k] = pr;
    const Rational inv = 1 / mat[pr][k];
    for (std::size_t c = 0; c < m; ++c) {
      if (sgn(mat[pr][c]) != 0) mat[pr][c] *= inv;
    }
    rhs[pr] *= inv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == pr || sgn(mat[r][k]) == 0) continue;
      const Rational factor = mat[r][k];
      for (std::size_t c = 0; c < m; ++c) {
        if (sgn(mat[pr][c]) != 0) mat[r][c] -= factor * mat[pr][c];
      }
      if (sgn(rhs[pr]) != 0) rhs[r] -= factor * rhs[pr];
    }
  }
  std::vector<Rational> z(m);
  for (std::size_t k = 0; k < m; ++k) z[k] = rhs[row_of_var[k]];
  return z;
}

// Exact x_B for the basis, or nothing if B is singular or x_B < 0 somewhere.
std::optional<std::vector<Rational>> exact_basic_values(const StandardForm& sf, const std::vector<std::size_t>& basis) {
  auto basic = solve_dense(basis_matrix(sf, basis), sf.rhs);
  if (!basic) return std::nullopt;
  for (const auto& v : *basic) {
    if (sgn(v) < 0) return std::nullopt;
  }
  return basic;
}

// A float basis proves feasibility if, solved exactly, it is primal feasible
// with every artificial at zero.
std::optional<std::vector<Rational>> certify_feasible(const StandardForm& sf, const std::vector<std::size_t>& basis) {
  auto basic = exact_basic_values(sf, basis);
  if (!basic) return std::nullopt;
  for (std::size_t k = 0; k < sf.rows; ++k) {
    if (sf.kinds[basis[k]] == ColumnKind::Artificial && sgn((*basic)[k]) != 0) return std::nullopt;
  }
  return basic;
}

// A float phase-1 basis proves infeasibility through its duals y (B^T y =
// c_B): if no column has negative reduced cost then y.A_j <= 0 for real and
// surplus columns and y_i <= 0 for slacks, so every x >= 0 with Ax (+/- s) = b
// has y.b <= 0. Hence y.b > 0 rules out a feasible point (Farkas).
bool certify_infeasible(const StandardForm& sf, const std::vector<std::size_t>& basis) {
  const std::size_t m = sf.rows;
  auto is_artificial = [&](std::size_t col) { return sf.kinds[col] == ColumnKind::Artificial; };
  DenseMatrix b = basis_matrix(sf, basis);
  DenseMatrix bt(m, std::vector<Rational>(m));
  std::vector<Rational> cost_b(m, Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t k = 0; k < m; ++k) bt[k][r] = b[r][k];
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (is_artificial(basis[k])) cost_b[k] = 1;
  }
  auto y = solve_dense(std::move(bt), std::move(cost_b));
  if (!y) return false;

  Rational yb(0);
  for (std::size_t r = 0; r < m; ++r) {
    if (sgn((*y)[r]) != 0) yb += (*y)[r] * sf.rhs[r];
  }
  if (sgn(yb) <= 0) return false;

  std::vector<Rational> priced(sf.kinds.size(), Rational(0));
  for (std::size_t r = 0; r < m; ++r) {
    if (sgn((*y)[r]) == 0) continue;
    for (const auto& [col, coef] : sf.matrix[r]) priced[col] += (*y)[r] * coef;
  }
  for (std::size_t col = sf.structural; col < sf.kinds.size(); ++col) {
    const Rational& yr = (*y)[sf.owner_row[col]];
    priced[col] = sf.kinds[col] == ColumnKind::Surplus ? Rational(-yr) : yr;
  }
  for (std::size_t col = 0; col < sf.kinds.size(); ++col) {
    const Rational reduced = (is_artificial(col) ? Rational(1) : Rational(0)) - priced[col];
    if (sgn(reduced) < 0) return false;
  }
  return true;
}

// Tightens every inequality row by a small, row-dependent dyadic amount. The
// float simplex runs on the result: the rows of a max-gate LP are massively
// degenerate (t - u >= 0 with t = u) and Bland-style tie breaking then picks
// tiny pivots. A point of the tightened problem is feasible for the original.
StandardForm tightened(const StandardForm& sf) {
  StandardForm out = sf;
  const Rational unit(mpz_class(1), mpz_class(1) << 34);
  for (std::size_t r = 0; r < out.rows; ++r) {
    const std::size_t aux = out.initial_basis[r];
    Rational delta = unit * Rational(static_cast<long>(1024 + (r * 2654435761u) % 1024));
    if (out.kinds[aux] == ColumnKind::Slack) {
      if (out.rhs[r] >= delta) out.rhs[r] -= delta;
    } else if (aux > 0 && out.kinds[aux - 1] == ColumnKind::Surplus && out.owner_row[aux - 1] == r) {
      out.rhs[r] += delta;
    }
  }
  return out;
}

LpSolution expand(const LinearProgram& lp, const Presolved& p, const std::vector<Rational>& reduced_values) {
  LpSolution sol;
  sol.status = LpStatus::Feasible;
  sol.values.assign(lp.num_vars, Rational(0));
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    const std::size_t r = p.root[j];
    if (p.fixed[r]) {
      sol.values[j] = *p.fixed[r];
    } else if (p.reduced_of[r]) {
      sol.values[j] = reduced_values[*p.reduced_of[r]];
    }
  }
  sol.objective = 0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (sgn(lp.objective[j]) != 0) sol.objective += lp.objective[j] * sol.values[j];
  }
  return sol;
}

LpSolution run_exact(const LinearProgram& lp, const Presolved& p, const StandardForm& sf, const SolverConfig& cfg,
                     SolverStats stats) {
  Tableau<Rational> tableau(sf, p.cost, cfg);
  TableauOutcome outcome = tableau.run();
  stats.exact = true;
  stats.iterations += outcome.iterations;
  stats.phase1_iterations += outcome.phase1_iterations;
  LpSolution sol;
  if (outcome.status == LpStatus::Feasible) sol = expand(lp, p, outcome.values);
  sol.status = outcome.status;
  sol.stats = stats;
  return sol;
}

}  // namespace

LpSolution solve(const LinearProgram& lp, const SolverConfig& config) {
  config.validate();
  if (lp.objective.size() != lp.num_vars) throw std::invalid_argument("objective length differs from num_vars");
  Presolved p = presolve(lp);
  SolverStats stats;
  stats.presolve_fixed = p.fixed_count;
  stats.presolve_merged = p.merged_count;
  stats.reduced_rows = p.rows.size();
  stats.reduced_columns = p.cost.size();
  if (p.infeasible || p.unbounded) {
    LpSolution sol;
    sol.status = p.infeasible ? LpStatus::Infeasible : LpStatus::Unbounded;
    sol.stats = stats;
    return sol;
  }
  const StandardForm sf = standard_form(p);
  if (config.exact_mode) return run_exact(lp, p, sf, config, stats);

  auto exact_retry = [&] {
    stats.exact_retry = true;
    return run_exact(lp, p, sf, config, stats);
  };
  const StandardForm perturbed = tightened(sf);
  Tableau<double> tableau(perturbed, p.cost, config);
  // Long float runs are almost always rounding-induced cycling; exact mode
  // settles those quickly.
  const std::size_t float_budget =
      config.certify ? std::min(config.max_iterations, 20 * (sf.rows + sf.kinds.size()) + 500) : config.max_iterations;
  tableau.set_iteration_cap(float_budget);
  TableauOutcome outcome;
  try {
    outcome = tableau.run();
  } catch (const IterationLimitError&) {
    if (!config.certify) throw;
    stats.iterations = float_budget;
    return exact_retry();
  }
  stats.iterations = outcome.iterations;
  stats.phase1_iterations = outcome.phase1_iterations;

  LpSolution sol;
  sol.status = outcome.status;
  if (outcome.status == LpStatus::Infeasible) {
    if (config.certify) {
      if (!certify_infeasible(sf, outcome.basis)) return exact_retry();
      stats.certified = true;
    }
    sol.stats = stats;
    return sol;
  }
  if (outcome.status == LpStatus::Unbounded) {
    sol.stats = stats;
    return sol;
  }
  if (config.certify) {
    // The basis usually certifies against the original rows; if a degenerate
    // value turns negative there, the tightened rows give a feasible point.
    auto basic = certify_feasible(sf, outcome.basis);
    if (!basic) basic = certify_feasible(perturbed, outcome.basis);
    if (!basic) return exact_retry();
    std::vector<Rational> reduced(sf.structural, Rational(0));
    for (std::size_t k = 0; k < sf.rows; ++k) {
      if (outcome.basis[k] < sf.structural) reduced[outcome.basis[k]] = (*basic)[k];
    }
    sol = expand(lp, p, reduced);
    stats.certified = true;
    sol.stats = stats;
    return sol;
  }
  std::vector<Rational> reduced(sf.structural);
  static const mpz_class kMaxDenominator("1000000000000");
  for (std::size_t j = 0; j < sf.structural; ++j) {
    reduced[j] = rationalize(outcome.approx[j], config.feasibility_tolerance * 1e-3, kMaxDenominator);
  }
  sol = expand(lp, p, reduced);
  sol.stats = stats;
  return sol;
}

std::optional<PointViolation> check_point(const LinearProgram& lp, std::span<const Rational> values) {
  if (values.size() != lp.num_vars) {
    return PointViolation{std::nullopt, std::nullopt,
                          "point has " + std::to_string(values.size()) + " coordinates, LP has " +
                              std::to_string(lp.num_vars) + " columns"};
  }
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (values[j] < 0) {
      return PointViolation{std::nullopt, j, lp.index.num_columns() == lp.num_vars
                                                 ? lp.index.column_name(j) + " is negative"
                                                 : "column " + std::to_string(j) + " is negative"};
    }
  }
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const Constraint& con = lp.constraints[r];
    Rational lhs(0);
    for (const auto& term : con.terms) lhs += term.coefficient * values[term.column];
    if (!satisfied(lhs, con.relation, con.rhs)) {
      return PointViolation{r, std::nullopt, "constraint " + std::to_string(r) + " (" + con.label + ") violated"};
    }
  }
  return std::nullopt;
}

}  // namespace atp
