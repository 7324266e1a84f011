#include "atp/lp_model.hpp"

#include <algorithm>
#include <sstream>

namespace atp {

VarIndex::VarIndex(std::size_t lines, std::size_t slots, const std::vector<bool>& speedup_line)
    : lines_(lines), slots_(slots), x_of_line_(lines) {
  for (std::size_t line = 0; line < lines && line < speedup_line.size(); ++line) {
    if (speedup_line[line]) {
      x_of_line_[line] = 2 * lines_ * slots_ + x_lines_.size();
      x_lines_.push_back(line);
    }
  }
}

std::size_t VarIndex::a(std::size_t line, std::size_t slot) const {
  if (line >= lines_ || slot == 0 || slot > slots_) throw std::out_of_range("VarIndex::a");
  return 2 * (line * slots_ + (slot - 1));
}

std::size_t VarIndex::b(std::size_t line, std::size_t slot) const { return a(line, slot) + 1; }

std::optional<std::size_t> VarIndex::x(std::size_t line) const {
  if (line >= lines_) return std::nullopt;
  return x_of_line_[line];
}

std::string VarIndex::column_name(std::size_t column) const {
  const std::size_t grid = 2 * lines_ * slots_;
  if (column < grid) {
    const std::size_t cell = column / 2;
    return std::string(column % 2 == 0 ? "a_" : "b_") + std::to_string(cell / slots_) + "_" +
           std::to_string(cell % slots_ + 1);
  }
  if (column - grid < x_lines_.size()) return "x_" + std::to_string(x_lines_[column - grid]);
  throw std::out_of_range("VarIndex::column_name");
}

namespace {

std::vector<std::size_t> block_counts_of(std::span<const Rule> rules) {
  std::vector<std::size_t> counts{0};
  long height = 0;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const Rule rule = rules[i];
    if (rule == Rule::Speedup0 && height != 0) {
      throw std::invalid_argument("Speedup Rule 0 at step " + std::to_string(i + 1) + " needs a DTS line");
    }
    if (rule != Rule::Speedup0 && height == 0) {
      throw std::invalid_argument(std::string(rule_name(rule)) + " at step " + std::to_string(i + 1) +
                                  " needs quantifier blocks");
    }
    height += block_delta(rule);
    if (height == 0 && i + 1 < rules.size()) {
      throw std::invalid_argument("interior DTS line after step " + std::to_string(i + 1));
    }
    counts.push_back(static_cast<std::size_t>(height));
  }
  if (rules.empty() || height != 0) throw std::invalid_argument("rule sequence does not end on a DTS line");
  return counts;
}

class Builder {
 public:
  explicit Builder(LinearProgram& lp) : lp_(lp) {}

  void add(std::vector<LinearTerm> terms, Relation rel, Rational rhs, std::string label) {
    lp_.constraints.push_back({std::move(terms), rel, std::move(rhs), std::move(label)});
  }
  void equal(std::size_t u, std::size_t v, const std::string& label) {
    add({{u, Rational(1)}, {v, Rational(-1)}}, Relation::Equal, Rational(0), label);
  }
  void fix(std::size_t u, const Rational& value, const std::string& label) {
    add({{u, Rational(1)}}, Relation::Equal, value, label);
  }
  // u >= factor * v
  void at_least(std::size_t u, const Rational& factor, std::size_t v, const std::string& label) {
    add({{u, Rational(1)}, {v, Rational(-factor)}}, Relation::GreaterEqual, Rational(0), label);
  }
  void at_least(std::size_t u, const Rational& value, const std::string& label) {
    add({{u, Rational(1)}}, Relation::GreaterEqual, value, label);
  }

 private:
  LinearProgram& lp_;
};

}  // namespace

LinearProgram build_lp(std::span<const Rule> rules, const Rational& c) {
  if (c < 1) throw std::invalid_argument("c must be at least 1");
  const auto counts = block_counts_of(rules);
  const std::size_t lines = rules.size() + 1;
  const std::size_t slots = *std::max_element(counts.begin(), counts.end()) + 1;
  std::vector<bool> speedup_line(lines, false);
  for (std::size_t i = 0; i < rules.size(); ++i) speedup_line[i + 1] = is_speedup(rules[i]);

  LinearProgram lp;
  lp.c = c;
  lp.rules.assign(rules.begin(), rules.end());
  lp.index = VarIndex(lines, slots, speedup_line);
  lp.num_vars = lp.index.num_columns();
  lp.objective.assign(lp.num_vars, Rational(1));
  const VarIndex& v = lp.index;
  Builder add(lp);

  auto pin_unused = [&](std::size_t line) {
    for (std::size_t slot = counts[line] + 2; slot <= slots; ++slot) {
      const std::string tag = "line " + std::to_string(line) + " unused slot " + std::to_string(slot);
      add.fix(v.a(line, slot), Rational(0), tag + " a");
      add.fix(v.b(line, slot), Rational(0), tag + " b");
    }
  };

  add.at_least(v.a(0, 1), Rational(1), "first exponent >= 1");
  add.fix(v.b(0, 1), Rational(1), "first line reads the input");
  pin_unused(0);

  for (std::size_t i = 1; i < lines; ++i) {
    const Rule rule = rules[i - 1];
    const std::size_t p = i - 1;
    const std::string tag = "line " + std::to_string(i) + " ";
    pin_unused(i);
    if (rule == Rule::Slowdown) {
      for (auto [col, name] : {std::pair{v.a(p, 1), "a1"}, std::pair{v.a(p, 2), "a2"},
                               std::pair{v.b(p, 1), "b1"}, std::pair{v.b(p, 2), "b2"}}) {
        add.at_least(v.a(i, 1), c, col, tag + "slowdown >= c*" + name);
      }
      add.equal(v.b(i, 1), v.b(p, 2), tag + "slowdown input");
      for (std::size_t slot = 2; slot <= counts[i] + 1; ++slot) {
        add.equal(v.a(i, slot), v.a(p, slot + 1), tag + "shift a" + std::to_string(slot));
        add.equal(v.b(i, slot), v.b(p, slot + 1), tag + "shift b" + std::to_string(slot));
      }
      continue;
    }

    const std::size_t x = *v.x(i);
    add.add({{v.a(i, 1), Rational(1)}, {x, Rational(1)}, {v.a(p, 1), Rational(-1)}}, Relation::Equal, Rational(0),
            tag + "speedup dts");
    add.equal(v.b(i, 1), v.b(p, 1), tag + "speedup dts input");
    add.fix(v.a(i, 2), Rational(0), tag + "log-size block");
    add.at_least(v.b(i, 2), Rational(1), x, tag + "log-size block input >= x");
    add.at_least(v.b(i, 2), Rational(1), v.b(p, 1), tag + "log-size block input >= b");
    if (rule == Rule::Speedup1) {
      add.at_least(v.a(i, 3), Rational(1), v.a(p, 2), tag + "merged block >= old speed");
      add.at_least(v.a(i, 3), Rational(1), x, tag + "merged block >= x");
      add.equal(v.b(i, 3), v.b(p, 2), tag + "merged block input");
      for (std::size_t slot = 4; slot <= counts[i] + 1; ++slot) {
        add.equal(v.a(i, slot), v.a(p, slot - 1), tag + "shift a" + std::to_string(slot));
        add.equal(v.b(i, slot), v.b(p, slot - 1), tag + "shift b" + std::to_string(slot));
      }
    } else {
      // Rule 0 and Rule 2 open a fresh block guessing n^x.
      add.add({{v.a(i, 3), Rational(1)}, {x, Rational(-1)}}, Relation::Equal, Rational(0), tag + "new block = x");
      add.equal(v.b(i, 3), v.b(p, 1), tag + "new block input");
      for (std::size_t slot = 4; slot <= counts[i] + 1; ++slot) {
        add.equal(v.a(i, slot), v.a(p, slot - 2), tag + "shift a" + std::to_string(slot));
        add.equal(v.b(i, slot), v.b(p, slot - 2), tag + "shift b" + std::to_string(slot));
      }
    }
  }

  const std::size_t last = lines - 1;
  add.add({{v.a(0, 1), Rational(1)}, {v.a(last, 1), Rational(-1)}}, Relation::GreaterEqual, Rational(0),
          "first exponent >= last exponent");
  add.at_least(v.a(last, 1), Rational(1), "last exponent >= 1");
  add.fix(v.b(last, 1), Rational(1), "last line reads the input");
  return lp;
}

LinearProgram build_lp(const Annotation& annotation, const Rational& c) {
  const auto rules = rule_sequence(annotation);
  return build_lp(std::span<const Rule>(rules), c);
}

std::vector<Rational> lp_point(const LinearProgram& lp, std::span<const SimpleClass> lines,
                               std::span<const Rational> xs) {
  const VarIndex& v = lp.index;
  if (lines.size() != v.lines()) throw std::invalid_argument("line count does not match the LP");
  if (xs.size() != v.x_lines().size()) throw std::invalid_argument("parameter count does not match the LP");
  std::vector<Rational> point(lp.num_vars, Rational(0));
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& blocks = lines[i].blocks();
    const std::size_t k = blocks.size();
    if (k + 1 > v.slots()) throw std::invalid_argument("line has more blocks than the LP allows");
    point[v.a(i, 1)] = lines[i].dts_speed();
    point[v.b(i, 1)] = lines[i].dts_input();
    for (std::size_t p = 0; p < k; ++p) {
      const std::size_t slot = k + 1 - p;
      point[v.a(i, slot)] = blocks[p].speed;
      point[v.b(i, slot)] = p == 0 ? Rational(1) : blocks[p - 1].input;
    }
  }
  for (std::size_t j = 0; j < xs.size(); ++j) point[*v.x(v.x_lines()[j])] = xs[j];
  return point;
}

std::vector<Rational> lp_point(const LinearProgram& lp, const Proof& proof) {
  return lp_point(lp, std::span<const SimpleClass>(proof.lines), std::span<const Rational>(proof.speedup_params));
}

Rational default_nudge() { return Rational(1, 1000000000); }

Proof extract_proof(const Annotation& annotation, const Rational& c, const LpSolution& solution,
                    const Rational& nudge) {
  if (!solution.feasible()) throw ExtractionError("cannot extract a proof from an infeasible LP solution");
  const LinearProgram shape = build_lp(annotation, c);
  const VarIndex& v = shape.index;
  if (solution.values.size() != shape.num_vars) {
    throw ExtractionError("solution has " + std::to_string(solution.values.size()) + " values, LP has " +
                          std::to_string(shape.num_vars) + " columns");
  }
  const Rational initial = solution.values[v.a(0, 1)];
  const auto rules = rule_sequence(annotation);

  // Walk the derivation so each parameter can be clamped against the exponent
  // it actually splits.
  std::vector<Rational> xs;
  xs.reserve(v.x_lines().size());
  try {
    SimpleClass current = SimpleClass::dts(initial);
    for (std::size_t i = 0; i < rules.size(); ++i) {
      RuleApplication step{rules[i], std::nullopt};
      if (is_speedup(rules[i])) {
        Rational x = solution.values[*v.x(i + 1)];
        const Rational& top = current.dts_speed();
        const Rational step_in = min_of(nudge, Rational(top / 2));
        if (x <= 0) x = step_in;
        if (x >= top) x = top - step_in;
        xs.push_back(x);
        step.x = x;
      }
      current = apply_rule(current, step, c);
    }
  } catch (const DerivationError& e) {
    throw ExtractionError(std::string("replay failed: ") + e.what());
  }

  Proof proof = [&] {
    try {
      return replay(annotation, c, initial, xs);
    } catch (const DerivationError& e) {
      throw ExtractionError(std::string("replay failed: ") + e.what());
    }
  }();
  if (auto issues = verify_proof(proof); !issues.empty()) {
    throw ExtractionError("extracted proof does not verify: " + issues.front().message);
  }
  return proof;
}

namespace {

std::string lp_number(const Rational& value) {
  std::string exact = to_decimal(value, 17);
  return exact;
}

}  // namespace

std::string to_lp_text(const LinearProgram& lp, const std::string& title) {
  const VarIndex& v = lp.index;
  std::ostringstream out;
  out << "\\ " << (title.empty() ? "alternation-trading proof LP" : title) << "\n";
  out << "\\ c = " << to_string(lp.c) << "\n";
  out << "Minimize\n obj:";
  bool first = true;
  std::size_t on_line = 0;
  for (std::size_t col = 0; col < lp.num_vars; ++col) {
    if (lp.objective[col] == 0) continue;
    const Rational& coef = lp.objective[col];
    out << (first ? " " : (coef < 0 ? " - " : " + "));
    if (first && coef < 0) out << "- ";
    if (abs(coef) != 1) out << lp_number(abs(coef)) << " ";
    out << v.column_name(col);
    first = false;
    if (++on_line % 8 == 0) out << "\n  ";
  }
  if (first) out << " 0";
  out << "\nSubject To\n";
  for (std::size_t r = 0; r < lp.constraints.size(); ++r) {
    const Constraint& con = lp.constraints[r];
    out << " r" << r << ":";
    bool lead = true;
    for (const auto& term : con.terms) {
      const Rational& coef = term.coefficient;
      if (lead) {
        out << (coef < 0 ? " - " : " ");
      } else {
        out << (coef < 0 ? " - " : " + ");
      }
      if (abs(coef) != 1) out << lp_number(abs(coef)) << " ";
      out << v.column_name(term.column);
      lead = false;
    }
    if (lead) out << " 0 " << v.column_name(0);
    switch (con.relation) {
      case Relation::LessEqual: out << " <= "; break;
      case Relation::Equal: out << " = "; break;
      case Relation::GreaterEqual: out << " >= "; break;
    }
    out << lp_number(con.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t col = 0; col < lp.num_vars; ++col) out << " " << v.column_name(col) << " >= 0\n";
  out << "End\n";
  return out.str();
}

}  // namespace atp
