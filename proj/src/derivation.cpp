#include "atp/derivation.hpp"

namespace atp {

namespace {

void require_open_interval(const Rational& x, const Rational& upper) {
  if (!(x > 0 && x < upper)) {
    throw DerivationError("speedup parameter x = " + to_string(x) + " outside (0, " + to_string(upper) + ")");
  }
}

void require_blocks(const SimpleClass& cls, const char* rule) {
  if (cls.is_dts()) throw DerivationError(std::string(rule) + " needs at least one quantifier block");
}

}  // namespace

SimpleClass::SimpleClass(std::vector<QuantifierBlock> blocks, Rational dts_speed, Rational dts_input)
    : blocks_(std::move(blocks)), dts_speed_(std::move(dts_speed)), dts_input_(std::move(dts_input)) {
  for (const auto& block : blocks_) {
    if (block.speed < 0) throw DerivationError("block speed " + to_string(block.speed) + " is negative");
    if (block.input < 1) throw DerivationError("input constraint " + to_string(block.input) + " is below 1");
  }
  if (dts_speed_ < 0) throw DerivationError("DTS exponent " + to_string(dts_speed_) + " is negative");
  if (dts_input_ < 1) throw DerivationError("DTS input constraint " + to_string(dts_input_) + " is below 1");
  if (!blocks_.empty() && blocks_.back().input != dts_input_) {
    throw DerivationError("innermost block input " + to_string(blocks_.back().input) +
                          " differs from DTS input " + to_string(dts_input_));
  }
}

SimpleClass::SimpleClass(std::vector<QuantifierBlock> blocks, Rational dts_speed)
    : SimpleClass(blocks, dts_speed, blocks.empty() ? Rational(1) : blocks.back().input) {}

SimpleClass SimpleClass::dts(Rational speed) { return SimpleClass({}, std::move(speed), Rational(1)); }

SimpleClass SimpleClass::with_default_inputs(const std::vector<std::pair<Quantifier, Rational>>& blocks,
                                             Rational dts_speed) {
  std::vector<QuantifierBlock> out;
  out.reserve(blocks.size());
  for (const auto& [kind, speed] : blocks) {
    out.push_back({kind, speed, max_of(speed, Rational(1))});
  }
  return SimpleClass(std::move(out), std::move(dts_speed));
}

bool SimpleClass::alternating() const noexcept {
  for (std::size_t i = 1; i < blocks_.size(); ++i) {
    if (blocks_[i].kind == blocks_[i - 1].kind) return false;
  }
  return true;
}

const char* rule_name(Rule rule) {
  switch (rule) {
    case Rule::Speedup0: return "Speedup Rule 0";
    case Rule::Speedup1: return "Speedup Rule 1";
    case Rule::Speedup2: return "Speedup Rule 2";
    case Rule::Slowdown: return "Slowdown";
  }
  return "?";
}

int block_delta(Rule rule) {
  switch (rule) {
    case Rule::Speedup0: return 2;
    case Rule::Speedup1: return 1;
    case Rule::Speedup2: return 2;
    case Rule::Slowdown: return -1;
  }
  return 0;
}

SimpleClass apply_speedup0(const SimpleClass& cls, const Rational& x, Quantifier outer) {
  if (!cls.is_dts()) throw DerivationError("Speedup Rule 0 applies only to a plain DTS class");
  require_open_interval(x, cls.dts_speed());
  std::vector<QuantifierBlock> blocks{
      {outer, x, max_of(x, Rational(1))},
      {opposite(outer), Rational(0), Rational(1)},
  };
  return SimpleClass(std::move(blocks), cls.dts_speed() - x, Rational(1));
}

SimpleClass apply_speedup_lemma(const SimpleClass& cls, const Rational& x, Quantifier kind) {
  if (cls.is_dts()) return apply_speedup0(cls, x, kind);
  require_open_interval(x, cls.dts_speed());
  const Rational& b = cls.dts_input();
  std::vector<QuantifierBlock> blocks = cls.blocks();
  blocks.push_back({kind, x, max_of(x, b)});
  blocks.push_back({opposite(kind), Rational(0), b});
  return SimpleClass(std::move(blocks), cls.dts_speed() - x, b);
}

SimpleClass apply_speedup1(const SimpleClass& cls, const Rational& x) {
  require_blocks(cls, "Speedup Rule 1");
  require_open_interval(x, cls.dts_speed());
  const Rational& b = cls.dts_input();
  std::vector<QuantifierBlock> blocks = cls.blocks();
  QuantifierBlock& inner = blocks.back();
  inner.speed = max_of(inner.speed, x);
  inner.input = max_of(x, b);
  blocks.push_back({opposite(inner.kind), Rational(0), b});
  return SimpleClass(std::move(blocks), cls.dts_speed() - x, b);
}

SimpleClass apply_speedup2(const SimpleClass& cls, const Rational& x) {
  require_blocks(cls, "Speedup Rule 2");
  return apply_speedup_lemma(cls, x, opposite(cls.blocks().back().kind));
}

SimpleClass combine_adjacent(const SimpleClass& cls) {
  std::vector<QuantifierBlock> merged;
  merged.reserve(cls.depth());
  for (const auto& block : cls.blocks()) {
    if (!merged.empty() && merged.back().kind == block.kind) {
      merged.back().speed = max_of(merged.back().speed, block.speed);
      merged.back().input = block.input;
    } else {
      merged.push_back(block);
    }
  }
  return SimpleClass(std::move(merged), cls.dts_speed(), cls.dts_input());
}

SimpleClass apply_slowdown(const SimpleClass& cls, const Rational& c) {
  require_blocks(cls, "Slowdown");
  if (c < 1) throw DerivationError("slowdown needs c >= 1, got " + to_string(c));
  const auto& blocks = cls.blocks();
  const std::size_t k = blocks.size();
  const Rational outer_input = k >= 2 ? blocks[k - 2].input : Rational(1);
  Rational worst = max_of(max_of(cls.dts_speed(), blocks[k - 1].speed), max_of(outer_input, cls.dts_input()));
  std::vector<QuantifierBlock> kept(blocks.begin(), blocks.end() - 1);
  return SimpleClass(std::move(kept), c * worst, outer_input);
}

SimpleClass apply_rule(const SimpleClass& cls, const RuleApplication& step, const Rational& c, Quantifier outer) {
  if (is_speedup(step.rule) && !step.x) throw DerivationError("speedup step without a parameter");
  if (!is_speedup(step.rule) && step.x) throw DerivationError("slowdown step with a parameter");
  switch (step.rule) {
    case Rule::Speedup0: return apply_speedup0(cls, *step.x, outer);
    case Rule::Speedup1: return apply_speedup1(cls, *step.x);
    case Rule::Speedup2: return apply_speedup2(cls, *step.x);
    case Rule::Slowdown: return apply_slowdown(cls, c);
  }
  throw DerivationError("unknown rule");
}

std::vector<Rule> rule_sequence(const Annotation& annotation) {
  std::vector<Rule> rules;
  rules.reserve(annotation.size());
  bool first = true;
  for (bool bit : annotation.bits()) {
    if (bit) {
      rules.push_back(first ? Rule::Speedup0 : Rule::Speedup1);
      first = false;
    } else {
      rules.push_back(Rule::Slowdown);
    }
  }
  return rules;
}

bool Proof::wins() const { return !lines.empty() && lines.front().dts_speed() >= lines.back().dts_speed(); }

Rational Proof::margin() const {
  if (lines.empty()) return Rational(0);
  Rational m = lines.front().dts_speed() - lines.back().dts_speed();
  return m;
}

std::vector<SimpleClass> replay_rules(std::span<const RuleApplication> steps, const Rational& c,
                                      const Rational& initial_speed, Quantifier outer) {
  if (c < 1) throw DerivationError("c must be at least 1, got " + to_string(c));
  if (initial_speed < 1) throw DerivationError("initial exponent must be at least 1, got " + to_string(initial_speed));
  std::vector<SimpleClass> lines{SimpleClass::dts(initial_speed)};
  lines.reserve(steps.size() + 1);
  for (const auto& step : steps) lines.push_back(apply_rule(lines.back(), step, c, outer));
  return lines;
}

Proof replay(const Annotation& annotation, const Rational& c, const Rational& initial_speed,
             std::span<const Rational> xs, Quantifier outer) {
  if (xs.size() != annotation.num_speedups()) {
    throw DerivationError("annotation " + annotation.to_string() + " needs " +
                          std::to_string(annotation.num_speedups()) + " speedup parameters, got " +
                          std::to_string(xs.size()));
  }
  std::vector<RuleApplication> steps;
  std::size_t next = 0;
  for (Rule rule : rule_sequence(annotation)) {
    steps.push_back(is_speedup(rule) ? RuleApplication{rule, xs[next++]} : RuleApplication{rule, std::nullopt});
  }
  Proof proof{c, initial_speed, std::vector<Rational>(xs.begin(), xs.end()), annotation, outer, {}};
  proof.lines = replay_rules(steps, c, initial_speed, outer);
  return proof;
}

std::vector<Violation> verify_proof(const Proof& proof) {
  std::vector<Violation> out;
  const auto& lines = proof.lines;
  const Annotation& annotation = proof.annotation;
  if (proof.c < 1) out.push_back({std::nullopt, "c = " + to_string(proof.c) + " is below 1"});
  if (proof.initial_speed < 1) {
    out.push_back({std::nullopt, "initial exponent " + to_string(proof.initial_speed) + " is below 1"});
  }
  if (proof.speedup_params.size() != annotation.num_speedups()) {
    out.push_back({std::nullopt, "expected " + std::to_string(annotation.num_speedups()) +
                                     " speedup parameters, found " + std::to_string(proof.speedup_params.size())});
  }
  if (lines.size() != annotation.num_lines()) {
    out.push_back({std::nullopt, "expected " + std::to_string(annotation.num_lines()) + " lines, found " +
                                     std::to_string(lines.size())});
  }
  if (!out.empty()) return out;

  // Normal-form shape of the stored lines.
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const bool boundary = i == 0 || i + 1 == lines.size();
    if (boundary && !lines[i].is_dts()) out.push_back({i, "first and last lines must be DTS classes"});
    if (!boundary && lines[i].is_dts()) out.push_back({i, "interior line is a DTS class"});
    if (!lines[i].alternating()) out.push_back({i, "adjacent quantifier blocks share a polarity"});
  }

  // Independent re-derivation from the parameters.
  SimpleClass derived = SimpleClass::dts(proof.initial_speed);
  if (derived != lines[0]) out.push_back({0, "first line is not DTS[n^" + to_string(proof.initial_speed) + "]"});
  std::size_t next_x = 0;
  const auto rules = rule_sequence(annotation);
  for (std::size_t i = 0; i < rules.size(); ++i) {
    RuleApplication step{rules[i], std::nullopt};
    if (is_speedup(rules[i])) step.x = proof.speedup_params[next_x++];
    try {
      derived = apply_rule(derived, step, proof.c, proof.outer);
    } catch (const DerivationError& e) {
      out.push_back({i + 1, std::string(rule_name(rules[i])) + " cannot be applied: " + e.what()});
      return out;
    }
    if (derived != lines[i + 1]) {
      out.push_back({i + 1, "line does not follow from line " + std::to_string(i) + " by " + rule_name(rules[i])});
    }
  }

  if (!proof.wins()) {
    out.push_back({lines.size() - 1, "last exponent " + to_string(lines.back().dts_speed()) +
                                         " exceeds first exponent " + to_string(lines.front().dts_speed())});
  }
  if (proof.wins() && derived.dts_speed() > proof.initial_speed) {
    out.push_back({lines.size() - 1, "re-derived last exponent " + to_string(derived.dts_speed()) +
                                         " exceeds the initial exponent"});
  }
  return out;
}

}  // namespace atp
