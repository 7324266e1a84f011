#pragma once

#include "atp/annotation.hpp"
#include "atp/rational.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace atp {

enum class Quantifier { Exists, Forall };

inline Quantifier opposite(Quantifier q) {
  return q == Quantifier::Exists ? Quantifier::Forall : Quantifier::Exists;
}

/// One quantifier block (Q n^speed)^input. `input` is the superscript written
/// after the block: the exponent bounding what is passed on to the next stage.
/// A speed of 0 is the O(log n) block.
struct QuantifierBlock {
  Quantifier kind = Quantifier::Exists;
  Rational speed;
  Rational input{1};

  bool operator==(const QuantifierBlock&) const = default;
};

class DerivationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (Q_1 n^a_1)^b_2 ... (Q_k n^a_k)^b_{k+1} DTS[n^a_{k+1}], outermost block
/// first. `dts_input` is b_{k+1}; with blocks present it equals the innermost
/// block's input, and a plain DTS class reads the original input (exponent 1).
///
/// Adjacent blocks of equal polarity are representable so that the raw
/// Speedup Lemma output can be shown before combining; see alternating().
class SimpleClass {
 public:
  SimpleClass() : SimpleClass(std::vector<QuantifierBlock>{}, Rational(1)) {}
  /// Validates speeds >= 0, inputs >= 1 and the dts_input link. Throws DerivationError.
  SimpleClass(std::vector<QuantifierBlock> blocks, Rational dts_speed, Rational dts_input);
  /// Convenience: dts_input taken from the innermost block (or 1).
  SimpleClass(std::vector<QuantifierBlock> blocks, Rational dts_speed);

  static SimpleClass dts(Rational speed);
  /// Blocks given as (kind, speed) pairs; each unspecified input defaults to
  /// max{speed, 1} of the block it follows.
  static SimpleClass with_default_inputs(const std::vector<std::pair<Quantifier, Rational>>& blocks,
                                         Rational dts_speed);

  const std::vector<QuantifierBlock>& blocks() const noexcept { return blocks_; }
  const Rational& dts_speed() const noexcept { return dts_speed_; }
  const Rational& dts_input() const noexcept { return dts_input_; }
  std::size_t depth() const noexcept { return blocks_.size(); }
  bool is_dts() const noexcept { return blocks_.empty(); }
  /// No two adjacent blocks share a polarity.
  bool alternating() const noexcept;

  bool operator==(const SimpleClass&) const = default;

 private:
  std::vector<QuantifierBlock> blocks_;
  Rational dts_speed_;
  Rational dts_input_;
};

enum class Rule { Speedup0, Speedup1, Speedup2, Slowdown };

const char* rule_name(Rule rule);
inline bool is_speedup(Rule rule) { return rule != Rule::Slowdown; }
/// Change in the number of quantifier blocks caused by the rule.
int block_delta(Rule rule);

struct RuleApplication {
  Rule rule = Rule::Slowdown;
  std::optional<Rational> x;

  bool operator==(const RuleApplication&) const = default;
};

// --- Rules -----------------------------------------------------------------
// Each throws DerivationError when its precondition fails. Arithmetic is exact.

/// DTS[n^a] -> (Q n^x)^{max(x,1)} (Q' n^0)^1 DTS[n^{a-x}], 0 < x < a.
SimpleClass apply_speedup0(const SimpleClass& cls, const Rational& x, Quantifier outer);

/// Speeds up the DTS part and merges the new guess into the innermost block.
SimpleClass apply_speedup1(const SimpleClass& cls, const Rational& x);

/// Speeds up the DTS part with a guess of the opposite polarity to the
/// innermost block, adding two blocks.
SimpleClass apply_speedup2(const SimpleClass& cls, const Rational& x);

/// The Speedup Lemma applied to the DTS part with the guessing block of
/// polarity `kind`, without combining. With `kind` equal to the innermost
/// block's polarity this is the intermediate step of apply_speedup1.
SimpleClass apply_speedup_lemma(const SimpleClass& cls, const Rational& x, Quantifier kind);

/// Merges same-polarity neighbours: speeds take the max, the inner block's
/// input survives. Idempotent.
SimpleClass combine_adjacent(const SimpleClass& cls);

/// Removes the innermost block; the new DTS exponent is
/// c * max{a_{k+1}, a_k, b_k, b_{k+1}} with b_1 = 1.
SimpleClass apply_slowdown(const SimpleClass& cls, const Rational& c);

SimpleClass apply_rule(const SimpleClass& cls, const RuleApplication& step, const Rational& c,
                       Quantifier outer = Quantifier::Exists);

/// Rule tags realised by an annotation: the first speedup is Rule 0, later
/// ones Rule 1.
std::vector<Rule> rule_sequence(const Annotation& annotation);

// --- Proofs ----------------------------------------------------------------

struct Proof {
  Rational c;
  Rational initial_speed;
  std::vector<Rational> speedup_params;
  Annotation annotation;
  Quantifier outer = Quantifier::Exists;
  std::vector<SimpleClass> lines;

  /// First line's exponent is at least the last line's.
  bool wins() const;
  /// lines[0].dts_speed - lines[last].dts_speed.
  Rational margin() const;

  bool operator==(const Proof&) const = default;
};

/// Starts from DTS[n^initial_speed] and applies the annotation's rules in
/// order. Throws DerivationError if a parameter violates its interval, if
/// c < 1, initial_speed < 1, or the parameter count differs from the number
/// of speedups. The returned proof need not win; check wins().
Proof replay(const Annotation& annotation, const Rational& c, const Rational& initial_speed,
             std::span<const Rational> xs, Quantifier outer = Quantifier::Exists);

/// Replays an arbitrary rule sequence (Rule 2 included). Returns every line.
std::vector<SimpleClass> replay_rules(std::span<const RuleApplication> steps, const Rational& c,
                                      const Rational& initial_speed,
                                      Quantifier outer = Quantifier::Exists);

struct Violation {
  std::optional<std::size_t> line;
  std::string message;
};

/// Independent exact check of a stored proof: recomputes each line from the
/// parameters, compares with what is stored, and checks normal form and the
/// win condition. Empty result means valid.
std::vector<Violation> verify_proof(const Proof& proof);

}  // namespace atp
