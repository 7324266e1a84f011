#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace atp {

/// Why a bit vector is not a normal-form annotation. `position` is 1-based;
/// 0 means the vector as a whole (empty, wrong parity).
struct AnnotationIssue {
  std::size_t position = 0;
  std::string message;
};

class InvalidAnnotation : public std::invalid_argument {
 public:
  explicit InvalidAnnotation(const AnnotationIssue& issue);
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Returns the first violated normal-form rule, or nothing when `bits` is a
/// valid annotation. 1 is a speedup step, 0 a slowdown step. The running block
/// count starts at 0, the first speedup adds two blocks, later speedups add one
/// and slowdowns remove one; it must stay positive strictly inside the proof and
/// be exactly zero after the last step.
std::optional<AnnotationIssue> validate(const std::vector<bool>& bits);

/// A validated proof annotation: bit i says whether line i+1 comes from a
/// speedup (1) or a slowdown (0) applied to line i.
class Annotation {
 public:
  /// Throws InvalidAnnotation.
  static Annotation from_bits(std::vector<bool> bits);
  /// Accepts the compact "1100100" form, optionally bracketed and/or comma
  /// separated ("[1,1,0,0,1,0,0]"). Throws InvalidAnnotation.
  static Annotation parse(std::string_view text);

  const std::vector<bool>& bits() const noexcept { return bits_; }
  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t num_lines() const noexcept { return bits_.size() + 1; }
  std::size_t num_speedups() const noexcept;
  /// Number of quantifier blocks on each line, line 0 through the last.
  std::vector<std::size_t> block_counts() const;
  std::size_t max_blocks() const;

  std::string to_string() const;

  bool operator==(const Annotation& other) const = default;
  /// Shorter first, then lexicographic on the bit string.
  std::strong_ordering operator<=>(const Annotation& other) const;

 private:
  explicit Annotation(std::vector<bool> bits) : bits_(std::move(bits)) {}
  std::vector<bool> bits_;
};

/// Number of valid annotations of the given length, by dynamic programming
/// over (position, block count). Throws std::invalid_argument for even or
/// sub-3 lengths.
mpz_class count(std::size_t length);

/// Visits every valid annotation of `length` whose string form starts with
/// `prefix`, in lexicographic order ('0' < '1'). The visitor returns false to
/// stop early. Throws std::invalid_argument for even or sub-3 lengths and for
/// prefixes that are not made of '0'/'1' or longer than `length`.
void enumerate(std::size_t length, std::string_view prefix,
               const std::function<bool(const Annotation&)>& visit);

std::vector<Annotation> enumerate(std::size_t length, std::string_view prefix = {});

/// 1^k 0^(k+1): the inductive family behind the golden-ratio bound.
Annotation family_fvm(std::size_t k);

/// 1^outer followed by outer+1 copies of A = 1,(0,1)^inner,0,0.
Annotation family_w(std::size_t outer, std::size_t inner);

}  // namespace atp
