#include "atp/annotation.hpp"

#include <algorithm>
#include <cctype>

namespace atp {

namespace {

void require_length(std::size_t length) {
  if (length < 3 || length % 2 == 0) {
    throw std::invalid_argument("annotation length must be odd and at least 3, got " +
                                std::to_string(length));
  }
}

// Can a partial annotation at block count `height` with `remaining` bits left
// still be completed? Interior heights must stay >= 1 and the end must be 0.
bool completable(std::size_t height, std::size_t remaining) {
  if (remaining == 0) return height == 0;
  return height >= 1 && height <= remaining && (remaining - height) % 2 == 0;
}

}  // namespace

InvalidAnnotation::InvalidAnnotation(const AnnotationIssue& issue)
    : std::invalid_argument(issue.position == 0
                                ? "invalid annotation: " + issue.message
                                : "invalid annotation at position " + std::to_string(issue.position) +
                                      ": " + issue.message),
      position_(issue.position) {}

std::optional<AnnotationIssue> validate(const std::vector<bool>& bits) {
  const std::size_t n = bits.size();
  if (n == 0) return AnnotationIssue{0, "empty annotation"};
  if (n % 2 == 0) return AnnotationIssue{0, "length " + std::to_string(n) + " is even; normal-form annotations have odd length"};
  if (!bits.front()) return AnnotationIssue{1, "first step must be a speedup"};
  if (bits[n - 1] || bits[n - 2]) {
    return AnnotationIssue{bits[n - 2] ? n - 1 : n, "last two steps must be slowdowns"};
  }
  std::size_t height = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bits[i]) {
      height += (i == 0) ? 2 : 1;
    } else {
      height -= 1;
      if (height == 0 && i + 1 < n) {
        return AnnotationIssue{i + 1, "block count reaches 0 at position " + std::to_string(i + 1) +
                                          " (interior DTS line)"};
      }
    }
  }
  if (height != 0) {
    return AnnotationIssue{n, "proof ends with " + std::to_string(height) + " quantifier blocks instead of 0"};
  }
  return std::nullopt;
}

Annotation Annotation::from_bits(std::vector<bool> bits) {
  if (auto issue = validate(bits)) throw InvalidAnnotation(*issue);
  return Annotation(std::move(bits));
}

Annotation Annotation::parse(std::string_view text) {
  std::vector<bool> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1') {
      bits.push_back(ch == '1');
    } else if (ch == '[' || ch == ']' || ch == ',' || std::isspace(static_cast<unsigned char>(ch))) {
      continue;
    } else {
      throw InvalidAnnotation(AnnotationIssue{0, std::string("unexpected character '") + ch + "'"});
    }
  }
  return from_bits(std::move(bits));
}

std::size_t Annotation::num_speedups() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<std::size_t> Annotation::block_counts() const {
  std::vector<std::size_t> counts{0};
  std::size_t height = 0;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) {
      height += (i == 0) ? 2 : 1;
    } else {
      height -= 1;
    }
    counts.push_back(height);
  }
  return counts;
}

std::size_t Annotation::max_blocks() const {
  auto counts = block_counts();
  return *std::max_element(counts.begin(), counts.end());
}

std::string Annotation::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (bool b : bits_) out.push_back(b ? '1' : '0');
  return out;
}

std::strong_ordering Annotation::operator<=>(const Annotation& other) const {
  if (auto cmp = bits_.size() <=> other.bits_.size(); cmp != 0) return cmp;
  return to_string() <=> other.to_string();
}

mpz_class count(std::size_t length) {
  require_length(length);
  // ways[h]: number of valid prefixes ending at block count h.
  std::vector<mpz_class> ways(length + 2, 0);
  ways[2] = 1;
  for (std::size_t pos = 1; pos < length; ++pos) {
    std::vector<mpz_class> next(length + 2, 0);
    const bool last = pos + 1 == length;
    for (std::size_t h = 1; h + 1 < ways.size(); ++h) {
      if (ways[h] == 0) continue;
      next[h + 1] += ways[h];
      if (h - 1 >= 1 || last) next[h - 1] += ways[h];
    }
    ways = std::move(next);
  }
  return ways[0];
}

void enumerate(std::size_t length, std::string_view prefix,
               const std::function<bool(const Annotation&)>& visit) {
  require_length(length);
  if (prefix.size() > length) {
    throw std::invalid_argument("prefix longer than annotation length");
  }
  std::vector<bool> bits;
  bits.reserve(length);
  std::size_t height = 0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    char ch = prefix[i];
    if (ch != '0' && ch != '1') throw std::invalid_argument("prefix must consist of '0' and '1'");
    bool one = ch == '1';
    if (i == 0 && !one) return;
    if (one) {
      height += (i == 0) ? 2 : 1;
    } else {
      if (height == 0) return;
      height -= 1;
    }
    bits.push_back(one);
    if (!completable(height, length - bits.size())) return;
  }

  // Iterative depth-first search; '0' is explored before '1'.
  struct Frame {
    std::size_t height;
    int next_choice;  // 0, 1, or 2 (exhausted)
  };
  const std::size_t base = bits.size();
  if (base == length) {
    visit(Annotation::from_bits(bits));
    return;
  }
  std::vector<Frame> stack{{height, 0}};
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next_choice > 1) {
      stack.pop_back();
      if (bits.size() > base) bits.pop_back();
      continue;
    }
    const bool one = top.next_choice == 1;
    ++top.next_choice;
    const std::size_t pos = bits.size();
    if (pos == 0 && !one) continue;
    if (!one && top.height == 0) continue;
    const std::size_t h = one ? top.height + (pos == 0 ? 2 : 1) : top.height - 1;
    if (!completable(h, length - pos - 1)) continue;
    bits.push_back(one);
    if (bits.size() == length) {
      if (!visit(Annotation::from_bits(bits))) return;
      bits.pop_back();
      continue;
    }
    stack.push_back({h, 0});
  }
}

std::vector<Annotation> enumerate(std::size_t length, std::string_view prefix) {
  std::vector<Annotation> out;
  enumerate(length, prefix, [&](const Annotation& a) {
    out.push_back(a);
    return true;
  });
  return out;
}

Annotation family_fvm(std::size_t k) {
  if (k == 0) throw std::invalid_argument("family_fvm needs k >= 1");
  std::vector<bool> bits(k, true);
  bits.insert(bits.end(), k + 1, false);
  return Annotation::from_bits(std::move(bits));
}

Annotation family_w(std::size_t outer, std::size_t inner) {
  std::vector<bool> block{true};
  for (std::size_t i = 0; i < inner; ++i) {
    block.push_back(false);
    block.push_back(true);
  }
  block.push_back(false);
  block.push_back(false);
  std::vector<bool> bits(outer, true);
  for (std::size_t i = 0; i <= outer; ++i) bits.insert(bits.end(), block.begin(), block.end());
  return Annotation::from_bits(std::move(bits));
}

}  // namespace atp
