#pragma once

// Reference implementations used only by tests. None of them call into the
// code they are checking, apart from the data types they fill in.

#include "atp/lp_model.hpp"
#include "atp/rational.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace oracle {

// Normal-form check written from the definition: the first step is a speedup
// opening two blocks, every later speedup opens one, a slowdown closes one,
// only the first and last line may be plain DTS.
inline bool is_annotation(const std::vector<bool>& bits) {
  if (bits.size() < 3 || bits.size() % 2 == 0 || !bits[0]) return false;
  long depth = 0;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    depth += bits[i] ? (i == 0 ? 2 : 1) : -1;
    if (depth < 0) return false;
    if (depth == 0 && i + 1 != bits.size()) return false;
  }
  return depth == 0 && !bits[bits.size() - 1] && !bits[bits.size() - 2];
}

// Every bit string of the length, filtered.
inline std::vector<std::string> brute_force(std::size_t length) {
  std::vector<std::string> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << length); ++mask) {
    std::vector<bool> bits(length);
    std::string text(length, '0');
    for (std::size_t i = 0; i < length; ++i) {
      bits[i] = (mask >> (length - 1 - i)) & 1;
      if (bits[i]) text[i] = '1';
    }
    if (is_annotation(bits)) out.push_back(text);
  }
  return out;
}

// C_k = binom(2k, k) / (k + 1).
inline mpz_class catalan(unsigned long k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), 2 * k, k);
  return b / (k + 1);
}

// Block counts per line, from the same definition as is_annotation.
inline std::vector<std::size_t> depths(const std::string& annotation) {
  std::vector<std::size_t> d{0};
  for (std::size_t i = 0; i < annotation.size(); ++i) {
    d.push_back(annotation[i] == '1' ? d.back() + (i == 0 ? 2 : 1) : d.back() - 1);
  }
  return d;
}

// The LP transcribed from the reference constraint listing, with its index
// slips repaired (first-line guess a_{1,3} = x_1; DTS lines indexed from 1)
// and its looser speedup kept: a_{i,1} >= max{a_{i-1,1} - x_i, 1}. Same
// column layout as the library so points can be exchanged directly.
inline atp::LinearProgram reference_lp(const std::string& annotation, const atp::Rational& c) {
  using atp::Rational;
  using atp::Relation;
  const auto d = depths(annotation);
  std::size_t m = 0;
  for (auto v : d) m = std::max(m, v);
  m += 1;
  const std::size_t lines = annotation.size() + 1;
  auto a = [&](std::size_t i, std::size_t j) { return 2 * (i * m + j - 1); };
  auto b = [&](std::size_t i, std::size_t j) { return 2 * (i * m + j - 1) + 1; };
  std::vector<std::size_t> xcol(lines, 0);
  std::size_t next = 2 * lines * m;
  for (std::size_t i = 1; i < lines; ++i) {
    if (annotation[i - 1] == '1') xcol[i] = next++;
  }

  atp::LinearProgram lp;
  lp.num_vars = next;
  lp.objective.assign(next, Rational(1));
  lp.c = c;
  auto row = [&](std::vector<atp::LinearTerm> terms, Relation rel, Rational rhs) {
    lp.constraints.push_back({std::move(terms), rel, std::move(rhs), {}});
  };
  auto eq = [&](std::size_t u, std::size_t v) { row({{u, 1}, {v, -1}}, Relation::Equal, 0); };
  auto ge = [&](std::size_t u, std::size_t v, Rational k = 1) { row({{u, 1}, {v, -k}}, Relation::GreaterEqual, 0); };
  auto fix = [&](std::size_t u, Rational v) { row({{u, 1}}, Relation::Equal, v); };
  auto zero_from = [&](std::size_t i, std::size_t j0) {
    for (std::size_t j = j0; j <= m; ++j) {
      fix(a(i, j), 0);
      fix(b(i, j), 0);
    }
  };

  const std::size_t last = lines - 1;
  ge(a(0, 1), a(last, 1));
  row({{a(0, 1), 1}}, Relation::GreaterEqual, 1);
  fix(b(0, 1), 1);
  zero_from(0, 2);
  row({{a(last, 1), 1}}, Relation::GreaterEqual, 1);
  fix(b(last, 1), 1);
  zero_from(last, 2);

  for (std::size_t i = 1; i < lines; ++i) {
    if (annotation[i - 1] == '1' && i == 1) {
      const std::size_t x = xcol[i];
      row({{a(1, 1), 1}, {a(0, 1), -1}, {x, 1}}, Relation::Equal, 0);
      fix(b(1, 1), 1);
      fix(a(1, 2), 0);
      ge(b(1, 2), x);
      row({{b(1, 2), 1}}, Relation::GreaterEqual, 1);
      eq(a(1, 3), x);
      fix(b(1, 3), 1);
      zero_from(1, 4);
    } else if (annotation[i - 1] == '1') {
      const std::size_t x = xcol[i];
      row({{a(i, 1), 1}}, Relation::GreaterEqual, 1);
      row({{a(i, 1), 1}, {a(i - 1, 1), -1}, {x, 1}}, Relation::GreaterEqual, 0);
      eq(b(i, 1), b(i - 1, 1));
      fix(a(i, 2), 0);
      ge(b(i, 2), x);
      ge(b(i, 2), b(i - 1, 1));
      ge(a(i, 3), a(i - 1, 2));
      ge(a(i, 3), x);
      ge(b(i, 3), b(i - 1, 2));
      for (std::size_t k = 4; k <= m; ++k) {
        eq(a(i, k), a(i - 1, k - 1));
        eq(b(i, k), b(i - 1, k - 1));
      }
    } else {
      for (std::size_t col : {a(i - 1, 1), a(i - 1, 2), b(i - 1, 1), b(i - 1, 2)}) ge(a(i, 1), col, c);
      eq(b(i, 1), b(i - 1, 2));
      for (std::size_t k = 2; k + 1 <= m; ++k) {
        eq(a(i, k), a(i - 1, k + 1));
        eq(b(i, k), b(i - 1, k + 1));
      }
      fix(a(i, m), 0);
      fix(b(i, m), 0);
    }
  }
  return lp;
}

}  // namespace oracle
