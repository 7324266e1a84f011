#include "atp/rational.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

namespace atp {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
  }
  return true;
}

mpz_class pow10(unsigned long exponent) {
  mpz_class result;
  mpz_ui_pow_ui(result.get_mpz_t(), 10, exponent);
  return result;
}

Rational parse_decimal(std::string_view text) {
  std::string_view rest = text;
  bool negative = false;
  if (!rest.empty() && (rest.front() == '-' || rest.front() == '+')) {
    negative = rest.front() == '-';
    rest.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = rest.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = rest.substr(e + 1);
    rest = rest.substr(0, e);
    bool exp_negative = false;
    if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
      exp_negative = exp_text.front() == '-';
      exp_text.remove_prefix(1);
    }
    if (!all_digits(exp_text) || exp_text.size() > 6) {
      throw std::invalid_argument("malformed exponent in '" + std::string(text) + "'");
    }
    exponent = std::stol(std::string(exp_text));
    if (exp_negative) exponent = -exponent;
  }
  std::string_view int_part = rest;
  std::string_view frac_part;
  if (auto dot = rest.find('.'); dot != std::string_view::npos) {
    int_part = rest.substr(0, dot);
    frac_part = rest.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part))) {
    throw std::invalid_argument("malformed number '" + std::string(text) + "'");
  }
  mpz_class digits(std::string(int_part) + std::string(frac_part), 10);
  Rational value(digits, pow10(frac_part.size()));
  if (exponent > 0) value *= Rational(pow10(static_cast<unsigned long>(exponent)));
  if (exponent < 0) value /= Rational(pow10(static_cast<unsigned long>(-exponent)));
  value.canonicalize();
  return negative ? Rational(-value) : value;
}

// Simplest rational in [lo, hi] for 0 < lo <= hi.
Rational simplest_between(const Rational& lo, const Rational& hi) {
  mpz_class whole;
  mpz_fdiv_q(whole.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  Rational floor_lo(whole);
  if (floor_lo == lo) return floor_lo;
  if (floor_lo + 1 <= hi) return Rational(floor_lo + 1);
  Rational inner_lo = 1 / Rational(hi - floor_lo);
  Rational inner_hi = 1 / Rational(lo - floor_lo);
  Rational result = floor_lo + 1 / simplest_between(inner_lo, inner_hi);
  result.canonicalize();
  return result;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = num;
    if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+')) num_digits.remove_prefix(1);
    if (!all_digits(num_digits) || !all_digits(den)) {
      throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
    }
    mpz_class q(std::string(den), 10);
    if (q == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    mpz_class p(std::string(num_digits), 10);
    if (num.front() == '-') p = -p;
    Rational value(p, q);
    value.canonicalize();
    return value;
  }
  return parse_decimal(text);
}

std::string to_string(const Rational& value) { return value.get_str(); }

std::string to_decimal(const Rational& value, int max_digits) {
  mpz_class scale = pow10(static_cast<unsigned long>(max_digits));
  Rational scaled = abs(value) * Rational(scale);
  // Round half away from zero.
  mpz_class rounded;
  mpz_class twice_num = 2 * scaled.get_num() + scaled.get_den();
  mpz_class twice_den = 2 * scaled.get_den();
  mpz_fdiv_q(rounded.get_mpz_t(), twice_num.get_mpz_t(), twice_den.get_mpz_t());

  std::string digits = rounded.get_str();
  if (digits.size() <= static_cast<std::size_t>(max_digits)) {
    digits.insert(0, static_cast<std::size_t>(max_digits) + 1 - digits.size(), '0');
  }
  std::string int_part = digits.substr(0, digits.size() - static_cast<std::size_t>(max_digits));
  std::string frac_part = digits.substr(digits.size() - static_cast<std::size_t>(max_digits));
  while (!frac_part.empty() && frac_part.back() == '0') frac_part.pop_back();
  std::string out = (value < 0 && rounded != 0) ? "-" : "";
  out += int_part;
  if (!frac_part.empty()) out += "." + frac_part;
  return out;
}

Rational from_double(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite double");
  Rational result(value);
  result.canonicalize();
  return result;
}

double to_double(const Rational& value) { return value.get_d(); }

Rational rationalize(double value, double tolerance, const mpz_class& max_denominator) {
  Rational center = from_double(value);
  Rational slack = from_double(std::fabs(tolerance));
  Rational lo = center - slack;
  Rational hi = center + slack;
  Rational result;
  if (lo <= 0 && hi >= 0) {
    result = 0;
  } else if (lo > 0) {
    result = simplest_between(lo, hi);
  } else {
    result = -simplest_between(Rational(-hi), Rational(-lo));
  }
  if (result.get_den() > max_denominator) {
    // No simple fraction nearby: round onto the capped grid instead.
    Rational scaled = center * Rational(max_denominator);
    mpz_class twice = 2 * scaled.get_num() + scaled.get_den();
    mpz_class nearest;
    mpz_class twice_den = 2 * scaled.get_den();
    mpz_fdiv_q(nearest.get_mpz_t(), twice.get_mpz_t(), twice_den.get_mpz_t());
    result = Rational(nearest, max_denominator);
    result.canonicalize();
  }
  return result;
}

std::size_t bit_length(const Rational& value) {
  std::size_t num = mpz_sizeinbase(value.get_num_mpz_t(), 2);
  std::size_t den = mpz_sizeinbase(value.get_den_mpz_t(), 2);
  return num > den ? num : den;
}

}  // namespace atp
