/* Copyright 2026 The bwsynth Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "bwsynth/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace bwsynth {

std::string to_string(const BigInt& v) { return v.str(); }

std::string to_string(const Rational& r) {
  const BigInt den = denominator_of(r);
  if (den == 1) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + den.str();
}

std::string to_fraction(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) {
    throw std::invalid_argument("malformed rational '" + std::string(whole) +
                                "'");
  }
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw std::invalid_argument("malformed rational '" + std::string(whole) +
                                  "'");
    }
  }
  return BigInt(std::string(digits));
}

BigInt pow10(int e) {
  BigInt p = 1;
  for (int i = 0; i < e; ++i) p *= 10;
  return p;
}

// Simplest rational in [lo, hi] for 0 <= lo <= hi.
Rational simplest_nonnegative(const Rational& lo, const Rational& hi) {
  const BigInt fl = floor(lo);
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  // fl < lo <= hi < fl + 1: recurse on the reciprocal of the fractional part.
  const Rational inner = simplest_nonnegative(Rational(1) / (hi - fl),
                                              Rational(1) / (lo - fl));
  return Rational(fl) + Rational(1) / inner;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  BigInt num;
  BigInt den = 1;
  if (slash == std::string_view::npos) {
    num = parse_integer(body, text);
  } else {
    num = parse_integer(body.substr(0, slash), text);
    den = parse_integer(body.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator in '" + std::string(text) +
                                  "'");
    }
  }
  Rational r(num, den);
  return negative ? Rational(-r) : r;
}

BigInt floor(const Rational& r) {
  const BigInt num = numerator_of(r);
  const BigInt den = denominator_of(r);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) q -= 1;
  return q;
}

BigInt ceil(const Rational& r) { return -floor(Rational(-r)); }

BigInt floor_scale(const Rational& u, const BigInt& b) {
  return floor(u * Rational(b));
}

bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

BigInt gcd(const BigInt& a, const BigInt& b) {
  return boost::multiprecision::gcd(a, b);
}

BigInt lcm(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

std::string to_decimal(const Rational& r, int significant) {
  if (significant < 1) significant = 1;
  if (r == 0) {
    return significant == 1 ? "0" : "0." + std::string(significant - 1, '0');
  }
  const bool negative = r < 0;
  const Rational mag = negative ? Rational(-r) : r;

  // Exponent e with 10^e <= mag < 10^(e+1).
  int e = 0;
  if (mag >= 1) {
    e = static_cast<int>(floor(mag).str().size()) - 1;
  } else {
    Rational probe = mag;
    while (probe < 1) {
      probe *= 10;
      --e;
    }
  }

  auto scaled_digits = [&](int exp) {
    const int shift = significant - 1 - exp;
    Rational scaled = mag;
    if (shift >= 0) {
      scaled *= Rational(pow10(shift));
    } else {
      scaled /= Rational(pow10(-shift));
    }
    return floor(scaled + Rational(1, 2));
  };
  BigInt digits = scaled_digits(e);
  if (digits >= pow10(significant)) {
    ++e;
    digits = scaled_digits(e);
  }
  std::string ds = digits.str();

  std::string out;
  if (e >= significant - 1) {
    out = ds + std::string(e - (significant - 1), '0');
  } else if (e >= 0) {
    out = ds.substr(0, e + 1) + "." + ds.substr(e + 1);
  } else {
    out = "0." + std::string(-e - 1, '0') + ds;
  }
  return negative ? "-" + out : out;
}

Rational closest_bounded_denominator(const Rational& lo, const Rational& hi,
                                     const BigInt& max_den) {
  if (lo > hi) {
    throw std::domain_error("closest_bounded_denominator: empty interval [" +
                            to_string(lo) + ", " + to_string(hi) + "]");
  }
  Rational best;
  if (hi < 0) {
    best = -simplest_nonnegative(Rational(-hi), Rational(-lo));
  } else if (lo <= 0) {
    best = 0;
  } else {
    best = simplest_nonnegative(lo, hi);
  }
  if (denominator_of(best) > max_den) {
    throw std::domain_error(
        "closest_bounded_denominator: no fraction with denominator <= " +
        max_den.str() + " in [" + to_string(lo) + ", " + to_string(hi) + "]");
  }
  return best;
}

}  // namespace bwsynth
