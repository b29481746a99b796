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

#ifndef BWSYNTH_RATIONAL_HPP_
#define BWSYNTH_RATIONAL_HPP_

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace bwsynth {

// Arbitrary-precision integer and rational. cpp_rational keeps values in
// lowest terms with a positive denominator.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}
inline BigInt denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

// "p/q", or "p" when q == 1.
std::string to_string(const Rational& r);
std::string to_string(const BigInt& v);
// Always "p/q", even when q == 1.
std::string to_fraction(const Rational& r);

// Accepts "p", "p/q", with an optional leading '-'. Throws
// std::invalid_argument on anything else (including q == 0).
Rational parse_rational(std::string_view text);

// Decimal rendering with `significant` significant digits, for humans only.
std::string to_decimal(const Rational& r, int significant = 6);

// Floor and ceiling toward -inf / +inf.
BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);

// floor(u * b), exact.
BigInt floor_scale(const Rational& u, const BigInt& b);

bool is_integer(const Rational& r);

BigInt gcd(const BigInt& a, const BigInt& b);
BigInt lcm(const BigInt& a, const BigInt& b);

// Returns the rational in the closed interval [lo, hi] whose denominator is
// smallest (ties impossible: the simplest rational in an interval is unique).
// When hi - lo < 1/max_den^2 at most one fraction with denominator <= max_den
// lies in the interval, so this is that fraction.
//
// Throws std::domain_error if lo > hi or if the simplest fraction in the
// interval has a denominator above max_den.
Rational closest_bounded_denominator(const Rational& lo, const Rational& hi,
                                     const BigInt& max_den);

}  // namespace bwsynth

#endif  // BWSYNTH_RATIONAL_HPP_
