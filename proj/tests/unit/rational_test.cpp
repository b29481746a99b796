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

#include <gtest/gtest.h>

#include "bwsynth/rational.hpp"

namespace bwsynth {
namespace {

TEST(Rational, ParsesIntegersAndFractions) {
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("6/4"), Rational(3, 2));
  EXPECT_EQ(parse_rational("-1/3"), Rational(-1, 3));
  EXPECT_EQ(parse_rational("123456789012345678901234567890/3"),
            Rational(BigInt("41152263004115226300411522630")));
}

TEST(Rational, RejectsMalformedText) {
  for (const char* bad : {"", "/", "1/", "/2", "1/0", "1.5", "a", "--1", "1/2/3", " 1"}) {
    EXPECT_THROW(parse_rational(bad), std::invalid_argument) << bad;
  }
}

TEST(Rational, Formatting) {
  EXPECT_EQ(to_string(Rational(3, 6)), "1/2");
  EXPECT_EQ(to_string(Rational(4)), "4");
  EXPECT_EQ(to_fraction(Rational(4)), "4/1");
  EXPECT_EQ(to_decimal(Rational(1, 8)), "0.125000");
  EXPECT_EQ(to_decimal(Rational(7, 44)), "0.159091");
  EXPECT_EQ(to_decimal(Rational(63)), "63.0000");
  EXPECT_EQ(to_decimal(Rational(2, 3)), "0.666667");
  EXPECT_EQ(to_decimal(Rational(999999, 1000)), "999.999");
  EXPECT_EQ(to_decimal(Rational(9999995, 10)), "1000000");
  EXPECT_EQ(to_decimal(Rational(-1, 4)), "-0.250000");
  EXPECT_EQ(to_decimal(Rational(0)), "0.00000");
}

TEST(Rational, FloorCeil) {
  EXPECT_EQ(floor(Rational(7, 2)), 3);
  EXPECT_EQ(floor(Rational(-7, 2)), -4);
  EXPECT_EQ(ceil(Rational(7, 2)), 4);
  EXPECT_EQ(ceil(Rational(-7, 2)), -3);
  EXPECT_EQ(floor(Rational(4)), 4);
  EXPECT_EQ(floor_scale(Rational(3, 2), 5), 7);
  EXPECT_EQ(lcm(4, 6), 12);
  EXPECT_EQ(gcd(12, 18), 6);
}

// Smallest-denominator fraction in [lo, hi] by direct search.
Rational search_simplest(const Rational& lo, const Rational& hi) {
  for (BigInt d = 1;; ++d) {
    const BigInt n = ceil(lo * Rational(d));
    if (Rational(n, d) <= hi) return Rational(n, d);
  }
}

TEST(Rational, ClosestBoundedDenominatorMatchesSearch) {
  for (int a = 0; a < 40; ++a) {
    for (int b = 1; b < 13; ++b) {
      for (int w = 1; w < 6; ++w) {
        const Rational lo(a, b);
        const Rational hi = lo + Rational(w, 37);
        EXPECT_EQ(closest_bounded_denominator(lo, hi, 10000), search_simplest(lo, hi))
            << to_string(lo) << " " << to_string(hi);
      }
    }
  }
}

TEST(Rational, ClosestBoundedDenominatorRecoversFromNarrowInterval) {
  // Any fraction p/q with q <= X is the unique one in a window narrower
  // than 1/X^2 around it.
  const BigInt x = 12;
  for (int q = 1; q <= 12; ++q) {
    for (int p = 0; p <= 3 * q; ++p) {
      const Rational r(p, q);
      const Rational lo = r - Rational(1, 3 * x * x);
      const Rational hi = r + Rational(1, 3 * x * x);
      EXPECT_EQ(closest_bounded_denominator(lo, hi, x), r);
    }
  }
}

TEST(Rational, ClosestBoundedDenominatorErrors) {
  EXPECT_THROW(closest_bounded_denominator(Rational(1), Rational(0), 5), std::domain_error);
  EXPECT_THROW(closest_bounded_denominator(Rational(1, 7), Rational(1, 7), 5),
               std::domain_error);
  EXPECT_EQ(closest_bounded_denominator(Rational(-1, 2), Rational(1, 2), 1), Rational(0));
  EXPECT_EQ(closest_bounded_denominator(Rational(-5, 7), Rational(-2, 3), 5),
            Rational(-2, 3));
}

}  // namespace
}  // namespace bwsynth
