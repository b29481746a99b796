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

#ifndef BWSYNTH_OPTIMALITY_HPP_
#define BWSYNTH_OPTIMALITY_HPP_

#include <optional>
#include <vector>

#include "bwsynth/rational.hpp"
#include "bwsynth/topology.hpp"

namespace bwsynth {

struct OptimalityResult {
  // max over S (S not covering every compute node) of |S & Vc| / B+(S).
  Rational ratio;
  // A vertex set achieving it, by node index.
  std::vector<bool> bottleneck;
  Rational U;
  BigInt k;
};

// Exact optimum by binary search on the oracle, then exact recovery and
// extraction of a tight cut. Fills U and k via compute_U_k.
OptimalityResult optimal_ratio(const Topology& topo);

struct UK {
  Rational U;
  BigInt k;
};

// U = p / g, k = q / g with g = gcd(q, all bandwidths), ratio = p/q.
UK compute_U_k(const Rational& ratio, const std::vector<BigInt>& bandwidths);

std::vector<BigInt> bandwidths_of(const Topology& topo);

struct FixedKResult {
  BigInt k;
  Rational U_star;
  Topology capacities;  // floor(U_star * b_e), zeros dropped
  Rational ratio;       // unconstrained optimum, for the approximation gap
};

// Smallest U such that k trees per root fit in floor(U * b_e). `ratio` is
// computed when not supplied.
FixedKResult fixed_k_search(const Topology& topo, const BigInt& k,
                            const std::optional<Rational>& ratio = std::nullopt);

// |S & Vc| / B+(S); throws when B+(S) is zero or S holds no compute node.
Rational cut_ratio(const Topology& topo, const std::vector<bool>& members);

}  // namespace bwsynth

#endif  // BWSYNTH_OPTIMALITY_HPP_
