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

#include "bwsynth/optimality.hpp"

#include <algorithm>
#include <stdexcept>

#include "bwsynth/maxflow.hpp"

namespace bwsynth {

namespace {

BigInt min_compute_ingress(const Topology& topo) {
  std::optional<BigInt> x;
  for (NodeIndex v : topo.compute_nodes()) {
    const BigInt in = topo.ingress(v);
    if (!x || in < *x) x = in;
  }
  if (!x || *x == 0) throw std::invalid_argument("compute node without ingress");
  return *x;
}

void require_searchable(const Topology& topo) {
  if (topo.compute_nodes().size() < 2) {
    throw std::invalid_argument("need at least two compute nodes");
  }
}

}  // namespace

Rational cut_ratio(const Topology& topo, const std::vector<bool>& members) {
  std::size_t inside = 0;
  for (NodeIndex v : topo.compute_nodes()) inside += members.at(v) ? 1 : 0;
  const BigInt out = topo.egress(members);
  if (inside == 0 || out == 0) throw std::invalid_argument("degenerate cut");
  return Rational(BigInt(inside), out);
}

std::vector<BigInt> bandwidths_of(const Topology& topo) {
  std::vector<BigInt> out;
  out.reserve(topo.edges().size());
  for (const auto& [edge, cap] : topo.edges()) out.push_back(cap);
  return out;
}

UK compute_U_k(const Rational& ratio, const std::vector<BigInt>& bandwidths) {
  if (ratio <= 0) throw std::invalid_argument("ratio must be positive");
  const BigInt p = numerator_of(ratio);
  const BigInt q = denominator_of(ratio);
  BigInt g = q;
  for (const auto& b : bandwidths) g = gcd(g, b);
  return {Rational(p, g), q / g};
}

OptimalityResult optimal_ratio(const Topology& topo) {
  require_searchable(topo);
  const BigInt n = topo.compute_nodes().size();
  const BigInt x_min = min_compute_ingress(topo);

  // Closed interval on the ratio; pass at 1/r means r >= optimum.
  Rational lo(n - 1, x_min);
  Rational hi(n - 1);
  const Rational width(1, x_min * x_min);
  while (hi - lo >= width) {
    const Rational mid = (lo + hi) / 2;
    if (oracle_min_source_flow(topo, Rational(1) / mid).pass) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  OptimalityResult result;
  result.ratio = closest_bounded_denominator(lo, hi, x_min);

  // Any other cut ratio differs from the optimum by at least 1/(X*C), so a
  // witness below this probe is tight.
  const Rational probe =
      result.ratio - Rational(1, 2 * x_min * topo.total_capacity());
  const OracleResult below = oracle_min_source_flow(topo, Rational(1) / probe);
  if (below.pass || !below.witness) {
    throw std::logic_error("oracle passed below the recovered optimum " +
                           to_string(result.ratio));
  }
  result.bottleneck = below.witness->cut;
  if (cut_ratio(topo, result.bottleneck) != result.ratio) {
    throw std::logic_error("bottleneck cut does not achieve " +
                           to_string(result.ratio));
  }
  const UK uk = compute_U_k(result.ratio, bandwidths_of(topo));
  result.U = uk.U;
  result.k = uk.k;
  return result;
}

FixedKResult fixed_k_search(const Topology& topo, const BigInt& k,
                            const std::optional<Rational>& ratio) {
  require_searchable(topo);
  if (k < 1) throw std::invalid_argument("k must be positive");
  const BigInt n = topo.compute_nodes().size();
  const BigInt x_min = min_compute_ingress(topo);
  BigInt b_max = 0;
  BigInt b_min = 0;
  for (const auto& [edge, cap] : topo.edges()) {
    if (cap > b_max) b_max = cap;
    if (b_min == 0 || cap < b_min) b_min = cap;
  }
  const OracleDemand demand = OracleDemand::all_roots(k);
  auto passes = [&](const Rational& u) {
    return oracle_min_source_flow(topo.floored(u), demand).pass;
  };

  Rational lo((n - 1) * k, x_min);
  Rational hi((n - 1) * k);
  if (!passes(hi)) {
    throw std::logic_error("fixed-k oracle fails at the top of its range");
  }
  const Rational width(1, b_max * b_max);
  while (hi - lo >= width) {
    const Rational mid = (lo + hi) / 2;
    if (passes(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  FixedKResult result;
  result.k = k;
  result.U_star = closest_bounded_denominator(lo, hi, b_max);
  if (!passes(result.U_star)) {
    throw std::logic_error("fixed-k oracle fails at recovered U* " +
                           to_string(result.U_star));
  }
  result.capacities = topo.floored(result.U_star);
  result.ratio = ratio ? *ratio : optimal_ratio(topo).ratio;
  if (result.U_star / Rational(k) > result.ratio + Rational(1, k * b_min)) {
    throw std::logic_error("fixed-k U* exceeds the approximation bound");
  }
  return result;
}

}  // namespace bwsynth
