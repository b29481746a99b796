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

#include <random>

#include "bwsynth/maxflow.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace bwsynth {
namespace {

TEST(MaxFlow, SmallNetwork) {
  FlowNetwork net(4);
  net.add_edge(0, 1, BigInt(3));
  net.add_edge(0, 2, BigInt(2));
  net.add_edge(1, 2, BigInt(5));
  net.add_edge(1, 3, BigInt(2));
  net.add_edge(2, 3, BigInt(3));
  const FlowResult r = max_flow(net, 0, 3);
  EXPECT_EQ(r.value, Capacity(BigInt(5)));
  EXPECT_FALSE(r.limit_reached);
  ASSERT_EQ(r.source_side.size(), 4u);
  EXPECT_TRUE(r.source_side[0]);
  EXPECT_FALSE(r.source_side[3]);
}

TEST(MaxFlow, UnboundedArcs) {
  FlowNetwork net(3);
  net.add_unbounded_edge(0, 1);
  net.add_edge(1, 2, BigInt(4));
  EXPECT_EQ(max_flow(net, 0, 2).value, Capacity(BigInt(4)));
  net.add_unbounded_edge(1, 2);
  const FlowResult r = max_flow(net, 0, 2);
  EXPECT_TRUE(r.value.is_unbounded());
  EXPECT_TRUE(r.limit_reached);
}

TEST(MaxFlow, LimitStopsEarly) {
  FlowNetwork net(2);
  net.add_edge(0, 1, BigInt(10));
  const FlowResult r = max_flow(net, 0, 1, BigInt(4));
  EXPECT_TRUE(r.limit_reached);
  EXPECT_EQ(r.value, Capacity(BigInt(4)));
  EXPECT_TRUE(r.source_side.empty());
  const FlowResult full = max_flow(net, 0, 1, BigInt(11));
  EXPECT_FALSE(full.limit_reached);
  EXPECT_EQ(full.value, Capacity(BigInt(10)));
}

TEST(MaxFlow, HugeCapacitiesUseExactPath) {
  FlowNetwork net(3);
  const BigInt big = BigInt(1) << 200;
  net.add_edge(0, 1, big);
  net.add_edge(1, 2, BigInt(big + 1));
  net.add_edge(0, 2, BigInt(7));
  EXPECT_EQ(max_flow(net, 0, 2).value, Capacity(BigInt(big + 7)));
}

TEST(MaxFlow, BadTerminals) {
  FlowNetwork net(2);
  EXPECT_THROW(max_flow(net, 0, 0), std::invalid_argument);
  EXPECT_THROW(max_flow(net, 0, 5), std::out_of_range);
  EXPECT_THROW(net.add_edge(0, 9, BigInt(1)), std::out_of_range);
  EXPECT_THROW(Capacity(BigInt(-1)), std::invalid_argument);
}

TEST(MaxFlow, MatchesCutEnumerationOnRandomNetworks) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 2 + rng() % 7;
    FlowNetwork net(n);
    const std::size_t arcs = rng() % (n * n);
    for (std::size_t a = 0; a < arcs; ++a) {
      const std::size_t u = rng() % n, v = rng() % n;
      if (rng() % 8 == 0) {
        net.add_unbounded_edge(u, v);
      } else {
        net.add_edge(u, v, BigInt(rng() % 9));
      }
    }
    const std::size_t s = rng() % n;
    std::size_t t = rng() % n;
    if (t == s) t = (s + 1) % n;
    const FlowResult r = max_flow(net, s, t);
    const auto expected = oracle::min_cut(net, s, t);
    if (!expected) {
      EXPECT_TRUE(r.value.is_unbounded()) << "trial " << trial;
      continue;
    }
    ASSERT_FALSE(r.value.is_unbounded()) << "trial " << trial;
    EXPECT_EQ(r.value.value(), *expected) << "trial " << trial;
    // The residual-reachable set is itself a minimum cut.
    ASSERT_EQ(r.source_side.size(), n);
    EXPECT_TRUE(r.source_side[s]);
    EXPECT_FALSE(r.source_side[t]);
    BigInt cut = 0;
    for (const auto& arc : net.arcs()) {
      if (r.source_side[arc.from] && !r.source_side[arc.to]) {
        ASSERT_FALSE(arc.capacity.is_unbounded());
        cut += arc.capacity.value();
      }
    }
    EXPECT_EQ(cut, *expected);

    // A limit below the max flow is reported as reached.
    if (*expected > 0) {
      const FlowResult limited = max_flow(net, s, t, *expected);
      EXPECT_TRUE(limited.limit_reached);
      EXPECT_FALSE(max_flow(net, s, t, BigInt(*expected + 1)).limit_reached);
    }
  }
}

TEST(Oracle, VirtualSourceNetworkShape) {
  const Topology ring = fixture::ring(3);
  const VirtualSourceNetwork vs = attach_virtual_source(ring, Rational(2, 3));
  EXPECT_EQ(vs.source, 3u);
  EXPECT_EQ(vs.scale, 3);
  EXPECT_EQ(vs.threshold, 6);
  EXPECT_EQ(vs.net.size(), 4u);
  EXPECT_EQ(vs.net.arcs().size(), 6u);
  EXPECT_THROW(attach_virtual_source(ring, Rational(0)), std::invalid_argument);
}

TEST(Oracle, RingThresholds) {
  // Each compute must receive 3x; the ring can forward 1 per hop.
  const Topology ring = fixture::ring(3);
  EXPECT_TRUE(oracle_min_source_flow(ring, Rational(1, 2)).pass);
  const OracleResult fail = oracle_min_source_flow(ring, Rational(2, 3));
  ASSERT_FALSE(fail.pass);
  ASSERT_TRUE(fail.witness);
  EXPECT_EQ(fail.witness->node, 0u);
  EXPECT_EQ(fail.witness->cut.size(), 3u);
  EXPECT_FALSE(fail.witness->cut[0]);
}

TEST(Oracle, DemandsAgreeWithEnumeration) {
  for (std::size_t i = 0; i < oracle::kCorpusSize; i += 3) {
    const Topology t = oracle::corpus_topology(i);
    for (int k = 1; k <= 3; ++k) {
      const OracleDemand d = OracleDemand::all_roots(k);
      EXPECT_EQ(oracle_min_source_flow(t, d).pass, oracle::source_condition(t, d))
          << "corpus " << i << " k " << k;
      const NodeIndex r = t.compute_nodes().front();
      const OracleDemand single = OracleDemand::single_root(t.id(r), k);
      EXPECT_EQ(oracle_min_source_flow(t, single).pass, oracle::source_condition(t, single))
          << "corpus " << i << " k " << k;
    }
  }
  EXPECT_THROW(OracleDemand::all_roots(0), std::invalid_argument);
  EXPECT_THROW(oracle_min_source_flow(fixture::star(3),
                                      OracleDemand::single_root("sw", 1)),
               std::invalid_argument);
}

TEST(Oracle, ParallelResultsMatchSequential) {
  for (std::size_t i = 0; i < 40; ++i) {
    const Topology t = oracle::corpus_topology(i);
    const Rational x(1, 1 + i % 7);
    set_parallelism(1);
    const OracleResult a = oracle_min_source_flow(t, x);
    set_parallelism(4);
    const OracleResult b = oracle_min_source_flow(t, x);
    set_parallelism(1);
    ASSERT_EQ(a.pass, b.pass);
    if (!a.pass) {
      EXPECT_EQ(a.witness->node, b.witness->node);
      EXPECT_EQ(a.witness->cut, b.witness->cut);
      EXPECT_EQ(a.witness->flow, b.witness->flow);
    }
  }
}

}  // namespace
}  // namespace bwsynth
