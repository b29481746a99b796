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

#ifndef BWSYNTH_TESTS_SUPPORT_FIXTURES_HPP_
#define BWSYNTH_TESTS_SUPPORT_FIXTURES_HPP_

// Small named topologies shared by unit and acceptance tests.

#include "bwsynth/topology.hpp"

namespace bwsynth::fixture {

// Two clusters of four on local switches (bw 10) plus a global switch (bw 1).
inline Topology two_clusters() {
  PresetParams p;
  p.clusters = 2;
  p.per_cluster = 4;
  p.local_bw = 10;
  p.global_bw = 1;
  return make_preset(PresetKind::kTwoLevelCluster, p);
}

// The same cluster shape with every switch replaced by rings.
inline Topology two_clusters_unwound() {
  PresetParams p;
  p.clusters = 2;
  p.per_cluster = 4;
  p.local_bw = 10;
  p.global_bw = 1;
  return make_preset(PresetKind::kRingUnwoundCluster, p);
}

inline Topology preset(PresetKind kind, std::size_t n, const BigInt& bw = 1) {
  PresetParams p;
  p.n = n;
  p.bw = bw;
  return make_preset(kind, p);
}

inline Topology ring(std::size_t n, const BigInt& bw = 1) {
  return preset(PresetKind::kRing, n, bw);
}

inline Topology star(std::size_t n, const BigInt& bw = 1) {
  return preset(PresetKind::kStarSwitch, n, bw);
}

inline Topology complete(std::size_t n, const BigInt& bw = 1) {
  return preset(PresetKind::kComplete, n, bw);
}

inline Topology fat_tree(std::size_t leaves, std::size_t hosts, std::size_t spines,
                         const BigInt& host_bw = 1, const BigInt& uplink_bw = 1) {
  PresetParams p;
  p.leaves = leaves;
  p.hosts_per_leaf = hosts;
  p.spines = spines;
  p.host_bw = host_bw;
  p.uplink_bw = uplink_bw;
  return make_preset(PresetKind::kFatTree, p);
}

}  // namespace bwsynth::fixture

#endif  // BWSYNTH_TESTS_SUPPORT_FIXTURES_HPP_
