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

#ifndef BWSYNTH_VERIFY_HPP_
#define BWSYNTH_VERIFY_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bwsynth/rational.hpp"
#include "bwsynth/schedule.hpp"
#include "bwsynth/topology.hpp"

// Certification is kept apart from the synthesis code: it uses only the
// topology and arithmetic modules plus its own cut enumeration and a plain
// augmenting-path flow.

namespace bwsynth {

constexpr std::size_t kBruteForceMaxNodes = 22;

struct BruteForceRatio {
  Rational ratio;
  std::vector<bool> witness;  // lexicographically least maximizer
};

// max over S with S & Vc nonempty and not all of Vc of |S & Vc| / B+(S), by
// enumeration. Throws std::invalid_argument above kBruteForceMaxNodes.
BruteForceRatio brute_force_ratio(const Topology& topo);

// Minimum s-t cut value, by shortest augmenting paths.
BigInt reference_max_flow(const Topology& topo, NodeIndex s, NodeIndex t);

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct CertificationReport {
  std::vector<Check> checks;

  bool all_pass() const;
  std::string to_json() const;
};

// `topo` is the integer topology the schedule was built for.
CertificationReport check_schedule(const Topology& topo, const PipelineSchedule& sched);

// Random Eulerian topology built as a sum of directed cycles, with every
// link capacity in [1, max_cap] and all compute nodes mutually reachable.
// Deterministic per seed. Compute nodes are c<i>, switches s<i>.
Topology random_eulerian_topology(std::uint64_t seed, std::size_t n_compute,
                                  std::size_t n_switch, const BigInt& max_cap);

}  // namespace bwsynth

#endif  // BWSYNTH_VERIFY_HPP_
