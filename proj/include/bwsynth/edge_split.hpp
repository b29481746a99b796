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

#ifndef BWSYNTH_EDGE_SPLIT_HPP_
#define BWSYNTH_EDGE_SPLIT_HPP_

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bwsynth/maxflow.hpp"
#include "bwsynth/rational.hpp"
#include "bwsynth/topology.hpp"

namespace bwsynth {

// (u, t) -> via switch w -> capacity of (u, t) that was split through w.
// Entries with u == t record discarded loop splits.
using EmapTable = std::map<NamedEdge, std::map<std::string, BigInt>>;

enum class SplitPolicy {
  kCanonical,        // ingress candidates in node order
  kCrossGroupFirst,  // candidates far from the egress target first
};

std::optional<SplitPolicy> parse_split_policy(std::string_view name);
std::string_view to_string(SplitPolicy policy);

struct SplitStep {
  NodeIndex u;
  NodeIndex w;
  NodeIndex t;
  BigInt amount;
};

struct SplitOptions {
  SplitPolicy policy = SplitPolicy::kCrossGroupFirst;
  // Re-run the oracle and the Eulerian check after every split.
  bool paranoid = false;
  // Called after every split with the graph as it stands (all nodes kept).
  std::function<void(const SplitStep&, const Topology&)> on_step;
};

struct SplitResult {
  Topology direct;  // compute nodes only
  EmapTable emap;
  OracleDemand demand = OracleDemand::all_roots(1);
  std::size_t steps = 0;
};

// Largest M such that moving M units from (u,w),(w,t) onto (u,t) keeps the
// oracle passing on `d` for `demand`. Throws if the oracle already fails.
BigInt max_splittable(const Topology& d, const OracleDemand& demand, NodeIndex u,
                      NodeIndex w, NodeIndex t);

// Splits off every switch of `d`. Requires `d` Eulerian with the oracle
// passing; throws std::logic_error if an egress edge cannot be emptied.
SplitResult remove_switches(const Topology& d, const OracleDemand& demand,
                            const SplitOptions& options = {});

// A physical route for `amount` units of a direct edge.
struct PathPiece {
  std::vector<NodeIndex> path;  // indices into the physical topology
  BigInt amount;
};

// Hands out physical capacity for direct edges. The pool of (u,t) is its
// physical capacity, consumed first, then its emap entries in switch order,
// each expanded recursively. State persists across calls, so one allocator
// serves one schedule.
class PathAllocator {
 public:
  PathAllocator(const Topology& physical, const EmapTable& emap);

  // Throws std::logic_error when the pool of (u,t) runs dry.
  std::vector<PathPiece> take(NodeIndex u, NodeIndex t, const BigInt& amount);

 private:
  struct Pool {
    BigInt direct;
    std::vector<std::pair<NodeIndex, BigInt>> via;  // sorted by switch
  };

  const Topology& physical_;
  std::map<Edge, Pool> pools_;
};

// One-shot convenience over a fresh allocator.
std::vector<PathPiece> recover_paths(const EmapTable& emap, const Topology& original,
                                     NodeIndex u, NodeIndex t, const BigInt& demand);

}  // namespace bwsynth

#endif  // BWSYNTH_EDGE_SPLIT_HPP_
