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

#ifndef BWSYNTH_SCHEDULE_HPP_
#define BWSYNTH_SCHEDULE_HPP_

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bwsynth/edge_split.hpp"
#include "bwsynth/rational.hpp"
#include "bwsynth/topology.hpp"

namespace bwsynth {

enum class Collective { kAllgather, kReduceScatter, kBroadcast, kReduce, kAllreduce };

std::optional<Collective> parse_collective(std::string_view name);
std::string_view to_string(Collective c);

// Trees of broadcast and reduce come from a single root; the others have k
// trees per compute node.
bool is_rooted(Collective c);

struct ScheduleEdge {
  std::string src;
  std::string dst;
  std::vector<std::string> path;  // src, switches..., dst

  bool operator==(const ScheduleEdge&) const = default;
};

struct ScheduleTree {
  std::string root;
  BigInt multiplicity;
  std::vector<ScheduleEdge> edges;

  bool operator==(const ScheduleTree&) const = default;
};

struct AllreduceBounds {
  Rational lb_cut;
  Rational lb_degree;
  bool half_split = false;
  bool singleton_max = false;

  bool operator==(const AllreduceBounds&) const = default;
};

// Present when a tree count per root was imposed.
struct FixedKInfo {
  Rational U_star;             // smallest U for which k trees per root fit
  Rational optimum_per_unit;   // unconstrained optimum
  Rational achieved_U;         // U actually used (>= U_star)

  bool operator==(const FixedKInfo&) const = default;
};

// Per-tree data share: M/(N*k) for allgather and reduce-scatter, where each
// root owns k trees; M/k for broadcast and reduce, where k is the total tree
// count from the root. Runtimes are for M = 1 in original bandwidth units.
struct PipelineSchedule {
  Collective collective = Collective::kAllgather;
  std::size_t N = 0;
  BigInt k = 0;
  Rational U;
  Rational scale = 1;
  std::vector<ScheduleTree> trees;
  Rational runtime_per_unit;
  Rational lower_bound_per_unit;
  std::optional<std::string> root;
  EmapTable emap;
  std::vector<PipelineSchedule> phases;  // allreduce: reduce-scatter, allgather
  std::optional<AllreduceBounds> bounds;
  std::optional<FixedKInfo> fixed_k;

  bool operator==(const PipelineSchedule&) const = default;
};

struct SynthOptions {
  std::optional<BigInt> fixed_k;
  SplitPolicy policy = SplitPolicy::kCrossGroupFirst;
  // Integer capacity = bandwidth * scale, as produced by scale_to_integers.
  Rational scale = 1;
};

// A synthesized runtime disagreed with the bound it was built to meet.
class SynthesisError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

PipelineSchedule build_allgather(const Topology& topo, const SynthOptions& options = {});
PipelineSchedule build_reduce_scatter(const Topology& topo,
                                      const SynthOptions& options = {});
PipelineSchedule build_broadcast(const Topology& topo, std::string_view root,
                                 const SynthOptions& options = {});
PipelineSchedule build_reduce(const Topology& topo, std::string_view root,
                              const SynthOptions& options = {});
PipelineSchedule build_allreduce(const Topology& topo, const SynthOptions& options = {});

PipelineSchedule build_schedule(const Topology& topo, Collective collective,
                                const std::optional<std::string>& root,
                                const SynthOptions& options = {});

// Allreduce lower bounds and optimality flags. `bottleneck` is the allgather
// bottleneck cut.
AllreduceBounds allreduce_bounds(const Topology& topo, const std::vector<bool>& bottleneck,
                                 const Rational& scale);

// Broadcast lower bound per unit: scale / min over v != root of F(root, v).
Rational broadcast_bound(const Topology& topo, NodeIndex root, const Rational& scale);

// max over physical edges of load / bandwidth for data size M. Throws
// std::invalid_argument on an empty schedule or a path off the topology.
Rational evaluate_runtime(const PipelineSchedule& sched, const Topology& topo,
                          const Rational& M = 1);

// Reverses every edge, path and emap entry (reduce-scatter and reduce from
// their allgather and broadcast counterparts on the transpose).
PipelineSchedule reversed(const PipelineSchedule& sched, Collective relabel);

// JSON schedule documents.
class ScheduleFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string emit_schedule(const PipelineSchedule& sched);
PipelineSchedule load_schedule(std::string_view text);

}  // namespace bwsynth

#endif  // BWSYNTH_SCHEDULE_HPP_
