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

#ifndef BWSYNTH_TOPOLOGY_HPP_
#define BWSYNTH_TOPOLOGY_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bwsynth/rational.hpp"

namespace bwsynth {

enum class NodeKind { kCompute, kSwitch };

std::string_view to_string(NodeKind kind);

// Position of a node in a Topology. Nodes are kept sorted by id, so index
// order is the canonical iteration order for every deterministic tie-break.
using NodeIndex = std::size_t;
using Edge = std::pair<NodeIndex, NodeIndex>;
using NamedEdge = std::pair<std::string, std::string>;

struct NodeDecl {
  std::string id;
  NodeKind kind = NodeKind::kCompute;

  bool operator==(const NodeDecl&) const = default;
};

// Malformed input or a structural invariant violated at construction.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax error in a topology document; what() carries line:column.
class TopologyParseError : public TopologyError {
 public:
  TopologyParseError(const std::string& message, std::size_t line,
                     std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Parse-time view of a topology: rational bandwidths, ids not yet indexed.
struct RationalBandwidthSpec {
  std::vector<NodeDecl> nodes;  // declaration order
  std::map<NamedEdge, Rational> links;
  std::vector<std::string> warnings;
};

// Directed capacitated multigraph over compute and switch nodes. Capacities
// are positive integers (the multiedge count); absent pairs have capacity 0.
// Immutable once built.
class Topology {
 public:
  Topology() = default;

  // Throws TopologyError on duplicate or empty ids, self-loops, links to
  // unknown nodes, or nonpositive capacities.
  Topology(std::vector<NodeDecl> nodes, const std::map<NamedEdge, BigInt>& caps);

  std::size_t size() const { return nodes_.size(); }
  const std::string& id(NodeIndex v) const { return nodes_.at(v).id; }
  NodeKind kind(NodeIndex v) const { return nodes_.at(v).kind; }
  bool is_compute(NodeIndex v) const { return kind(v) == NodeKind::kCompute; }
  bool is_switch(NodeIndex v) const { return kind(v) == NodeKind::kSwitch; }
  const std::vector<NodeDecl>& nodes() const { return nodes_; }

  std::optional<NodeIndex> find(std::string_view id) const;
  // Throws TopologyError for unknown ids.
  NodeIndex index(std::string_view id) const;

  const std::vector<NodeIndex>& compute_nodes() const { return compute_; }
  const std::vector<NodeIndex>& switch_nodes() const { return switches_; }

  const std::map<Edge, BigInt>& edges() const { return caps_; }
  BigInt capacity(NodeIndex u, NodeIndex v) const;
  const std::vector<NodeIndex>& out_neighbors(NodeIndex u) const {
    return out_.at(u);
  }
  const std::vector<NodeIndex>& in_neighbors(NodeIndex v) const {
    return in_.at(v);
  }

  BigInt egress(NodeIndex v) const;   // B+(v)
  BigInt ingress(NodeIndex v) const;  // B-(v)
  // Total capacity leaving `members` (membership by index).
  BigInt egress(const std::vector<bool>& members) const;
  BigInt total_capacity() const;

  // Same node set, new capacity map (zero entries dropped).
  Topology with_capacities(const std::map<Edge, BigInt>& caps) const;
  // Every capacity reversed: c'(u,v) = c(v,u).
  Topology transposed() const;
  // Capacities multiplied by `factor`; throws if any product is not integral.
  Topology scaled(const Rational& factor) const;
  // Capacities floor(factor * c), zero results dropped.
  Topology floored(const Rational& factor) const;

  std::map<NamedEdge, BigInt> named_capacities() const;

  bool operator==(const Topology& other) const;

 private:
  void build_adjacency();

  std::vector<NodeDecl> nodes_;
  std::map<std::string, NodeIndex, std::less<>> index_;
  std::vector<NodeIndex> compute_;
  std::vector<NodeIndex> switches_;
  std::map<Edge, BigInt> caps_;
  std::vector<std::vector<NodeIndex>> out_;
  std::vector<std::vector<NodeIndex>> in_;
};

// Reads the JSON topology document. Duplicate (src, dst) links are merged by
// summing bandwidths, with a warning in the result.
RationalBandwidthSpec parse_topology(std::string_view text);

struct ScaledTopology {
  Topology topology;
  Rational scale;  // integer capacity = bandwidth * scale
  std::vector<std::string> warnings;
};

// scale = lcm of all bandwidth denominators (no gcd reduction).
ScaledTopology scale_to_integers(const RationalBandwidthSpec& spec);

// Every violated invariant, one human-readable finding each; empty iff valid.
std::vector<std::string> validate(const Topology& topo);

// Parse, scale and validate in one go. Throws TopologyError listing findings.
ScaledTopology load_topology(std::string_view text);

// Serializes with integer bandwidths divided by `scale` (so parse + scale
// round-trips). Deterministic: nodes and links in sorted order.
std::string emit_topology(const Topology& topo, const Rational& scale = 1);

enum class PresetKind {
  kRing,                // directed ring c0 -> c1 -> ... -> c0
  kBidirectionalRing,   // ring in both directions
  kComplete,            // every ordered pair of compute nodes
  kStarSwitch,          // n compute nodes on one switch
  kTwoLevelCluster,     // clusters on local switches plus one global switch
  kRingUnwoundCluster,  // the cluster topology with switches unwound to rings
  kFatTree,             // hosts on leaf switches, leaves on every spine
};

std::optional<PresetKind> parse_preset_kind(std::string_view name);
std::string_view to_string(PresetKind kind);

struct PresetParams {
  std::size_t n = 0;  // ring, bidirectional_ring, complete, star_switch
  BigInt bw = 1;
  std::size_t clusters = 0;     // cluster presets
  std::size_t per_cluster = 0;  // compute nodes per cluster
  BigInt local_bw = 1;
  BigInt global_bw = 1;
  std::size_t leaves = 0;  // fat_tree
  std::size_t hosts_per_leaf = 0;
  std::size_t spines = 0;
  BigInt host_bw = 1;
  BigInt uplink_bw = 1;
};

// Deterministic preset topologies. two_level_cluster(2, 4, 10, 1) is the
// 8-node, 3-switch cluster example: computes v<i>_<j>, local switches s<i>,
// global switch s0. Throws TopologyError on invalid parameters.
Topology make_preset(PresetKind kind, const PresetParams& params);

}  // namespace bwsynth

#endif  // BWSYNTH_TOPOLOGY_HPP_
