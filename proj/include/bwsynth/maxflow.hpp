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

#ifndef BWSYNTH_MAXFLOW_HPP_
#define BWSYNTH_MAXFLOW_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bwsynth/rational.hpp"
#include "bwsynth/topology.hpp"

namespace bwsynth {

// A nonnegative integer or the distinguished value Unbounded, which absorbs
// addition and compares above every finite value.
class Capacity {
 public:
  Capacity() = default;
  Capacity(BigInt value);  // NOLINT(google-explicit-constructor)
  static Capacity unbounded();

  bool is_unbounded() const { return unbounded_; }
  // Throws std::logic_error when unbounded.
  const BigInt& value() const;

  friend bool operator==(const Capacity& a, const Capacity& b);
  friend bool operator<(const Capacity& a, const Capacity& b);
  friend Capacity operator+(const Capacity& a, const Capacity& b);

  std::string str() const;

 private:
  BigInt value_ = 0;
  bool unbounded_ = false;
};

// Directed flow network over vertices 0..size()-1. Parallel arcs are allowed
// and behave as their sum.
class FlowNetwork {
 public:
  struct Arc {
    std::size_t from;
    std::size_t to;
    Capacity capacity;
  };

  explicit FlowNetwork(std::size_t vertices = 0) : size_(vertices) {}

  std::size_t add_vertex() { return size_++; }
  std::size_t size() const { return size_; }

  // Zero-capacity arcs and self-loops are dropped.
  void add_edge(std::size_t from, std::size_t to, const Capacity& capacity);
  void add_unbounded_edge(std::size_t from, std::size_t to) {
    add_edge(from, to, Capacity::unbounded());
  }

  const std::vector<Arc>& arcs() const { return arcs_; }

 private:
  std::size_t size_;
  std::vector<Arc> arcs_;
};

struct FlowResult {
  Capacity value;
  // Vertices reachable from s in the final residual graph: the minimal
  // source side of a minimum cut. Empty when the flow is unbounded or the
  // limit was reached.
  std::vector<bool> source_side;
  bool limit_reached = false;
};

// Exact maximum s-t flow (Dinic). When `limit` is given the computation may
// stop as soon as the flow reaches it; the returned value is then >= limit
// and `limit_reached` is set. An s-t pair joined only through unbounded arcs
// yields an unbounded value.
FlowResult max_flow(const FlowNetwork& net, std::size_t s, std::size_t t,
                    const std::optional<BigInt>& limit = std::nullopt);

// Vertex v of the result is node v of the topology.
FlowNetwork to_flow_network(const Topology& topo);

// How the virtual source attaches to compute nodes, in integer units:
// all_roots(k) feeds k into every compute node and asks for N*k at each;
// single_root(r, c) feeds c into r only and asks for c.
class OracleDemand {
 public:
  static OracleDemand all_roots(BigInt per_root);
  static OracleDemand single_root(std::string root, BigInt amount);

  bool is_single_root() const { return !root_.empty(); }
  const std::string& root() const { return root_; }
  const BigInt& amount() const { return amount_; }

  BigInt weight(const Topology& topo, NodeIndex v) const;
  BigInt threshold(const Topology& topo) const;

 private:
  std::string root_;
  BigInt amount_ = 0;
};

struct VirtualSourceNetwork {
  FlowNetwork net;      // topology vertices plus the source
  std::size_t source;   // == topology size
  BigInt scale;         // factor applied to every topology capacity
  BigInt threshold;     // flow each compute node must receive to pass
};

// G_x: topology capacities times denominator(x), a source arc of capacity
// numerator(x) into each compute node, threshold N * numerator(x). Testing
// min flow >= N*x in G_x is exactly this integer comparison.
VirtualSourceNetwork attach_virtual_source(const Topology& topo, const Rational& x);
VirtualSourceNetwork attach_virtual_source(const Topology& topo,
                                           const OracleDemand& demand);

struct OracleWitness {
  NodeIndex node;            // first compute node (sorted order) that fails
  std::vector<bool> cut;     // its min cut source side, without the source
  BigInt flow;               // the flow it received
};

struct OracleResult {
  bool pass = false;
  std::optional<OracleWitness> witness;  // set iff !pass
};

// min over compute v of F(s, v) >= threshold, with a witness cut on failure.
OracleResult oracle_min_source_flow(const Topology& topo, const Rational& x);
OracleResult oracle_min_source_flow(const Topology& topo, const OracleDemand& demand);

// Worker count for per-node flow fan-out (default 1). Results never depend
// on it.
void set_parallelism(unsigned jobs);
unsigned parallelism();

}  // namespace bwsynth

#endif  // BWSYNTH_MAXFLOW_HPP_
