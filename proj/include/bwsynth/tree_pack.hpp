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

#ifndef BWSYNTH_TREE_PACK_HPP_
#define BWSYNTH_TREE_PACK_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

#include "bwsynth/rational.hpp"
#include "bwsynth/topology.hpp"

namespace bwsynth {

// `multiplicity` identical partial out-trees sharing one edge list.
struct TreeBatch {
  NodeIndex root = 0;
  std::vector<NodeIndex> vertices;  // insertion order, root first
  std::vector<bool> member;         // membership by node index
  std::vector<Edge> edges;          // insertion order
  BigInt multiplicity;

  bool spanning() const { return vertices.size() == member.size(); }
};

TreeBatch make_root_batch(std::size_t nodes, NodeIndex root, const BigInt& multiplicity);

struct PackingState {
  std::map<Edge, BigInt> residual;  // g(e), zero entries erased
  std::vector<TreeBatch> batches;
};

// Largest multiplicity with which (x,y) can join batch `target` while the
// remaining packing stays feasible. `d` supplies the vertex count.
BigInt compute_mu(const PackingState& state, const Topology& d, std::size_t target,
                  NodeIndex x, NodeIndex y);

struct PackOptions {
  // Called before each mu evaluation is applied, with its result.
  std::function<void(const PackingState&, std::size_t target, NodeIndex x, NodeIndex y,
                     const BigInt& mu)>
      on_mu;
};

struct PackResult {
  std::vector<TreeBatch> batches;
  std::size_t splits = 0;
  std::size_t mu_evaluations = 0;
};

// k out-trees per compute root in the compute-only graph `d_star`.
PackResult pack_spanning_trees(const Topology& d_star, const BigInt& k,
                               const PackOptions& options = {});

// c out-trees from `root`.
PackResult pack_rooted_trees(const Topology& d_star, NodeIndex root, const BigInt& c,
                             const PackOptions& options = {});

}  // namespace bwsynth

#endif  // BWSYNTH_TREE_PACK_HPP_
