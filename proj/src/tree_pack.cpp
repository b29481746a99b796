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

#include "bwsynth/tree_pack.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "bwsynth/maxflow.hpp"

namespace bwsynth {

TreeBatch make_root_batch(std::size_t nodes, NodeIndex root, const BigInt& multiplicity) {
  if (root >= nodes) throw std::out_of_range("batch root outside the graph");
  if (multiplicity < 1) throw std::invalid_argument("batch multiplicity must be positive");
  TreeBatch b;
  b.root = root;
  b.vertices = {root};
  b.member.assign(nodes, false);
  b.member[root] = true;
  b.multiplicity = multiplicity;
  return b;
}

BigInt compute_mu(const PackingState& state, const Topology& d, std::size_t target,
                  NodeIndex x, NodeIndex y) {
  const TreeBatch& batch = state.batches.at(target);
  if (!batch.member.at(x) || batch.member.at(y)) {
    throw std::invalid_argument("mu needs x inside the batch and y outside");
  }
  const auto git = state.residual.find({x, y});
  if (git == state.residual.end() || git->second <= 0) {
    throw std::invalid_argument("mu needs residual capacity on the edge");
  }
  const BigInt cap = std::min(git->second, batch.multiplicity);

  // Spanning batches add exactly their multiplicity to both terms, so they
  // are left out. Batches with equal vertex sets share one node.
  std::map<std::vector<bool>, BigInt> groups;
  BigInt others = 0;
  for (std::size_t i = 0; i < state.batches.size(); ++i) {
    const TreeBatch& b = state.batches[i];
    if (i == target || b.spanning()) continue;
    groups[b.member] += b.multiplicity;
    others += b.multiplicity;
  }
  const std::size_t n = d.size();
  FlowNetwork net(n + groups.size());
  for (const auto& [e, g] : state.residual) net.add_edge(e.first, e.second, g);
  std::size_t s = n;
  for (const auto& [member, m] : groups) {
    net.add_edge(x, s, m);
    for (NodeIndex v = 0; v < n; ++v) {
      if (member[v]) net.add_unbounded_edge(s, v);
    }
    ++s;
  }
  const FlowResult r = max_flow(net, x, y, others + cap);
  if (r.limit_reached) return cap;
  const BigInt margin = r.value.value() - others;
  if (margin <= 0) return 0;
  return std::min(margin, cap);
}

namespace {

std::string describe_stall(const PackingState& state, const Topology& d, std::size_t i) {
  const TreeBatch& b = state.batches[i];
  std::ostringstream os;
  os << "tree packing stalled on batch rooted at " << d.id(b.root) << " (multiplicity "
     << b.multiplicity << ", vertices";
  for (NodeIndex v : b.vertices) os << ' ' << d.id(v);
  os << "; frontier";
  for (const auto& [e, g] : state.residual) {
    if (b.member[e.first] && !b.member[e.second]) {
      os << ' ' << d.id(e.first) << "->" << d.id(e.second) << ':' << g;
    }
  }
  os << ')';
  return os.str();
}

PackResult pack(const Topology& d, std::vector<TreeBatch> initial,
                const PackOptions& options) {
  if (!d.switch_nodes().empty()) {
    throw std::invalid_argument("tree packing needs a compute-only graph");
  }
  PackingState state{d.edges(), std::move(initial)};
  PackResult result;
  for (std::size_t i = 0; i < state.batches.size(); ++i) {
    while (!state.batches[i].spanning()) {
      bool grown = false;
      // Frontier in lexicographic (x, y) order.
      for (auto it = state.residual.begin(); it != state.residual.end(); ++it) {
        const auto [x, y] = it->first;
        const TreeBatch& b = state.batches[i];
        if (!b.member[x] || b.member[y]) continue;
        const BigInt mu = compute_mu(state, d, i, x, y);
        ++result.mu_evaluations;
        if (options.on_mu) options.on_mu(state, i, x, y, mu);
        if (mu == 0) continue;
        if (mu < b.multiplicity) {
          TreeBatch rest = b;
          rest.multiplicity = b.multiplicity - mu;
          state.batches[i].multiplicity = mu;
          state.batches.push_back(std::move(rest));
          ++result.splits;
        }
        TreeBatch& grow = state.batches[i];
        grow.edges.push_back({x, y});
        grow.vertices.push_back(y);
        grow.member[y] = true;
        BigInt& g = state.residual.at({x, y});
        g -= mu;
        if (g == 0) state.residual.erase({x, y});
        grown = true;
        break;
      }
      if (!grown) throw std::logic_error(describe_stall(state, d, i));
    }
  }
  result.batches = std::move(state.batches);
  return result;
}

}  // namespace

PackResult pack_spanning_trees(const Topology& d_star, const BigInt& k,
                               const PackOptions& options) {
  std::vector<TreeBatch> initial;
  for (NodeIndex v : d_star.compute_nodes()) {
    initial.push_back(make_root_batch(d_star.size(), v, k));
  }
  return pack(d_star, std::move(initial), options);
}

PackResult pack_rooted_trees(const Topology& d_star, NodeIndex root, const BigInt& c,
                             const PackOptions& options) {
  if (!d_star.is_compute(root)) throw std::invalid_argument("root is not a compute node");
  return pack(d_star, {make_root_batch(d_star.size(), root, c)}, options);
}

}  // namespace bwsynth
