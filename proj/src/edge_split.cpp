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

#include "bwsynth/edge_split.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "parallel.hpp"

namespace bwsynth {

std::optional<SplitPolicy> parse_split_policy(std::string_view name) {
  if (name == "canonical") return SplitPolicy::kCanonical;
  if (name == "cross-group-first") return SplitPolicy::kCrossGroupFirst;
  return std::nullopt;
}

std::string_view to_string(SplitPolicy policy) {
  return policy == SplitPolicy::kCanonical ? "canonical" : "cross-group-first";
}

namespace {

// Mutable adjacency view used while splitting.
class WorkGraph {
 public:
  explicit WorkGraph(const Topology& topo) : out_(topo.size()), in_(topo.size()) {
    for (const auto& [e, c] : topo.edges()) {
      out_[e.first][e.second] = c;
      in_[e.second][e.first] = c;
    }
  }

  std::size_t size() const { return out_.size(); }

  BigInt cap(NodeIndex u, NodeIndex v) const {
    const auto it = out_[u].find(v);
    return it == out_[u].end() ? BigInt(0) : it->second;
  }

  void add(NodeIndex u, NodeIndex v, const BigInt& delta) {
    BigInt& c = out_[u][v];
    c += delta;
    if (c < 0) throw std::logic_error("negative capacity while splitting");
    if (c == 0) {
      out_[u].erase(v);
      in_[v].erase(u);
    } else {
      in_[v][u] = c;
    }
  }

  const std::map<NodeIndex, BigInt>& out(NodeIndex u) const { return out_[u]; }
  const std::map<NodeIndex, BigInt>& in(NodeIndex v) const { return in_[v]; }

  std::map<Edge, BigInt> edge_map() const {
    std::map<Edge, BigInt> caps;
    for (NodeIndex u = 0; u < size(); ++u) {
      for (const auto& [v, c] : out_[u]) caps[{u, v}] = c;
    }
    return caps;
  }

  bool eulerian() const {
    for (NodeIndex v = 0; v < size(); ++v) {
      BigInt balance = 0;
      for (const auto& [x, c] : out_[v]) balance += c;
      for (const auto& [x, c] : in_[v]) balance -= c;
      if (balance != 0) return false;
    }
    return true;
  }

 private:
  std::vector<std::map<NodeIndex, BigInt>> out_;
  std::vector<std::map<NodeIndex, BigInt>> in_;
};

struct DemandView {
  std::vector<NodeIndex> computes;
  std::vector<BigInt> weights;  // aligned with computes
  BigInt threshold;
};

DemandView view_of(const Topology& topo, const OracleDemand& demand) {
  DemandView view{topo.compute_nodes(), {}, demand.threshold(topo)};
  for (NodeIndex v : view.computes) view.weights.push_back(demand.weight(topo, v));
  return view;
}

FlowNetwork with_source(const WorkGraph& g, const DemandView& demand) {
  FlowNetwork net(g.size() + 1);
  for (NodeIndex u = 0; u < g.size(); ++u) {
    for (const auto& [v, c] : g.out(u)) net.add_edge(u, v, c);
  }
  for (std::size_t i = 0; i < demand.computes.size(); ++i) {
    net.add_edge(g.size(), demand.computes[i], demand.weights[i]);
  }
  return net;
}

// min over v of the flow margin of one auxiliary family, capped at `bound`.
// `extra` returns the three unbounded arcs for node v as (a,b) pairs.
template <typename Extra>
BigInt margin_over_nodes(const FlowNetwork& base, const DemandView& demand,
                         NodeIndex from, NodeIndex to, BigInt bound, Extra extra) {
  auto margin = [&](NodeIndex v, const BigInt& cap) -> std::optional<BigInt> {
    FlowNetwork net = base;
    for (const auto& [a, b] : extra(v)) net.add_unbounded_edge(a, b);
    const FlowResult r = max_flow(net, from, to, demand.threshold + cap);
    if (r.limit_reached) return std::nullopt;
    BigInt m = r.value.value() - demand.threshold;
    if (m < 0) throw std::logic_error("negative flow margin: oracle fails before splitting");
    return m;
  };

  if (parallelism() > 1) {
    std::vector<std::optional<BigInt>> margins(demand.computes.size());
    internal::parallel_for(demand.computes.size(), [&](std::size_t i) {
      margins[i] = margin(demand.computes[i], bound);
    });
    for (const auto& m : margins) {
      if (m && *m < bound) bound = *m;
    }
    return bound;
  }
  for (NodeIndex v : demand.computes) {
    if (bound == 0) break;
    if (auto m = margin(v, bound); m && *m < bound) bound = *m;
  }
  return bound;
}

BigInt splittable(const WorkGraph& g, const DemandView& demand, NodeIndex u,
                  NodeIndex w, NodeIndex t) {
  BigInt bound = std::min(g.cap(u, w), g.cap(w, t));
  if (bound == 0) return 0;
  const FlowNetwork base = with_source(g, demand);
  const NodeIndex s = g.size();
  using Arcs = std::vector<std::pair<NodeIndex, NodeIndex>>;
  // Cuts holding u, t and the source but not w or v.
  bound = margin_over_nodes(base, demand, u, w, bound, [&](NodeIndex v) {
    return Arcs{{u, s}, {u, t}, {v, w}};
  });
  if (bound == 0) return 0;
  // Cuts holding w and the source but not u, t or v.
  return margin_over_nodes(base, demand, w, t, bound, [&](NodeIndex v) {
    return Arcs{{w, s}, {u, t}, {v, t}};
  });
}

std::vector<NodeIndex> order_candidates(const WorkGraph& g, SplitPolicy policy,
                                        NodeIndex w, NodeIndex t) {
  std::vector<NodeIndex> candidates;
  for (const auto& [u, c] : g.in(w)) candidates.push_back(u);
  std::vector<std::size_t> dist(g.size(), std::numeric_limits<std::size_t>::max());
  if (policy == SplitPolicy::kCrossGroupFirst) {
    // Hop distance to t avoiding w, by reverse BFS from t.
    dist[t] = 0;
    std::deque<NodeIndex> queue{t};
    while (!queue.empty()) {
      const NodeIndex y = queue.front();
      queue.pop_front();
      for (const auto& [x, c] : g.in(y)) {
        if (x == w || dist[x] != std::numeric_limits<std::size_t>::max()) continue;
        dist[x] = dist[y] + 1;
        queue.push_back(x);
      }
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](NodeIndex a, NodeIndex b) {
    if ((a == t) != (b == t)) return b == t;
    if (policy == SplitPolicy::kCrossGroupFirst && dist[a] != dist[b]) {
      return dist[a] > dist[b];
    }
    return a < b;
  });
  return candidates;
}

}  // namespace

BigInt max_splittable(const Topology& d, const OracleDemand& demand, NodeIndex u,
                      NodeIndex w, NodeIndex t) {
  if (!d.is_switch(w)) throw std::invalid_argument("split node is not a switch");
  if (d.capacity(u, w) == 0 || d.capacity(w, t) == 0) {
    throw std::invalid_argument("split pair needs capacity on both edges");
  }
  return splittable(WorkGraph(d), view_of(d, demand), u, w, t);
}

SplitResult remove_switches(const Topology& d, const OracleDemand& demand,
                            const SplitOptions& options) {
  const DemandView view = view_of(d, demand);
  WorkGraph g(d);
  if (!d.switch_nodes().empty() && !g.eulerian()) {
    throw std::invalid_argument("edge splitting needs an Eulerian graph");
  }
  if (!oracle_min_source_flow(d, demand).pass) {
    throw std::invalid_argument("oracle fails on the graph to split");
  }

  SplitResult result;
  result.demand = demand;
  for (NodeIndex w : d.switch_nodes()) {
    std::vector<NodeIndex> targets;
    for (const auto& [t, c] : g.out(w)) targets.push_back(t);
    for (NodeIndex t : targets) {
      for (NodeIndex u : order_candidates(g, options.policy, w, t)) {
        if (g.cap(u, w) == 0) continue;
        const BigInt m = splittable(g, view, u, w, t);
        if (m == 0) continue;
        g.add(u, w, -m);
        g.add(w, t, -m);
        if (u != t) g.add(u, t, m);
        result.emap[{d.id(u), d.id(t)}][d.id(w)] += m;
        ++result.steps;
        if (options.paranoid) {
          if (!g.eulerian()) throw std::logic_error("split broke the Eulerian property");
          if (!oracle_min_source_flow(d.with_capacities(g.edge_map()), demand).pass) {
            throw std::logic_error("split broke the oracle at " + d.id(u) + " -> " +
                                   d.id(w) + " -> " + d.id(t));
          }
        }
        if (options.on_step) {
          options.on_step({u, w, t, m}, d.with_capacities(g.edge_map()));
        }
        if (g.cap(w, t) == 0) break;
      }
      // Edge (w,t) must be empty at this point.
      if (g.cap(w, t) != 0) {
        throw std::logic_error("egress edge " + d.id(w) + " -> " + d.id(t) +
                               " keeps capacity " + g.cap(w, t).str() +
                               " after splitting");
      }
    }
    if (!g.in(w).empty()) {
      throw std::logic_error("switch " + d.id(w) + " keeps ingress after splitting");
    }
  }

  std::vector<NodeDecl> nodes;
  for (NodeIndex v : d.compute_nodes()) nodes.push_back(d.nodes()[v]);
  std::map<NamedEdge, BigInt> caps;
  for (const auto& [e, c] : g.edge_map()) caps[{d.id(e.first), d.id(e.second)}] = c;
  result.direct = Topology(std::move(nodes), caps);
  return result;
}

// ---------------------------------------------------------------------------
// Path recovery

PathAllocator::PathAllocator(const Topology& physical, const EmapTable& emap)
    : physical_(physical) {
  for (const auto& [edge, vias] : emap) {
    const NodeIndex u = physical.index(edge.first);
    const NodeIndex t = physical.index(edge.second);
    if (u == t) continue;  // loop splits are never served
    Pool& pool = pools_[{u, t}];
    pool.direct = physical.capacity(u, t);
    for (const auto& [w, amount] : vias) pool.via.emplace_back(physical.index(w), amount);
  }
}

std::vector<PathPiece> PathAllocator::take(NodeIndex u, NodeIndex t,
                                           const BigInt& amount) {
  auto it = pools_.find({u, t});
  if (it == pools_.end()) {
    it = pools_.emplace(Edge{u, t}, Pool{physical_.capacity(u, t), {}}).first;
  }
  Pool& pool = it->second;  // map nodes are stable across the recursion
  std::vector<PathPiece> out;
  BigInt need = amount;
  auto emit = [&out](std::vector<NodeIndex> path, const BigInt& a) {
    if (!out.empty() && out.back().path == path) {
      out.back().amount += a;
    } else {
      out.push_back({std::move(path), a});
    }
  };
  if (need > 0 && pool.direct > 0) {
    const BigInt a = std::min(need, pool.direct);
    pool.direct -= a;
    need -= a;
    emit({u, t}, a);
  }
  for (auto& [w, left] : pool.via) {
    if (need == 0) break;
    if (left == 0) continue;
    const BigInt a = std::min(need, left);
    left -= a;
    need -= a;
    const auto first = take(u, w, a);
    const auto second = take(w, t, a);
    std::size_t i = 0;
    std::size_t j = 0;
    BigInt ri = first[0].amount;
    BigInt rj = second[0].amount;
    while (i < first.size() && j < second.size()) {
      const BigInt piece = std::min(ri, rj);
      std::vector<NodeIndex> path = first[i].path;
      path.insert(path.end(), second[j].path.begin() + 1, second[j].path.end());
      emit(std::move(path), piece);
      ri -= piece;
      rj -= piece;
      if (ri == 0 && ++i < first.size()) ri = first[i].amount;
      if (rj == 0 && ++j < second.size()) rj = second[j].amount;
    }
  }
  if (need > 0) {
    throw std::logic_error("no capacity left to route " + physical_.id(u) + " -> " +
                           physical_.id(t));
  }
  return out;
}

std::vector<PathPiece> recover_paths(const EmapTable& emap, const Topology& original,
                                     NodeIndex u, NodeIndex t, const BigInt& demand) {
  PathAllocator allocator(original, emap);
  return allocator.take(u, t, demand);
}

}  // namespace bwsynth
