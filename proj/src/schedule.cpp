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

#include "bwsynth/schedule.hpp"

#include <algorithm>
#include <set>

#include "bwsynth/maxflow.hpp"
#include "bwsynth/optimality.hpp"
#include "bwsynth/tree_pack.hpp"

namespace bwsynth {

std::optional<Collective> parse_collective(std::string_view name) {
  if (name == "allgather") return Collective::kAllgather;
  if (name == "reduce-scatter") return Collective::kReduceScatter;
  if (name == "broadcast") return Collective::kBroadcast;
  if (name == "reduce") return Collective::kReduce;
  if (name == "allreduce") return Collective::kAllreduce;
  return std::nullopt;
}

std::string_view to_string(Collective c) {
  switch (c) {
    case Collective::kAllgather: return "allgather";
    case Collective::kReduceScatter: return "reduce-scatter";
    case Collective::kBroadcast: return "broadcast";
    case Collective::kReduce: return "reduce";
    case Collective::kAllreduce: return "allreduce";
  }
  return "unknown";
}

bool is_rooted(Collective c) {
  return c == Collective::kBroadcast || c == Collective::kReduce;
}

namespace {

bool balanced(const Topology& topo) {
  for (NodeIndex v = 0; v < topo.size(); ++v) {
    if (topo.egress(v) != topo.ingress(v)) return false;
  }
  return true;
}

// Turns one packed batch into trees whose edges each follow a single
// physical path, splitting the multiplicity where path pieces change.
std::vector<ScheduleTree> realize(const TreeBatch& batch, const Topology& direct,
                                  const Topology& physical, PathAllocator& allocator) {
  const BigInt& m = batch.multiplicity;
  std::vector<std::vector<PathPiece>> pieces;
  std::set<BigInt> cuts{0, m};
  for (const auto& [x, y] : batch.edges) {
    pieces.push_back(allocator.take(physical.index(direct.id(x)),
                                    physical.index(direct.id(y)), m));
    BigInt at = 0;
    for (const auto& p : pieces.back()) cuts.insert(at += p.amount);
  }
  std::vector<ScheduleTree> out;
  std::vector<std::size_t> cursor(pieces.size(), 0);
  std::vector<BigInt> consumed(pieces.size(), 0);  // prefix end of current piece
  for (std::size_t e = 0; e < pieces.size(); ++e) consumed[e] = pieces[e][0].amount;
  const std::vector<BigInt> bounds(cuts.begin(), cuts.end());
  for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
    ScheduleTree tree{direct.id(batch.root), bounds[j + 1] - bounds[j], {}};
    for (std::size_t e = 0; e < pieces.size(); ++e) {
      while (consumed[e] <= bounds[j]) consumed[e] += pieces[e][++cursor[e]].amount;
      ScheduleEdge edge{direct.id(batch.edges[e].first), direct.id(batch.edges[e].second),
                        {}};
      for (NodeIndex v : pieces[e][cursor[e]].path) edge.path.push_back(physical.id(v));
      tree.edges.push_back(std::move(edge));
    }
    out.push_back(std::move(tree));
  }
  return out;
}

std::vector<ScheduleTree> realize_all(const std::vector<TreeBatch>& batches,
                                      const SplitResult& split, const Topology& physical) {
  PathAllocator allocator(physical, split.emap);
  std::vector<ScheduleTree> trees;
  for (const auto& b : batches) {
    for (auto& t : realize(b, split.direct, physical, allocator)) trees.push_back(std::move(t));
  }
  return trees;
}

BigInt root_connectivity(const Topology& topo, NodeIndex root) {
  const FlowNetwork net = to_flow_network(topo);
  std::optional<BigInt> c;
  for (NodeIndex v : topo.compute_nodes()) {
    if (v == root) continue;
    const FlowResult r = max_flow(net, root, v, c);
    const BigInt f = r.value.value();
    if (!c || f < *c) c = f;
  }
  if (!c) throw std::invalid_argument("broadcast needs a second compute node");
  return *c;
}

struct AllgatherBuild {
  PipelineSchedule sched;
  OptimalityResult opt;
};

AllgatherBuild allgather_impl(const Topology& topo, const SynthOptions& options) {
  AllgatherBuild out;
  out.opt = optimal_ratio(topo);
  const Rational n(static_cast<long long>(topo.compute_nodes().size()));
  const Rational optimum = out.opt.ratio * options.scale / n;

  PipelineSchedule& s = out.sched;
  s.collective = Collective::kAllgather;
  s.N = topo.compute_nodes().size();
  s.scale = options.scale;
  s.lower_bound_per_unit = optimum;

  Topology d;
  if (options.fixed_k) {
    const BigInt k = *options.fixed_k;
    const FixedKResult fk = fixed_k_search(topo, k, out.opt.ratio);
    const OracleDemand demand = OracleDemand::all_roots(k);
    // Splitting needs a balanced graph; walk up the breakpoints n/b_e
    // until the floored capacities are balanced and still feasible.
    Rational u = fk.U_star;
    for (;;) {
      d = topo.floored(u);
      if ((d.switch_nodes().empty() || balanced(d)) &&
          oracle_min_source_flow(d, demand).pass) {
        break;
      }
      std::optional<Rational> next;
      for (const auto& [e, b] : topo.edges()) {
        const Rational cand(floor(u * Rational(b)) + 1, b);
        if (!next || cand < *next) next = cand;
      }
      u = *next;
    }
    s.k = k;
    s.U = u;
    s.fixed_k = FixedKInfo{fk.U_star, optimum, u};
  } else {
    s.k = out.opt.k;
    s.U = out.opt.U;
    d = topo.scaled(s.U);
  }

  SplitOptions split_options;
  split_options.policy = options.policy;
  const SplitResult split = remove_switches(d, OracleDemand::all_roots(s.k), split_options);
  const PackResult packed = pack_spanning_trees(split.direct, s.k);
  s.trees = realize_all(packed.batches, split, d);
  s.emap = split.emap;
  s.runtime_per_unit = evaluate_runtime(s, topo);

  if (options.fixed_k) {
    const Rational ceiling = s.U / Rational(s.k) * options.scale / n;
    if (s.runtime_per_unit > ceiling) {
      throw SynthesisError("fixed-k runtime " + to_string(s.runtime_per_unit) +
                           " exceeds U/k bound " + to_string(ceiling));
    }
  } else if (s.runtime_per_unit != optimum) {
    throw SynthesisError("allgather runtime " + to_string(s.runtime_per_unit) +
                         " misses the lower bound " + to_string(optimum));
  }
  return out;
}

}  // namespace

PipelineSchedule reversed(const PipelineSchedule& sched, Collective relabel) {
  PipelineSchedule out = sched;
  out.collective = relabel;
  for (auto& tree : out.trees) {
    for (auto& e : tree.edges) {
      std::swap(e.src, e.dst);
      std::reverse(e.path.begin(), e.path.end());
    }
  }
  out.emap.clear();
  for (const auto& [edge, vias] : sched.emap) out.emap[{edge.second, edge.first}] = vias;
  return out;
}

PipelineSchedule build_allgather(const Topology& topo, const SynthOptions& options) {
  return allgather_impl(topo, options).sched;
}

PipelineSchedule build_reduce_scatter(const Topology& topo, const SynthOptions& options) {
  return reversed(build_allgather(topo.transposed(), options), Collective::kReduceScatter);
}

Rational broadcast_bound(const Topology& topo, NodeIndex root, const Rational& scale) {
  const BigInt c = root_connectivity(topo, root);
  if (c == 0) throw std::invalid_argument("root cannot reach every compute node");
  return scale / Rational(c);
}

PipelineSchedule build_broadcast(const Topology& topo, std::string_view root,
                                 const SynthOptions& options) {
  if (options.fixed_k) {
    throw std::invalid_argument("a fixed tree count applies to allgather-based collectives");
  }
  const auto r = topo.find(root);
  if (!r || !topo.is_compute(*r)) {
    throw std::invalid_argument("broadcast root '" + std::string(root) +
                                "' is not a compute node");
  }
  const BigInt c = root_connectivity(topo, *r);
  if (c == 0) throw std::invalid_argument("root cannot reach every compute node");

  PipelineSchedule s;
  s.collective = Collective::kBroadcast;
  s.N = topo.compute_nodes().size();
  s.k = c;
  s.U = 1;
  s.scale = options.scale;
  s.root = std::string(root);
  s.lower_bound_per_unit = options.scale / Rational(c);

  SplitOptions split_options;
  split_options.policy = options.policy;
  const SplitResult split =
      remove_switches(topo, OracleDemand::single_root(std::string(root), c), split_options);
  const PackResult packed =
      pack_rooted_trees(split.direct, split.direct.index(root), c);
  s.trees = realize_all(packed.batches, split, topo);
  s.emap = split.emap;
  s.runtime_per_unit = evaluate_runtime(s, topo);
  if (s.runtime_per_unit != s.lower_bound_per_unit) {
    throw SynthesisError("broadcast runtime " + to_string(s.runtime_per_unit) +
                         " misses the lower bound " + to_string(s.lower_bound_per_unit));
  }
  return s;
}

PipelineSchedule build_reduce(const Topology& topo, std::string_view root,
                              const SynthOptions& options) {
  return reversed(build_broadcast(topo.transposed(), root, options), Collective::kReduce);
}

AllreduceBounds allreduce_bounds(const Topology& topo, const std::vector<bool>& bottleneck,
                                 const Rational& scale) {
  const auto& computes = topo.compute_nodes();
  const std::size_t n = computes.size();
  if (n < 2) throw std::invalid_argument("allreduce needs two compute nodes");
  const FlowNetwork net = to_flow_network(topo);

  // Smallest cut splitting the compute nodes.
  std::optional<BigInt> min_cut;
  for (std::size_t i = 1; i < n; ++i) {
    const BigInt f = max_flow(net, computes[0], computes[i]).value.value();
    if (!min_cut || f < *min_cut) min_cut = f;
  }
  // d_v: smallest egress of a set holding v and no other compute node.
  std::vector<BigInt> degree(n);
  BigInt max_degree = 0;
  for (std::size_t i = 0; i < n; ++i) {
    FlowNetwork g = net;
    const std::size_t sink = g.add_vertex();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) g.add_unbounded_edge(computes[j], sink);
    }
    degree[i] = max_flow(g, computes[i], sink).value.value();
    max_degree = std::max(max_degree, degree[i]);
  }
  if (*min_cut == 0 || max_degree == 0) {
    throw std::invalid_argument("compute nodes are not mutually reachable");
  }

  AllreduceBounds b;
  b.lb_cut = scale / Rational(*min_cut);
  b.lb_degree = Rational(BigInt(2 * (n - 1)), BigInt(n)) * scale / Rational(max_degree);
  std::size_t inside = 0;
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < n; ++i) {
    if (bottleneck.at(computes[i])) {
      ++inside;
    } else {
      outside.push_back(i);
    }
  }
  b.half_split = 2 * inside == n;
  b.singleton_max = outside.size() == 1 && degree[outside[0]] == max_degree;
  return b;
}

PipelineSchedule build_allreduce(const Topology& topo, const SynthOptions& options) {
  const PipelineSchedule rs = build_reduce_scatter(topo, options);
  AllgatherBuild ag = allgather_impl(topo, options);

  PipelineSchedule s;
  s.collective = Collective::kAllreduce;
  s.N = ag.sched.N;
  s.k = ag.sched.k;
  s.U = ag.sched.U;
  s.scale = options.scale;
  s.runtime_per_unit = rs.runtime_per_unit + ag.sched.runtime_per_unit;
  s.bounds = allreduce_bounds(topo, ag.opt.bottleneck, options.scale);
  s.lower_bound_per_unit = std::max(s.bounds->lb_cut, s.bounds->lb_degree);
  s.fixed_k = ag.sched.fixed_k;
  s.phases = {rs, std::move(ag.sched)};
  if (!options.fixed_k && (s.bounds->half_split || s.bounds->singleton_max) &&
      s.runtime_per_unit != s.lower_bound_per_unit) {
    throw SynthesisError("allreduce runtime " + to_string(s.runtime_per_unit) +
                         " misses max(lb_cut, lb_degree) = " +
                         to_string(s.lower_bound_per_unit) +
                         " although an optimality condition holds");
  }
  return s;
}

PipelineSchedule build_schedule(const Topology& topo, Collective collective,
                                const std::optional<std::string>& root,
                                const SynthOptions& options) {
  if (is_rooted(collective) != root.has_value()) {
    throw std::invalid_argument(is_rooted(collective)
                                    ? "a root is required for this collective"
                                    : "a root only applies to broadcast and reduce");
  }
  switch (collective) {
    case Collective::kAllgather: return build_allgather(topo, options);
    case Collective::kReduceScatter: return build_reduce_scatter(topo, options);
    case Collective::kBroadcast: return build_broadcast(topo, *root, options);
    case Collective::kReduce: return build_reduce(topo, *root, options);
    case Collective::kAllreduce: return build_allreduce(topo, options);
  }
  throw std::invalid_argument("unknown collective");
}

Rational evaluate_runtime(const PipelineSchedule& sched, const Topology& topo,
                          const Rational& M) {
  if (sched.collective == Collective::kAllreduce) {
    if (sched.phases.empty()) throw std::invalid_argument("allreduce schedule without phases");
    Rational total = 0;
    for (const auto& phase : sched.phases) total += evaluate_runtime(phase, topo, M);
    return total;
  }
  if (sched.trees.empty()) throw std::invalid_argument("schedule has no trees");
  if (sched.k <= 0 || sched.N == 0) throw std::invalid_argument("schedule has no tree count");

  std::map<Edge, BigInt> count;
  for (const auto& tree : sched.trees) {
    for (const auto& e : tree.edges) {
      if (e.path.size() < 2 || e.path.front() != e.src || e.path.back() != e.dst) {
        throw std::invalid_argument("path of " + e.src + " -> " + e.dst +
                                    " does not join its endpoints");
      }
      for (std::size_t h = 0; h + 1 < e.path.size(); ++h) {
        const auto a = topo.find(e.path[h]);
        const auto b = topo.find(e.path[h + 1]);
        if (!a || !b || topo.capacity(*a, *b) == 0) {
          throw std::invalid_argument("path hop " + e.path[h] + " -> " + e.path[h + 1] +
                                      " is not a topology edge");
        }
        count[{*a, *b}] += tree.multiplicity;
      }
    }
  }
  const Rational share =
      is_rooted(sched.collective)
          ? M / Rational(sched.k)
          : M / (Rational(static_cast<long long>(sched.N)) * Rational(sched.k));
  Rational worst = 0;
  for (const auto& [e, c] : count) {
    worst = std::max(worst, Rational(c) * share * sched.scale / Rational(topo.capacity(e.first, e.second)));
  }
  return worst;
}

}  // namespace bwsynth
