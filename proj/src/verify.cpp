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

#include "bwsynth/verify.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bwsynth {

namespace {

// Visits every S (as a membership vector) that holds some but not all
// compute nodes, with its compute count and egress.
void for_each_cut(const Topology& topo,
                  const std::function<void(const std::vector<bool>&, std::size_t,
                                           const BigInt&)>& visit) {
  const std::size_t n = topo.size();
  if (n > kBruteForceMaxNodes) {
    throw std::invalid_argument("too many nodes for cut enumeration");
  }
  const std::size_t total = topo.compute_nodes().size();
  std::vector<std::pair<Edge, BigInt>> edges(topo.edges().begin(), topo.edges().end());
  std::vector<bool> members(n);
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::size_t inside = 0;
    for (std::size_t v = 0; v < n; ++v) {
      members[v] = (mask >> v) & 1;
      if (members[v] && topo.is_compute(v)) ++inside;
    }
    if (inside == 0 || inside == total) continue;
    BigInt out = 0;
    for (const auto& [e, c] : edges) {
      if (members[e.first] && !members[e.second]) out += c;
    }
    visit(members, inside, out);
  }
}

std::vector<NodeIndex> listing(const std::vector<bool>& members) {
  std::vector<NodeIndex> out;
  for (NodeIndex v = 0; v < members.size(); ++v) {
    if (members[v]) out.push_back(v);
  }
  return out;
}

// Plain residual network for shortest augmenting paths.
class RefNetwork {
 public:
  explicit RefNetwork(std::size_t n) : cap_(n) {}

  std::size_t add_vertex() {
    cap_.emplace_back();
    return cap_.size() - 1;
  }
  void add(std::size_t a, std::size_t b, const BigInt& c) {
    if (a != b && c > 0) cap_[a][b] += c;
  }

  BigInt flow(std::size_t s, std::size_t t) const {
    auto res = cap_;
    for (std::size_t a = 0; a < res.size(); ++a) {
      for (const auto& [b, c] : cap_[a]) res[b].try_emplace(a, 0);
    }
    BigInt total = 0;
    for (;;) {
      std::vector<std::optional<std::size_t>> prev(res.size());
      prev[s] = s;
      std::deque<std::size_t> queue{s};
      while (!queue.empty() && !prev[t]) {
        const std::size_t a = queue.front();
        queue.pop_front();
        for (const auto& [b, c] : res[a]) {
          if (c > 0 && !prev[b]) {
            prev[b] = a;
            queue.push_back(b);
          }
        }
      }
      if (!prev[t]) return total;
      BigInt push = -1;
      for (std::size_t b = t; b != s; b = *prev[b]) {
        const BigInt& c = res[*prev[b]][b];
        if (push < 0 || c < push) push = c;
      }
      for (std::size_t b = t; b != s; b = *prev[b]) {
        res[*prev[b]][b] -= push;
        res[b][*prev[b]] += push;
      }
      total += push;
    }
  }

 private:
  std::vector<std::map<std::size_t, BigInt>> cap_;
};

RefNetwork ref_network(const Topology& topo, const BigInt& factor = 1) {
  RefNetwork net(topo.size());
  for (const auto& [e, c] : topo.edges()) net.add(e.first, e.second, c * factor);
  return net;
}

// Does every compute node receive N*x from a source feeding x into each?
bool ref_oracle(const Topology& topo, const Rational& x) {
  const BigInt num = numerator_of(x);
  RefNetwork net = ref_network(topo, denominator_of(x));
  const std::size_t s = net.add_vertex();
  for (NodeIndex v : topo.compute_nodes()) net.add(s, v, num);
  const BigInt need = num * topo.compute_nodes().size();
  for (NodeIndex v : topo.compute_nodes()) {
    if (net.flow(s, v) < need) return false;
  }
  return true;
}

// Exact optimum ratio, checked for `claim`. Enumerates small graphs and
// brackets larger ones with two oracle probes.
bool ratio_matches(const Topology& topo, const Rational& claim, std::string& how) {
  if (claim <= 0) {
    how = "nonpositive";
    return false;
  }
  if (topo.size() <= 16) {
    const Rational truth = brute_force_ratio(topo).ratio;
    how = "enumerated " + to_string(truth);
    return truth == claim;
  }
  BigInt x_min = -1;
  for (NodeIndex v : topo.compute_nodes()) {
    if (x_min < 0 || topo.ingress(v) < x_min) x_min = topo.ingress(v);
  }
  how = "oracle bracket";
  if (denominator_of(claim) > x_min) return false;
  const Rational below = claim - Rational(1, 2 * x_min * topo.total_capacity());
  return ref_oracle(topo, Rational(1) / claim) &&
         (below <= 0 || !ref_oracle(topo, Rational(1) / below));
}

BigInt root_min_flow(const Topology& topo, NodeIndex root) {
  const RefNetwork net = ref_network(topo);
  std::optional<BigInt> best;
  for (NodeIndex v : topo.compute_nodes()) {
    if (v == root) continue;
    const BigInt f = net.flow(root, v);
    if (!best || f < *best) best = f;
  }
  return best.value_or(0);
}

std::vector<BigInt> singleton_degrees(const Topology& topo) {
  const auto& computes = topo.compute_nodes();
  BigInt big = topo.total_capacity() + 1;
  std::vector<BigInt> out;
  for (NodeIndex v : computes) {
    RefNetwork net = ref_network(topo);
    const std::size_t sink = net.add_vertex();
    for (NodeIndex u : computes) {
      if (u != v) net.add(u, sink, big);
    }
    out.push_back(net.flow(v, sink));
  }
  return out;
}

class Report {
 public:
  explicit Report(std::string prefix) : prefix_(std::move(prefix)) {}
  void add(const std::string& name, bool pass, const std::string& detail = "") {
    checks_.push_back({prefix_ + name, pass, detail});
  }
  void merge(const std::vector<Check>& more) {
    checks_.insert(checks_.end(), more.begin(), more.end());
  }
  std::vector<Check> take() { return std::move(checks_); }

 private:
  std::string prefix_;
  std::vector<Check> checks_;
};

std::vector<Check> certify(const Topology& topo, const PipelineSchedule& s,
                           const std::string& prefix);

void certify_trees(const Topology& topo, const PipelineSchedule& s, Report& report) {
  const auto& computes = topo.compute_nodes();
  const std::size_t n = computes.size();
  const bool inward =
      s.collective == Collective::kReduceScatter || s.collective == Collective::kReduce;

  // (1) every tree is an out-tree (in-tree for the reversed collectives)
  // over exactly the compute nodes.
  std::string why;
  for (std::size_t i = 0; i < s.trees.size() && why.empty(); ++i) {
    const ScheduleTree& t = s.trees[i];
    const auto root = topo.find(t.root);
    if (!root || !topo.is_compute(*root)) {
      why = "tree " + std::to_string(i) + " root '" + t.root + "' is not a compute node";
      break;
    }
    if (t.edges.size() + 1 != n) {
      why = "tree " + std::to_string(i) + " has " + std::to_string(t.edges.size()) +
            " edges, expected " + std::to_string(n - 1);
      break;
    }
    std::map<NodeIndex, NodeIndex> parent;  // child -> parent, away from root
    for (const auto& e : t.edges) {
      const auto a = topo.find(inward ? e.dst : e.src);
      const auto b = topo.find(inward ? e.src : e.dst);
      if (!a || !b || !topo.is_compute(*a) || !topo.is_compute(*b)) {
        why = "tree " + std::to_string(i) + " edge " + e.src + " -> " + e.dst +
              " leaves the compute nodes";
        break;
      }
      if (*b == *root || !parent.emplace(*b, *a).second) {
        why = "tree " + std::to_string(i) + " node " + topo.id(*b) + " has two parents";
        break;
      }
    }
    if (!why.empty()) break;
    for (NodeIndex v : computes) {
      NodeIndex at = v;
      std::size_t hops = 0;
      while (at != *root && hops <= n) {
        const auto it = parent.find(at);
        if (it == parent.end()) break;
        at = it->second;
        ++hops;
      }
      if (at != *root) {
        why = "tree " + std::to_string(i) + " does not reach " + topo.id(v);
        break;
      }
    }
  }
  report.add("spanning", why.empty(), why);

  // (2) multiplicities.
  std::map<std::string, BigInt> per_root;
  for (const auto& t : s.trees) per_root[t.root] += t.multiplicity;
  why.clear();
  if (is_rooted(s.collective)) {
    if (!s.root) {
      why = "no root recorded";
    } else if (per_root.size() != 1 || per_root.begin()->first != *s.root) {
      why = "trees not all rooted at " + *s.root;
    } else if (per_root.begin()->second != s.k) {
      why = "multiplicities sum to " + per_root.begin()->second.str() + ", expected " +
            s.k.str();
    }
  } else {
    for (NodeIndex v : computes) {
      const auto it = per_root.find(topo.id(v));
      const BigInt got = it == per_root.end() ? BigInt(0) : it->second;
      if (got != s.k) {
        why = topo.id(v) + " roots " + got.str() + " trees, expected " + s.k.str();
        break;
      }
    }
    if (why.empty() && per_root.size() != n) why = "trees rooted outside the compute nodes";
  }
  report.add("multiplicities", why.empty(), why);

  // (3) paths follow topology edges through switches only; loads within
  // floor(U * b_e).
  std::map<Edge, BigInt> count;
  why.clear();
  for (const auto& t : s.trees) {
    for (const auto& e : t.edges) {
      if (e.path.size() < 2 || e.path.front() != e.src || e.path.back() != e.dst) {
        why = "path of " + e.src + " -> " + e.dst + " does not join its endpoints";
      }
      for (std::size_t h = 0; h + 1 < e.path.size() && why.empty(); ++h) {
        const auto a = topo.find(e.path[h]);
        const auto b = topo.find(e.path[h + 1]);
        if (!a || !b || topo.capacity(*a, *b) == 0) {
          why = "hop " + e.path[h] + " -> " + e.path[h + 1] + " is not a link";
        } else if (h > 0 && !topo.is_switch(*a)) {
          why = "path of " + e.src + " -> " + e.dst + " passes through compute node " +
                e.path[h];
        } else {
          count[{*a, *b}] += t.multiplicity;
        }
      }
      if (!why.empty()) break;
    }
    if (!why.empty()) break;
  }
  report.add("paths", why.empty(), why);
  const bool paths_ok = why.empty();

  why.clear();
  for (const auto& [e, c] : count) {
    const BigInt allowed = floor(s.U * Rational(topo.capacity(e.first, e.second)));
    if (c > allowed) {
      why = topo.id(e.first) + " -> " + topo.id(e.second) + " carries " + c.str() +
            " trees, capacity " + allowed.str();
      break;
    }
  }
  report.add("feasibility", paths_ok && why.empty(), paths_ok ? why : "paths invalid");

  // (4) runtime recomputed from the loads.
  Rational runtime = 0;
  if (paths_ok && s.k > 0 && s.N > 0) {
    const Rational share = is_rooted(s.collective)
                               ? Rational(1) / Rational(s.k)
                               : Rational(1) / (Rational(BigInt(s.N)) * Rational(s.k));
    for (const auto& [e, c] : count) {
      runtime = std::max(runtime, Rational(c) * share * s.scale /
                                      Rational(topo.capacity(e.first, e.second)));
    }
  }
  report.add("runtime", paths_ok && runtime == s.runtime_per_unit && runtime > 0,
             "recomputed " + to_string(runtime) + ", claimed " + to_string(s.runtime_per_unit));

  // (5) lower bound from an independent computation.
  const Topology flipped = inward ? topo.transposed() : topo;
  if (is_rooted(s.collective)) {
    const auto r = s.root ? topo.find(*s.root) : std::nullopt;
    const BigInt c = r ? root_min_flow(flipped, *r) : BigInt(0);
    const bool ok = c > 0 && s.lower_bound_per_unit == s.scale / Rational(c);
    report.add("lower_bound", ok,
               "min root cut " + c.str() + ", claimed " + to_string(s.lower_bound_per_unit));
  } else {
    std::string how;
    const Rational claim = s.lower_bound_per_unit * Rational(BigInt(n)) / s.scale;
    report.add("lower_bound", ratio_matches(flipped, claim, how),
               how + ", claimed ratio " + to_string(claim));
  }

  if (s.fixed_k) {
    const Rational ceiling = s.fixed_k->achieved_U / Rational(s.k) * s.scale /
                             Rational(BigInt(n));
    const bool ok = s.U == s.fixed_k->achieved_U && s.fixed_k->U_star <= s.U &&
                    s.runtime_per_unit >= s.lower_bound_per_unit &&
                    s.runtime_per_unit <= ceiling;
    report.add("fixed_k", ok,
               "runtime " + to_string(s.runtime_per_unit) + " within [" +
                   to_string(s.lower_bound_per_unit) + ", " + to_string(ceiling) + "]");
  } else {
    report.add("optimal", s.runtime_per_unit == s.lower_bound_per_unit,
               "runtime " + to_string(s.runtime_per_unit) + " vs bound " +
                   to_string(s.lower_bound_per_unit));
  }
}

void certify_allreduce(const Topology& topo, const PipelineSchedule& s, Report& report) {
  const bool shape = s.phases.size() == 2 &&
                     s.phases[0].collective == Collective::kReduceScatter &&
                     s.phases[1].collective == Collective::kAllgather;
  report.add("phases", shape, shape ? "" : "expected [reduce-scatter, allgather]");
  if (!shape) return;
  for (std::size_t i = 0; i < 2; ++i) {
    report.merge(certify(topo, s.phases[i], "phases/" + std::to_string(i) + "/"));
  }
  const Rational sum = s.phases[0].runtime_per_unit + s.phases[1].runtime_per_unit;
  report.add("runtime", sum == s.runtime_per_unit,
             "phase sum " + to_string(sum) + ", claimed " + to_string(s.runtime_per_unit));

  const auto& computes = topo.compute_nodes();
  const std::size_t n = computes.size();
  const RefNetwork net = ref_network(topo);
  std::optional<BigInt> min_cut;
  for (std::size_t i = 1; i < n; ++i) {
    const BigInt f = net.flow(computes[0], computes[i]);
    if (!min_cut || f < *min_cut) min_cut = f;
  }
  const std::vector<BigInt> degree = singleton_degrees(topo);
  const BigInt max_degree = *std::max_element(degree.begin(), degree.end());
  if (!s.bounds || !min_cut || *min_cut == 0 || max_degree == 0) {
    report.add("bounds", false, "bounds missing or topology disconnected");
    return;
  }
  const Rational lb_cut = s.scale / Rational(*min_cut);
  const Rational lb_degree =
      Rational(BigInt(2 * (n - 1)), BigInt(n)) * s.scale / Rational(max_degree);
  report.add("bounds", lb_cut == s.bounds->lb_cut && lb_degree == s.bounds->lb_degree,
             "lb_cut " + to_string(lb_cut) + ", lb_degree " + to_string(lb_degree));
  report.add("lower_bound", s.lower_bound_per_unit == std::max(lb_cut, lb_degree) &&
                                s.runtime_per_unit >= s.lower_bound_per_unit,
             "claimed " + to_string(s.lower_bound_per_unit));

  // Flags must be justified by some maximizing cut.
  if (topo.size() <= 16) {
    const Rational best = brute_force_ratio(topo).ratio;
    bool half = false;
    bool single = false;
    for_each_cut(topo, [&](const std::vector<bool>& members, std::size_t inside,
                           const BigInt& out) {
      if (out == 0 || Rational(BigInt(inside), out) != best) return;
      if (2 * inside == n) half = true;
      if (inside + 1 == n) {
        for (std::size_t i = 0; i < n; ++i) {
          if (!members[computes[i]] && degree[i] == max_degree) single = true;
        }
      }
    });
    const bool ok = (!s.bounds->half_split || half) && (!s.bounds->singleton_max || single);
    report.add("flags", ok,
               std::string("half_split ") + (half ? "attainable" : "unattainable") +
                   ", singleton_max " + (single ? "attainable" : "unattainable"));
  } else {
    report.add("flags", true, "not enumerated");
  }
  if (s.bounds->half_split || s.bounds->singleton_max) {
    report.add("optimal", s.runtime_per_unit == std::max(lb_cut, lb_degree),
               "runtime " + to_string(s.runtime_per_unit));
  }
}

std::vector<Check> certify(const Topology& topo, const PipelineSchedule& s,
                           const std::string& prefix) {
  Report report(prefix);
  const std::size_t n = topo.compute_nodes().size();
  report.add("topology", s.N == n,
             "schedule N " + std::to_string(s.N) + ", topology has " + std::to_string(n));
  if (s.N != n) return report.take();
  if (s.collective == Collective::kAllreduce) {
    certify_allreduce(topo, s, report);
  } else {
    certify_trees(topo, s, report);
  }
  return report.take();
}

}  // namespace

BruteForceRatio brute_force_ratio(const Topology& topo) {
  std::optional<BruteForceRatio> best;
  std::vector<NodeIndex> best_list;
  for_each_cut(topo, [&](const std::vector<bool>& members, std::size_t inside,
                         const BigInt& out) {
    if (out == 0) throw std::invalid_argument("a cut has no egress; ratio unbounded");
    const Rational r(BigInt(inside), out);
    if (!best || r > best->ratio || (r == best->ratio && listing(members) < best_list)) {
      best = BruteForceRatio{r, members};
      best_list = listing(members);
    }
  });
  if (!best) throw std::invalid_argument("need at least two compute nodes");
  return *best;
}

BigInt reference_max_flow(const Topology& topo, NodeIndex s, NodeIndex t) {
  return ref_network(topo).flow(s, t);
}

bool CertificationReport::all_pass() const {
  return !checks.empty() &&
         std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

std::string CertificationReport::to_json() const {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    list.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  }
  return nlohmann::ordered_json{{"checks", list}}.dump(2) + "\n";
}

CertificationReport check_schedule(const Topology& topo, const PipelineSchedule& sched) {
  CertificationReport report;
  try {
    report.checks = certify(topo, sched, "");
  } catch (const std::exception& e) {
    report.checks.push_back({"internal", false, e.what()});
  }
  return report;
}

Topology random_eulerian_topology(std::uint64_t seed, std::size_t n_compute,
                                  std::size_t n_switch, const BigInt& max_cap) {
  if (n_compute < 2) throw std::invalid_argument("need at least two compute nodes");
  if (max_cap < 1) throw std::invalid_argument("max_cap must be positive");
  const std::size_t n = n_compute + n_switch;
  std::vector<NodeDecl> nodes;
  for (std::size_t i = 0; i < n_compute; ++i) {
    nodes.push_back({"c" + std::to_string(i), NodeKind::kCompute});
  }
  for (std::size_t i = 0; i < n_switch; ++i) {
    nodes.push_back({"s" + std::to_string(i), NodeKind::kSwitch});
  }
  std::mt19937_64 rng(seed);
  auto below = [&rng](std::uint64_t bound) {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(rng);
  };
  const std::uint64_t cap_limit = max_cap.convert_to<std::uint64_t>();

  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::map<NamedEdge, BigInt> caps;
    for (std::size_t round = 0; round < 4 * n; ++round) {
      // One random directed cycle over 2..n distinct nodes.
      std::vector<std::size_t> order(n);
      for (std::size_t i = 0; i < n; ++i) order[i] = i;
      std::shuffle(order.begin(), order.end(), rng);
      order.resize(2 + below(n - 1));
      BigInt room = max_cap;
      for (std::size_t i = 0; i < order.size(); ++i) {
        const NamedEdge e{nodes[order[i]].id, nodes[order[(i + 1) % order.size()]].id};
        const auto it = caps.find(e);
        if (it != caps.end()) room = std::min(room, BigInt(max_cap - it->second));
      }
      if (room < 1) continue;
      const BigInt c = 1 + below(std::min<std::uint64_t>(room.convert_to<std::uint64_t>(),
                                                         cap_limit));
      for (std::size_t i = 0; i < order.size(); ++i) {
        caps[{nodes[order[i]].id, nodes[order[(i + 1) % order.size()]].id}] += c;
      }
      if (round + 1 >= n && below(3) == 0) {
        Topology topo(nodes, caps);
        if (validate(topo).empty()) return topo;
      }
    }
    Topology topo(nodes, caps);
    if (validate(topo).empty()) return topo;
  }
  throw std::runtime_error("random topology: no connected instance within the attempt budget");
}

}  // namespace bwsynth
