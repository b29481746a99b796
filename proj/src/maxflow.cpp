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

#include "bwsynth/maxflow.hpp"

#include <atomic>
#include <cstdint>
#include <deque>
#include <stdexcept>

#include "parallel.hpp"

namespace bwsynth {

// ---------------------------------------------------------------------------
// Capacity

Capacity::Capacity(BigInt value) : value_(std::move(value)) {
  if (value_ < 0) throw std::invalid_argument("negative capacity");
}

Capacity Capacity::unbounded() {
  Capacity c;
  c.unbounded_ = true;
  return c;
}

const BigInt& Capacity::value() const {
  if (unbounded_) throw std::logic_error("value() of an unbounded capacity");
  return value_;
}

bool operator==(const Capacity& a, const Capacity& b) {
  if (a.unbounded_ || b.unbounded_) return a.unbounded_ == b.unbounded_;
  return a.value_ == b.value_;
}

bool operator<(const Capacity& a, const Capacity& b) {
  if (a.unbounded_) return false;
  if (b.unbounded_) return true;
  return a.value_ < b.value_;
}

Capacity operator+(const Capacity& a, const Capacity& b) {
  if (a.unbounded_ || b.unbounded_) return Capacity::unbounded();
  return Capacity(a.value_ + b.value_);
}

std::string Capacity::str() const { return unbounded_ ? "inf" : value_.str(); }

void FlowNetwork::add_edge(std::size_t from, std::size_t to,
                           const Capacity& capacity) {
  if (from >= size_ || to >= size_) {
    throw std::out_of_range("flow arc endpoint outside the network");
  }
  if (from == to) return;
  if (!capacity.is_unbounded() && capacity.value() == 0) return;
  arcs_.push_back({from, to, capacity});
}

// ---------------------------------------------------------------------------
// Dinic

namespace {

template <typename Cap>
class Dinic {
 public:
  explicit Dinic(std::size_t n) : adj_(n), level_(n), next_arc_(n) {}

  void add_arc(std::size_t u, std::size_t v, Cap c) {
    adj_[u].push_back(static_cast<int>(to_.size()));
    to_.push_back(static_cast<int>(v));
    cap_.push_back(c);
    adj_[v].push_back(static_cast<int>(to_.size()));
    to_.push_back(static_cast<int>(u));
    cap_.push_back(Cap(0));
  }

  // Pushes flow until none remains or `limit` is reached.
  Cap run(int s, int t, const Cap& limit) {
    Cap flow = 0;
    while (flow < limit && build_levels(s, t)) {
      std::fill(next_arc_.begin(), next_arc_.end(), 0);
      while (flow < limit) {
        Cap pushed = push(s, t, Cap(limit - flow));
        if (pushed == 0) break;
        flow += pushed;
      }
    }
    return flow;
  }

  std::vector<bool> residual_reachable(int s) const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<int> queue{s};
    seen[s] = true;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int a : adj_[v]) {
        if (cap_[a] > 0 && !seen[to_[a]]) {
          seen[to_[a]] = true;
          queue.push_back(to_[a]);
        }
      }
    }
    return seen;
  }

 private:
  bool build_levels(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::deque<int> queue{s};
    level_[s] = 0;
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop_front();
      for (int a : adj_[v]) {
        if (cap_[a] > 0 && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[v] + 1;
          queue.push_back(to_[a]);
        }
      }
    }
    return level_[t] >= 0;
  }

  Cap push(int v, int t, const Cap& budget) {
    if (v == t) return budget;
    Cap total = 0;
    for (std::size_t& i = next_arc_[v]; i < adj_[v].size(); ++i) {
      const int a = adj_[v][i];
      const int w = to_[a];
      if (cap_[a] <= 0 || level_[w] != level_[v] + 1) continue;
      const Cap want = budget - total < cap_[a] ? Cap(budget - total) : cap_[a];
      const Cap got = push(w, t, want);
      if (got > 0) {
        cap_[a] -= got;
        cap_[a ^ 1] += got;
        total += got;
        if (total == budget) return total;
      }
    }
    level_[v] = -1;
    return total;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<Cap> cap_;
  std::vector<int> level_;
  std::vector<std::size_t> next_arc_;
};

template <typename Cap, typename Convert>
FlowResult run_dinic(const FlowNetwork& net, std::size_t s, std::size_t t,
                     const BigInt& unbounded_stand_in, const BigInt& limit,
                     Convert convert) {
  Dinic<Cap> dinic(net.size());
  for (const auto& arc : net.arcs()) {
    dinic.add_arc(arc.from, arc.to,
                  convert(arc.capacity.is_unbounded() ? unbounded_stand_in
                                                      : arc.capacity.value()));
  }
  const Cap flow = dinic.run(static_cast<int>(s), static_cast<int>(t), convert(limit));
  FlowResult result;
  const BigInt value(flow);
  if (value >= unbounded_stand_in) {
    // Every s-t cut crosses an unbounded arc.
    result.value = Capacity::unbounded();
    result.limit_reached = true;
    return result;
  }
  result.value = Capacity(value);
  if (value >= limit) {
    result.limit_reached = true;
    return result;
  }
  result.source_side = dinic.residual_reachable(static_cast<int>(s));
  return result;
}

std::atomic<unsigned> g_parallelism{1};

}  // namespace

FlowResult max_flow(const FlowNetwork& net, std::size_t s, std::size_t t,
                    const std::optional<BigInt>& limit) {
  if (s >= net.size() || t >= net.size()) {
    throw std::out_of_range("max_flow: terminal outside the network");
  }
  if (s == t) throw std::invalid_argument("max_flow: source equals sink");

  // Unbounded arcs become finite_total + 1: no finite cut can reach that, so
  // the max flow is unchanged whenever a finite cut exists.
  BigInt finite_total = 0;
  std::size_t unbounded_count = 0;
  for (const auto& arc : net.arcs()) {
    if (arc.capacity.is_unbounded()) {
      ++unbounded_count;
    } else {
      finite_total += arc.capacity.value();
    }
  }
  const BigInt stand_in = finite_total + 1;
  // Upper bound on any flow or residual value the solver can produce.
  const BigInt ceiling = stand_in * (unbounded_count + 1);
  const BigInt effective_limit =
      limit && *limit < stand_in ? (*limit < 0 ? BigInt(0) : *limit) : stand_in;

  constexpr std::int64_t kFastPathBound = std::int64_t{1} << 61;
  if (ceiling < kFastPathBound) {
    return run_dinic<std::int64_t>(
        net, s, t, stand_in, effective_limit,
        [](const BigInt& v) { return v.convert_to<std::int64_t>(); });
  }
  return run_dinic<BigInt>(net, s, t, stand_in, effective_limit,
                           [](const BigInt& v) { return v; });
}

FlowNetwork to_flow_network(const Topology& topo) {
  FlowNetwork net(topo.size());
  for (const auto& [edge, cap] : topo.edges()) net.add_edge(edge.first, edge.second, cap);
  return net;
}

// ---------------------------------------------------------------------------
// Virtual source and the oracle

OracleDemand OracleDemand::all_roots(BigInt per_root) {
  if (per_root <= 0) throw std::invalid_argument("per-root demand must be positive");
  OracleDemand d;
  d.amount_ = std::move(per_root);
  return d;
}

OracleDemand OracleDemand::single_root(std::string root, BigInt amount) {
  if (root.empty()) throw std::invalid_argument("empty root id");
  if (amount <= 0) throw std::invalid_argument("root demand must be positive");
  OracleDemand d;
  d.root_ = std::move(root);
  d.amount_ = std::move(amount);
  return d;
}

BigInt OracleDemand::weight(const Topology& topo, NodeIndex v) const {
  if (!topo.is_compute(v)) return 0;
  if (is_single_root()) return topo.id(v) == root_ ? amount_ : BigInt(0);
  return amount_;
}

BigInt OracleDemand::threshold(const Topology& topo) const {
  if (is_single_root()) return amount_;
  return amount_ * topo.compute_nodes().size();
}

VirtualSourceNetwork attach_virtual_source(const Topology& topo, const Rational& x) {
  if (x <= 0) throw std::invalid_argument("attach_virtual_source: x must be positive");
  const BigInt num = numerator_of(x);
  const BigInt den = denominator_of(x);
  VirtualSourceNetwork out{FlowNetwork(topo.size() + 1), topo.size(), den,
                           num * topo.compute_nodes().size()};
  for (const auto& [edge, cap] : topo.edges()) {
    out.net.add_edge(edge.first, edge.second, BigInt(cap * den));
  }
  for (NodeIndex v : topo.compute_nodes()) out.net.add_edge(out.source, v, num);
  return out;
}

VirtualSourceNetwork attach_virtual_source(const Topology& topo,
                                           const OracleDemand& demand) {
  if (demand.is_single_root()) {
    const NodeIndex r = topo.index(demand.root());
    if (!topo.is_compute(r)) {
      throw std::invalid_argument("oracle root '" + demand.root() +
                                  "' is not a compute node");
    }
  }
  VirtualSourceNetwork out{to_flow_network(topo), topo.size(), 1,
                           demand.threshold(topo)};
  out.net.add_vertex();
  for (NodeIndex v : topo.compute_nodes()) {
    out.net.add_edge(out.source, v, demand.weight(topo, v));
  }
  return out;
}

namespace {

OracleResult run_oracle(const Topology& topo, const VirtualSourceNetwork& vs) {
  const auto& computes = topo.compute_nodes();
  std::vector<FlowResult> flows(computes.size());
  std::vector<bool> done(computes.size(), false);

  auto evaluate = [&](std::size_t i) {
    flows[i] = max_flow(vs.net, vs.source, computes[i], vs.threshold);
    done[i] = true;
  };
  if (parallelism() > 1) {
    internal::parallel_for(computes.size(), evaluate);
  }
  OracleResult result;
  for (std::size_t i = 0; i < computes.size(); ++i) {
    if (!done[i]) evaluate(i);
    if (flows[i].limit_reached) continue;
    OracleWitness witness;
    witness.node = computes[i];
    witness.flow = flows[i].value.value();
    witness.cut.assign(flows[i].source_side.begin(),
                       flows[i].source_side.begin() + topo.size());
    result.witness = std::move(witness);
    return result;
  }
  result.pass = true;
  return result;
}

}  // namespace

OracleResult oracle_min_source_flow(const Topology& topo, const Rational& x) {
  return run_oracle(topo, attach_virtual_source(topo, x));
}

OracleResult oracle_min_source_flow(const Topology& topo,
                                    const OracleDemand& demand) {
  return run_oracle(topo, attach_virtual_source(topo, demand));
}

void set_parallelism(unsigned jobs) { g_parallelism = jobs == 0 ? 1 : jobs; }
unsigned parallelism() { return g_parallelism; }

}  // namespace bwsynth
