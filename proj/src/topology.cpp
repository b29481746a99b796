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

#include "bwsynth/topology.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "json.hpp"

namespace bwsynth {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(NodeKind kind) {
  return kind == NodeKind::kCompute ? "compute" : "switch";
}

TopologyParseError::TopologyParseError(const std::string& message,
                                       std::size_t line, std::size_t column)
    : TopologyError("line " + std::to_string(line) + ", column " +
                    std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

// ---------------------------------------------------------------------------
// Topology

Topology::Topology(std::vector<NodeDecl> nodes,
                   const std::map<NamedEdge, BigInt>& caps) {
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeDecl& a, const NodeDecl& b) { return a.id < b.id; });
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id.empty()) throw TopologyError("empty node id");
    if (i > 0 && nodes[i].id == nodes[i - 1].id) {
      throw TopologyError("duplicate node id '" + nodes[i].id + "'");
    }
  }
  nodes_ = std::move(nodes);
  for (NodeIndex v = 0; v < nodes_.size(); ++v) {
    index_.emplace(nodes_[v].id, v);
    (nodes_[v].kind == NodeKind::kCompute ? compute_ : switches_).push_back(v);
  }
  for (const auto& [named, cap] : caps) {
    const auto src = find(named.first);
    const auto dst = find(named.second);
    if (!src) throw TopologyError("link from unknown node '" + named.first + "'");
    if (!dst) throw TopologyError("link to unknown node '" + named.second + "'");
    if (*src == *dst) throw TopologyError("self-loop at '" + named.first + "'");
    if (cap <= 0) {
      throw TopologyError("nonpositive capacity on " + named.first + " -> " +
                          named.second);
    }
    caps_.emplace(Edge{*src, *dst}, cap);
  }
  build_adjacency();
}

void Topology::build_adjacency() {
  out_.assign(nodes_.size(), {});
  in_.assign(nodes_.size(), {});
  for (const auto& [edge, cap] : caps_) {
    out_[edge.first].push_back(edge.second);
    in_[edge.second].push_back(edge.first);
  }
  for (auto& list : in_) std::sort(list.begin(), list.end());
}

std::optional<NodeIndex> Topology::find(std::string_view id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NodeIndex Topology::index(std::string_view id) const {
  const auto v = find(id);
  if (!v) throw TopologyError("unknown node '" + std::string(id) + "'");
  return *v;
}

BigInt Topology::capacity(NodeIndex u, NodeIndex v) const {
  const auto it = caps_.find({u, v});
  return it == caps_.end() ? BigInt(0) : it->second;
}

BigInt Topology::egress(NodeIndex v) const {
  BigInt total = 0;
  for (NodeIndex w : out_.at(v)) total += caps_.at({v, w});
  return total;
}

BigInt Topology::ingress(NodeIndex v) const {
  BigInt total = 0;
  for (NodeIndex u : in_.at(v)) total += caps_.at({u, v});
  return total;
}

BigInt Topology::egress(const std::vector<bool>& members) const {
  BigInt total = 0;
  for (const auto& [edge, cap] : caps_) {
    if (members.at(edge.first) && !members.at(edge.second)) total += cap;
  }
  return total;
}

BigInt Topology::total_capacity() const {
  BigInt total = 0;
  for (const auto& [edge, cap] : caps_) total += cap;
  return total;
}

Topology Topology::with_capacities(const std::map<Edge, BigInt>& caps) const {
  Topology out;
  out.nodes_ = nodes_;
  out.index_ = index_;
  out.compute_ = compute_;
  out.switches_ = switches_;
  for (const auto& [edge, cap] : caps) {
    if (cap < 0) throw TopologyError("negative capacity");
    if (cap == 0) continue;
    if (edge.first == edge.second) throw TopologyError("self-loop capacity");
    if (edge.first >= nodes_.size() || edge.second >= nodes_.size()) {
      throw TopologyError("edge references a node outside the topology");
    }
    out.caps_.emplace(edge, cap);
  }
  out.build_adjacency();
  return out;
}

Topology Topology::transposed() const {
  std::map<Edge, BigInt> caps;
  for (const auto& [edge, cap] : caps_) caps.emplace(Edge{edge.second, edge.first}, cap);
  return with_capacities(caps);
}

Topology Topology::scaled(const Rational& factor) const {
  std::map<Edge, BigInt> caps;
  for (const auto& [edge, cap] : caps_) {
    const Rational product = factor * Rational(cap);
    if (!is_integer(product)) {
      throw TopologyError("scaling by " + to_string(factor) +
                          " yields a non-integer capacity on " +
                          id(edge.first) + " -> " + id(edge.second));
    }
    caps.emplace(edge, numerator_of(product));
  }
  return with_capacities(caps);
}

Topology Topology::floored(const Rational& factor) const {
  std::map<Edge, BigInt> caps;
  for (const auto& [edge, cap] : caps_) caps.emplace(edge, floor_scale(factor, cap));
  return with_capacities(caps);
}

std::map<NamedEdge, BigInt> Topology::named_capacities() const {
  std::map<NamedEdge, BigInt> named;
  for (const auto& [edge, cap] : caps_) {
    named.emplace(NamedEdge{id(edge.first), id(edge.second)}, cap);
  }
  return named;
}

bool Topology::operator==(const Topology& other) const {
  return nodes_ == other.nodes_ && caps_ == other.caps_;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

[[noreturn]] void fail_at(const std::string& pointer, const std::string& what) {
  throw TopologyError(pointer + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail_at(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail_at(where, std::string("missing \"") + key + "\"");
  return *it;
}

std::string string_member(const json& obj, const char* key,
                          const std::string& where) {
  const json& value = member(obj, key, where);
  if (!value.is_string()) {
    fail_at(where + "/" + key, "expected a string");
  }
  return value.get<std::string>();
}

Rational parse_bandwidth(const json& value, const std::string& where) {
  Rational bw;
  if (value.is_string()) {
    try {
      bw = parse_rational(value.get<std::string>());
    } catch (const std::invalid_argument& e) {
      fail_at(where, e.what());
    }
  } else if (value.is_number_unsigned()) {
    bw = Rational(BigInt(value.get<std::uint64_t>()));
  } else if (value.is_number_integer()) {
    bw = Rational(BigInt(value.get<std::int64_t>()));
  } else if (value.is_number_float()) {
    fail_at(where, "non-integer bandwidth must be written as a \"p/q\" string");
  } else {
    fail_at(where, "expected a bandwidth");
  }
  if (bw <= 0) fail_at(where, "bandwidth must be positive, got " + to_string(bw));
  return bw;
}

}  // namespace

RationalBandwidthSpec parse_topology(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw TopologyParseError(e.what(), line, column);
  }
  if (!doc.is_object()) fail_at("", "top level must be an object");

  RationalBandwidthSpec spec;
  std::set<std::string, std::less<>> ids;

  const json& nodes = member(doc, "nodes", "");
  if (!nodes.is_array()) fail_at("/nodes", "expected an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const std::string where = "/nodes/" + std::to_string(i);
    NodeDecl decl;
    decl.id = string_member(nodes[i], "id", where);
    if (decl.id.empty()) fail_at(where + "/id", "empty node id");
    const std::string kind = string_member(nodes[i], "kind", where);
    if (kind == "compute") {
      decl.kind = NodeKind::kCompute;
    } else if (kind == "switch") {
      decl.kind = NodeKind::kSwitch;
    } else {
      fail_at(where + "/kind", "unknown node kind '" + kind + "'");
    }
    if (!ids.insert(decl.id).second) {
      fail_at(where + "/id", "duplicate node id '" + decl.id + "'");
    }
    spec.nodes.push_back(std::move(decl));
  }

  const json& links = member(doc, "links", "");
  if (!links.is_array()) fail_at("/links", "expected an array");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "/links/" + std::to_string(i);
    std::string src = string_member(links[i], "src", where);
    std::string dst = string_member(links[i], "dst", where);
    if (!ids.contains(src)) fail_at(where + "/src", "unknown node '" + src + "'");
    if (!ids.contains(dst)) fail_at(where + "/dst", "unknown node '" + dst + "'");
    if (src == dst) fail_at(where, "self-loop at '" + src + "'");
    const Rational bw = parse_bandwidth(member(links[i], "bw", where), where + "/bw");
    auto [it, inserted] = spec.links.emplace(NamedEdge{src, dst}, bw);
    if (!inserted) {
      it->second += bw;
      spec.warnings.push_back(where + ": duplicate link " + src + " -> " + dst +
                              " merged (total bandwidth " +
                              to_string(it->second) + ")");
    }
  }
  return spec;
}

ScaledTopology scale_to_integers(const RationalBandwidthSpec& spec) {
  BigInt scale = 1;
  for (const auto& [edge, bw] : spec.links) scale = lcm(scale, denominator_of(bw));
  std::map<NamedEdge, BigInt> caps;
  for (const auto& [edge, bw] : spec.links) {
    caps.emplace(edge, numerator_of(bw * Rational(scale)));
  }
  return {Topology(spec.nodes, caps), Rational(scale), spec.warnings};
}

std::vector<std::string> validate(const Topology& topo) {
  std::vector<std::string> findings;
  for (const auto& [edge, cap] : topo.edges()) {
    if (edge.first == edge.second) {
      findings.push_back("self-loop at " + topo.id(edge.first));
    }
    if (cap < 1) {
      findings.push_back("nonpositive capacity on " + topo.id(edge.first) +
                         " -> " + topo.id(edge.second));
    }
  }
  for (NodeIndex v = 0; v < topo.size(); ++v) {
    const BigInt out = topo.egress(v);
    const BigInt in = topo.ingress(v);
    if (out != in) {
      findings.push_back("not Eulerian at " + topo.id(v) + ": egress " +
                         to_string(out) + " != ingress " + to_string(in));
    }
  }
  const auto& computes = topo.compute_nodes();
  if (computes.size() < 2) {
    findings.push_back("fewer than 2 compute nodes");
    return findings;
  }
  // Forward and backward reachability from one compute node covers mutual
  // reachability of all of them.
  auto reach = [&](bool forward) {
    std::vector<bool> seen(topo.size(), false);
    std::deque<NodeIndex> queue{computes.front()};
    seen[computes.front()] = true;
    while (!queue.empty()) {
      const NodeIndex v = queue.front();
      queue.pop_front();
      for (NodeIndex w : forward ? topo.out_neighbors(v) : topo.in_neighbors(v)) {
        if (!seen[w]) {
          seen[w] = true;
          queue.push_back(w);
        }
      }
    }
    return seen;
  };
  const auto fwd = reach(true);
  const auto bwd = reach(false);
  for (NodeIndex v : computes) {
    if (!fwd[v] || !bwd[v]) {
      findings.push_back("compute nodes " + topo.id(computes.front()) + " and " +
                         topo.id(v) + " are not mutually reachable");
    }
  }
  return findings;
}

ScaledTopology load_topology(std::string_view text) {
  ScaledTopology scaled = scale_to_integers(parse_topology(text));
  const auto findings = validate(scaled.topology);
  if (!findings.empty()) {
    std::string message = "invalid topology:";
    for (const auto& f : findings) message += "\n  " + f;
    throw TopologyError(message);
  }
  return scaled;
}

std::string emit_topology(const Topology& topo, const Rational& scale) {
  ordered_json doc;
  doc["nodes"] = ordered_json::array();
  for (const auto& node : topo.nodes()) {
    ordered_json n;
    n["id"] = node.id;
    n["kind"] = std::string(to_string(node.kind));
    doc["nodes"].push_back(std::move(n));
  }
  doc["links"] = ordered_json::array();
  for (const auto& [edge, cap] : topo.edges()) {
    ordered_json l;
    l["src"] = topo.id(edge.first);
    l["dst"] = topo.id(edge.second);
    const Rational bw = Rational(cap) / scale;
    if (is_integer(bw) && numerator_of(bw) <= BigInt(INT64_MAX)) {
      l["bw"] = numerator_of(bw).convert_to<std::int64_t>();
    } else {
      l["bw"] = to_string(bw);
    }
    doc["links"].push_back(std::move(l));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Presets

namespace {

constexpr std::pair<std::string_view, PresetKind> kPresetNames[] = {
    {"ring", PresetKind::kRing},
    {"bidirectional_ring", PresetKind::kBidirectionalRing},
    {"complete", PresetKind::kComplete},
    {"star_switch", PresetKind::kStarSwitch},
    {"two_level_cluster", PresetKind::kTwoLevelCluster},
    {"ring_unwound_cluster", PresetKind::kRingUnwoundCluster},
    {"fat_tree", PresetKind::kFatTree},
};

// Zero-padded so lexicographic id order matches numeric order.
std::string padded(std::size_t value, std::size_t max_value) {
  const std::string digits = std::to_string(value);
  const std::size_t width = std::to_string(max_value).size();
  return std::string(width - digits.size(), '0') + digits;
}

class PresetBuilder {
 public:
  void node(std::string id, NodeKind kind) { nodes_.push_back({std::move(id), kind}); }
  void link(const std::string& a, const std::string& b, const BigInt& bw) {
    caps_[{a, b}] += bw;
  }
  void both(const std::string& a, const std::string& b, const BigInt& bw) {
    link(a, b, bw);
    link(b, a, bw);
  }
  Topology build() && { return Topology(std::move(nodes_), caps_); }

 private:
  std::vector<NodeDecl> nodes_;
  std::map<NamedEdge, BigInt> caps_;
};

void require(bool ok, const std::string& message) {
  if (!ok) throw TopologyError("invalid preset parameters: " + message);
}

}  // namespace

std::optional<PresetKind> parse_preset_kind(std::string_view name) {
  for (const auto& [n, kind] : kPresetNames) {
    if (n == name) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(PresetKind kind) {
  for (const auto& [n, k] : kPresetNames) {
    if (k == kind) return n;
  }
  return "unknown";
}

Topology make_preset(PresetKind kind, const PresetParams& p) {
  PresetBuilder b;
  auto compute_id = [&](std::size_t i) { return "c" + padded(i, p.n - 1); };
  switch (kind) {
    case PresetKind::kRing:
    case PresetKind::kBidirectionalRing:
    case PresetKind::kComplete:
    case PresetKind::kStarSwitch: {
      require(p.n >= 2, "n must be at least 2");
      require(p.bw >= 1, "bw must be at least 1");
      for (std::size_t i = 0; i < p.n; ++i) b.node(compute_id(i), NodeKind::kCompute);
      if (kind == PresetKind::kRing || kind == PresetKind::kBidirectionalRing) {
        for (std::size_t i = 0; i < p.n; ++i) {
          const auto next = compute_id((i + 1) % p.n);
          if (kind == PresetKind::kRing) {
            b.link(compute_id(i), next, p.bw);
          } else if (p.n == 2) {
            // A 2-ring in both directions is a single bidirectional link.
            if (i == 0) b.both(compute_id(0), compute_id(1), p.bw);
          } else {
            b.both(compute_id(i), next, p.bw);
          }
        }
      } else if (kind == PresetKind::kComplete) {
        for (std::size_t i = 0; i < p.n; ++i) {
          for (std::size_t j = 0; j < p.n; ++j) {
            if (i != j) b.link(compute_id(i), compute_id(j), p.bw);
          }
        }
      } else {
        b.node("sw", NodeKind::kSwitch);
        for (std::size_t i = 0; i < p.n; ++i) b.both(compute_id(i), "sw", p.bw);
      }
      break;
    }
    case PresetKind::kTwoLevelCluster:
    case PresetKind::kRingUnwoundCluster: {
      require(p.clusters >= 1 && p.per_cluster >= 1 &&
                  p.clusters * p.per_cluster >= 2,
              "need at least 2 compute nodes");
      require(p.local_bw >= 1 && p.global_bw >= 1, "bandwidths must be >= 1");
      auto v = [&](std::size_t i, std::size_t j) {
        return "v" + padded(i, p.clusters) + "_" + padded(j, p.per_cluster);
      };
      for (std::size_t i = 1; i <= p.clusters; ++i) {
        for (std::size_t j = 1; j <= p.per_cluster; ++j) {
          b.node(v(i, j), NodeKind::kCompute);
        }
      }
      if (kind == PresetKind::kTwoLevelCluster) {
        b.node("s" + padded(0, p.clusters), NodeKind::kSwitch);
        for (std::size_t i = 1; i <= p.clusters; ++i) {
          const std::string local = "s" + padded(i, p.clusters);
          b.node(local, NodeKind::kSwitch);
          for (std::size_t j = 1; j <= p.per_cluster; ++j) {
            b.both(v(i, j), local, p.local_bw);
            b.both(v(i, j), "s" + padded(0, p.clusters), p.global_bw);
          }
        }
      } else {
        // Each local switch becomes a ring over its cluster; the global switch
        // becomes one ring that snakes through the clusters, alternating
        // direction, and closes back at v1_1.
        for (std::size_t i = 1; i <= p.clusters; ++i) {
          if (p.per_cluster < 2) continue;
          for (std::size_t j = 1; j <= p.per_cluster; ++j) {
            b.link(v(i, j), v(i, j % p.per_cluster + 1), p.local_bw);
          }
        }
        std::vector<std::string> order;
        for (std::size_t i = 1; i <= p.clusters; ++i) {
          for (std::size_t j = 1; j <= p.per_cluster; ++j) {
            order.push_back(i % 2 == 1 ? v(i, j) : v(i, p.per_cluster + 1 - j));
          }
        }
        for (std::size_t a = 0; a < order.size(); ++a) {
          b.link(order[a], order[(a + 1) % order.size()], p.global_bw);
        }
      }
      break;
    }
    case PresetKind::kFatTree: {
      require(p.leaves >= 1 && p.hosts_per_leaf >= 1 &&
                  p.leaves * p.hosts_per_leaf >= 2,
              "need at least 2 hosts");
      require(p.leaves == 1 || p.spines >= 1, "multiple leaves need a spine");
      require(p.host_bw >= 1 && p.uplink_bw >= 1, "bandwidths must be >= 1");
      for (std::size_t l = 1; l <= p.leaves; ++l) {
        const std::string leaf = "l" + padded(l, p.leaves);
        b.node(leaf, NodeKind::kSwitch);
        for (std::size_t h = 1; h <= p.hosts_per_leaf; ++h) {
          const std::string host =
              "h" + padded(l, p.leaves) + "_" + padded(h, p.hosts_per_leaf);
          b.node(host, NodeKind::kCompute);
          b.both(host, leaf, p.host_bw);
        }
        for (std::size_t s = 1; s <= p.spines; ++s) {
          b.both(leaf, "p" + padded(s, p.spines), p.uplink_bw);
        }
      }
      for (std::size_t s = 1; s <= p.spines; ++s) {
        b.node("p" + padded(s, p.spines), NodeKind::kSwitch);
      }
      break;
    }
  }
  return std::move(b).build();
}

}  // namespace bwsynth
