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

// Acceptance suite. One PASS/FAIL line per criterion; exit status is the
// number of failures (capped at 1).

#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bwsynth/edge_split.hpp"
#include "bwsynth/maxflow.hpp"
#include "bwsynth/optimality.hpp"
#include "bwsynth/schedule.hpp"
#include "bwsynth/tree_pack.hpp"
#include "bwsynth/verify.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace bwsynth {
namespace {

// Collects the first few problems; a criterion passes when there are none.
class Findings {
 public:
  void fail(const std::string& what) {
    if (count_++ < 5) problems_ << (count_ > 1 ? "; " : "") << what;
  }
  template <typename... Parts>
  void expect(bool ok, const Parts&... parts) {
    if (ok) return;
    std::ostringstream os;
    (os << ... << parts);
    fail(os.str());
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string s = problems_.str();
    if (count_ > 5) s += "; ... " + std::to_string(count_ - 5) + " more";
    return s;
  }
  std::string note;  // printed on success too

 private:
  std::size_t count_ = 0;
  std::ostringstream problems_;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;  // 0 = no time limit
  std::function<void(Findings&)> body;
};

std::set<std::string> members_of(const Topology& t, const std::vector<bool>& mask) {
  std::set<std::string> out;
  for (NodeIndex v = 0; v < t.size(); ++v) {
    if (mask[v]) out.insert(t.id(v));
  }
  return out;
}

BigInt min_capacity(const Topology& t) {
  BigInt m = -1;
  for (const auto& [e, c] : t.edges()) {
    if (m < 0 || c < m) m = c;
  }
  return m;
}

BigInt max_capacity(const Topology& t) {
  BigInt m = 0;
  for (const auto& [e, c] : t.edges()) m = std::max(m, c);
  return m;
}

std::string label(std::size_t i) { return "corpus " + std::to_string(i); }

void cluster_analysis(Findings& f) {
  const Topology t = fixture::two_clusters();
  const OptimalityResult r = optimal_ratio(t);
  f.expect(r.ratio == Rational(1), "ratio ", to_string(r.ratio));
  f.expect(r.U == Rational(1), "U ", to_string(r.U));
  f.expect(r.k == 1, "k ", r.k.str());
  const std::set<std::string> first{"s1", "v1_1", "v1_2", "v1_3", "v1_4"};
  const std::set<std::string> second{"s2", "v2_1", "v2_2", "v2_3", "v2_4"};
  const auto got = members_of(t, r.bottleneck);
  f.expect(got == first || got == second, "bottleneck is not one cluster with its switch");
  f.expect(cut_ratio(t, r.bottleneck) == r.ratio, "bottleneck does not attain the ratio");
  f.note = "ratio " + to_string(r.ratio) + ", U " + to_string(r.U) + ", k " + r.k.str();
}

void unwound_contrast(Findings& f) {
  const Rational unwound = optimal_ratio(fixture::two_clusters_unwound()).ratio;
  const Rational original = optimal_ratio(fixture::two_clusters()).ratio;
  f.expect(unwound == Rational(4), "ratio ", to_string(unwound));
  f.expect(unwound == 4 * original, "not 4x the switched optimum");
  f.note = "ratio " + to_string(unwound);
}

void end_to_end(Findings& f) {
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    const Topology t = oracle::corpus_topology(i);
    const PipelineSchedule s = build_allgather(t);
    const Rational bound = oracle::ratio(t) / Rational(BigInt(t.compute_nodes().size()));
    f.expect(s.runtime_per_unit == bound, label(i), ": runtime ", to_string(s.runtime_per_unit),
             " != bound ", to_string(bound));
    f.expect(evaluate_runtime(s, t) == bound, label(i), ": recomputed runtime differs");
    const CertificationReport report = check_schedule(t, s);
    for (const Check& c : report.checks) {
      f.expect(c.pass, label(i), ": check ", c.name, " failed: ", c.detail);
    }
    // Independent load count against floor(U * b_e).
    std::map<std::pair<std::string, std::string>, BigInt> load;
    for (const ScheduleTree& tree : s.trees) {
      f.expect(oracle::is_spanning_out_tree(t, tree, false), label(i), ": tree ", tree.root,
               " not spanning");
      for (const ScheduleEdge& e : tree.edges) {
        for (std::size_t h = 0; h + 1 < e.path.size(); ++h) {
          load[{e.path[h], e.path[h + 1]}] += tree.multiplicity;
        }
      }
    }
    for (const auto& [hop, m] : load) {
      const auto a = t.find(hop.first), b = t.find(hop.second);
      const BigInt cap = a && b ? floor(s.U * Rational(t.capacity(*a, *b))) : BigInt(0);
      f.expect(m <= cap, label(i), ": ", hop.first, "->", hop.second, " overloaded");
    }
  }
  f.note = std::to_string(oracle::kCorpusSize) + " topologies";
}

void switch_removal(Findings& f) {
  std::vector<std::pair<std::string, Topology>> cases;
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    cases.emplace_back(label(i), oracle::corpus_topology(i));
  }
  cases.emplace_back("two clusters", fixture::two_clusters());
  std::size_t steps = 0;
  for (const auto& [name, t] : cases) {
    const OptimalityResult opt = optimal_ratio(t);
    const Topology d = t.floored(opt.U);
    const OracleDemand demand = OracleDemand::all_roots(opt.k);
    for (SplitPolicy policy : {SplitPolicy::kCrossGroupFirst, SplitPolicy::kCanonical}) {
      SplitOptions options;
      options.policy = policy;
      options.paranoid = true;
      options.on_step = [&](const SplitStep& step, const Topology& now) {
        ++steps;
        f.expect(oracle::source_condition(now, demand), name, ": oracle broken after ",
                 d.id(step.u), "->", d.id(step.w), "->", d.id(step.t));
      };
      try {
        const SplitResult r = remove_switches(d, demand, options);
        f.expect(r.direct.switch_nodes().empty(), name, ": switches remain");
        const std::string err = oracle::conservation_error(d, r);
        f.expect(err.empty(), name, ": ", err);
      } catch (const std::exception& e) {
        f.fail(name + ": " + e.what());
      }
    }
  }
  f.note = std::to_string(cases.size()) + " topologies x 2 policies, " + std::to_string(steps) +
           " split steps";
}

void mu_correctness(Findings& f) {
  std::size_t states = 0;
  std::size_t topologies = 0;
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    const Topology t = oracle::corpus_topology(i);
    if (t.compute_nodes().size() > 7) continue;
    ++topologies;
    const OptimalityResult opt = optimal_ratio(t);
    const SplitResult split =
        remove_switches(t.floored(opt.U), OracleDemand::all_roots(opt.k));
    const std::size_t n = split.direct.size();
    PackOptions options;
    options.on_mu = [&](const PackingState& s, std::size_t target, NodeIndex x, NodeIndex y,
                        const BigInt& mu) {
      ++states;
      const BigInt expected = oracle::mu(s, n, target, x, y);
      f.expect(mu == expected, label(i), ": mu ", mu.str(), " != ", expected.str());
    };
    pack_spanning_trees(split.direct, opt.k, options);
    // Rooted packing at the broadcast value from the first compute node.
    const NodeIndex root = 0;
    BigInt c = -1;
    for (NodeIndex v = 1; v < n; ++v) {
      const BigInt flow = reference_max_flow(split.direct, root, v);
      if (c < 0 || flow < c) c = flow;
    }
    if (c > 0) pack_rooted_trees(split.direct, root, c, options);
  }
  f.expect(states > 0, "no packing states visited");
  f.note = std::to_string(states) + " states over " + std::to_string(topologies) + " topologies";
}

void fixed_k(Findings& f) {
  std::size_t exhaustive = 0;
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    const Topology t = oracle::corpus_topology(i);
    const Rational ratio = optimal_ratio(t).ratio;
    const BigInt bmin = min_capacity(t);
    for (int k = 1; k <= 3; ++k) {
      const FixedKResult r = fixed_k_search(t, k, ratio);
      const Rational gap = r.U_star / Rational(k) - ratio;
      f.expect(gap >= 0, label(i), " k ", k, ": U*/k below the optimum");
      f.expect(gap <= Rational(1) / Rational(BigInt(k) * bmin), label(i), " k ", k, ": gap ",
               to_string(gap), " too large");
      if (max_capacity(t) <= 6) {
        ++exhaustive;
        const Rational expected = oracle::exhaustive_U_star(t, k);
        f.expect(r.U_star == expected, label(i), " k ", k, ": U* ", to_string(r.U_star),
                 " != ", to_string(expected));
      }
    }
  }
  f.note = std::to_string(exhaustive) + " exhaustive comparisons";
}

void broadcast(Findings& f) {
  const Topology t = fixture::two_clusters();
  const PipelineSchedule b = build_broadcast(t, "v1_1");
  const PipelineSchedule ag = build_allgather(t);
  f.expect(b.runtime_per_unit == Rational(1, 4), "broadcast ", to_string(b.runtime_per_unit));
  f.expect(ag.runtime_per_unit == Rational(1, 8), "allgather ", to_string(ag.runtime_per_unit));
  f.expect(b.runtime_per_unit == 2 * ag.runtime_per_unit, "broadcast is not 2x allgather");
  f.expect(check_schedule(t, b).all_pass(), "broadcast schedule fails verification");
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    const Topology c = oracle::corpus_topology(i);
    const Rational allgather = build_allgather(c).runtime_per_unit;
    for (NodeIndex r : c.compute_nodes()) {
      const PipelineSchedule s = build_broadcast(c, c.id(r));
      ++pairs;
      f.expect(s.runtime_per_unit > allgather, label(i), " root ", c.id(r), ": broadcast ",
               to_string(s.runtime_per_unit), " <= allgather ", to_string(allgather));
    }
  }
  f.note = std::to_string(pairs) + " corpus roots";
}

void allreduce(Findings& f) {
  const Topology t = fixture::two_clusters();
  const PipelineSchedule s = build_allreduce(t);
  f.expect(s.runtime_per_unit == Rational(1, 4), "runtime ", to_string(s.runtime_per_unit));
  f.expect(s.bounds && s.bounds->lb_cut == s.runtime_per_unit, "runtime != lb_cut");
  f.expect(s.bounds && s.bounds->half_split, "half_split not set");
  f.expect(s.bounds && s.bounds->lb_degree == Rational(7, 44), "lb_degree ",
           s.bounds ? to_string(s.bounds->lb_degree) : "missing");
  f.expect(check_schedule(t, s).all_pass(), "allreduce schedule fails verification");

  // Two-node and symmetric instances where every single node is a
  // maximizer of the cut ratio.
  std::vector<std::pair<std::string, Topology>> cases{
      {"pair", fixture::complete(2)},
      {"pair bw 3", fixture::complete(2, 3)},
      {"ring 3", fixture::ring(3)},
      {"ring 5", fixture::ring(5, 2)},
      {"complete 4", fixture::complete(4)},
      {"star 4", fixture::star(4)},
      {"bidirectional ring 6", fixture::preset(PresetKind::kBidirectionalRing, 6)},
  };
  std::size_t exact = 0;
  for (const auto& [name, topo] : cases) {
    const PipelineSchedule a = build_allreduce(topo);
    const Rational lb = std::max(a.bounds->lb_cut, a.bounds->lb_degree);
    const bool flagged = a.bounds->half_split || a.bounds->singleton_max;
    f.expect(name.rfind("pair", 0) == 0 || a.bounds->singleton_max, name,
             ": not a singleton-maximizer instance");
    f.expect(flagged, name, ": no optimality flag");
    f.expect(a.runtime_per_unit == lb, name, ": runtime ", to_string(a.runtime_per_unit),
             " != ", to_string(lb));
    f.expect(check_schedule(topo, a).all_pass(), name, ": fails verification");
    ++exact;
  }
  f.note = std::to_string(exact) + " instances at the lower bound";
}

void determinism(Findings& f) {
  for (std::size_t i = 0; i < oracle::kCorpusSize; ++i) {
    const Topology t = oracle::corpus_topology(i);
    set_parallelism(1);
    const std::string a = emit_schedule(build_allgather(t));
    const std::string b = emit_schedule(build_allgather(t));
    set_parallelism(4);
    const std::string c = emit_schedule(build_allgather(t));
    set_parallelism(1);
    f.expect(a == b, label(i), ": two runs differ");
    f.expect(a == c, label(i), ": parallel run differs");
  }
}

void scale(Findings& f) {
  const Topology t = fixture::fat_tree(8, 8, 4);
  f.expect(t.compute_nodes().size() == 64 && t.switch_nodes().size() == 12, "wrong shape");
  const auto start = std::chrono::steady_clock::now();
  const PipelineSchedule s = build_allgather(t);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  f.expect(secs < 60, "synthesis took ", secs, " s");
  f.expect(check_schedule(t, s).all_pass(), "schedule fails verification");
  std::ostringstream os;
  os << s.trees.size() << " trees, runtime " << to_string(s.runtime_per_unit) << ", synthesis "
     << secs << " s";
  f.note = os.str();
}

}  // namespace
}  // namespace bwsynth

int main() {
  using namespace bwsynth;
  const std::vector<Criterion> criteria{
      {1, "two-cluster analysis", 1, cluster_analysis},
      {2, "ring-unwound contrast", 1, unwound_contrast},
      {3, "end-to-end allgather optimality on the corpus", 300, end_to_end},
      {4, "switch removal soundness", 300, switch_removal},
      {5, "mu matches enumeration", 120, mu_correctness},
      {6, "fixed-k approximation and exact U*", 300, fixed_k},
      {7, "broadcast runtime", 60, broadcast},
      {8, "allreduce runtime and bounds", 60, allreduce},
      {9, "byte-identical output", 0, determinism},
      {10, "64-host fat tree", 60, scale},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Findings f;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(f);
    } catch (const std::exception& e) {
      f.fail(std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && secs >= c.limit_s) {
      f.fail("took " + std::to_string(secs) + " s, limit " + std::to_string(c.limit_s) + " s");
    }
    const bool pass = f.ok();
    if (!pass) ++failures;
    std::printf("%s [%d] %s (%.2f s)%s%s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(), secs,
                pass ? (f.note.empty() ? "" : ": ") : ": ",
                pass ? f.note.c_str() : f.summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
