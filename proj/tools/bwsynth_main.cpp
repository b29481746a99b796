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

// bwsynth: bandwidth-optimal collective schedule synthesis.
//
// Exit codes: 0 success, 1 bad input or failed verification, 2 internal
// error, 3 fixed-k schedule slower than the unconstrained optimum.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bwsynth/maxflow.hpp"
#include "bwsynth/optimality.hpp"
#include "bwsynth/schedule.hpp"
#include "bwsynth/topology.hpp"
#include "bwsynth/verify.hpp"

namespace {

using namespace bwsynth;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;
constexpr int kExitGap = 3;

// Bad user input, reported with exit 1.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw InputError("cannot write " + path);
}

std::string show(const Rational& r) {
  return to_fraction(r) + " (" + to_decimal(r, 6) + ")";
}

ScaledTopology read_topology(const std::string& path) {
  ScaledTopology st = load_topology(read_file(path));
  for (const auto& w : st.warnings) std::cerr << "warning: " << w << "\n";
  return st;
}

std::string members(const Topology& topo, const std::vector<bool>& set) {
  std::string out;
  for (NodeIndex v = 0; v < topo.size(); ++v) {
    if (!set[v]) continue;
    if (!out.empty()) out += ' ';
    out += topo.id(v);
  }
  return "{" + out + "}";
}

int run_analyze(const std::string& path) {
  const ScaledTopology st = read_topology(path);
  const Topology& topo = st.topology;
  const Rational n(static_cast<long long>(topo.compute_nodes().size()));
  const OptimalityResult opt = optimal_ratio(topo);

  std::cout << "compute nodes: " << topo.compute_nodes().size()
            << ", switch nodes: " << topo.switch_nodes().size() << "\n";
  std::cout << "scale: " << show(st.scale) << "\n";
  std::cout << "ratio: " << show(opt.ratio) << "\n";
  std::cout << "bottleneck: " << members(topo, opt.bottleneck) << "\n";
  std::cout << "U: " << show(opt.U) << "\n";
  std::cout << "k: " << opt.k << "\n";
  std::cout << "allgather lower bound per unit: " << show(opt.ratio * st.scale / n) << "\n";
  std::cout << "reduce-scatter lower bound per unit: "
            << show(optimal_ratio(topo.transposed()).ratio * st.scale / n) << "\n";
  for (NodeIndex r : topo.compute_nodes()) {
    std::cout << "broadcast lower bound per unit (root " << topo.id(r)
              << "): " << show(broadcast_bound(topo, r, st.scale)) << "\n";
  }
  const AllreduceBounds b = allreduce_bounds(topo, opt.bottleneck, st.scale);
  std::cout << "allreduce lb_cut: " << show(b.lb_cut) << "\n";
  std::cout << "allreduce lb_degree: " << show(b.lb_degree) << "\n";
  std::cout << "allreduce half_split: " << (b.half_split ? "true" : "false") << "\n";
  std::cout << "allreduce singleton_max: " << (b.singleton_max ? "true" : "false") << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string topology;
  std::string collective = "allgather";
  std::string root;
  std::int64_t fixed_k = 0;
  std::string policy = "cross-group-first";
  std::string output;
};

int run_synth(const SynthArgs& a) {
  const auto collective = parse_collective(a.collective);
  if (!collective) throw InputError("unknown collective '" + a.collective + "'");
  const auto policy = parse_split_policy(a.policy);
  if (!policy) throw InputError("unknown split policy '" + a.policy + "'");
  if (a.fixed_k < 0) throw InputError("--fixed-k must be at least 1");

  const ScaledTopology st = read_topology(a.topology);
  SynthOptions options;
  options.scale = st.scale;
  options.policy = *policy;
  if (a.fixed_k > 0) options.fixed_k = BigInt(a.fixed_k);
  std::optional<std::string> root;
  if (!a.root.empty()) root = a.root;

  PipelineSchedule sched;
  try {
    sched = build_schedule(st.topology, *collective, root, options);
  } catch (const SynthesisError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  write_output(a.output, emit_schedule(sched));

  std::ostream& log = a.output.empty() || a.output == "-" ? std::cerr : std::cout;
  log << "collective: " << to_string(sched.collective) << "\n";
  log << "runtime per unit: " << show(sched.runtime_per_unit) << "\n";
  log << "lower bound per unit: " << show(sched.lower_bound_per_unit) << "\n";
  if (sched.fixed_k) {
    log << "fixed k: " << sched.k << ", U*: " << show(sched.fixed_k->U_star)
        << ", U used: " << show(sched.fixed_k->achieved_U) << "\n";
    log << "unconstrained optimum per unit: " << show(sched.fixed_k->optimum_per_unit)
        << "\n";
    Rational runtime = sched.runtime_per_unit;
    if (sched.collective == Collective::kAllreduce) runtime = sched.phases[1].runtime_per_unit;
    const Rational gap = runtime - sched.fixed_k->optimum_per_unit;
    log << "gap: " << show(gap) << "\n";
    if (gap > 0) return kExitGap;
  }
  return kExitOk;
}

int run_verify(const std::string& topology, const std::string& schedule) {
  const ScaledTopology st = read_topology(topology);
  PipelineSchedule sched;
  try {
    sched = load_schedule(read_file(schedule));
  } catch (const ScheduleFormatError& e) {
    throw InputError(e.what());
  }
  CertificationReport report = check_schedule(st.topology, sched);
  if (sched.scale != st.scale) {
    report.checks.push_back({"scale", false,
                             "schedule scale " + to_fraction(sched.scale) +
                                 ", topology scale " + to_fraction(st.scale)});
  }
  std::cout << report.to_json();
  return report.all_pass() ? kExitOk : kExitInput;
}

struct GenArgs {
  std::string preset;
  PresetParams params;
  std::uint64_t bw = 1;
  std::uint64_t local_bw = 1;
  std::uint64_t global_bw = 1;
  std::uint64_t host_bw = 1;
  std::uint64_t uplink_bw = 1;
  std::string output;
};

int run_gen(GenArgs a) {
  const auto kind = parse_preset_kind(a.preset);
  if (!kind) throw InputError("unknown preset '" + a.preset + "'");
  a.params.bw = a.bw;
  a.params.local_bw = a.local_bw;
  a.params.global_bw = a.global_bw;
  a.params.host_bw = a.host_bw;
  a.params.uplink_bw = a.uplink_bw;
  write_output(a.output, emit_topology(make_preset(*kind, a.params)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandwidth-optimal collective schedule synthesis"};
  app.require_subcommand(1);
  unsigned jobs = 1;
  app.add_option("--jobs,-j", jobs, "Worker threads for flow computations")
      ->check(CLI::Range(1u, 256u));

  std::string analyze_path;
  auto* analyze = app.add_subcommand("analyze", "Report the optimum and lower bounds");
  analyze->add_option("topology", analyze_path, "Topology file")->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand("synth", "Synthesize a schedule");
  synth->add_option("topology", synth_args.topology, "Topology file")->required();
  synth->add_option("--collective,-c", synth_args.collective,
                    "allgather|reduce-scatter|broadcast|reduce|allreduce")
      ->capture_default_str();
  synth->add_option("--root,-r", synth_args.root, "Root for broadcast and reduce");
  synth->add_option("--fixed-k,-k", synth_args.fixed_k, "Trees per root")
      ->check(CLI::PositiveNumber);
  synth->add_option("--policy", synth_args.policy, "canonical|cross-group-first")
      ->capture_default_str();
  synth->add_option("-o,--output", synth_args.output, "Schedule file (default stdout)");

  std::string verify_topology;
  std::string verify_schedule;
  auto* verify = app.add_subcommand("verify", "Certify a schedule against a topology");
  verify->add_option("topology", verify_topology, "Topology file")->required();
  verify->add_option("schedule", verify_schedule, "Schedule file")->required();

  GenArgs gen;
  auto* gen_topo = app.add_subcommand("gen-topo", "Write a preset topology");
  gen_topo->add_option("--preset,-p", gen.preset,
                       "ring|bidirectional_ring|complete|star_switch|two_level_cluster|"
                       "ring_unwound_cluster|fat_tree")
      ->required();
  gen_topo->add_option("--n", gen.params.n, "Compute nodes (ring, complete, star)");
  gen_topo->add_option("--bw", gen.bw, "Link bandwidth (ring, complete, star)");
  gen_topo->add_option("--clusters", gen.params.clusters, "Clusters");
  gen_topo->add_option("--per-cluster", gen.params.per_cluster, "Compute nodes per cluster");
  gen_topo->add_option("--local-bw", gen.local_bw, "Intra-cluster bandwidth");
  gen_topo->add_option("--global-bw", gen.global_bw, "Global switch bandwidth");
  gen_topo->add_option("--leaves", gen.params.leaves, "Leaf switches (fat_tree)");
  gen_topo->add_option("--hosts-per-leaf", gen.params.hosts_per_leaf, "Hosts per leaf");
  gen_topo->add_option("--spines", gen.params.spines, "Spine switches");
  gen_topo->add_option("--host-bw", gen.host_bw, "Host link bandwidth");
  gen_topo->add_option("--uplink-bw", gen.uplink_bw, "Leaf-spine bandwidth");
  gen_topo->add_option("-o,--output", gen.output, "Topology file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }
  set_parallelism(jobs);

  try {
    if (*analyze) return run_analyze(analyze_path);
    if (*synth) return run_synth(synth_args);
    if (*verify) return run_verify(verify_topology, verify_schedule);
    if (*gen_topo) return run_gen(gen);
  } catch (const TopologyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
