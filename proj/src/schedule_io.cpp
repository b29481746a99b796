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

#include <cstdint>
#include <limits>
#include <set>

#include <json.hpp>

#include "bwsynth/schedule.hpp"

namespace bwsynth {

namespace {

using Json = nlohmann::ordered_json;

Json integer_json(const BigInt& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() &&
      v <= std::numeric_limits<std::int64_t>::max()) {
    return Json(v.convert_to<std::int64_t>());
  }
  return Json(v.str());
}

Json schedule_to_json(const PipelineSchedule& s) {
  Json j = Json::object();
  j["collective"] = std::string(to_string(s.collective));
  j["N"] = s.N;
  j["k"] = integer_json(s.k);
  j["U"] = to_fraction(s.U);
  j["scale"] = to_fraction(s.scale);
  j["runtime_per_unit"] = to_fraction(s.runtime_per_unit);
  j["lower_bound_per_unit"] = to_fraction(s.lower_bound_per_unit);
  if (s.root) j["root"] = *s.root;
  Json trees = Json::array();
  for (const auto& t : s.trees) {
    Json edges = Json::array();
    for (const auto& e : t.edges) {
      edges.push_back(Json{{"src", e.src}, {"dst", e.dst}, {"path", e.path}});
    }
    trees.push_back(
        Json{{"root", t.root}, {"multiplicity", integer_json(t.multiplicity)}, {"edges", edges}});
  }
  j["trees"] = trees;
  Json emap = Json::array();
  for (const auto& [edge, vias] : s.emap) {
    for (const auto& [w, amount] : vias) {
      emap.push_back(Json{{"src", edge.first},
                          {"dst", edge.second},
                          {"via", w},
                          {"amount", integer_json(amount)}});
    }
  }
  j["emap"] = emap;
  if (!s.phases.empty()) {
    Json phases = Json::array();
    for (const auto& p : s.phases) phases.push_back(schedule_to_json(p));
    j["phases"] = phases;
  }
  if (s.bounds) {
    j["bounds"] = Json{{"lb_cut", to_fraction(s.bounds->lb_cut)},
                       {"lb_degree", to_fraction(s.bounds->lb_degree)},
                       {"half_split", s.bounds->half_split},
                       {"singleton_max", s.bounds->singleton_max}};
  }
  if (s.fixed_k) {
    j["fixed_k"] = Json{{"U_star", to_fraction(s.fixed_k->U_star)},
                        {"optimum_per_unit", to_fraction(s.fixed_k->optimum_per_unit)},
                        {"achieved_U", to_fraction(s.fixed_k->achieved_U)}};
  }
  return j;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ScheduleFormatError((where.empty() ? std::string("/") : where) + ": " + what);
}

const Json& field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + "/" + key, "missing");
  return *it;
}

std::string text(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  const auto s = v.get<std::string>();
  if (s.empty()) fail(where, "empty string");
  return s;
}

Rational rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rational(BigInt(v.get<std::int64_t>()));
  try {
    return parse_rational(text(v, where));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

BigInt integer(const Json& v, const std::string& where, bool positive) {
  BigInt out;
  if (v.is_number_unsigned()) {
    out = BigInt(v.get<std::uint64_t>());
  } else if (v.is_number_integer()) {
    out = BigInt(v.get<std::int64_t>());
  } else {
    const Rational r = rational(v, where);
    if (!is_integer(r)) fail(where, "expected an integer");
    out = numerator_of(r);
  }
  if (positive && out <= 0) fail(where, "must be positive");
  return out;
}

bool boolean(const Json& v, const std::string& where) {
  if (!v.is_boolean()) fail(where, "expected a boolean");
  return v.get<bool>();
}

const Json& array(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array");
  return v;
}

PipelineSchedule schedule_from_json(const Json& j, const std::string& at) {
  PipelineSchedule s;
  const std::string name = text(field(j, "collective", at), at + "/collective");
  const auto c = parse_collective(name);
  if (!c) fail(at + "/collective", "unknown collective '" + name + "'");
  s.collective = *c;
  const Json& n = field(j, "N", at);
  if (!n.is_number_unsigned() || n.get<std::uint64_t>() < 2) {
    fail(at + "/N", "expected an integer >= 2");
  }
  s.N = n.get<std::size_t>();
  s.k = integer(field(j, "k", at), at + "/k", true);
  s.U = rational(field(j, "U", at), at + "/U");
  s.scale = rational(field(j, "scale", at), at + "/scale");
  if (s.scale <= 0) fail(at + "/scale", "must be positive");
  s.runtime_per_unit = rational(field(j, "runtime_per_unit", at), at + "/runtime_per_unit");
  s.lower_bound_per_unit =
      rational(field(j, "lower_bound_per_unit", at), at + "/lower_bound_per_unit");
  if (j.contains("root")) s.root = text(j["root"], at + "/root");
  if (is_rooted(s.collective) && !s.root) fail(at + "/root", "missing");

  const Json& trees = array(field(j, "trees", at), at + "/trees");
  for (std::size_t i = 0; i < trees.size(); ++i) {
    const std::string tp = at + "/trees/" + std::to_string(i);
    ScheduleTree t;
    t.root = text(field(trees[i], "root", tp), tp + "/root");
    t.multiplicity = integer(field(trees[i], "multiplicity", tp), tp + "/multiplicity", true);
    const Json& edges = array(field(trees[i], "edges", tp), tp + "/edges");
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const std::string ep = tp + "/edges/" + std::to_string(k);
      ScheduleEdge e;
      e.src = text(field(edges[k], "src", ep), ep + "/src");
      e.dst = text(field(edges[k], "dst", ep), ep + "/dst");
      const Json& path = array(field(edges[k], "path", ep), ep + "/path");
      for (std::size_t h = 0; h < path.size(); ++h) {
        e.path.push_back(text(path[h], ep + "/path/" + std::to_string(h)));
      }
      if (e.path.size() < 2) fail(ep + "/path", "needs at least two nodes");
      if (e.path.front() != e.src) fail(ep + "/path/0", "must equal src");
      if (e.path.back() != e.dst) {
        fail(ep + "/path/" + std::to_string(e.path.size() - 1), "must equal dst");
      }
      t.edges.push_back(std::move(e));
    }
    s.trees.push_back(std::move(t));
  }
  // Roots and edge endpoints are compute nodes; paths may only pass
  // through switches.
  std::set<std::string> computes;
  for (const auto& t : s.trees) {
    computes.insert(t.root);
    for (const auto& e : t.edges) {
      computes.insert(e.src);
      computes.insert(e.dst);
    }
  }
  for (std::size_t i = 0; i < s.trees.size(); ++i) {
    for (std::size_t k = 0; k < s.trees[i].edges.size(); ++k) {
      const auto& path = s.trees[i].edges[k].path;
      for (std::size_t h = 1; h + 1 < path.size(); ++h) {
        if (computes.count(path[h])) {
          fail(at + "/trees/" + std::to_string(i) + "/edges/" + std::to_string(k) +
                   "/path/" + std::to_string(h),
               "compute node '" + path[h] + "' inside a path");
        }
      }
    }
  }

  const Json& emap = array(field(j, "emap", at), at + "/emap");
  for (std::size_t i = 0; i < emap.size(); ++i) {
    const std::string mp = at + "/emap/" + std::to_string(i);
    const std::string src = text(field(emap[i], "src", mp), mp + "/src");
    const std::string dst = text(field(emap[i], "dst", mp), mp + "/dst");
    const std::string via = text(field(emap[i], "via", mp), mp + "/via");
    BigInt& slot = s.emap[{src, dst}][via];
    if (slot != 0) fail(mp, "duplicate emap record");
    slot = integer(field(emap[i], "amount", mp), mp + "/amount", true);
  }

  if (j.contains("phases")) {
    const Json& phases = array(j["phases"], at + "/phases");
    for (std::size_t i = 0; i < phases.size(); ++i) {
      s.phases.push_back(schedule_from_json(phases[i], at + "/phases/" + std::to_string(i)));
    }
  }
  if (s.collective == Collective::kAllreduce) {
    if (s.phases.size() != 2 || s.phases[0].collective != Collective::kReduceScatter ||
        s.phases[1].collective != Collective::kAllgather) {
      fail(at + "/phases", "allreduce needs [reduce-scatter, allgather] phases");
    }
  } else if (s.trees.empty()) {
    fail(at + "/trees", "no trees");
  }
  if (j.contains("bounds")) {
    const std::string bp = at + "/bounds";
    const Json& b = j["bounds"];
    s.bounds = AllreduceBounds{rational(field(b, "lb_cut", bp), bp + "/lb_cut"),
                               rational(field(b, "lb_degree", bp), bp + "/lb_degree"),
                               boolean(field(b, "half_split", bp), bp + "/half_split"),
                               boolean(field(b, "singleton_max", bp), bp + "/singleton_max")};
  }
  if (j.contains("fixed_k")) {
    const std::string fp = at + "/fixed_k";
    const Json& f = j["fixed_k"];
    s.fixed_k = FixedKInfo{rational(field(f, "U_star", fp), fp + "/U_star"),
                           rational(field(f, "optimum_per_unit", fp), fp + "/optimum_per_unit"),
                           rational(field(f, "achieved_U", fp), fp + "/achieved_U")};
  }
  return s;
}

}  // namespace

std::string emit_schedule(const PipelineSchedule& sched) {
  return schedule_to_json(sched).dump(2) + "\n";
}

PipelineSchedule load_schedule(std::string_view text_in) {
  Json j;
  try {
    j = Json::parse(text_in);
  } catch (const Json::parse_error& e) {
    throw ScheduleFormatError(std::string("malformed schedule JSON: ") + e.what());
  }
  return schedule_from_json(j, "");
}

}  // namespace bwsynth
