#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "eonplan/aux_graph.hpp"
#include "eonplan/network_state.hpp"
#include "eonplan/rng.hpp"

namespace eonplan::testsupport {

// Assembles a topology from (a, b, length_km) triples.
inline Topology make_topology(int num_nodes,
                              const std::vector<std::tuple<int, int, double>>& links,
                              int slots_total = 320, double span_km = 80.0,
                              int max_sbvts = 64, int max_vers = 3) {
  Topology topo;
  topo.span_km = span_km;
  for (int i = 0; i < num_nodes; ++i) {
    Node node;
    node.id = i;
    node.max_sbvts = max_sbvts;
    node.max_vers = max_vers;
    topo.nodes.push_back(node);
  }
  int fid = 0;
  for (const auto& [a, b, len] : links) {
    Fiber f;
    f.id = fid++;
    f.a = a;
    f.b = b;
    f.length_km = len;
    f.slots_total = slots_total;
    topo.fibers.push_back(f);
  }
  topo.finalize();
  mark_ver_nodes(topo);
  return topo;
}

// Random connected topology: spanning tree plus extra chords.
inline Topology random_topology(Rng& rng, int num_nodes, int extra_fibers,
                                double min_len, double max_len, int slots_total,
                                int max_sbvts, int max_vers) {
  std::vector<std::tuple<int, int, double>> links;
  std::set<std::pair<int, int>> seen;
  for (int i = 1; i < num_nodes; ++i) {
    int a = static_cast<int>(rng.below(i));
    links.emplace_back(a, i, std::round(rng.uniform_real(min_len, max_len)));
    seen.insert({a, i});
  }
  int attempts = 0;
  while (extra_fibers > 0 && attempts < 200) {
    ++attempts;
    int a = static_cast<int>(rng.below(num_nodes));
    int b = static_cast<int>(rng.below(num_nodes));
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (!seen.insert({key.first, key.second}).second) continue;
    links.emplace_back(key.first, key.second, std::round(rng.uniform_real(min_len, max_len)));
    --extra_fibers;
  }
  return make_topology(num_nodes, links, slots_total, 80.0, max_sbvts, max_vers);
}

// Independent re-derivation of every state invariant from the lightpath
// registry. Returns human-readable violations; empty means consistent.
inline std::vector<std::string> check_state_invariants(const NetworkState& state) {
  std::vector<std::string> issues;
  const Topology& topo = state.topology();
  const PowerCatalog& cat = state.catalog();

  std::map<std::pair<int, int>, int> slot_owner;  // (fiber_dir, slot) -> lightpath
  struct EndCount {
    int ends = 0;
    double cap = 0.0;
  };
  std::vector<EndCount> node_ends(topo.num_nodes());
  std::vector<int> node_regens(topo.num_nodes(), 0);

  for (const auto& lp : state.lightpaths()) {
    if (lp.used_gbps < -1e-9 || lp.used_gbps > lp.capacity_gbps + 1e-9) {
      issues.push_back("lightpath " + std::to_string(lp.id) + ": used outside range");
    }
    int cursor = lp.src;
    for (std::size_t si = 0; si < lp.segments.size(); ++si) {
      const auto& seg = lp.segments[si];
      const auto& opt = cat.options[seg.option_index];
      if (opt.capacity_gbps != lp.capacity_gbps)
        issues.push_back("lightpath " + std::to_string(lp.id) + ": option class mismatch");
      if (seg.slot_count != opt.data_slots)
        issues.push_back("lightpath " + std::to_string(lp.id) + ": slot width mismatch");
      double length = 0.0;
      for (int fd : seg.fiber_dirs) {
        const Fiber& f = topo.fibers[fiber_of_dir(fd)];
        if (dir_from_node(f, fd) != cursor)
          issues.push_back("lightpath " + std::to_string(lp.id) + ": broken chain");
        cursor = dir_to_node(f, fd);
        length += f.length_km;
        if (seg.slot_start < 0 || seg.slot_start + seg.slot_count > f.slots_total)
          issues.push_back("lightpath " + std::to_string(lp.id) + ": slots out of range");
        for (int s = seg.slot_start; s < seg.slot_start + seg.slot_count; ++s) {
          auto [it, fresh] = slot_owner.insert({{fd, s}, lp.id});
          if (!fresh)
            issues.push_back("slot overlap on fiber_dir " + std::to_string(fd) +
                             " slot " + std::to_string(s) + " between lightpaths " +
                             std::to_string(it->second) + " and " + std::to_string(lp.id));
        }
      }
      if (length > opt.mtr_km + 1e-6)
        issues.push_back("lightpath " + std::to_string(lp.id) + ": segment beyond reach");
      if (si + 1 < lp.segments.size()) {
        if (!topo.nodes[cursor].ver_eligible)
          issues.push_back("lightpath " + std::to_string(lp.id) +
                           ": regeneration at non-eligible node");
        node_regens[cursor] += 1;
      }
    }
    if (cursor != lp.dst)
      issues.push_back("lightpath " + std::to_string(lp.id) + ": route does not reach dst");
    node_ends[lp.src].ends += 1;
    node_ends[lp.dst].ends += 1;
  }

  for (int n = 0; n < topo.num_nodes(); ++n) {
    const NodeUsage& u = state.node_usage(n);
    if (static_cast<int>(u.sbvts.size()) > topo.nodes[n].max_sbvts)
      issues.push_back("node " + std::to_string(n) + ": SBVT budget exceeded");
    if (static_cast<int>(u.vers.size()) > topo.nodes[n].max_vers)
      issues.push_back("node " + std::to_string(n) + ": VER budget exceeded");
    if (!u.vers.empty() && !topo.nodes[n].ver_eligible)
      issues.push_back("node " + std::to_string(n) + ": VER at non-eligible node");
    int ends = 0, ssrs = 0;
    for (const auto& s : u.sbvts) {
      if (s.ends > cat.sbvt_sliceability)
        issues.push_back("node " + std::to_string(n) + ": sliceability exceeded");
      if (s.capacity_sum > cat.router_port_capacity + 1e-9)
        issues.push_back("node " + std::to_string(n) + ": SBVT capacity exceeded");
      ends += s.ends;
    }
    for (const auto& v : u.vers) {
      if (v.ssrs_used > cat.ver_ssr_count)
        issues.push_back("node " + std::to_string(n) + ": SSR count exceeded");
      ssrs += v.ssrs_used;
    }
    if (ends != node_ends[n].ends)
      issues.push_back("node " + std::to_string(n) + ": SBVT end count disagrees with registry");
    if (ssrs != node_regens[n])
      issues.push_back("node " + std::to_string(n) + ": SSR count disagrees with registry");
  }

  const PowerLedger& led = state.ledger();
  if (std::abs(led.category_sum() - led.total_w) > 1e-9 * std::max(1.0, led.total_w))
    issues.push_back("ledger categories do not sum to total");
  const PowerLedger rebuilt = state.recompute_ledger();
  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-6 * std::max({std::abs(a), std::abs(b), 1.0});
  };
  if (!close(led.router_w, rebuilt.router_w) || !close(led.sbvt_w, rebuilt.sbvt_w) ||
      !close(led.amp_w, rebuilt.amp_w) || !close(led.ver_w, rebuilt.ver_w) ||
      !close(led.oxc_w, rebuilt.oxc_w) || !close(led.total_w, rebuilt.total_w))
    issues.push_back("incremental ledger disagrees with recompute");

  return issues;
}

// Exhaustive enumeration of auxiliary paths for small graphs: depth-first
// over edges and in-place regenerations with the same reach and cost rules
// as the search, bounded per directed edge (two uses) and per node (two
// regenerations). Returns the minimum path cost to the destination's
// electrical aux node, or nullopt when nothing reaches it.
inline std::optional<double> enumerate_min_aux_cost(const AuxGraph& g,
                                                    const NetworkState& state, int src,
                                                    int dst, int max_depth = 48) {
  const PowerCatalog& cat = state.catalog();
  const int target = g.aux_index(dst, -1);
  std::optional<double> best;
  std::vector<int> edge_uses(g.edges.size(), 0);
  std::vector<int> regen_uses(g.aux_count(), 0);

  struct Dfs {
    const AuxGraph& g;
    const NetworkState& state;
    const PowerCatalog& cat;
    int target;
    int max_depth;
    std::optional<double>& best;
    std::vector<int>& edge_uses;
    std::vector<int>& regen_uses;

    void run(int aux, double cost, double reach, int depth) {
      if (best && cost >= *best) return;  // nonnegative weights
      if (aux == target) {
        best = cost;
        return;
      }
      if (depth >= max_depth) return;
      const int layer = g.layer_of(aux);
      if (layer >= 0 && reach > 0.0 && regen_uses[aux] < 2) {
        auto overhead = state.regen_incremental_pc(g.phys_of(aux));
        if (overhead) {
          const auto& opt = cat.options[g.layer_options[layer]];
          regen_uses[aux] += 1;
          run(aux, cost + ver_regen_pc(cat, opt) + *overhead, 0.0, depth + 1);
          regen_uses[aux] -= 1;
        }
      }
      for (int ei : g.adjacency[aux]) {
        if (edge_uses[ei] >= 2) continue;
        const AuxEdge& e = g.edges[ei];
        double next_reach = 0.0;
        if (e.kind == AuxEdge::Kind::Transmission) {
          const Fiber& f = state.topology().fibers[fiber_of_dir(e.payload)];
          next_reach = reach + f.length_km;
          const auto& opt = cat.options[g.layer_options[layer]];
          if (next_reach > opt.mtr_km + 1e-9) continue;
        }
        edge_uses[ei] += 1;
        run(e.to, cost + e.weight_w, next_reach, depth + 1);
        edge_uses[ei] -= 1;
      }
    }
  };

  Dfs dfs{g, state, cat, target, max_depth, best, edge_uses, regen_uses};
  dfs.run(g.aux_index(src, -1), 0.0, 0.0, 0);
  return best;
}

}  // namespace eonplan::testsupport
