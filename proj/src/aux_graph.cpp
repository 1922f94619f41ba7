#include "eonplan/aux_graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace eonplan {

namespace {
constexpr double kRateEps = 1e-9;
}

bool AuxGraph::has_edge(int from_phys, int from_layer, int to_phys, int to_layer) const {
  int from = aux_index(from_phys, from_layer);
  int to = aux_index(to_phys, to_layer);
  for (int ei : adjacency[from]) {
    if (edges[ei].to == to) return true;
  }
  return false;
}

AuxGraph build_aux_graph(const NetworkState& state, const TrafficDemand& demand,
                         double capacity_class_gbps) {
  const Topology& topo = state.topology();
  const PowerCatalog& cat = state.catalog();

  AuxGraph g;
  g.num_phys_nodes = topo.num_nodes();
  g.capacity_class_gbps = capacity_class_gbps;
  g.layer_options = cat.options_for_class(capacity_class_gbps);
  g.adjacency.assign(g.aux_count(), {});

  auto add_edge = [&](AuxEdge e) {
    g.adjacency[e.from].push_back(static_cast<int>(g.edges.size()));
    g.edges.push_back(e);
  };

  // Tx/Rx edges, both directions, where an SBVT end can attach.
  for (int n = 0; n < topo.num_nodes(); ++n) {
    auto port_pc = state.sbvt_end_incremental_pc(n, capacity_class_gbps);
    if (!port_pc) continue;
    for (int k = 0; k < g.layers(); ++k) {
      const double w = *port_pc + cat.options[g.layer_options[k]].pc_watts / 2.0;
      add_edge({AuxEdge::Kind::TxRx, g.aux_index(n, -1), g.aux_index(n, k), w, n});
      add_edge({AuxEdge::Kind::TxRx, g.aux_index(n, k), g.aux_index(n, -1), w, n});
    }
  }

  // Transmission edges where the option reaches across the fiber and the
  // needed slot width has a free block.
  for (int f = 0; f < topo.num_fibers(); ++f) {
    const Fiber& fiber = topo.fibers[f];
    for (int dir = 0; dir < 2; ++dir) {
      const int fd = fiber_dir_id(f, dir);
      const int from = dir_from_node(fiber, fd);
      const int to = dir_to_node(fiber, fd);
      const double w = state.incremental_amp_pc(fd);
      for (int k = 0; k < g.layers(); ++k) {
        const TransmissionOption& opt = cat.options[g.layer_options[k]];
        if (fiber.length_km > opt.mtr_km + 1e-9) continue;
        if (!state.has_free_block(fd, opt.data_slots)) continue;
        add_edge({AuxEdge::Kind::Transmission, g.aux_index(from, k), g.aux_index(to, k), w, fd});
      }
    }
  }

  // Lightpath edges over existing lightpaths with room for the demand.
  for (const auto& lp : state.lightpaths()) {
    if (lp.free_gbps() + kRateEps < demand.rate_gbps) continue;
    add_edge({AuxEdge::Kind::Lightpath, g.aux_index(lp.src, -1), g.aux_index(lp.dst, -1),
              0.0, lp.id});
  }

  return g;
}

namespace {

struct Label {
  double cost = 0.0;
  int hops = 0;
  int lp_edges = 0;
  double reach = 0.0;
  int aux = -1;
  int parent = -1;      // index into the label pool
  int via_edge = -1;    // -1: origin, -2: regeneration, else edge index
  bool pruned = false;
};

// Priority ordering: cost, then hops, then fewer lightpath edges last.
struct PqEntry {
  double cost;
  int hops;
  int neg_lp;
  int label;
  bool operator>(const PqEntry& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (hops != o.hops) return hops > o.hops;
    if (neg_lp != o.neg_lp) return neg_lp > o.neg_lp;
    return label > o.label;
  }
};

bool tuple_le(const Label& a, const Label& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  if (a.hops != b.hops) return a.hops < b.hops;
  return a.lp_edges >= b.lp_edges;
}

}  // namespace

std::optional<AuxPath> min_pc_path(const AuxGraph& graph, const NetworkState& state,
                                   int src, int dst) {
  const PowerCatalog& cat = state.catalog();
  const int target = graph.aux_index(dst, -1);

  std::vector<Label> pool;
  std::vector<std::vector<int>> kept(graph.aux_count());
  std::priority_queue<PqEntry, std::vector<PqEntry>, std::greater<PqEntry>> pq;

  auto try_add = [&](Label cand) -> void {
    auto& bucket = kept[cand.aux];
    for (int li : bucket) {
      const Label& k = pool[li];
      if (k.pruned) continue;
      if (k.reach <= cand.reach + 1e-12 && tuple_le(k, cand)) return;  // dominated
    }
    for (int li : bucket) {
      Label& k = pool[li];
      if (!k.pruned && cand.reach <= k.reach + 1e-12 && tuple_le(cand, k) &&
          !(k.reach <= cand.reach + 1e-12 && tuple_le(k, cand))) {
        k.pruned = true;
      }
    }
    int idx = static_cast<int>(pool.size());
    pool.push_back(cand);
    bucket.push_back(idx);
    pq.push({cand.cost, cand.hops, -cand.lp_edges, idx});
  };

  Label origin;
  origin.aux = graph.aux_index(src, -1);
  try_add(origin);

  while (!pq.empty()) {
    const PqEntry top = pq.top();
    pq.pop();
    Label cur = pool[top.label];
    if (pool[top.label].pruned) continue;
    if (cur.aux == target) {
      // Reconstruct.
      AuxPath path;
      path.cost_w = cur.cost;
      path.hops = cur.hops;
      path.lightpath_edges = cur.lp_edges;
      std::vector<AuxStep> rev;
      for (int li = top.label; pool[li].via_edge != -1; li = pool[li].parent) {
        const Label& l = pool[li];
        if (l.via_edge == -2) {
          rev.push_back({true, -1, l.aux});
        } else {
          rev.push_back({false, l.via_edge, -1});
        }
      }
      path.steps.assign(rev.rbegin(), rev.rend());
      return path;
    }

    const int layer = graph.layer_of(cur.aux);
    const int phys = graph.phys_of(cur.aux);

    // Regeneration: reset reach in place at a VER-eligible node.
    if (layer >= 0 && cur.reach > 0.0) {
      auto overhead = state.regen_incremental_pc(phys);
      if (overhead) {
        const TransmissionOption& opt = cat.options[graph.layer_options[layer]];
        Label next = cur;
        next.cost += ver_regen_pc(cat, opt) + *overhead;
        next.reach = 0.0;
        next.parent = top.label;
        next.via_edge = -2;
        try_add(next);
      }
    }

    for (int ei : graph.adjacency[cur.aux]) {
      const AuxEdge& e = graph.edges[ei];
      Label next;
      next.cost = cur.cost + e.weight_w;
      next.hops = cur.hops + 1;
      next.lp_edges = cur.lp_edges + (e.kind == AuxEdge::Kind::Lightpath ? 1 : 0);
      next.aux = e.to;
      next.parent = top.label;
      next.via_edge = ei;
      if (e.kind == AuxEdge::Kind::Transmission) {
        const Fiber& f = state.topology().fibers[fiber_of_dir(e.payload)];
        next.reach = cur.reach + f.length_km;
        const TransmissionOption& opt = cat.options[graph.layer_options[layer]];
        if (next.reach > opt.mtr_km + 1e-9) continue;
      } else {
        next.reach = 0.0;
      }
      try_add(next);
    }
  }
  return std::nullopt;
}

std::optional<std::pair<TrafficDemand, TrafficDemand>> split_demand(
    const PowerCatalog& cat, const TrafficDemand& demand) {
  const auto classes = cat.capacity_classes();
  double first = 0.0;
  if (demand.rate_gbps > classes.back()) {
    first = classes.back();
  } else {
    for (double c : classes) {
      if (c < demand.rate_gbps - kRateEps) first = c;
    }
    if (first == 0.0) return std::nullopt;  // at or below the smallest class
  }
  TrafficDemand d1 = demand;
  TrafficDemand d2 = demand;
  d1.rate_gbps = first;
  d2.rate_gbps = demand.rate_gbps - first;
  return std::make_pair(d1, d2);
}

namespace {

// Turns one found auxiliary path into grooming operations and committed
// lightpaths. Returns false (with partial mutations, caller rolls back)
// when a spectrum block or commit fails.
bool materialize_path(NetworkState& state, const AuxGraph& graph, const AuxPath& path,
                      const TrafficDemand& demand, std::string* trace) {
  const PowerCatalog& cat = state.catalog();
  std::size_t i = 0;
  while (i < path.steps.size()) {
    const AuxStep& step = path.steps[i];
    if (step.regen) return false;  // regen outside an optical run: malformed
    const AuxEdge& e = graph.edges[step.edge_index];
    if (e.kind == AuxEdge::Kind::Lightpath) {
      if (!state.groom(e.payload, demand.rate_gbps)) return false;
      if (trace) *trace += " groom(lp=" + std::to_string(e.payload) + ")";
      ++i;
      continue;
    }
    if (e.kind != AuxEdge::Kind::TxRx) return false;  // malformed

    // Optical run: TxRx out, transmission/regen steps, TxRx back.
    const int src_node = graph.phys_of(e.from);
    const int layer = graph.layer_of(e.to);
    const int option_index = graph.layer_options[layer];
    Lightpath lp;
    lp.src = src_node;
    lp.capacity_gbps = graph.capacity_class_gbps;
    lp.segments.push_back({});
    lp.segments.back().option_index = option_index;
    ++i;
    bool closed = false;
    while (i < path.steps.size()) {
      const AuxStep& s = path.steps[i];
      if (s.regen) {
        lp.segments.push_back({});
        lp.segments.back().option_index = option_index;
        ++i;
        continue;
      }
      const AuxEdge& se = graph.edges[s.edge_index];
      if (se.kind == AuxEdge::Kind::Transmission) {
        lp.segments.back().fiber_dirs.push_back(se.payload);
        ++i;
        continue;
      }
      if (se.kind == AuxEdge::Kind::TxRx) {
        lp.dst = graph.phys_of(se.to);
        ++i;
        closed = true;
        break;
      }
      return false;
    }
    if (!closed) return false;

    for (auto& seg : lp.segments) {
      if (seg.fiber_dirs.empty()) return false;
      const TransmissionOption& opt = cat.options[seg.option_index];
      auto start = state.first_fit_slots(seg.fiber_dirs, opt.data_slots);
      if (!start) return false;
      seg.slot_start = *start;
      seg.slot_count = opt.data_slots;
    }
    auto committed = state.commit_lightpath(lp);
    if (!committed.ok) return false;
    const int new_id = static_cast<int>(state.lightpaths().size()) - 1;
    if (!state.groom(new_id, demand.rate_gbps)) return false;
    if (trace) *trace += " lightpath(id=" + std::to_string(new_id) + ")";
  }
  return true;
}

bool provision_rec(NetworkState& state, const TrafficDemand& demand, std::string* trace,
                   int depth) {
  if (depth > 64) return false;
  const PowerCatalog& cat = state.catalog();

  auto cls = capacity_class(cat, demand.rate_gbps);
  if (!cls) {
    auto halves = split_demand(cat, demand);
    if (!halves) return false;
    return provision_rec(state, halves->first, trace, depth + 1) &&
           provision_rec(state, halves->second, trace, depth + 1);
  }

  AuxGraph graph = build_aux_graph(state, demand, *cls);
  auto path = min_pc_path(graph, state, demand.src, demand.dst);
  if (path) {
    auto before = state.snapshot();
    if (materialize_path(state, graph, *path, demand, trace)) return true;
    state.restore(before);
  }
  // No usable path at this class: split and provision both halves.
  auto halves = split_demand(cat, demand);
  if (!halves) return false;
  return provision_rec(state, halves->first, trace, depth + 1) &&
         provision_rec(state, halves->second, trace, depth + 1);
}

}  // namespace

ProvisionResult provision(NetworkState& state, const TrafficDemand& demand,
                          std::string* trace) {
  const auto before = state.snapshot();
  const double pc_before = state.ledger().total_w;
  if (trace) {
    *trace += "demand " + std::to_string(demand.demand_id) + " " +
              std::to_string(demand.src) + "->" + std::to_string(demand.dst) + ":";
  }
  if (!provision_rec(state, demand, trace, 0)) {
    state.restore(before);
    if (trace) *trace += " failed\n";
    return {false, 0.0};
  }
  const double delta = state.ledger().total_w - pc_before;
  if (trace) {
    std::ostringstream os;
    os << " dpc=" << delta << "\n";
    *trace += os.str();
  }
  return {true, delta};
}

SequenceResult provision_sequence(NetworkState& state,
                                  const std::vector<TrafficDemand>& demands,
                                  std::span<const int> order) {
  SequenceResult result;
  for (int id : order) {
    auto pr = provision(state, demands[id]);
    if (!pr.provisioned) {
      result.failed_demand_id = id;
      result.success = false;
      result.total_pc_w = state.ledger().total_w;
      return result;
    }
    result.order.push_back(id);
    result.provisioned_count += 1;
  }
  result.success = true;
  result.total_pc_w = state.ledger().total_w;
  return result;
}

}  // namespace eonplan
