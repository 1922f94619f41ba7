#include "eonplan/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace eonplan {

namespace {
constexpr double kRateEps = 1e-9;
constexpr double kLenEps = 1e-9;
}  // namespace

std::vector<int> order_demands(const std::vector<TrafficDemand>& demands,
                               OrderingPolicy policy) {
  std::vector<int> order(demands.size());
  for (std::size_t i = 0; i < demands.size(); ++i) order[i] = static_cast<int>(i);
  switch (policy) {
    case OrderingPolicy::IndexOrder:
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return demands[a].demand_id < demands[b].demand_id;
      });
      break;
    case OrderingPolicy::Descending:
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (demands[a].rate_gbps != demands[b].rate_gbps)
          return demands[a].rate_gbps > demands[b].rate_gbps;
        return demands[a].demand_id < demands[b].demand_id;
      });
      break;
    case OrderingPolicy::Ascending:
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (demands[a].rate_gbps != demands[b].rate_gbps)
          return demands[a].rate_gbps < demands[b].rate_gbps;
        return demands[a].demand_id < demands[b].demand_id;
      });
      break;
  }
  return order;
}

SequenceResult plan_gh(NetworkState& state, const std::vector<TrafficDemand>& demands,
                       OrderingPolicy policy) {
  const auto order = order_demands(demands, policy);
  return provision_sequence(state, demands, order);
}

std::vector<int> shortest_length_route(const Topology& topo, int src, int dst) {
  const int n = topo.num_nodes();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(n, inf);
  std::vector<int> hops(n, std::numeric_limits<int>::max());
  std::vector<int> pred(n, -1);
  std::vector<char> settled(n, 0);
  dist[src] = 0.0;
  hops[src] = 0;

  using Entry = std::tuple<double, int, int>;  // dist, hops, node
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> pq;
  pq.push({0.0, 0, src});
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    if (settled[u]) continue;
    settled[u] = 1;
    for (int fid : topo.incident[u]) {
      const Fiber& f = topo.fibers[fid];
      const int v = f.a == u ? f.b : f.a;
      if (settled[v]) continue;
      const double nd = d + f.length_km;
      const int nh = h + 1;
      bool better = nd < dist[v] - kLenEps;
      if (!better && std::abs(nd - dist[v]) <= kLenEps) {
        better = nh < hops[v] || (nh == hops[v] && u < pred[v]);
      }
      if (better) {
        dist[v] = nd;
        hops[v] = nh;
        pred[v] = u;
        pq.push({nd, nh, v});
      }
    }
  }
  if (dist[dst] == inf) return {};
  std::vector<int> route;
  for (int v = dst; v != -1; v = pred[v]) route.push_back(v);
  std::reverse(route.begin(), route.end());
  return route;
}

namespace {

int find_fiber(const Topology& topo, int u, int v) {
  for (int fid : topo.incident[u]) {
    const Fiber& f = topo.fibers[fid];
    if (f.a + f.b - u == v) return fid;
  }
  return -1;
}

int fd_between(const Topology& topo, int u, int v) {
  const int fid = find_fiber(topo, u, v);
  const Fiber& f = topo.fibers[fid];
  return fiber_dir_id(fid, f.a == u ? 0 : 1);
}

// One traffic piece whose rate fits a capacity class, routed along the
// distance-shortest path. Existing lightpaths of the pair are explored
// first; otherwise new lightpaths are cut along the route, regenerating
// at VER-eligible nodes when reach runs out and dropping to the
// electrical layer when no VER is there.
bool sp_provision_piece(NetworkState& state, int src, int dst, double rate,
                        const std::vector<int>& route) {
  const Topology& topo = state.topology();
  const PowerCatalog& cat = state.catalog();

  for (const auto& lp : state.lightpaths()) {
    if (lp.src == src && lp.dst == dst && lp.free_gbps() + kRateEps >= rate) {
      return state.groom(lp.id, rate).has_value();
    }
  }

  const auto cls = capacity_class(cat, rate);
  if (!cls) return false;
  const double max_reach = cat.max_mtr(*cls);

  // Cut the route into lightpaths (adjacent chains) and, inside each
  // lightpath, into transparent segments at regeneration nodes.
  struct Piece {
    int start_node;
    std::vector<std::vector<int>> segments;  // fiber dirs per segment
  };
  std::vector<Piece> chain;
  chain.push_back({route[0], {{}}});
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    const int u = route[i];
    const int v = route[i + 1];
    const int fd = fd_between(topo, u, v);
    const double len = topo.fibers[fiber_of_dir(fd)].length_km;
    if (len > max_reach + kLenEps) return false;  // single hop beyond any option
    if (acc + len > max_reach + kLenEps) {
      if (topo.nodes[u].ver_eligible && state.regen_incremental_pc(u).has_value()) {
        chain.back().segments.push_back({});
      } else {
        chain.push_back({u, {{}}});
      }
      acc = 0.0;
    }
    chain.back().segments.back().push_back(fd);
    acc += len;
  }

  std::vector<int> committed_ids;
  for (const auto& piece : chain) {
    Lightpath lp;
    lp.src = piece.start_node;
    lp.capacity_gbps = *cls;
    int cursor = piece.start_node;
    for (const auto& dirs : piece.segments) {
      TransparentSegment seg;
      seg.fiber_dirs = dirs;
      double length = 0.0;
      for (int fd : dirs) {
        length += topo.fibers[fiber_of_dir(fd)].length_km;
        cursor = dir_to_node(topo.fibers[fiber_of_dir(fd)], fd);
      }
      const TransmissionOption* opt = select_option(cat, *cls, length);
      if (!opt) return false;
      seg.option_index =
          static_cast<int>(opt - cat.options.data());
      auto start = state.first_fit_slots(seg.fiber_dirs, opt->data_slots);
      if (!start) return false;
      seg.slot_start = *start;
      seg.slot_count = opt->data_slots;
      lp.segments.push_back(std::move(seg));
    }
    lp.dst = cursor;
    auto committed = state.commit_lightpath(lp);
    if (!committed.ok) return false;
    committed_ids.push_back(static_cast<int>(state.lightpaths().size()) - 1);
  }
  for (int id : committed_ids) {
    if (!state.groom(id, rate)) return false;
  }
  return true;
}

bool sp_provision(NetworkState& state, const TrafficDemand& demand) {
  const PowerCatalog& cat = state.catalog();
  // Oversized demands split ahead of routing.
  if (!capacity_class(cat, demand.rate_gbps)) {
    auto halves = split_demand(cat, demand);
    if (!halves) return false;
    return sp_provision(state, halves->first) && sp_provision(state, halves->second);
  }
  const auto route = shortest_length_route(state.topology(), demand.src, demand.dst);
  if (route.size() < 2) return false;
  return sp_provision_piece(state, demand.src, demand.dst, demand.rate_gbps, route);
}

}  // namespace

SequenceResult plan_sp(NetworkState& state, const std::vector<TrafficDemand>& demands) {
  const auto order = order_demands(demands, OrderingPolicy::Descending);
  SequenceResult result;
  for (int id : order) {
    const auto snap = state.snapshot();
    if (!sp_provision(state, demands[id])) {
      state.restore(snap);
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
