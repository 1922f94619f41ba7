#pragma once

#include <vector>

#include "eonplan/aux_graph.hpp"

namespace eonplan {

enum class OrderingPolicy { Descending, Ascending, IndexOrder };

// Deterministic demand permutation: Descending/Ascending sort by rate
// with ties by demand id; IndexOrder is demand-id order.
std::vector<int> order_demands(const std::vector<TrafficDemand>& demands,
                               OrderingPolicy policy);

// Greedy-heuristic planner: provisions every demand in policy order via
// the auxiliary-graph planner. Infeasible as soon as one demand fails.
SequenceResult plan_gh(NetworkState& state, const std::vector<TrafficDemand>& demands,
                       OrderingPolicy policy);

// Shortest-path planner: demands in descending order; grooming into an
// existing lightpath of the pair when possible, otherwise new
// lightpath(s) along the distance-shortest route with regeneration at
// VER-eligible nodes when reach forces it (falling back to electrical
// termination at the violating node). Power accounting is identical to
// the other planners.
SequenceResult plan_sp(NetworkState& state, const std::vector<TrafficDemand>& demands);

// Minimum-length route between two nodes (node id sequence). Ties by
// fewer hops, then lexicographic node sequence. Empty when unreachable.
std::vector<int> shortest_length_route(const Topology& topo, int src, int dst);

}  // namespace eonplan
