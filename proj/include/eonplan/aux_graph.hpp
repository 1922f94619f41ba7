#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eonplan/network_state.hpp"

namespace eonplan {

// Per-demand auxiliary graph. Each physical node appears as one
// electrical aux node plus one optical aux node per transmission option
// of the demand's capacity class. Edge weights are incremental power
// against the current state.
struct AuxEdge {
  enum class Kind { Transmission, TxRx, Lightpath };
  Kind kind = Kind::Transmission;
  int from = 0;  // aux node index
  int to = 0;
  double weight_w = 0.0;
  // Transmission: fiber_dir id. TxRx: physical node id. Lightpath: lightpath id.
  int payload = 0;
};

struct AuxGraph {
  int num_phys_nodes = 0;
  double capacity_class_gbps = 0.0;
  std::vector<int> layer_options;  // catalog option index per optical layer
  std::vector<AuxEdge> edges;
  std::vector<std::vector<int>> adjacency;  // aux node -> edge indices

  int layers() const { return static_cast<int>(layer_options.size()); }
  int aux_count() const { return num_phys_nodes * (layers() + 1); }
  // layer -1 is the electrical aux node.
  int aux_index(int phys_node, int layer) const {
    return phys_node * (layers() + 1) + (layer + 1);
  }
  int phys_of(int aux) const { return aux / (layers() + 1); }
  int layer_of(int aux) const { return aux % (layers() + 1) - 1; }

  bool has_edge(int from_phys, int from_layer, int to_phys, int to_layer) const;
};

AuxGraph build_aux_graph(const NetworkState& state, const TrafficDemand& demand,
                         double capacity_class_gbps);

// One step of an auxiliary path: either an edge of the graph or an
// in-place regeneration at an optical aux node.
struct AuxStep {
  bool regen = false;
  int edge_index = -1;  // valid when !regen
  int aux_node = -1;    // valid when regen
};

struct AuxPath {
  double cost_w = 0.0;
  int hops = 0;
  int lightpath_edges = 0;
  std::vector<AuxStep> steps;
};

// Reach-constrained minimum-power path between the electrical aux nodes
// of src and dst. Labels carry the transparent distance since the last
// electrical point or regeneration; at VER-eligible nodes with SSR
// capacity a regeneration resets the distance at ver_regen_pc cost.
// Ties: lower cost, then fewer hops, then more lightpath edges.
std::optional<AuxPath> min_pc_path(const AuxGraph& graph, const NetworkState& state,
                                   int src, int dst);

// Splits a demand into (largest class strictly below rate, remainder);
// a demand above the largest class splits at that class. nullopt when
// the rate is at or below the smallest class.
std::optional<std::pair<TrafficDemand, TrafficDemand>> split_demand(
    const PowerCatalog& cat, const TrafficDemand& demand);

struct ProvisionResult {
  bool provisioned = false;
  double delta_pc_w = 0.0;
};

// Greedy per-demand planner: capacity class, auxiliary graph, minimum-PC
// path; grooming over lightpath edges, new lightpaths for optical chains
// (with regenerations where the path dictates); on no path the demand is
// split and both halves provisioned depth-first. A failed attempt leaves
// the state exactly as before.
ProvisionResult provision(NetworkState& state, const TrafficDemand& demand,
                          std::string* trace = nullptr);

struct SequenceResult {
  bool success = false;
  double total_pc_w = 0.0;
  int provisioned_count = 0;
  int failed_demand_id = -1;
  std::vector<int> order;
};

// Provisions demands[order[i]] in sequence, stopping at the first
// failure. total_pc_w is the ledger total after the run.
SequenceResult provision_sequence(NetworkState& state,
                                  const std::vector<TrafficDemand>& demands,
                                  std::span<const int> order);

}  // namespace eonplan
