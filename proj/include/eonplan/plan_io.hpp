#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eonplan/network_state.hpp"
#include "eonplan/num_format.hpp"

namespace eonplan {

struct PlanMeta {
  std::string planner;
  std::string topology_path;
  double atd_gbps = 0.0;
  std::uint64_t traffic_seed = 0;
  std::uint64_t learn_seed = 0;
  int replica = 0;
  bool success = false;
  std::vector<int> order;  // demand ids in provisioning order
};

// Summary counters for one finished plan.
struct PlanMetrics {
  int lightpaths_total = 0;
  std::map<double, int> lightpaths_by_class;
  int router_ports = 0;
  int sbvts_with_tx = 0;  // SBVTs hosting at least one origination
  int sbvts_with_rx = 0;
  int vers_active = 0;
  int ssrs_used = 0;
  int regenerations = 0;
};

PlanMetrics collect_metrics(const NetworkState& state);

// Primary artifact output: lightpaths with routes, slots and options,
// per-node equipment, the ledger breakdown and the provisioning order.
nlohmann::json plan_to_json(const NetworkState& state, const PlanMeta& meta);
void save_plan_json(const NetworkState& state, const PlanMeta& meta,
                    const std::string& path);

// Re-checks every invariant of a plan document against a topology and
// catalog by re-applying it onto a fresh state: route chaining, reach,
// spectrum contiguity/continuity/overlap, equipment budgets and the
// ledger breakdown. Returns human-readable issues; empty means valid.
std::vector<std::string> validate_plan(const Topology& topo, const PowerCatalog& catalog,
                                       const nlohmann::json& plan);
std::vector<std::string> validate_plan_file(const Topology& topo,
                                            const PowerCatalog& catalog,
                                            const std::string& path);

}  // namespace eonplan
