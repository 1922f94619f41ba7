#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eonplan/power.hpp"
#include "eonplan/topology.hpp"

namespace eonplan {

// Maximal transparent piece of a lightpath: one spectrum block shared by
// every fiber direction on the route. Segments of one lightpath join at
// regeneration points.
struct TransparentSegment {
  std::vector<int> fiber_dirs;  // fiber_dir_id encoding, in travel order
  int slot_start = -1;
  int slot_count = 0;
  int option_index = -1;  // row in the catalog option table

  bool operator==(const TransparentSegment&) const = default;
};

struct Lightpath {
  int id = -1;
  int src = 0;
  int dst = 0;
  double capacity_gbps = 0.0;
  double used_gbps = 0.0;
  std::vector<TransparentSegment> segments;

  double free_gbps() const { return capacity_gbps - used_gbps; }
  bool operator==(const Lightpath&) const = default;
};

struct SbvtUsage {
  int ends = 0;                // lightpath ends attached (<= sliceability)
  double capacity_sum = 0.0;   // sum of attached capacity classes (<= C_R)
  bool operator==(const SbvtUsage&) const = default;
};

struct VerUsage {
  int ssrs_used = 0;
  bool operator==(const VerUsage&) const = default;
};

struct NodeUsage {
  std::vector<SbvtUsage> sbvts;  // one router port per SBVT
  std::vector<VerUsage> vers;
  int router_ports_active() const { return static_cast<int>(sbvts.size()); }
  bool operator==(const NodeUsage&) const = default;
};

struct PowerLedger {
  double router_w = 0.0;
  double sbvt_w = 0.0;
  double amp_w = 0.0;
  double ver_w = 0.0;
  double oxc_w = 0.0;
  double total_w = 0.0;

  double category_sum() const { return router_w + sbvt_w + amp_w + ver_w + oxc_w; }
  bool operator==(const PowerLedger&) const = default;
};

struct CommitResult {
  bool ok = false;
  double delta_pc_w = 0.0;
  std::string error;
};

// Mutable provisioning substrate: spectrum occupancy per fiber direction,
// the lightpath registry, per-node equipment usage and an incrementally
// maintained power ledger. Single writer per planning run; snapshots give
// exact rollback.
class NetworkState {
 public:
  NetworkState(const Topology& topo, const PowerCatalog& catalog);

  const Topology& topology() const { return *topo_; }
  const PowerCatalog& catalog() const { return *catalog_; }
  const PowerLedger& ledger() const { return core_.ledger; }
  const std::vector<Lightpath>& lightpaths() const { return core_.lightpaths; }
  const NodeUsage& node_usage(int node) const { return core_.usage[node]; }

  // Lowest slot index where [start, start+count) is free on every listed
  // fiber direction; nullopt when no common block exists.
  std::optional<int> first_fit_slots(std::span<const int> fiber_dirs, int slot_count) const;

  bool slot_block_free(int fiber_dir, int start, int count) const;
  bool has_free_block(int fiber_dir, int count) const;
  bool dir_active(int fiber_dir) const { return core_.dir_active[fiber_dir] != 0; }

  // Incremental amp power of lighting one more direction of a fiber
  // (0 when the direction is already active).
  double incremental_amp_pc(int fiber_dir) const;

  // Incremental router-port power of attaching one more lightpath end of
  // the given capacity class at a node: 0 when an existing SBVT has room,
  // router_port_pc when a new SBVT must activate, nullopt when the node
  // budget is exhausted.
  std::optional<double> sbvt_end_incremental_pc(int node, double capacity_gbps) const;

  // Incremental VER overhead of hosting one more regeneration at a node:
  // 0 when an active VER has a free SSR, ver_overhead_pc when a new VER
  // must activate, nullopt when not eligible or out of budget.
  std::optional<double> regen_incremental_pc(int node) const;

  // Validates the lightpath against the current state (route chaining,
  // MTR, spectrum, equipment budgets) and applies it. Slot assignments
  // must already be filled in. On failure nothing is mutated.
  CommitResult commit_lightpath(Lightpath lp);

  // Adds rate onto an existing lightpath's used capacity. Returns the
  // power increment (always 0) or nullopt when free capacity is short.
  std::optional<double> groom(int lp_id, double rate_gbps);

  struct Snapshot;
  Snapshot snapshot() const;
  void restore(const Snapshot& snap);

  // From-scratch power computation over all active equipment; must agree
  // with the incrementally maintained ledger.
  PowerLedger recompute_ledger() const;

  int amp_sites(int fiber) const;  // inline sites + the two end sites

 private:
  struct Core {
    std::vector<std::vector<std::uint8_t>> occupancy;  // per fiber_dir
    std::vector<std::uint8_t> dir_active;
    std::vector<Lightpath> lightpaths;
    std::vector<NodeUsage> usage;
    PowerLedger ledger;
    bool operator==(const Core&) const = default;
  };

  const Topology* topo_;
  const PowerCatalog* catalog_;
  Core core_;

 public:
  struct Snapshot {
    Core core;
    bool operator==(const Snapshot&) const = default;
  };
};

}  // namespace eonplan
