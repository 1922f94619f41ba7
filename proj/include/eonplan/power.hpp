#pragma once

#include <optional>
#include <string>
#include <vector>

namespace eonplan {

// One sub-transponder transmission option: lightpath capacity, maximum
// transparent reach, spectrum width in data-slots and full sub-transponder
// power draw. Originating or terminating a lightpath costs half of
// pc_watts at the SBVT; a regeneration costs the termination half plus
// the generation half.
struct TransmissionOption {
  double capacity_gbps = 0.0;
  double mtr_km = 0.0;
  int data_slots = 0;
  double pc_watts = 0.0;

  bool operator==(const TransmissionOption&) const = default;
};

// Power figures for every piece of equipment in the node model, plus the
// transmission-option table. Defaults are the standard hardware set; an
// alternate table can be loaded from CSV.
struct PowerCatalog {
  double router_port_pc = 560.0;       // W per active IP core router port
  double router_port_capacity = 400.0; // Gbps per port / SBVT
  double amp_dir_pc = 30.0;            // W per active unidirectional amp
  double amp_overhead_pc = 140.0;      // W per amp site with any direction on
  double ver_ssr_pc = 10.0;            // W per SSR in use
  double ver_overhead_pc = 25.0;       // W per active VER
  double oxc_base_pc = 150.0;          // W, degree-independent OXC term
  double oxc_per_degree_pc = 135.0;    // W per unit of node degree
  int sbvt_sliceability = 3;           // lightpath ends one SBVT can host
  int ver_ssr_count = 16;              // SSRs per VER

  std::vector<TransmissionOption> options;

  // Distinct option capacities, ascending.
  std::vector<double> capacity_classes() const;
  // Indices of options with the given capacity, ascending MTR.
  std::vector<int> options_for_class(double capacity_gbps) const;
  // Largest MTR offered in a capacity class (0 if class unknown).
  double max_mtr(double capacity_gbps) const;
  // Exact (capacity, mtr) lookup; nullptr if absent.
  const TransmissionOption* find_option(double capacity_gbps, double mtr_km) const;
};

// The standard 22-row option table (capacities 40/100/200/400 Gbps).
PowerCatalog default_catalog();

// BV-OXC power at a node of the given physical degree. OXCs are always
// on, so this is a topology constant.
double oxc_pc(const PowerCatalog& cat, int degree);

// Number of inline amplifier sites on a fiber of the given length with
// amp spacing span_km. End-node pre/post amplifier sites are counted
// separately (one site at each end of the fiber).
int inline_amp_count(double length_km, double span_km);

// Power of one amplifier site given how many of its two directions are
// active. An unused site consumes nothing.
double amp_site_pc(const PowerCatalog& cat, int active_directions);

// Smallest capacity class >= rate, or nullopt when the rate exceeds the
// largest class (demand must be split first).
std::optional<double> capacity_class(const PowerCatalog& cat, double rate_gbps);

// Cheapest option of the class that covers transparent_km; ties broken
// by fewer data slots, then lower MTR. nullptr when no option reaches.
const TransmissionOption* select_option(const PowerCatalog& cat,
                                        double capacity_gbps,
                                        double transparent_km);

// Power to regenerate one lightpath of the given option type at a VER:
// termination half plus generation half plus one SSR. The per-VER
// overhead is charged by the network state when a VER first activates.
double ver_regen_pc(const PowerCatalog& cat, const TransmissionOption& option);

// Option-table CSV (header: capacity,mtr_km,slots,pc_w). Loading replaces
// the options of a default-constant catalog.
void save_catalog_csv(const PowerCatalog& cat, const std::string& path);
PowerCatalog load_catalog_csv(const std::string& path);

}  // namespace eonplan
