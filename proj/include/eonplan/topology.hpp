#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eonplan {

struct Node {
  int id = 0;
  int degree = 0;               // derived from the fiber list
  bool ver_eligible = false;    // set by mark_ver_nodes
  int max_sbvts = 64;
  int max_vers = 3;

  bool operator==(const Node&) const = default;
};

// Bidirectional fiber; direction 0 runs a->b, direction 1 runs b->a.
// Both directions share slots_total frequency slots.
struct Fiber {
  int id = 0;
  int a = 0;
  int b = 0;
  double length_km = 0.0;
  int slots_total = 320;

  bool operator==(const Fiber&) const = default;
};

struct TrafficDemand {
  int src = 0;
  int dst = 0;
  double rate_gbps = 0.0;
  int demand_id = 0;  // position in the row-major flattening of the matrix

  bool operator==(const TrafficDemand&) const = default;
};

struct Topology {
  std::vector<Node> nodes;
  std::vector<Fiber> fibers;
  double span_km = 80.0;  // inline amplifier spacing
  std::string comment;

  // node id -> incident fiber ids, ascending. Rebuilt by finalize().
  std::vector<std::vector<int>> incident;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_fibers() const { return static_cast<int>(fibers.size()); }

  // Recomputes incidence and degrees; validates ids, lengths,
  // duplicate fibers and connectivity. Throws std::runtime_error.
  void finalize();

  bool operator==(const Topology&) const;
};

// Fiber-direction encoding used throughout: fiber*2 + dir.
inline int fiber_dir_id(int fiber, int dir) { return fiber * 2 + dir; }
inline int fiber_of_dir(int fd) { return fd / 2; }
inline int dir_of(int fd) { return fd % 2; }
int dir_from_node(const Fiber& f, int fd);  // origin node of the direction
int dir_to_node(const Fiber& f, int fd);    // destination node

// Topology file I/O (JSON). See docs/FORMATS.md for the schema.
Topology load_topology(const std::string& path);
void save_topology(const Topology& topo, const std::string& path);

// Marks the ceil(fraction * N) highest-degree nodes as VER-eligible,
// ties broken by lower node id. Idempotent.
void mark_ver_nodes(Topology& topo, double fraction = 0.30);

// One demand per ordered node pair, rate uniform in [5, 2*atd-5] Gbps
// rounded to 1 Gbps. Demands are listed src-major, which defines
// demand_id.
std::vector<TrafficDemand> generate_traffic(const Topology& topo,
                                            double atd_gbps,
                                            std::uint64_t seed);

// Traffic CSV (header: src,dst,gbps; '#' lines are comments). Demands are
// canonicalized to src-major order and given contiguous ids.
std::vector<TrafficDemand> load_traffic(const Topology& topo, const std::string& path);
void save_traffic(const std::vector<TrafficDemand>& demands, const std::string& path,
                  const std::string& header_comment = "");

}  // namespace eonplan
