#include "eonplan/network_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

namespace eonplan {

namespace {
constexpr double kRateEps = 1e-9;
constexpr double kLenEps = 1e-9;
}  // namespace

NetworkState::NetworkState(const Topology& topo, const PowerCatalog& catalog)
    : topo_(&topo), catalog_(&catalog) {
  core_.occupancy.resize(static_cast<std::size_t>(topo.num_fibers()) * 2);
  for (int f = 0; f < topo.num_fibers(); ++f) {
    core_.occupancy[fiber_dir_id(f, 0)].assign(topo.fibers[f].slots_total, 0);
    core_.occupancy[fiber_dir_id(f, 1)].assign(topo.fibers[f].slots_total, 0);
  }
  core_.dir_active.assign(static_cast<std::size_t>(topo.num_fibers()) * 2, 0);
  core_.usage.assign(topo.num_nodes(), {});
  for (const auto& node : topo.nodes) core_.ledger.oxc_w += oxc_pc(catalog, node.degree);
  core_.ledger.total_w = core_.ledger.oxc_w;
}

int NetworkState::amp_sites(int fiber) const {
  return inline_amp_count(topo_->fibers[fiber].length_km, topo_->span_km) + 2;
}

bool NetworkState::slot_block_free(int fiber_dir, int start, int count) const {
  const auto& occ = core_.occupancy[fiber_dir];
  if (start < 0 || start + count > static_cast<int>(occ.size())) return false;
  for (int s = start; s < start + count; ++s) {
    if (occ[s]) return false;
  }
  return true;
}

bool NetworkState::has_free_block(int fiber_dir, int count) const {
  const auto& occ = core_.occupancy[fiber_dir];
  int run = 0;
  for (std::uint8_t used : occ) {
    run = used ? 0 : run + 1;
    if (run >= count) return true;
  }
  return false;
}

std::optional<int> NetworkState::first_fit_slots(std::span<const int> fiber_dirs,
                                                 int slot_count) const {
  if (slot_count < 1) throw std::invalid_argument("first_fit_slots: slot_count < 1");
  if (fiber_dirs.empty()) return 0;
  int limit = std::numeric_limits<int>::max();
  for (int fd : fiber_dirs) {
    limit = std::min(limit, static_cast<int>(core_.occupancy[fd].size()));
  }
  for (int start = 0; start + slot_count <= limit; ++start) {
    bool ok = true;
    for (int fd : fiber_dirs) {
      if (!slot_block_free(fd, start, slot_count)) {
        ok = false;
        break;
      }
    }
    if (ok) return start;
  }
  return std::nullopt;
}

double NetworkState::incremental_amp_pc(int fiber_dir) const {
  if (core_.dir_active[fiber_dir]) return 0.0;
  const int fiber = fiber_of_dir(fiber_dir);
  const int sites = amp_sites(fiber);
  const bool fiber_dark = !core_.dir_active[fiber_dir_id(fiber, 0)] &&
                          !core_.dir_active[fiber_dir_id(fiber, 1)];
  double pc = sites * catalog_->amp_dir_pc;
  if (fiber_dark) pc += sites * catalog_->amp_overhead_pc;
  return pc;
}

std::optional<double> NetworkState::sbvt_end_incremental_pc(int node,
                                                            double capacity_gbps) const {
  const NodeUsage& u = core_.usage[node];
  for (const auto& sbvt : u.sbvts) {
    if (sbvt.ends < catalog_->sbvt_sliceability &&
        sbvt.capacity_sum + capacity_gbps <= catalog_->router_port_capacity + kRateEps) {
      return 0.0;
    }
  }
  if (static_cast<int>(u.sbvts.size()) < topo_->nodes[node].max_sbvts &&
      capacity_gbps <= catalog_->router_port_capacity + kRateEps) {
    return catalog_->router_port_pc;
  }
  return std::nullopt;
}

std::optional<double> NetworkState::regen_incremental_pc(int node) const {
  if (!topo_->nodes[node].ver_eligible) return std::nullopt;
  const NodeUsage& u = core_.usage[node];
  for (const auto& ver : u.vers) {
    if (ver.ssrs_used < catalog_->ver_ssr_count) return 0.0;
  }
  if (static_cast<int>(u.vers.size()) < topo_->nodes[node].max_vers) {
    return catalog_->ver_overhead_pc;
  }
  return std::nullopt;
}

namespace {

// Scratch copies of the node/amp records touched by one commit, so the
// whole operation validates against pending changes and applies atomically.
struct CommitScratch {
  std::map<int, NodeUsage> nodes;
  std::set<int> new_dirs;
  std::map<int, std::set<int>> pending_slots;  // fiber_dir -> slots

  NodeUsage& node(const NetworkState& st, int id) {
    auto it = nodes.find(id);
    if (it == nodes.end()) it = nodes.emplace(id, st.node_usage(id)).first;
    return it->second;
  }
};

}  // namespace

CommitResult NetworkState::commit_lightpath(Lightpath lp) {
  auto fail = [](std::string msg) { return CommitResult{false, 0.0, std::move(msg)}; };

  if (lp.segments.empty()) return fail("lightpath has no segments");
  if (lp.src == lp.dst) return fail("lightpath endpoints must differ");
  if (lp.src < 0 || lp.src >= topo_->num_nodes() || lp.dst < 0 ||
      lp.dst >= topo_->num_nodes())
    return fail("lightpath endpoint out of range");
  if (lp.capacity_gbps <= 0) return fail("nonpositive capacity");
  if (lp.used_gbps < -kRateEps || lp.used_gbps > lp.capacity_gbps + kRateEps)
    return fail("used capacity outside [0, capacity]");

  CommitScratch scratch;
  double delta = 0.0;
  double d_router = 0.0, d_sbvt = 0.0, d_amp = 0.0, d_ver = 0.0;

  // Route chaining, reach and spectrum.
  int cursor = lp.src;
  std::vector<int> junctions;
  for (std::size_t si = 0; si < lp.segments.size(); ++si) {
    const TransparentSegment& seg = lp.segments[si];
    if (seg.fiber_dirs.empty()) return fail("empty segment");
    if (seg.option_index < 0 || seg.option_index >= static_cast<int>(catalog_->options.size()))
      return fail("invalid option index");
    const TransmissionOption& opt = catalog_->options[seg.option_index];
    if (opt.capacity_gbps != lp.capacity_gbps)
      return fail("segment option capacity differs from lightpath capacity");
    if (seg.slot_count != opt.data_slots) return fail("slot count differs from option width");

    double length = 0.0;
    for (int fd : seg.fiber_dirs) {
      int fiber = fiber_of_dir(fd);
      if (fiber < 0 || fiber >= topo_->num_fibers()) return fail("fiber out of range");
      const Fiber& f = topo_->fibers[fiber];
      if (dir_from_node(f, fd) != cursor) return fail("segment route does not chain");
      cursor = dir_to_node(f, fd);
      length += f.length_km;

      if (seg.slot_start < 0 || seg.slot_start + seg.slot_count > f.slots_total)
        return fail("slot block outside fiber spectrum");
      if (!slot_block_free(fd, seg.slot_start, seg.slot_count))
        return fail("spectrum conflict");
      auto& pending = scratch.pending_slots[fd];
      for (int s = seg.slot_start; s < seg.slot_start + seg.slot_count; ++s) {
        if (!pending.insert(s).second) return fail("spectrum conflict within lightpath");
      }
      if (!core_.dir_active[fd]) scratch.new_dirs.insert(fd);
    }
    if (length > opt.mtr_km + kLenEps) return fail("segment exceeds option reach");
    if (si + 1 < lp.segments.size()) junctions.push_back(cursor);
  }
  if (cursor != lp.dst) return fail("route does not end at lightpath destination");

  // SBVT end attachment at both endpoints.
  auto attach_end = [&](int node) -> bool {
    NodeUsage& u = scratch.node(*this, node);
    for (auto& sbvt : u.sbvts) {
      if (sbvt.ends < catalog_->sbvt_sliceability &&
          sbvt.capacity_sum + lp.capacity_gbps <= catalog_->router_port_capacity + kRateEps) {
        sbvt.ends += 1;
        sbvt.capacity_sum += lp.capacity_gbps;
        return true;
      }
    }
    if (static_cast<int>(u.sbvts.size()) < topo_->nodes[node].max_sbvts &&
        lp.capacity_gbps <= catalog_->router_port_capacity + kRateEps) {
      u.sbvts.push_back({1, lp.capacity_gbps});
      d_router += catalog_->router_port_pc;
      return true;
    }
    return false;
  };
  if (!attach_end(lp.src)) return fail("no SBVT end available at source");
  if (!attach_end(lp.dst)) return fail("no SBVT end available at destination");
  d_sbvt += catalog_->options[lp.segments.front().option_index].pc_watts / 2.0;
  d_sbvt += catalog_->options[lp.segments.back().option_index].pc_watts / 2.0;

  // Regenerations at segment junctions.
  for (std::size_t j = 0; j < junctions.size(); ++j) {
    int node = junctions[j];
    if (!topo_->nodes[node].ver_eligible)
      return fail("regeneration at a node without VER eligibility");
    NodeUsage& u = scratch.node(*this, node);
    bool placed = false;
    for (auto& ver : u.vers) {
      if (ver.ssrs_used < catalog_->ver_ssr_count) {
        ver.ssrs_used += 1;
        placed = true;
        break;
      }
    }
    if (!placed) {
      if (static_cast<int>(u.vers.size()) < topo_->nodes[node].max_vers) {
        u.vers.push_back({1});
        d_ver += catalog_->ver_overhead_pc;
      } else {
        return fail("no SSR available at regeneration node");
      }
    }
    const TransmissionOption& in_opt = catalog_->options[lp.segments[j].option_index];
    const TransmissionOption& out_opt = catalog_->options[lp.segments[j + 1].option_index];
    d_ver += in_opt.pc_watts / 2.0 + out_opt.pc_watts / 2.0 + catalog_->ver_ssr_pc;
  }

  // Amplifier activations.
  std::set<int> dark_fibers_lit;
  for (int fd : scratch.new_dirs) {
    const int fiber = fiber_of_dir(fd);
    const int sites = amp_sites(fiber);
    d_amp += sites * catalog_->amp_dir_pc;
    const bool was_dark = !core_.dir_active[fiber_dir_id(fiber, 0)] &&
                          !core_.dir_active[fiber_dir_id(fiber, 1)];
    if (was_dark && dark_fibers_lit.insert(fiber).second) {
      d_amp += sites * catalog_->amp_overhead_pc;
    }
  }

  // Apply.
  for (const auto& seg : lp.segments) {
    for (int fd : seg.fiber_dirs) {
      auto& occ = core_.occupancy[fd];
      for (int s = seg.slot_start; s < seg.slot_start + seg.slot_count; ++s) occ[s] = 1;
    }
  }
  for (int fd : scratch.new_dirs) core_.dir_active[fd] = 1;
  for (auto& [node, usage] : scratch.nodes) core_.usage[node] = std::move(usage);
  lp.id = static_cast<int>(core_.lightpaths.size());
  core_.lightpaths.push_back(std::move(lp));

  delta = d_router + d_sbvt + d_amp + d_ver;
  core_.ledger.router_w += d_router;
  core_.ledger.sbvt_w += d_sbvt;
  core_.ledger.amp_w += d_amp;
  core_.ledger.ver_w += d_ver;
  core_.ledger.total_w += delta;
  return {true, delta, {}};
}

std::optional<double> NetworkState::groom(int lp_id, double rate_gbps) {
  if (lp_id < 0 || lp_id >= static_cast<int>(core_.lightpaths.size()))
    throw std::invalid_argument("groom: bad lightpath id");
  if (rate_gbps < 0) throw std::invalid_argument("groom: negative rate");
  if (rate_gbps == 0) return 0.0;
  Lightpath& lp = core_.lightpaths[lp_id];
  if (lp.free_gbps() + kRateEps < rate_gbps) return std::nullopt;
  lp.used_gbps += rate_gbps;
  return 0.0;
}

NetworkState::Snapshot NetworkState::snapshot() const { return Snapshot{core_}; }

void NetworkState::restore(const Snapshot& snap) { core_ = snap.core; }

PowerLedger NetworkState::recompute_ledger() const {
  PowerLedger out;
  for (const auto& node : topo_->nodes) out.oxc_w += oxc_pc(*catalog_, node.degree);

  for (const auto& u : core_.usage) {
    out.router_w += u.router_ports_active() * catalog_->router_port_pc;
    out.ver_w += static_cast<double>(u.vers.size()) * catalog_->ver_overhead_pc;
  }

  std::set<int> active_dirs;
  for (const auto& lp : core_.lightpaths) {
    out.sbvt_w += catalog_->options[lp.segments.front().option_index].pc_watts / 2.0;
    out.sbvt_w += catalog_->options[lp.segments.back().option_index].pc_watts / 2.0;
    for (std::size_t j = 0; j + 1 < lp.segments.size(); ++j) {
      const TransmissionOption& in_opt = catalog_->options[lp.segments[j].option_index];
      const TransmissionOption& out_opt = catalog_->options[lp.segments[j + 1].option_index];
      out.ver_w += in_opt.pc_watts / 2.0 + out_opt.pc_watts / 2.0 + catalog_->ver_ssr_pc;
    }
    for (const auto& seg : lp.segments) {
      for (int fd : seg.fiber_dirs) active_dirs.insert(fd);
    }
  }

  for (int f = 0; f < topo_->num_fibers(); ++f) {
    int n = static_cast<int>(active_dirs.count(fiber_dir_id(f, 0))) +
            static_cast<int>(active_dirs.count(fiber_dir_id(f, 1)));
    out.amp_w += amp_sites(f) * amp_site_pc(*catalog_, n);
  }

  out.total_w = out.category_sum();
  return out;
}

}  // namespace eonplan
