#include "eonplan/plan_io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "eonplan/num_format.hpp"

namespace eonplan {

using nlohmann::json;

PlanMetrics collect_metrics(const NetworkState& state) {
  PlanMetrics m;
  const auto& cat = state.catalog();

  m.lightpaths_total = static_cast<int>(state.lightpaths().size());
  for (const auto& lp : state.lightpaths()) {
    m.lightpaths_by_class[lp.capacity_gbps] += 1;
    m.regenerations += static_cast<int>(lp.segments.size()) - 1;
  }
  for (int n = 0; n < state.topology().num_nodes(); ++n) {
    const NodeUsage& u = state.node_usage(n);
    m.router_ports += u.router_ports_active();
    m.vers_active += static_cast<int>(u.vers.size());
    for (const auto& ver : u.vers) m.ssrs_used += ver.ssrs_used;
  }
  // Tx/Rx SBVT counts are re-derived from the registry with the same
  // deterministic attach policy commits use (lowest SBVT with room).
  struct SimSbvt {
    int ends = 0;
    double cap = 0.0;
    bool tx = false;
    bool rx = false;
  };
  std::vector<std::vector<SimSbvt>> sim(state.topology().num_nodes());
  auto attach = [&](int node, double capacity, bool is_tx) {
    for (auto& s : sim[node]) {
      if (s.ends < cat.sbvt_sliceability &&
          s.cap + capacity <= cat.router_port_capacity + 1e-9) {
        s.ends += 1;
        s.cap += capacity;
        (is_tx ? s.tx : s.rx) = true;
        return;
      }
    }
    sim[node].push_back({1, capacity, is_tx, !is_tx});
  };
  for (const auto& lp : state.lightpaths()) {
    attach(lp.src, lp.capacity_gbps, true);
    attach(lp.dst, lp.capacity_gbps, false);
  }
  for (const auto& node : sim) {
    for (const auto& s : node) {
      if (s.tx) m.sbvts_with_tx += 1;
      if (s.rx) m.sbvts_with_rx += 1;
    }
  }
  return m;
}

json plan_to_json(const NetworkState& state, const PlanMeta& meta) {
  const auto& cat = state.catalog();
  json doc;
  doc["meta"] = {{"planner", meta.planner},
                 {"topology", meta.topology_path},
                 {"atd_gbps", meta.atd_gbps},
                 {"traffic_seed", meta.traffic_seed},
                 {"learn_seed", meta.learn_seed},
                 {"replica", meta.replica},
                 {"success", meta.success},
                 {"order", meta.order}};

  const PowerLedger& led = state.ledger();
  doc["ledger"] = {{"router_w", led.router_w}, {"sbvt_w", led.sbvt_w},
                   {"amp_w", led.amp_w},       {"ver_w", led.ver_w},
                   {"oxc_w", led.oxc_w},       {"total_w", led.total_w}};

  doc["lightpaths"] = json::array();
  for (const auto& lp : state.lightpaths()) {
    json jlp = {{"id", lp.id},
                {"src", lp.src},
                {"dst", lp.dst},
                {"capacity_gbps", lp.capacity_gbps},
                {"used_gbps", lp.used_gbps}};
    jlp["segments"] = json::array();
    for (const auto& seg : lp.segments) {
      const TransmissionOption& opt = cat.options[seg.option_index];
      json jseg = {{"slot_start", seg.slot_start},
                   {"slot_count", seg.slot_count},
                   {"option", {{"capacity_gbps", opt.capacity_gbps},
                               {"mtr_km", opt.mtr_km},
                               {"data_slots", opt.data_slots},
                               {"pc_watts", opt.pc_watts}}}};
      jseg["fiber_dirs"] = seg.fiber_dirs;
      jlp["segments"].push_back(jseg);
    }
    doc["lightpaths"].push_back(jlp);
  }

  doc["nodes"] = json::array();
  for (int n = 0; n < state.topology().num_nodes(); ++n) {
    const NodeUsage& u = state.node_usage(n);
    json jn = {{"id", n},
               {"ver_eligible", state.topology().nodes[n].ver_eligible},
               {"router_ports", u.router_ports_active()}};
    jn["sbvts"] = json::array();
    for (const auto& s : u.sbvts) {
      jn["sbvts"].push_back({{"ends", s.ends}, {"capacity_sum", s.capacity_sum}});
    }
    jn["vers"] = json::array();
    for (const auto& v : u.vers) jn["vers"].push_back({{"ssrs_used", v.ssrs_used}});
    doc["nodes"].push_back(jn);
  }
  return doc;
}

void save_plan_json(const NetworkState& state, const PlanMeta& meta,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << plan_to_json(state, meta).dump(2) << '\n';
}

std::vector<std::string> validate_plan(const Topology& topo, const PowerCatalog& catalog,
                                       const json& plan) {
  std::vector<std::string> issues;
  auto complain = [&](const std::string& s) { issues.push_back(s); };

  NetworkState state(topo, catalog);
  if (!plan.contains("lightpaths") || !plan.contains("ledger")) {
    complain("plan: missing lightpaths or ledger section");
    return issues;
  }

  for (const auto& jlp : plan["lightpaths"]) {
    Lightpath lp;
    lp.src = jlp.at("src").get<int>();
    lp.dst = jlp.at("dst").get<int>();
    lp.capacity_gbps = jlp.at("capacity_gbps").get<double>();
    const double used = jlp.at("used_gbps").get<double>();
    for (const auto& jseg : jlp.at("segments")) {
      TransparentSegment seg;
      seg.fiber_dirs = jseg.at("fiber_dirs").get<std::vector<int>>();
      seg.slot_start = jseg.at("slot_start").get<int>();
      seg.slot_count = jseg.at("slot_count").get<int>();
      const auto& jopt = jseg.at("option");
      const TransmissionOption* opt = catalog.find_option(
          jopt.at("capacity_gbps").get<double>(), jopt.at("mtr_km").get<double>());
      if (!opt) {
        complain("lightpath " + std::to_string(jlp.at("id").get<int>()) +
                 ": option not in catalog");
        return issues;
      }
      seg.option_index = static_cast<int>(opt - catalog.options.data());
      lp.segments.push_back(std::move(seg));
    }
    auto committed = state.commit_lightpath(lp);
    if (!committed.ok) {
      complain("lightpath " + std::to_string(jlp.at("id").get<int>()) + ": " +
               committed.error);
      return issues;
    }
    const int id = static_cast<int>(state.lightpaths().size()) - 1;
    if (used < -1e-9 || !state.groom(id, used)) {
      complain("lightpath " + std::to_string(id) + ": used capacity exceeds class");
      return issues;
    }
  }

  const PowerLedger rebuilt = state.recompute_ledger();
  const auto& jled = plan["ledger"];
  auto check_cat = [&](const char* key, double expect) {
    const double got = jled.at(key).get<double>();
    const double scale = std::max({std::abs(expect), std::abs(got), 1.0});
    if (std::abs(got - expect) > 1e-6 * scale) {
      complain(std::string("ledger ") + key + ": plan states " + format_double(got) +
               ", recomputed " + format_double(expect));
    }
  };
  check_cat("router_w", rebuilt.router_w);
  check_cat("sbvt_w", rebuilt.sbvt_w);
  check_cat("amp_w", rebuilt.amp_w);
  check_cat("ver_w", rebuilt.ver_w);
  check_cat("oxc_w", rebuilt.oxc_w);
  check_cat("total_w", rebuilt.total_w);

  const double cat_sum = jled.at("router_w").get<double>() + jled.at("sbvt_w").get<double>() +
                         jled.at("amp_w").get<double>() + jled.at("ver_w").get<double>() +
                         jled.at("oxc_w").get<double>();
  if (std::abs(cat_sum - jled.at("total_w").get<double>()) >
      1e-9 * std::max(1.0, std::abs(cat_sum))) {
    complain("ledger: categories do not sum to total");
  }
  return issues;
}

std::vector<std::string> validate_plan_file(const Topology& topo,
                                            const PowerCatalog& catalog,
                                            const std::string& path) {
  std::ifstream in(path);
  if (!in) return {"cannot read " + path};
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    return {path + ": parse error: " + e.what()};
  }
  return validate_plan(topo, catalog, doc);
}

}  // namespace eonplan
