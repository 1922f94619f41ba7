#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eonplan/baselines.hpp"
#include "eonplan/plan_io.hpp"
#include "eonplan/qlearn.hpp"

namespace fs = std::filesystem;
using namespace eonplan;

namespace {

struct PlanArgs {
  std::string topology_path;
  std::string traffic_path;
  std::string catalog_path;
  std::string planner = "qag";
  std::string out_dir = "out";
  double atd_gbps = 0.0;
  int replicas = 10;
  std::uint64_t traffic_seed = 1;
  std::uint64_t learn_seed = 1;
  int slots_override = 0;
  double span_override = 0.0;
  double ver_fraction = 0.30;
  bool trace = false;
  QLearnConfig qcfg;
  bool seed_baselines = true;
  int qtable_every = 0;
};

struct ReplicaRow {
  int replica = 0;
  std::uint64_t traffic_seed = 0;
  std::uint64_t learn_seed = 0;
  bool success = false;
  PowerLedger ledger;
  PlanMetrics metrics;
  int success_episodes = -1;  // -1: not a learning run
  double wall_s = 0.0;
};

Topology load_topology_with_overrides(const PlanArgs& args) {
  Topology topo = load_topology(args.topology_path);
  if (args.slots_override > 0) {
    for (auto& f : topo.fibers) f.slots_total = args.slots_override;
  }
  if (args.span_override > 0) topo.span_km = args.span_override;
  topo.finalize();
  mark_ver_nodes(topo, args.ver_fraction);
  return topo;
}

PowerCatalog load_catalog_or_default(const std::string& path) {
  if (path.empty()) return default_catalog();
  PowerCatalog cat = load_catalog_csv(path);
  return cat;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_report_csv(const fs::path& path, const PlanArgs& args,
                      const std::vector<ReplicaRow>& rows) {
  auto out = open_out(path);
  out << "# planner=" << args.planner << " topology=" << args.topology_path;
  if (args.traffic_path.empty()) out << " atd=" << format_double(args.atd_gbps);
  out << " traffic_seed=" << args.traffic_seed << " learn_seed=" << args.learn_seed
      << " replicas=" << args.replicas << '\n';
  out << "replica,planner,traffic_seed,learn_seed,success,total_pc_w,router_w,sbvt_w,"
         "amp_w,ver_w,oxc_w,lightpaths_total,lp_40,lp_100,lp_200,lp_400,lp_other,"
         "router_ports,sbvts_tx,sbvts_rx,vers_active,ssrs_used,success_episodes\n";

  auto lp_class = [](const ReplicaRow& r, double cls) {
    auto it = r.metrics.lightpaths_by_class.find(cls);
    return it == r.metrics.lightpaths_by_class.end() ? 0 : it->second;
  };
  auto lp_other = [&](const ReplicaRow& r) {
    int other = 0;
    for (const auto& [cls, count] : r.metrics.lightpaths_by_class) {
      if (cls != 40 && cls != 100 && cls != 200 && cls != 400) other += count;
    }
    return other;
  };

  // Numeric columns for the replica rows and the aggregate rows below.
  std::vector<std::vector<double>> numeric;
  for (const auto& r : rows) {
    std::vector<double> vals = {
        static_cast<double>(r.success),
        r.ledger.total_w,
        r.ledger.router_w,
        r.ledger.sbvt_w,
        r.ledger.amp_w,
        r.ledger.ver_w,
        r.ledger.oxc_w,
        static_cast<double>(r.metrics.lightpaths_total),
        static_cast<double>(lp_class(r, 40)),
        static_cast<double>(lp_class(r, 100)),
        static_cast<double>(lp_class(r, 200)),
        static_cast<double>(lp_class(r, 400)),
        static_cast<double>(lp_other(r)),
        static_cast<double>(r.metrics.router_ports),
        static_cast<double>(r.metrics.sbvts_with_tx),
        static_cast<double>(r.metrics.sbvts_with_rx),
        static_cast<double>(r.metrics.vers_active),
        static_cast<double>(r.metrics.ssrs_used),
        static_cast<double>(r.success_episodes)};
    numeric.push_back(vals);

    out << r.replica << ',' << args.planner << ',' << r.traffic_seed << ','
        << r.learn_seed;
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out << ',';
      if (i + 1 == vals.size() && r.success_episodes < 0) continue;  // blank
      out << format_double(vals[i]);
    }
    out << '\n';
  }

  // Aggregates: mean and population standard deviation per numeric column.
  const std::size_t cols = numeric.empty() ? 0 : numeric[0].size();
  for (const char* which : {"mean", "stddev"}) {
    out << which << ',' << args.planner << ",,";
    for (std::size_t c = 0; c < cols; ++c) {
      double mean = 0.0;
      for (const auto& v : numeric) mean += v[c];
      mean /= numeric.size();
      double value = mean;
      if (std::string(which) == "stddev") {
        double var = 0.0;
        for (const auto& v : numeric) var += (v[c] - mean) * (v[c] - mean);
        value = std::sqrt(var / numeric.size());
      }
      out << ',';
      if (c + 1 == cols && rows[0].success_episodes < 0) continue;
      out << format_double(value);
    }
    out << '\n';
  }
}

void write_breakdown_csv(const fs::path& path, const std::vector<ReplicaRow>& rows) {
  auto out = open_out(path);
  out << "replica,category,watts\n";
  for (const auto& r : rows) {
    const std::pair<const char*, double> cats[] = {
        {"router", r.ledger.router_w}, {"sbvt", r.ledger.sbvt_w},
        {"amp", r.ledger.amp_w},       {"ver", r.ledger.ver_w},
        {"oxc", r.ledger.oxc_w},       {"total", r.ledger.total_w}};
    for (const auto& [name, w] : cats) {
      out << r.replica << ',' << name << ',' << format_double(w) << '\n';
    }
  }
}

void write_timings_csv(const fs::path& path, const std::vector<ReplicaRow>& rows) {
  auto out = open_out(path);
  out << "replica,wall_time_s\n";
  for (const auto& r : rows) {
    out << r.replica << ',' << format_double(r.wall_s) << '\n';
  }
}

int run_plan(const PlanArgs& args) {
  if (args.traffic_path.empty() == (args.atd_gbps <= 0.0)) {
    std::cerr << "plan: exactly one of --traffic and --atd must be given\n";
    return 1;
  }
  if (!args.traffic_path.empty() && args.replicas != 1) {
    std::cerr << "plan: --traffic fixes the matrix; use --replicas 1\n";
    return 1;
  }

  const Topology topo = load_topology_with_overrides(args);
  const PowerCatalog catalog = load_catalog_or_default(args.catalog_path);
  fs::create_directories(args.out_dir);

  std::vector<ReplicaRow> rows;
  std::ofstream success_csv;
  bool any_infeasible = false;

  for (int replica = 0; replica < args.replicas; ++replica) {
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path rdir = fs::path(args.out_dir) / ("r" + std::to_string(replica));
    fs::create_directories(rdir);

    ReplicaRow row;
    row.replica = replica;
    row.traffic_seed = args.traffic_seed + replica;
    row.learn_seed = args.learn_seed + replica;

    std::vector<TrafficDemand> demands;
    if (!args.traffic_path.empty()) {
      demands = load_traffic(topo, args.traffic_path);
      row.traffic_seed = args.traffic_seed;
    } else {
      demands = generate_traffic(topo, args.atd_gbps, row.traffic_seed);
      save_traffic(demands, (rdir / "traffic.csv").string(),
                   "traffic_seed=" + std::to_string(row.traffic_seed) +
                       " atd=" + format_double(args.atd_gbps));
    }

    PlanMeta meta;
    meta.planner = args.planner;
    meta.topology_path = args.topology_path;
    meta.atd_gbps = args.atd_gbps;
    meta.traffic_seed = row.traffic_seed;
    meta.learn_seed = row.learn_seed;
    meta.replica = replica;

    NetworkState state(topo, catalog);
    std::string trace;
    std::string* trace_ptr = args.trace ? &trace : nullptr;

    if (args.planner == "qag") {
      QLearnConfig cfg = args.qcfg;
      cfg.seed = row.learn_seed;
      TrainOptions opts;
      opts.seed_baseline_episodes = args.seed_baselines;
      if (args.qtable_every > 0) {
        opts.checkpoint_every = args.qtable_every;
        opts.checkpoint = [&](const QTable& table, int) {
          save_qtable_csv(table, (rdir / "qtable.csv").string());
        };
      }
      const TrainResult result = train(topo, catalog, demands, cfg, opts);
      save_training_log_csv(result, (rdir / "training_log.csv").string());
      save_qtable_csv(result.table, (rdir / "qtable.csv").string());

      if (!success_csv.is_open()) {
        success_csv = open_out(fs::path(args.out_dir) / "success_counts.csv");
        success_csv << "replica,block_index,episodes,successes\n";
      }
      for (std::size_t b = 0; b < result.success_per_block.size(); ++b) {
        success_csv << replica << ',' << b << ',' << result.episodes_per_block[b]
                    << ',' << result.success_per_block[b] << '\n';
      }
      row.success_episodes = 0;
      for (int s : result.success_per_block) row.success_episodes += s;

      if (result.any_success) {
        auto replayed = provision_sequence(state, demands, result.best_order);
        if (!replayed.success ||
            std::abs(replayed.total_pc_w - result.best_pc_w) > 1e-6) {
          std::cerr << "plan: replay of the best order diverged\n";
          return 1;
        }
        meta.success = true;
        meta.order = result.best_order;
        row.success = true;
      } else {
        std::cerr << "replica " << replica
                  << ": no episode provisioned the full matrix\n";
        meta.success = false;
      }
    } else {
      SequenceResult result;
      if (args.planner == "sp") {
        result = plan_sp(state, demands);
      } else {
        const OrderingPolicy policy = args.planner == "d-gh"
                                          ? OrderingPolicy::Descending
                                          : args.planner == "a-gh"
                                                ? OrderingPolicy::Ascending
                                                : OrderingPolicy::IndexOrder;
        result = plan_gh(state, demands, policy);
      }
      meta.success = result.success;
      meta.order = result.order;
      row.success = result.success;
      if (!result.success) {
        any_infeasible = true;
        std::cerr << "replica " << replica << ": demand " << result.failed_demand_id
                  << " could not be provisioned\n";
      }
      if (args.trace) {
        NetworkState fresh(topo, catalog);
        for (int id : result.order) provision(fresh, demands[id], trace_ptr);
      }
    }

    save_plan_json(state, meta, (rdir / "plan.json").string());
    if (args.trace) {
      auto out = open_out(rdir / "trace.txt");
      out << trace;
    }

    row.ledger = state.ledger();
    row.metrics = collect_metrics(state);
    row.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rows.push_back(std::move(row));
  }

  write_report_csv(fs::path(args.out_dir) / "report.csv", args, rows);
  write_breakdown_csv(fs::path(args.out_dir) / "pc_breakdown.csv", rows);
  write_timings_csv(fs::path(args.out_dir) / "timings.csv", rows);

  return any_infeasible ? 2 : 0;
}

int run_replay(const std::string& topology_path, const std::string& traffic_path,
               const std::string& plan_path, const std::string& catalog_path,
               const std::string& out_dir) {
  const Topology topo = load_topology(topology_path);
  const PowerCatalog catalog = load_catalog_or_default(catalog_path);
  const auto demands = load_traffic(topo, traffic_path);

  std::ifstream in(plan_path);
  if (!in) {
    std::cerr << "cannot read " << plan_path << '\n';
    return 1;
  }
  nlohmann::json plan = nlohmann::json::parse(in);
  const auto order = plan.at("meta").at("order").get<std::vector<int>>();
  const double recorded = plan.at("ledger").at("total_w").get<double>();

  NetworkState state(topo, catalog);
  const auto result = provision_sequence(state, demands, order);
  if (!result.success) {
    std::cerr << "replay: demand " << result.failed_demand_id << " failed\n";
    return 2;
  }
  std::cout << "recorded total_pc_w: " << format_double(recorded) << '\n'
            << "replayed total_pc_w: " << format_double(result.total_pc_w) << '\n';

  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    PlanMeta meta;
    meta.planner = plan.at("meta").value("planner", std::string{"replay"});
    meta.topology_path = topology_path;
    meta.success = true;
    meta.order = order;
    save_plan_json(state, meta, (fs::path(out_dir) / "plan.json").string());
  }
  if (result.total_pc_w != recorded) {
    std::cerr << "replay: totals differ\n";
    return 2;
  }
  std::cout << "replay reproduced the recorded plan power\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware IP-over-EON network planner"};
  app.require_subcommand(1);
  app.set_config("--config");

  PlanArgs plan_args;
  auto* plan_cmd = app.add_subcommand(
      "plan", "Provision a traffic matrix and write plan and report files");
  plan_cmd->add_option("--topology", plan_args.topology_path, "Topology JSON")
      ->required();
  plan_cmd->add_option("--traffic", plan_args.traffic_path, "Traffic CSV");
  plan_cmd->add_option("--atd", plan_args.atd_gbps,
                       "Average traffic demand (Gbps) for generated matrices");
  plan_cmd->add_option("--planner", plan_args.planner, "Planner")
      ->check(CLI::IsMember({"sp", "d-gh", "a-gh", "i-gh", "qag"}));
  plan_cmd->add_option("--replicas", plan_args.replicas, "Traffic matrices to run")
      ->check(CLI::PositiveNumber);
  plan_cmd->add_option("--traffic-seed", plan_args.traffic_seed, "Base traffic seed");
  plan_cmd->add_option("--learn-seed", plan_args.learn_seed, "Base learning seed");
  plan_cmd->add_option("--out", plan_args.out_dir, "Output directory");
  plan_cmd->add_option("--catalog", plan_args.catalog_path, "Transmission-option CSV");
  plan_cmd->add_option("--slots", plan_args.slots_override,
                       "Override frequency slots per fiber direction");
  plan_cmd->add_option("--span", plan_args.span_override, "Override amp spacing (km)");
  plan_cmd->add_option("--ver-fraction", plan_args.ver_fraction,
                       "Fraction of top-degree nodes that may host VERs");
  plan_cmd->add_option("--episodes", plan_args.qcfg.total_episodes, "Training episodes");
  plan_cmd->add_option("--alpha", plan_args.qcfg.alpha, "Learning rate");
  plan_cmd->add_option("--gamma", plan_args.qcfg.gamma, "Discount factor");
  plan_cmd->add_option("--eps-min", plan_args.qcfg.eps_min, "Exploration floor");
  plan_cmd->add_option("--eps-max", plan_args.qcfg.eps_max, "Exploration ceiling");
  plan_cmd->add_option("--eps-decay", plan_args.qcfg.eps_decay, "Exploration decay");
  plan_cmd->add_option("--penalty", plan_args.qcfg.penalty_p, "Failure penalty");
  plan_cmd->add_option("--bonus", plan_args.qcfg.bonus_r, "Completion bonus");
  plan_cmd->add_flag("--seed-baselines,!--no-seed-baselines", plan_args.seed_baselines,
                     "Replay the greedy orders before episode 0");
  plan_cmd->add_option("--qtable-every", plan_args.qtable_every,
                       "Checkpoint the Q-table every K episodes");
  plan_cmd->add_flag("--trace", plan_args.trace, "Write per-demand trace records");

  std::string gt_topology, gt_out = "traffic.csv";
  double gt_atd = 40.0;
  std::uint64_t gt_seed = 1;
  auto* gt_cmd = app.add_subcommand("gen-traffic", "Generate a traffic matrix CSV");
  gt_cmd->add_option("--topology", gt_topology, "Topology JSON")->required();
  gt_cmd->add_option("--atd", gt_atd, "Average traffic demand (Gbps)")->required();
  gt_cmd->add_option("--seed", gt_seed, "Traffic seed");
  gt_cmd->add_option("--out", gt_out, "Output CSV path");

  std::string vp_topology, vp_plan, vp_catalog;
  auto* vp_cmd = app.add_subcommand("validate-plan",
                                    "Re-check every invariant of a plan file");
  vp_cmd->add_option("--topology", vp_topology, "Topology JSON")->required();
  vp_cmd->add_option("--plan", vp_plan, "Plan JSON")->required();
  vp_cmd->add_option("--catalog", vp_catalog, "Transmission-option CSV");

  std::string rp_topology, rp_traffic, rp_plan, rp_catalog, rp_out;
  auto* rp_cmd = app.add_subcommand("replay", "Re-run a recorded provisioning order");
  rp_cmd->add_option("--topology", rp_topology, "Topology JSON")->required();
  rp_cmd->add_option("--traffic", rp_traffic, "Traffic CSV")->required();
  rp_cmd->add_option("--plan", rp_plan, "Plan JSON with the recorded order")->required();
  rp_cmd->add_option("--catalog", rp_catalog, "Transmission-option CSV");
  rp_cmd->add_option("--out", rp_out, "Directory for the replayed plan");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return run_plan(plan_args);
    if (gt_cmd->parsed()) {
      const Topology topo = load_topology(gt_topology);
      const auto demands = generate_traffic(topo, gt_atd, gt_seed);
      save_traffic(demands, gt_out,
                   "traffic_seed=" + std::to_string(gt_seed) +
                       " atd=" + format_double(gt_atd));
      std::cout << "wrote " << demands.size() << " demands to " << gt_out << '\n';
      return 0;
    }
    if (vp_cmd->parsed()) {
      const Topology topo = load_topology(vp_topology);
      const PowerCatalog catalog = load_catalog_or_default(vp_catalog);
      const auto issues = validate_plan_file(topo, catalog, vp_plan);
      for (const auto& issue : issues) std::cerr << issue << '\n';
      if (issues.empty()) {
        std::cout << "plan is valid\n";
        return 0;
      }
      return 2;
    }
    if (rp_cmd->parsed()) {
      return run_replay(rp_topology, rp_traffic, rp_plan, rp_catalog, rp_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
