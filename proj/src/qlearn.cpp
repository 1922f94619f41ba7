#include "eonplan/qlearn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eonplan/baselines.hpp"
#include "eonplan/num_format.hpp"

namespace eonplan {

double epsilon(int episode, const QLearnConfig& cfg) {
  if (episode < 0) throw std::invalid_argument("epsilon: negative episode");
  return cfg.eps_min + (cfg.eps_max - cfg.eps_min) * std::exp(-cfg.eps_decay * episode);
}

double q_update(double q, double reward, double max_next_q, const QLearnConfig& cfg) {
  return (1.0 - cfg.alpha) * q + cfg.alpha * (reward + cfg.gamma * max_next_q);
}

int select_action(const QTable& table, int state, const std::vector<std::uint8_t>& taken,
                  double eps, Rng& rng) {
  std::vector<int> candidates;
  candidates.reserve(taken.size());
  for (int a = 0; a < static_cast<int>(taken.size()); ++a) {
    if (!taken[a]) candidates.push_back(a);
  }
  if (candidates.empty()) throw std::logic_error("select_action: no action left");
  const double u = rng.uniform01();
  if (u > eps) {
    int best = candidates[0];
    for (int a : candidates) {
      if (table.at(state, a) > table.at(state, best)) best = a;
    }
    return best;
  }
  return candidates[rng.below(static_cast<int>(candidates.size()))];
}

namespace {

double max_unmasked_q(const QTable& table, int state, const std::vector<std::uint8_t>& taken) {
  bool any = false;
  double best = 0.0;
  for (int a = 0; a < table.num_actions(); ++a) {
    if (taken[a]) continue;
    if (!any || table.at(state, a) > best) {
      best = table.at(state, a);
      any = true;
    }
  }
  return any ? best : 0.0;
}

EpisodeResult run_episode_impl(NetworkState& state,
                               const std::vector<TrafficDemand>& demands, QTable& table,
                               double eps, const QLearnConfig& cfg, Rng& rng,
                               const std::vector<int>* forced_order) {
  const int n = static_cast<int>(demands.size());
  const auto snap = state.snapshot();
  std::vector<std::uint8_t> taken(n, 0);
  EpisodeResult result;
  int q_state = 0;
  for (int step = 0; step < n; ++step) {
    const int action = forced_order ? (*forced_order)[step]
                                    : select_action(table, q_state, taken, eps, rng);
    taken[action] = 1;
    auto pr = provision(state, demands[action]);
    result.steps += 1;

    bool done = false;
    double reward;
    if (pr.provisioned) {
      result.order.push_back(action);
      reward = -pr.delta_pc_w;
      if (static_cast<int>(result.order.size()) == n) {
        done = true;
        reward += cfg.bonus_r;
      }
    } else {
      done = true;
      reward = -cfg.penalty_p;
    }

    const double max_next = done ? 0.0 : max_unmasked_q(table, q_state + 1, taken);
    table.at(q_state, action) = q_update(table.at(q_state, action), reward, max_next, cfg);
    q_state += 1;
    if (done) break;
  }
  result.success = static_cast<int>(result.order.size()) == n;
  result.total_pc_w = state.ledger().total_w;
  state.restore(snap);
  return result;
}

}  // namespace

EpisodeResult run_episode(NetworkState& state, const std::vector<TrafficDemand>& demands,
                          QTable& table, double eps, const QLearnConfig& cfg, Rng& rng) {
  return run_episode_impl(state, demands, table, eps, cfg, rng, nullptr);
}

TrainResult train(const Topology& topo, const PowerCatalog& catalog,
                  const std::vector<TrafficDemand>& demands, const QLearnConfig& cfg,
                  const TrainOptions& options) {
  NetworkState state(topo, catalog);
  const int n = static_cast<int>(demands.size());
  TrainResult result;
  result.table = QTable(n + 2, n);
  Rng rng(cfg.seed);

  auto consider = [&](const EpisodeResult& er) {
    if (er.success && er.total_pc_w < result.best_pc_w) {
      result.any_success = true;
      result.best_pc_w = er.total_pc_w;
      result.best_order = er.order;
    }
  };

  if (options.seed_baseline_episodes && n > 0) {
    const OrderingPolicy policies[] = {OrderingPolicy::Descending,
                                       OrderingPolicy::Ascending,
                                       OrderingPolicy::IndexOrder};
    int pseudo_episode = -3;
    for (auto policy : policies) {
      const std::vector<int> forced = order_demands(demands, policy);
      auto er = run_episode_impl(state, demands, result.table, 0.0, cfg, rng, &forced);
      result.seeded_log.push_back(
          {pseudo_episode++, 0.0, er.success, er.total_pc_w, er.steps});
      consider(er);
    }
  }

  for (int episode = 0; episode < cfg.total_episodes; ++episode) {
    const double eps = epsilon(episode, cfg);
    auto er = run_episode(state, demands, result.table, eps, cfg, rng);
    result.log.push_back({episode, eps, er.success, er.total_pc_w, er.steps});
    consider(er);
    if (options.checkpoint_every > 0 && options.checkpoint &&
        (episode + 1) % options.checkpoint_every == 0) {
      options.checkpoint(result.table, episode);
    }
  }

  const int block = result.block_size;
  for (std::size_t i = 0; i < result.log.size(); i += block) {
    int successes = 0;
    int count = 0;
    for (std::size_t j = i; j < result.log.size() && j < i + block; ++j) {
      successes += result.log[j].success ? 1 : 0;
      ++count;
    }
    result.success_per_block.push_back(successes);
    result.episodes_per_block.push_back(count);
  }
  return result;
}

void save_qtable_csv(const QTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "state,action,q\n";
  for (int s = 0; s < table.num_states(); ++s) {
    for (int a = 0; a < table.num_actions(); ++a) {
      out << s << ',' << a << ',' << format_double(table.at(s, a)) << '\n';
    }
  }
}

QTable load_qtable_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string line;
  std::vector<std::tuple<int, int, double>> rows;
  int max_state = -1, max_action = -1;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    int s, a;
    double q;
    char c1, c2;
    if (!(ss >> s >> c1 >> a >> c2 >> q) || c1 != ',' || c2 != ',') {
      throw std::runtime_error(path + ": malformed qtable row");
    }
    rows.emplace_back(s, a, q);
    max_state = std::max(max_state, s);
    max_action = std::max(max_action, a);
  }
  QTable table(max_state + 1, max_action + 1);
  for (auto& [s, a, q] : rows) table.at(s, a) = q;
  return table;
}

void save_training_log_csv(const TrainResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,epsilon,success,total_pc_w,steps\n";
  auto row = [&](const TrainLogRow& r) {
    out << r.episode << ',' << format_double(r.eps) << ',' << (r.success ? 1 : 0) << ','
        << format_double(r.total_pc_w) << ',' << r.steps << '\n';
  };
  for (const auto& r : result.seeded_log) row(r);
  for (const auto& r : result.log) row(r);
}

}  // namespace eonplan
