#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "eonplan/aux_graph.hpp"
#include "eonplan/rng.hpp"

namespace eonplan {

struct QLearnConfig {
  double alpha = 0.1;
  double gamma = 0.99;
  double eps_min = 0.01;
  double eps_max = 1.0;
  double eps_decay = 0.001;
  int total_episodes = 10000;
  double penalty_p = 1e9;  // failed-provision penalty
  double bonus_r = 1e6;    // completion bonus
  std::uint64_t seed = 0;
};

// State-action value table. A state is the number of demands already
// provisioned; states run 0..num_demands+1 and actions are demand ids.
class QTable {
 public:
  QTable(int num_states, int num_actions)
      : num_states_(num_states), num_actions_(num_actions),
        values_(static_cast<std::size_t>(num_states) * num_actions, 0.0) {}

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double at(int state, int action) const {
    return values_[static_cast<std::size_t>(state) * num_actions_ + action];
  }
  double& at(int state, int action) {
    return values_[static_cast<std::size_t>(state) * num_actions_ + action];
  }

 private:
  int num_states_;
  int num_actions_;
  std::vector<double> values_;
};

struct EpisodeResult {
  bool success = false;
  double total_pc_w = 0.0;
  std::vector<int> order;  // successfully provisioned demand ids, in order
  int steps = 0;
};

// Exploration rate for an episode index.
double epsilon(int episode, const QLearnConfig& cfg);

// One value-iteration update: (1-alpha)*q + alpha*(reward + gamma*max_next_q).
double q_update(double q, double reward, double max_next_q, const QLearnConfig& cfg);

// Epsilon-greedy selection over the demands not yet taken this episode.
// Draws the exploration coin first; greedy ties go to the lowest id.
int select_action(const QTable& table, int state, const std::vector<std::uint8_t>& taken,
                  double eps, Rng& rng);

// One episode over a freshly reset state: select action, provision,
// reward = -delta PC (plus bonus_r when the last demand lands) or
// -penalty_p on failure, then one Q update. The state is restored before
// returning.
EpisodeResult run_episode(NetworkState& state, const std::vector<TrafficDemand>& demands,
                          QTable& table, double eps, const QLearnConfig& cfg, Rng& rng);

struct TrainLogRow {
  int episode = 0;  // seeded baseline replays use -3..-1
  double eps = 0.0;
  bool success = false;
  double total_pc_w = 0.0;
  int steps = 0;
};

struct TrainResult {
  bool any_success = false;
  double best_pc_w = std::numeric_limits<double>::infinity();
  std::vector<int> best_order;
  std::vector<TrainLogRow> log;            // learning episodes, then
  std::vector<TrainLogRow> seeded_log;     // the forced baseline replays
  std::vector<int> success_per_block;      // per block of block_size episodes
  std::vector<int> episodes_per_block;
  int block_size = 1000;
  QTable table{0, 0};
};

struct TrainOptions {
  bool seed_baseline_episodes = true;
  int checkpoint_every = 0;  // 0 disables periodic checkpoints
  std::function<void(const QTable&, int episode)> checkpoint;
};

// Full training loop: total_episodes episodes with the epsilon schedule,
// best-plan tracking and per-block success counts. When baseline seeding
// is on, the three greedy-heuristic orders run first as forced episodes
// (normal Q updates, no exploration), so the tracked best is never worse
// than those baselines.
TrainResult train(const Topology& topo, const PowerCatalog& catalog,
                  const std::vector<TrafficDemand>& demands, const QLearnConfig& cfg,
                  const TrainOptions& options = {});

void save_qtable_csv(const QTable& table, const std::string& path);
QTable load_qtable_csv(const std::string& path);
void save_training_log_csv(const TrainResult& result, const std::string& path);

}  // namespace eonplan
