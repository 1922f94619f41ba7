#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "eonplan/baselines.hpp"
#include "eonplan/qlearn.hpp"
#include "support.hpp"

using namespace eonplan;
using namespace eonplan::testsupport;

namespace {

// Two nodes, one 160 km fiber. Four demands whose best plan grooms each
// 40 into the 60's 100G lightpath; provisioning the 40s first wastes a
// 40G lightpath per direction, so total power depends on the order.
struct Toy {
  PowerCatalog cat = default_catalog();
  Topology topo = make_topology(2, {{0, 1, 160.0}});
  std::vector<TrafficDemand> demands = {
      {0, 1, 60, 0}, {0, 1, 40, 1}, {1, 0, 60, 2}, {1, 0, 40, 3}};
};

double replay(const Toy& toy, const std::vector<int>& order) {
  NetworkState state(toy.topo, toy.cat);
  auto r = provision_sequence(state, toy.demands, order);
  REQUIRE(r.success);
  return r.total_pc_w;
}

// Exhaustive ordering oracle: every permutation through the greedy planner.
std::pair<double, double> min_max_over_orders(const Toy& toy) {
  std::vector<int> order = {0, 1, 2, 3};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  do {
    const double pc = replay(toy, order);
    lo = std::min(lo, pc);
    hi = std::max(hi, pc);
  } while (std::next_permutation(order.begin(), order.end()));
  return {lo, hi};
}

}  // namespace

TEST_CASE("epsilon schedule") {
  QLearnConfig cfg;
  CHECK(epsilon(0, cfg) == 1.0);
  CHECK(epsilon(1000, cfg) ==
        doctest::Approx(0.01 + 0.99 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(epsilon(10000000, cfg) == doctest::Approx(0.01));
  CHECK_THROWS(epsilon(-1, cfg));
}

TEST_CASE("q_update") {
  QLearnConfig cfg;
  CHECK(q_update(0, -100, 0, cfg) == doctest::Approx(-10.0));
  CHECK(q_update(-10, -50, -20, cfg) == doctest::Approx(-15.98).epsilon(1e-9));
  cfg.alpha = 0.0;
  CHECK(q_update(-7.5, -1000, 42, cfg) == -7.5);
}

TEST_CASE("select_action") {
  Rng rng(5);
  QTable table(6, 4);

  SUBCASE("single unmasked candidate") {
    std::vector<std::uint8_t> taken = {1, 1, 1, 0};
    CHECK(select_action(table, 0, taken, 0.0, rng) == 3);
  }

  SUBCASE("greedy argmax over unmasked, verified by scan") {
    for (int a = 0; a < 4; ++a) table.at(0, a) = -10;
    table.at(0, 3) = -5;
    std::vector<std::uint8_t> taken = {0, 0, 0, 0};
    CHECK(select_action(table, 0, taken, 0.0, rng) == 3);
    taken[3] = 1;  // 3 masked: ties among the rest go to the lowest id
    CHECK(select_action(table, 0, taken, 0.0, rng) == 0);
  }

  SUBCASE("exploration draws uniformly over unmasked actions") {
    std::vector<std::uint8_t> taken = {0, 0, 1, 0};
    const int draws = 30000;
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < draws; ++i) counts[select_action(table, 0, taken, 1.0, rng)]++;
    CHECK(counts[2] == 0);
    const double expected = draws / 3.0;
    double chi2 = 0.0;
    for (int a : {0, 1, 3}) {
      chi2 += (counts[a] - expected) * (counts[a] - expected) / expected;
    }
    CHECK(chi2 < 30.0);  // df=2; far beyond any plausible uniform deviation
  }

  SUBCASE("empty action set") {
    std::vector<std::uint8_t> taken = {1, 1, 1, 1};
    CHECK_THROWS(select_action(table, 0, taken, 0.5, rng));
  }
}

TEST_CASE("run_episode: single provisionable demand") {
  const auto cat = default_catalog();
  const auto topo = make_topology(2, {{0, 1, 160.0}});
  NetworkState state(topo, cat);
  const std::vector<TrafficDemand> demands = {{0, 1, 100, 0}};
  QLearnConfig cfg;
  QTable table(3, 1);
  Rng rng(1);

  const auto snap = state.snapshot();
  auto er = run_episode(state, demands, table, 0.0, cfg, rng);
  CHECK(er.success);
  CHECK(er.order == std::vector<int>{0});
  CHECK(er.steps == 1);
  // Plan power: the 1828 W lightpath on top of the OXC floor.
  CHECK(er.total_pc_w == doctest::Approx(state.ledger().oxc_w + 1828.0));
  // One terminal update: alpha * (bonus - delta).
  CHECK(table.at(0, 0) == doctest::Approx(0.1 * (1e6 - 1828.0)));
  CHECK(state.snapshot() == snap);  // restored afterwards
}

TEST_CASE("run_episode: failure ends the episode with the penalty") {
  const auto cat = default_catalog();
  // 5000 km fiber: no option reaches, and a 40 Gbps demand cannot split.
  const auto topo = make_topology(2, {{0, 1, 5000.0}});
  NetworkState state(topo, cat);
  const std::vector<TrafficDemand> demands = {{0, 1, 40, 0}, {1, 0, 40, 1}};
  QLearnConfig cfg;
  QTable table(4, 2);
  Rng rng(1);

  auto er = run_episode(state, demands, table, 0.0, cfg, rng);
  CHECK_FALSE(er.success);
  CHECK(er.steps == 1);
  CHECK(er.order.empty());
  CHECK(table.at(0, 0) == doctest::Approx(0.1 * -1e9));
}

TEST_CASE("run_episode: masking yields a permutation") {
  Toy toy;
  NetworkState state(toy.topo, toy.cat);
  QLearnConfig cfg;
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    QTable table(6, 4);
    auto er = run_episode(state, toy.demands, table, 1.0, cfg, rng);
    REQUIRE(er.success);
    auto sorted = er.order;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3});
  }
}

TEST_CASE("train: learns the exhaustive-ordering optimum on the toy") {
  Toy toy;
  const auto [oracle_min, oracle_max] = min_max_over_orders(toy);
  CHECK(oracle_min < oracle_max);  // the instance is order-sensitive

  QLearnConfig cfg;
  cfg.total_episodes = 400;
  cfg.seed = 11;
  TrainOptions opts;
  opts.seed_baseline_episodes = false;
  const auto result = train(toy.topo, toy.cat, toy.demands, cfg, opts);

  REQUIRE(result.any_success);
  CHECK(result.best_pc_w == doctest::Approx(oracle_min));
  CHECK(result.log.size() == 400);

  // Replaying the best order reproduces the tracked power exactly.
  NetworkState state(toy.topo, toy.cat);
  auto rep = provision_sequence(state, toy.demands, result.best_order);
  REQUIRE(rep.success);
  CHECK(rep.total_pc_w == result.best_pc_w);

  // Tracked best is the running minimum over successful episodes.
  double running = std::numeric_limits<double>::infinity();
  for (const auto& row : result.log) {
    if (row.success) running = std::min(running, row.total_pc_w);
  }
  CHECK(running == result.best_pc_w);

  // Q-values stay inside the reward-bound box.
  const double bound = (cfg.penalty_p + cfg.bonus_r) / (1.0 - cfg.gamma);
  for (int s = 0; s < result.table.num_states(); ++s) {
    for (int a = 0; a < result.table.num_actions(); ++a) {
      CHECK(std::abs(result.table.at(s, a)) <= bound);
    }
  }
}

TEST_CASE("train: identical seeds give identical runs") {
  Toy toy;
  QLearnConfig cfg;
  cfg.total_episodes = 120;
  cfg.seed = 21;
  const auto a = train(toy.topo, toy.cat, toy.demands, cfg);
  const auto b = train(toy.topo, toy.cat, toy.demands, cfg);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    CHECK(a.log[i].eps == b.log[i].eps);
    CHECK(a.log[i].success == b.log[i].success);
    CHECK(a.log[i].total_pc_w == b.log[i].total_pc_w);
  }
  CHECK(a.best_order == b.best_order);
  CHECK(a.best_pc_w == b.best_pc_w);

  cfg.seed = 22;
  const auto c = train(toy.topo, toy.cat, toy.demands, cfg);
  bool any_diff = c.best_order != a.best_order;
  for (std::size_t i = 0; !any_diff && i < a.log.size(); ++i) {
    any_diff = a.log[i].total_pc_w != c.log[i].total_pc_w;
  }
  CHECK(any_diff);
}

TEST_CASE("train: baseline seeding bounds the result by the greedy orders") {
  Toy toy;
  std::vector<double> gh_totals;
  for (auto policy : {OrderingPolicy::Descending, OrderingPolicy::Ascending,
                      OrderingPolicy::IndexOrder}) {
    NetworkState state(toy.topo, toy.cat);
    auto r = plan_gh(state, toy.demands, policy);
    REQUIRE(r.success);
    gh_totals.push_back(r.total_pc_w);
  }

  QLearnConfig cfg;
  cfg.total_episodes = 0;  // seeding alone
  const auto result = train(toy.topo, toy.cat, toy.demands, cfg);
  REQUIRE(result.seeded_log.size() == 3);
  CHECK(result.seeded_log[0].episode == -3);
  CHECK(result.seeded_log[2].episode == -1);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(result.seeded_log[i].total_pc_w == doctest::Approx(gh_totals[i]));
  }
  CHECK(result.any_success);
  CHECK(result.best_pc_w <=
        *std::min_element(gh_totals.begin(), gh_totals.end()) + 1e-9);
  CHECK(result.log.empty());
}

TEST_CASE("train: per-block success counts") {
  Toy toy;
  QLearnConfig cfg;
  cfg.total_episodes = 2500;
  cfg.seed = 3;
  const auto result = train(toy.topo, toy.cat, toy.demands, cfg);
  CHECK(result.episodes_per_block == std::vector<int>{1000, 1000, 500});
  // Every order succeeds on this instance.
  CHECK(result.success_per_block == std::vector<int>{1000, 1000, 500});
}

TEST_CASE("train: greedy rollout is stable once converged") {
  Toy toy;
  QLearnConfig cfg;
  cfg.total_episodes = 600;
  cfg.seed = 17;
  auto result = train(toy.topo, toy.cat, toy.demands, cfg);

  NetworkState state(toy.topo, toy.cat);
  Rng rng(1);
  std::vector<int> last;
  for (int i = 0; i < 3; ++i) {
    auto er = run_episode(state, toy.demands, result.table, 0.0, cfg, rng);
    REQUIRE(er.success);
    if (i > 0) CHECK(er.order == last);
    last = er.order;
  }
}

TEST_CASE("qtable CSV round-trips") {
  QTable table(3, 2);
  table.at(0, 0) = -1.5;
  table.at(2, 1) = 42.25;
  const auto path = std::filesystem::temp_directory_path() / "eonplan_qtable.csv";
  save_qtable_csv(table, path.string());
  const auto loaded = load_qtable_csv(path.string());
  REQUIRE(loaded.num_states() == 3);
  REQUIRE(loaded.num_actions() == 2);
  for (int s = 0; s < 3; ++s) {
    for (int a = 0; a < 2; ++a) CHECK(loaded.at(s, a) == table.at(s, a));
  }
  std::filesystem::remove(path);
}
