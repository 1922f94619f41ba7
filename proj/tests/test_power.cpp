#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <tuple>

#include "eonplan/power.hpp"
#include "eonplan/rng.hpp"
#include "eonplan/topology.hpp"

using namespace eonplan;

namespace {

// Independent oracle: plain scan over every catalog row.
const TransmissionOption* brute_force_select(const PowerCatalog& cat, double capacity,
                                             double distance) {
  const TransmissionOption* best = nullptr;
  for (const auto& opt : cat.options) {
    if (opt.capacity_gbps != capacity || opt.mtr_km < distance) continue;
    if (!best) {
      best = &opt;
      continue;
    }
    auto key = [](const TransmissionOption& o) {
      return std::tuple{o.pc_watts, o.data_slots, o.mtr_km};
    };
    if (key(opt) < key(*best)) best = &opt;
  }
  return best;
}

}  // namespace

TEST_CASE("default catalog matches the hardware table") {
  const auto cat = default_catalog();
  CHECK(cat.options.size() == 22);
  CHECK(cat.router_port_pc == 560.0);
  CHECK(cat.router_port_capacity == 400.0);
  CHECK(cat.amp_dir_pc == 30.0);
  CHECK(cat.amp_overhead_pc == 140.0);
  CHECK(cat.ver_ssr_pc == 10.0);
  CHECK(cat.ver_overhead_pc == 25.0);
  CHECK(cat.sbvt_sliceability == 3);
  CHECK(cat.ver_ssr_count == 16);

  // Every row retrievable by (capacity, mtr) lookup.
  for (const auto& opt : cat.options) {
    const auto* found = cat.find_option(opt.capacity_gbps, opt.mtr_km);
    REQUIRE(found != nullptr);
    CHECK(*found == opt);
  }

  // Spot rows.
  CHECK(cat.find_option(40, 600)->pc_watts == doctest::Approx(154.8));
  CHECK(cat.find_option(40, 600)->data_slots == 1);
  CHECK(cat.find_option(100, 1900)->pc_watts == 270.0);
  CHECK(cat.find_option(200, 2500)->data_slots == 6);
  CHECK(cat.find_option(400, 2500)->pc_watts == 630.0);
  CHECK(cat.find_option(400, 2500)->data_slots == 14);

  CHECK(cat.capacity_classes() == std::vector<double>{40, 100, 200, 400});

  // PC nondecreasing in MTR within each class.
  for (double c : cat.capacity_classes()) {
    const auto idx = cat.options_for_class(c);
    for (std::size_t i = 1; i < idx.size(); ++i) {
      CHECK(cat.options[idx[i]].pc_watts >= cat.options[idx[i - 1]].pc_watts);
    }
  }
}

TEST_CASE("oxc_pc") {
  const auto cat = default_catalog();
  CHECK(oxc_pc(cat, 2) == 420.0);
  CHECK(oxc_pc(cat, 0) == 150.0);
  CHECK_THROWS(oxc_pc(cat, -1));

  // Whole-network OXC draw on the 31-node instance: 135*162 + 150*31.
  const auto topo = load_topology(std::string(TEST_DATA_DIR) + "/nkn31.json");
  double total = 0.0;
  for (const auto& node : topo.nodes) total += oxc_pc(cat, node.degree);
  CHECK(total == 26520.0);
}

TEST_CASE("inline_amp_count") {
  CHECK(inline_amp_count(240, 80) == 2);
  CHECK(inline_amp_count(80, 80) == 0);
  CHECK(inline_amp_count(100, 80) == 1);
  CHECK(inline_amp_count(79, 80) == 0);
  CHECK_THROWS(inline_amp_count(0, 80));
  CHECK_THROWS(inline_amp_count(100, 0));
}

TEST_CASE("amp_site_pc") {
  const auto cat = default_catalog();
  CHECK(amp_site_pc(cat, 0) == 0.0);
  CHECK(amp_site_pc(cat, 1) == 170.0);
  CHECK(amp_site_pc(cat, 2) == 200.0);
  CHECK_THROWS(amp_site_pc(cat, 3));
  CHECK_THROWS(amp_site_pc(cat, -1));
}

TEST_CASE("capacity_class") {
  const auto cat = default_catalog();
  CHECK(capacity_class(cat, 150) == 200.0);
  CHECK(capacity_class(cat, 400) == 400.0);
  CHECK(capacity_class(cat, 500) == std::nullopt);
  CHECK(capacity_class(cat, 1) == 40.0);
  CHECK_THROWS(capacity_class(cat, 0));
}

TEST_CASE("select_option picks the cheapest feasible row") {
  const auto cat = default_catalog();
  const auto* a = select_option(cat, 100, 2000);
  REQUIRE(a != nullptr);
  CHECK(a->mtr_km == 2500);
  CHECK(a->data_slots == 2);
  CHECK(a->pc_watts == 270.0);

  const auto* b = select_option(cat, 40, 600);
  REQUIRE(b != nullptr);
  CHECK(b->mtr_km == 600);
  CHECK(b->pc_watts == doctest::Approx(154.8));

  CHECK(select_option(cat, 400, 5000) == nullptr);
}

TEST_CASE("select_option agrees with brute force on random queries") {
  const auto cat = default_catalog();
  Rng rng(12345);
  const double classes[] = {40, 100, 200, 400};
  for (int i = 0; i < 1000; ++i) {
    const double capacity = classes[rng.below(4)];
    const double distance = rng.uniform_real(1.0, 4500.0);
    const auto* got = select_option(cat, capacity, distance);
    const auto* expect = brute_force_select(cat, capacity, distance);
    CHECK(got == expect);
  }
}

TEST_CASE("select_option PC is nondecreasing in distance") {
  const auto cat = default_catalog();
  for (double c : cat.capacity_classes()) {
    double last = 0.0;
    for (double d = 50; d <= 4000; d += 50) {
      const auto* opt = select_option(cat, c, d);
      if (!opt) break;
      CHECK(opt->pc_watts >= last);
      last = opt->pc_watts;
    }
  }
}

TEST_CASE("ver_regen_pc") {
  const auto cat = default_catalog();
  CHECK(ver_regen_pc(cat, *cat.find_option(100, 1900)) == 280.0);
  CHECK(ver_regen_pc(cat, *cat.find_option(40, 600)) == doctest::Approx(164.8));
}

TEST_CASE("catalog CSV round-trips") {
  const auto cat = default_catalog();
  const auto path = std::filesystem::temp_directory_path() / "eonplan_catalog_test.csv";
  save_catalog_csv(cat, path.string());
  const auto loaded = load_catalog_csv(path.string());
  CHECK(loaded.options == cat.options);
  std::filesystem::remove(path);
}
