#include "eonplan/power.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "eonplan/num_format.hpp"

namespace eonplan {

std::vector<double> PowerCatalog::capacity_classes() const {
  std::vector<double> out;
  for (const auto& opt : options) {
    if (std::find(out.begin(), out.end(), opt.capacity_gbps) == out.end()) {
      out.push_back(opt.capacity_gbps);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> PowerCatalog::options_for_class(double capacity_gbps) const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(options.size()); ++i) {
    if (options[i].capacity_gbps == capacity_gbps) out.push_back(i);
  }
  std::sort(out.begin(), out.end(), [&](int a, int b) {
    return options[a].mtr_km < options[b].mtr_km;
  });
  return out;
}

double PowerCatalog::max_mtr(double capacity_gbps) const {
  double best = 0.0;
  for (const auto& opt : options) {
    if (opt.capacity_gbps == capacity_gbps) best = std::max(best, opt.mtr_km);
  }
  return best;
}

const TransmissionOption* PowerCatalog::find_option(double capacity_gbps,
                                                    double mtr_km) const {
  for (const auto& opt : options) {
    if (opt.capacity_gbps == capacity_gbps && opt.mtr_km == mtr_km) return &opt;
  }
  return nullptr;
}

PowerCatalog default_catalog() {
  PowerCatalog cat;
  cat.options = {
      {40, 600, 1, 154.8},  {40, 1900, 1, 183.6},  {40, 2500, 2, 183.6},
      {40, 3000, 3, 183.6}, {40, 4000, 4, 183.6},

      {100, 600, 1, 198},   {100, 1900, 1, 270},   {100, 2500, 2, 270},
      {100, 3000, 3, 270},  {100, 3500, 4, 270},

      {200, 500, 1, 333},   {200, 600, 2, 333},    {200, 750, 3, 333},
      {200, 1900, 4, 432},  {200, 2200, 5, 432},   {200, 2500, 6, 432},

      {400, 500, 4, 432},   {400, 600, 6, 432},    {400, 750, 8, 432},
      {400, 1900, 10, 630}, {400, 2200, 12, 630},  {400, 2500, 14, 630},
  };
  return cat;
}

double oxc_pc(const PowerCatalog& cat, int degree) {
  if (degree < 0) throw std::invalid_argument("oxc_pc: negative degree");
  return cat.oxc_per_degree_pc * degree + cat.oxc_base_pc;
}

int inline_amp_count(double length_km, double span_km) {
  if (length_km <= 0 || span_km <= 0) {
    throw std::invalid_argument("inline_amp_count: nonpositive input");
  }
  int spans = static_cast<int>(std::ceil(length_km / span_km));
  return std::max(spans - 1, 0);
}

double amp_site_pc(const PowerCatalog& cat, int active_directions) {
  if (active_directions < 0 || active_directions > 2) {
    throw std::invalid_argument("amp_site_pc: direction count outside {0,1,2}");
  }
  if (active_directions == 0) return 0.0;
  return cat.amp_overhead_pc + active_directions * cat.amp_dir_pc;
}

std::optional<double> capacity_class(const PowerCatalog& cat, double rate_gbps) {
  if (rate_gbps <= 0) throw std::invalid_argument("capacity_class: nonpositive rate");
  for (double c : cat.capacity_classes()) {
    if (c >= rate_gbps) return c;
  }
  return std::nullopt;  // split required
}

const TransmissionOption* select_option(const PowerCatalog& cat,
                                        double capacity_gbps,
                                        double transparent_km) {
  const TransmissionOption* best = nullptr;
  for (const auto& opt : cat.options) {
    if (opt.capacity_gbps != capacity_gbps || opt.mtr_km < transparent_km) continue;
    if (!best || opt.pc_watts < best->pc_watts ||
        (opt.pc_watts == best->pc_watts && opt.data_slots < best->data_slots) ||
        (opt.pc_watts == best->pc_watts && opt.data_slots == best->data_slots &&
         opt.mtr_km < best->mtr_km)) {
      best = &opt;
    }
  }
  return best;
}

double ver_regen_pc(const PowerCatalog& cat, const TransmissionOption& option) {
  return option.pc_watts + cat.ver_ssr_pc;
}

void save_catalog_csv(const PowerCatalog& cat, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "capacity,mtr_km,slots,pc_w\n";
  for (const auto& opt : cat.options) {
    out << format_double(opt.capacity_gbps) << ',' << format_double(opt.mtr_km) << ','
        << opt.data_slots << ',' << format_double(opt.pc_watts) << '\n';
  }
}

PowerCatalog load_catalog_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  PowerCatalog cat;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // first non-comment line is the header
      continue;
    }
    std::istringstream ss(line);
    TransmissionOption opt;
    char c1, c2, c3;
    if (!(ss >> opt.capacity_gbps >> c1 >> opt.mtr_km >> c2 >> opt.data_slots >> c3 >>
          opt.pc_watts) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed catalog row");
    }
    if (opt.capacity_gbps <= 0 || opt.mtr_km <= 0 || opt.data_slots <= 0 ||
        opt.pc_watts <= 0) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": nonpositive catalog value");
    }
    if (cat.find_option(opt.capacity_gbps, opt.mtr_km)) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": duplicate (capacity, mtr) row");
    }
    cat.options.push_back(opt);
  }
  if (cat.options.empty()) throw std::runtime_error(path + ": empty catalog");
  return cat;
}

}  // namespace eonplan
