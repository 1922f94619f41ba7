#include "eonplan/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "eonplan/num_format.hpp"
#include "eonplan/rng.hpp"

namespace eonplan {

using nlohmann::json;

int dir_from_node(const Fiber& f, int fd) { return dir_of(fd) == 0 ? f.a : f.b; }
int dir_to_node(const Fiber& f, int fd) { return dir_of(fd) == 0 ? f.b : f.a; }

void Topology::finalize() {
  const int n = num_nodes();
  if (n < 2) throw std::runtime_error("topology: degenerate (fewer than two nodes)");
  for (int i = 0; i < n; ++i) {
    if (nodes[i].id != i) throw std::runtime_error("topology: node ids must be 0..N-1");
    if (nodes[i].max_sbvts <= 0) throw std::runtime_error("topology: max_sbvts must be positive");
    if (nodes[i].max_vers < 0) throw std::runtime_error("topology: max_vers must be nonnegative");
  }
  if (span_km <= 0) throw std::runtime_error("topology: span_km must be positive");

  incident.assign(n, {});
  std::set<std::pair<int, int>> seen;
  for (int i = 0; i < num_fibers(); ++i) {
    Fiber& f = fibers[i];
    if (f.id != i) throw std::runtime_error("topology: fiber ids must be 0..F-1");
    if (f.a < 0 || f.a >= n || f.b < 0 || f.b >= n)
      throw std::runtime_error("topology: fiber endpoint out of range");
    if (f.a == f.b) throw std::runtime_error("topology: fiber endpoints must differ");
    if (f.length_km <= 0) throw std::runtime_error("topology: fiber length must be positive");
    if (f.slots_total <= 0) throw std::runtime_error("topology: slots_total must be positive");
    auto key = std::minmax(f.a, f.b);
    if (!seen.insert({key.first, key.second}).second)
      throw std::runtime_error("topology: duplicate fiber between a node pair");
    incident[f.a].push_back(f.id);
    incident[f.b].push_back(f.id);
  }
  for (int i = 0; i < n; ++i) nodes[i].degree = static_cast<int>(incident[i].size());

  // connectivity
  std::vector<char> vis(n, 0);
  std::vector<int> stack{0};
  vis[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int fid : incident[u]) {
      int v = fibers[fid].a == u ? fibers[fid].b : fibers[fid].a;
      if (!vis[v]) {
        vis[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  if (reached != n) throw std::runtime_error("topology: graph is not connected");
}

bool Topology::operator==(const Topology& o) const {
  return nodes == o.nodes && fibers == o.fibers && span_km == o.span_km;
}

void mark_ver_nodes(Topology& topo, double fraction) {
  if (fraction <= 0 || fraction > 1)
    throw std::invalid_argument("mark_ver_nodes: fraction must be in (0,1]");
  const int n = topo.num_nodes();
  int count = static_cast<int>(std::ceil(fraction * n));
  count = std::min(count, n);
  std::vector<int> ids(n);
  for (int i = 0; i < n; ++i) ids[i] = i;
  std::sort(ids.begin(), ids.end(), [&](int a, int b) {
    if (topo.nodes[a].degree != topo.nodes[b].degree)
      return topo.nodes[a].degree > topo.nodes[b].degree;
    return a < b;
  });
  for (auto& node : topo.nodes) node.ver_eligible = false;
  for (int i = 0; i < count; ++i) topo.nodes[ids[i]].ver_eligible = true;
}

Topology load_topology(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": parse error: " + e.what());
  }

  Topology topo;
  topo.span_km = doc.value("span_km", 80.0);
  topo.comment = doc.value("comment", std::string{});
  const int default_slots = doc.value("slots_total", 320);
  const int default_sbvts = doc.value("max_sbvts", 64);
  const int default_vers = doc.value("max_vers", 3);

  if (!doc.contains("nodes") || !doc.contains("fibers"))
    throw std::runtime_error(path + ": missing nodes or fibers");
  for (const auto& jn : doc["nodes"]) {
    Node node;
    node.id = jn.at("id").get<int>();
    node.max_sbvts = jn.value("max_sbvts", default_sbvts);
    node.max_vers = jn.value("max_vers", default_vers);
    topo.nodes.push_back(node);
  }
  std::sort(topo.nodes.begin(), topo.nodes.end(),
            [](const Node& a, const Node& b) { return a.id < b.id; });
  for (const auto& jf : doc["fibers"]) {
    Fiber f;
    f.id = jf.at("id").get<int>();
    f.a = jf.at("a").get<int>();
    f.b = jf.at("b").get<int>();
    f.length_km = jf.at("length_km").get<double>();
    f.slots_total = jf.value("slots_total", default_slots);
    topo.fibers.push_back(f);
  }
  std::sort(topo.fibers.begin(), topo.fibers.end(),
            [](const Fiber& a, const Fiber& b) { return a.id < b.id; });

  topo.finalize();
  mark_ver_nodes(topo, doc.value("ver_fraction", 0.30));
  return topo;
}

void save_topology(const Topology& topo, const std::string& path) {
  json doc;
  doc["span_km"] = topo.span_km;
  if (!topo.comment.empty()) doc["comment"] = topo.comment;
  doc["nodes"] = json::array();
  for (const auto& node : topo.nodes) {
    doc["nodes"].push_back({{"id", node.id},
                            {"max_sbvts", node.max_sbvts},
                            {"max_vers", node.max_vers}});
  }
  doc["fibers"] = json::array();
  for (const auto& f : topo.fibers) {
    doc["fibers"].push_back({{"id", f.id},
                             {"a", f.a},
                             {"b", f.b},
                             {"length_km", f.length_km},
                             {"slots_total", f.slots_total}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << '\n';
}

std::vector<TrafficDemand> generate_traffic(const Topology& topo, double atd_gbps,
                                            std::uint64_t seed) {
  if (atd_gbps < 5.0)
    throw std::invalid_argument("generate_traffic: atd_gbps must be at least 5");
  Rng rng(seed);
  const double lo = 5.0;
  const double hi = 2.0 * atd_gbps - 5.0;
  std::vector<TrafficDemand> demands;
  demands.reserve(static_cast<std::size_t>(topo.num_nodes()) * (topo.num_nodes() - 1));
  int id = 0;
  for (int s = 0; s < topo.num_nodes(); ++s) {
    for (int d = 0; d < topo.num_nodes(); ++d) {
      if (s == d) continue;
      double rate = std::round(rng.uniform_real(lo, hi));
      demands.push_back({s, d, rate, id++});
    }
  }
  return demands;
}

std::vector<TrafficDemand> load_traffic(const Topology& topo, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<TrafficDemand> demands;
  std::string line;
  bool header_seen = false;
  int lineno = 0;
  std::set<std::pair<int, int>> seen;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::istringstream ss(line);
    TrafficDemand d;
    char c1, c2;
    if (!(ss >> d.src >> c1 >> d.dst >> c2 >> d.rate_gbps) || c1 != ',' || c2 != ',') {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (d.src < 0 || d.src >= topo.num_nodes() || d.dst < 0 || d.dst >= topo.num_nodes())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": node id out of range");
    if (d.src == d.dst)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": src equals dst");
    if (d.rate_gbps <= 0)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": nonpositive rate");
    if (!seen.insert({d.src, d.dst}).second)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": duplicate pair");
    demands.push_back(d);
  }
  std::sort(demands.begin(), demands.end(), [](const TrafficDemand& a, const TrafficDemand& b) {
    return std::pair{a.src, a.dst} < std::pair{b.src, b.dst};
  });
  for (int i = 0; i < static_cast<int>(demands.size()); ++i) demands[i].demand_id = i;
  return demands;
}

void save_traffic(const std::vector<TrafficDemand>& demands, const std::string& path,
                  const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  out << "src,dst,gbps\n";
  for (const auto& d : demands) {
    out << d.src << ',' << d.dst << ',' << format_double(d.rate_gbps) << '\n';
  }
}

}  // namespace eonplan
