#include "divekit/generators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "divekit/rng.hpp"

namespace divekit {

std::string family_name(Family f) {
  switch (f) {
    case Family::kSetCover: return "set-cover";
    case Family::kCombAuction: return "comb-auction";
    case Family::kFacilityLocation: return "facility-location";
    case Family::kIndepSet: return "indep-set";
  }
  return "unknown";
}

Family family_from_name(const std::string& name) {
  if (name == "set-cover") return Family::kSetCover;
  if (name == "comb-auction") return Family::kCombAuction;
  if (name == "facility-location") return Family::kFacilityLocation;
  if (name == "indep-set") return Family::kIndepSet;
  throw Error("unknown instance family '" + name + "'");
}

bool family_is_symmetric(Family f) { return f == Family::kSetCover || f == Family::kIndepSet; }

void GeneratorConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) throw Error(std::string("generator parameter '") + what + "' must be >= 1");
  };
  switch (family) {
    case Family::kSetCover:
      positive(rows, "rows");
      positive(cols, "cols");
      positive(max_cost, "max_cost");
      if (!(density > 0.0 && density <= 1.0)) throw Error("density must lie in (0, 1]");
      break;
    case Family::kCombAuction:
      positive(items, "items");
      positive(bids, "bids");
      break;
    case Family::kFacilityLocation:
      positive(customers, "customers");
      positive(facilities, "facilities");
      if (!(capacity_ratio >= 1.0)) throw Error("capacity_ratio must be >= 1");
      break;
    case Family::kIndepSet:
      positive(nodes, "nodes");
      positive(affinity, "affinity");
      if (nodes <= affinity) throw Error("independent set needs nodes > affinity");
      break;
  }
}

MilpInstance generate(const GeneratorConfig& cfg) {
  cfg.validate();
  switch (cfg.family) {
    case Family::kSetCover: return generate_set_cover(cfg.rows, cfg.cols, cfg.density, cfg.seed, cfg.max_cost);
    case Family::kCombAuction: return generate_comb_auction(cfg.items, cfg.bids, cfg.seed);
    case Family::kFacilityLocation:
      return generate_facility_location(cfg.customers, cfg.facilities, cfg.capacity_ratio, cfg.seed);
    case Family::kIndepSet: return generate_indep_set(cfg.nodes, cfg.affinity, cfg.seed);
  }
  throw Error("unreachable");
}

namespace {

std::string format_name(const char* fmt, auto... args) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  return buf;
}

}  // namespace

MilpInstance generate_set_cover(int rows, int cols, double density, uint64_t seed, int max_cost) {
  if (cols < 2) throw InfeasibleConstruction("set cover needs at least 2 columns to cover each row twice");
  Rng rng(seed);
  std::vector<std::vector<char>> member(rows, std::vector<char>(cols, 0));
  std::vector<int> row_count(rows, 0);
  long nnz = 0;
  auto add = [&](int r, int c) {
    if (member[r][c]) return false;
    member[r][c] = 1;
    ++row_count[r];
    ++nnz;
    return true;
  };

  // Every column appears somewhere, every row is covered by >= 2 columns.
  for (int c = 0; c < cols; ++c) add(static_cast<int>(rng.uniform_int(0, rows - 1)), c);
  for (int r = 0; r < rows; ++r) {
    int attempts = 0;
    while (row_count[r] < 2) {
      if (++attempts > 100 * cols) throw InfeasibleConstruction("could not cover row twice");
      add(r, static_cast<int>(rng.uniform_int(0, cols - 1)));
    }
  }
  const long target = std::max<long>(std::lround(rows * static_cast<double>(cols) * density), nnz);
  long attempts = 0;
  while (nnz < target && attempts++ < 100 * target)
    add(static_cast<int>(rng.uniform_int(0, rows - 1)), static_cast<int>(rng.uniform_int(0, cols - 1)));

  MilpBuilder b(format_name("set-cover-r%d-c%d-d%g-s%llu", rows, cols, density,
                            static_cast<unsigned long long>(seed)));
  for (int c = 0; c < cols; ++c) b.add_binary(static_cast<double>(rng.uniform_int(1, max_cost)));
  for (int r = 0; r < rows; ++r) {
    std::vector<RowEntry> e;
    for (int c = 0; c < cols; ++c)
      if (member[r][c]) e.push_back({c, 1.0});
    b.add_row(std::move(e), RowSense::kGe, 1.0);
  }
  return std::move(b).build();
}

MilpInstance generate_comb_auction(int items, int bids, uint64_t seed) {
  Rng rng(seed);
  std::vector<double> value(items);
  for (auto& v : value) v = rng.uniform(1.0, 100.0);
  const int max_bundle = std::min(items, 5);

  std::vector<std::vector<int>> bundles(bids);
  std::vector<double> price(bids);
  for (int k = 0; k < bids; ++k) {
    const int size = static_cast<int>(rng.uniform_int(1, max_bundle));
    std::set<int> chosen;
    // Items cluster around a random anchor to create overlapping bundles.
    const int anchor = static_cast<int>(rng.uniform_int(0, items - 1));
    while (static_cast<int>(chosen.size()) < size) {
      const int offset = static_cast<int>(rng.uniform_int(-3, 3));
      const int item = rng.bernoulli(0.7) ? ((anchor + offset) % items + items) % items
                                          : static_cast<int>(rng.uniform_int(0, items - 1));
      chosen.insert(item);
    }
    bundles[k].assign(chosen.begin(), chosen.end());
    double total = 0.0;
    for (int i : bundles[k]) total += value[i];
    price[k] = std::round(total * rng.uniform(1.0, 1.5));
  }

  MilpBuilder b(format_name("comb-auction-i%d-b%d-s%llu", items, bids, static_cast<unsigned long long>(seed)));
  for (int k = 0; k < bids; ++k) b.add_binary(-price[k]);
  for (int i = 0; i < items; ++i) {
    std::vector<RowEntry> e;
    for (int k = 0; k < bids; ++k)
      if (std::binary_search(bundles[k].begin(), bundles[k].end(), i)) e.push_back({k, 1.0});
    if (!e.empty()) b.add_row(std::move(e), RowSense::kLe, 1.0);
  }
  return std::move(b).build();
}

MilpInstance generate_facility_location(int customers, int facilities, double capacity_ratio,
                                        uint64_t seed) {
  Rng rng(seed);
  std::vector<double> cx(customers), cy(customers), fx(facilities), fy(facilities);
  for (int j = 0; j < customers; ++j) {
    cx[j] = rng.uniform();
    cy[j] = rng.uniform();
  }
  for (int i = 0; i < facilities; ++i) {
    fx[i] = rng.uniform();
    fy[i] = rng.uniform();
  }
  std::vector<double> demand(customers), capacity(facilities), fixed(facilities);
  for (auto& d : demand) d = static_cast<double>(rng.uniform_int(5, 35));
  for (auto& s : capacity) s = static_cast<double>(rng.uniform_int(10, 160));
  for (int i = 0; i < facilities; ++i)
    fixed[i] = std::round(rng.uniform(100.0, 110.0) * std::sqrt(capacity[i]) + rng.uniform(0.0, 90.0));
  double total_demand = 0.0, total_capacity = 0.0;
  for (double d : demand) total_demand += d;
  for (double s : capacity) total_capacity += s;
  for (auto& s : capacity) s = std::round(s * capacity_ratio * total_demand / total_capacity);
  total_capacity = 0.0;
  for (double s : capacity) total_capacity += s;
  if (total_capacity < total_demand) throw InfeasibleConstruction("total capacity below total demand");

  MilpBuilder b(format_name("facility-location-c%d-f%d-s%llu", customers, facilities,
                            static_cast<unsigned long long>(seed)));
  std::vector<int> open(facilities);
  for (int i = 0; i < facilities; ++i) open[i] = b.add_binary(fixed[i]);
  std::vector<std::vector<int>> serve(facilities, std::vector<int>(customers));
  for (int i = 0; i < facilities; ++i) {
    for (int j = 0; j < customers; ++j) {
      const double dist = std::hypot(cx[j] - fx[i], cy[j] - fy[i]);
      const double cost = std::round(dist * 10.0 * demand[j] * 100.0) / 100.0;
      serve[i][j] = b.add_var(0.0, 1.0, cost, false);
    }
  }
  for (int j = 0; j < customers; ++j) {
    std::vector<RowEntry> e;
    for (int i = 0; i < facilities; ++i) e.push_back({serve[i][j], 1.0});
    b.add_row(std::move(e), RowSense::kGe, 1.0);
  }
  for (int i = 0; i < facilities; ++i) {
    std::vector<RowEntry> e;
    for (int j = 0; j < customers; ++j) e.push_back({serve[i][j], demand[j]});
    e.push_back({open[i], -capacity[i]});
    b.add_row(std::move(e), RowSense::kLe, 0.0);
  }
  {
    std::vector<RowEntry> e;
    for (int i = 0; i < facilities; ++i) e.push_back({open[i], capacity[i]});
    b.add_row(std::move(e), RowSense::kGe, total_demand);
  }
  for (int i = 0; i < facilities; ++i)
    for (int j = 0; j < customers; ++j)
      b.add_row({{serve[i][j], 1.0}, {open[i], -1.0}}, RowSense::kLe, 0.0);
  return std::move(b).build();
}

MilpInstance make_independent_set(int nodes, const std::vector<std::pair<int, int>>& edges, std::string name) {
  std::vector<std::set<int>> adj(nodes);
  for (auto [u, v] : edges) {
    if (u == v) continue;
    adj[u].insert(v);
    adj[v].insert(u);
  }
  auto by_degree = [&](int a, int b) {
    if (adj[a].size() != adj[b].size()) return adj[a].size() > adj[b].size();
    return a < b;
  };

  // Greedy clique partition of the nodes; edges inside a clique are covered
  // by its clique row, the rest get pairwise rows.
  std::vector<int> order(nodes);
  for (int v = 0; v < nodes; ++v) order[v] = v;
  std::sort(order.begin(), order.end(), by_degree);
  std::vector<int> clique_of(nodes, -1);
  std::vector<std::vector<int>> cliques;
  for (int v : order) {
    if (clique_of[v] >= 0) continue;
    std::vector<int> clique{v};
    std::vector<int> nbrs;
    for (int u : adj[v])
      if (clique_of[u] < 0) nbrs.push_back(u);
    std::sort(nbrs.begin(), nbrs.end(), by_degree);
    for (int u : nbrs) {
      bool all = true;
      for (int w : clique) all = all && adj[u].count(w) > 0;
      if (all) clique.push_back(u);
    }
    for (int u : clique) clique_of[u] = static_cast<int>(cliques.size());
    cliques.push_back(std::move(clique));
  }

  MilpBuilder b(std::move(name));
  for (int v = 0; v < nodes; ++v) b.add_binary(-1.0);
  for (auto& clique : cliques) {
    if (clique.size() < 2) continue;
    std::sort(clique.begin(), clique.end());
    std::vector<RowEntry> e;
    for (int u : clique) e.push_back({u, 1.0});
    b.add_row(std::move(e), RowSense::kLe, 1.0);
  }
  for (int u = 0; u < nodes; ++u)
    for (int v : adj[u])
      if (u < v && clique_of[u] != clique_of[v]) b.add_row({{u, 1.0}, {v, 1.0}}, RowSense::kLe, 1.0);
  return std::move(b).build();
}

MilpInstance generate_indep_set(int nodes, int affinity, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degree(nodes, 0);
  // Barabasi-Albert: a clique on the first affinity + 1 nodes, then
  // preferential attachment of `affinity` edges per new node.
  for (int u = 0; u <= affinity; ++u)
    for (int v = u + 1; v <= affinity; ++v) {
      edges.emplace_back(u, v);
      ++degree[u];
      ++degree[v];
    }
  for (int v = affinity + 1; v < nodes; ++v) {
    std::set<int> targets;
    long total = 0;
    for (int u = 0; u < v; ++u) total += degree[u];
    while (static_cast<int>(targets.size()) < affinity) {
      long pick = rng.uniform_int(0, total - 1);
      int u = 0;
      while (pick >= degree[u]) pick -= degree[u++];
      targets.insert(u);
    }
    for (int u : targets) {
      edges.emplace_back(u, v);
      ++degree[u];
      ++degree[v];
    }
  }
  return make_independent_set(
      nodes, edges,
      format_name("indep-set-n%d-a%d-s%llu", nodes, affinity, static_cast<unsigned long long>(seed)));
}

}  // namespace divekit
