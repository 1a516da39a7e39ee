#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "divekit/instance.hpp"

namespace divekit {

enum class Family { kSetCover, kCombAuction, kFacilityLocation, kIndepSet };

std::string family_name(Family f);  // "set-cover", "comb-auction", ...
Family family_from_name(const std::string& name);

// Families whose instances typically have many optimal assignments; data
// collection augments their pools by enumerating the optimal face.
bool family_is_symmetric(Family f);

// Desk-scale defaults: set cover 100x200 at density 0.05, auctions with 50
// items and 150 bids, facility location 15 customers x 15 facilities,
// independent set on 120-node Barabasi-Albert graphs with affinity 4.
struct GeneratorConfig {
  Family family = Family::kSetCover;
  // set cover
  int rows = 100;
  int cols = 200;
  double density = 0.05;
  int max_cost = 100;
  // combinatorial auction
  int items = 50;
  int bids = 150;
  // facility location
  int customers = 15;
  int facilities = 15;
  double capacity_ratio = 5.0;
  // independent set
  int nodes = 120;
  int affinity = 4;

  uint64_t seed = 0;

  void validate() const;
};

MilpInstance generate(const GeneratorConfig& cfg);

MilpInstance generate_set_cover(int rows, int cols, double density, uint64_t seed, int max_cost = 100);
MilpInstance generate_comb_auction(int items, int bids, uint64_t seed);
MilpInstance generate_facility_location(int customers, int facilities, double capacity_ratio,
                                        uint64_t seed);
MilpInstance generate_indep_set(int nodes, int affinity, uint64_t seed);

// Maximum independent set over an explicit edge list, as a minimization of
// -sum x with one clique row per greedily-found clique covering the edges.
MilpInstance make_independent_set(int nodes, const std::vector<std::pair<int, int>>& edges,
                                  std::string name = "indset");

}  // namespace divekit
