#pragma once

// Slow, independent reference computations used by the test suites and the
// `verify` command. Nothing here shares code with the simplex or the branch
// and bound solver.

#include <cstdint>
#include <span>
#include <vector>

#include "divekit/instance.hpp"

namespace divekit::oracle {

struct LpReference {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> x;
  int64_t vertices_checked = 0;
};

// Enumerates every basic solution of  min c^T x, Ax = b, lo <= x <= hi  (all
// bounds finite): each column subset of size m with a nonsingular basis
// matrix, every lower/upper placement of the remaining columns. Intended for
// num_cols <= ~14.
LpReference enumerate_basic_solutions(const StandardLp& lp, double tol = 1e-9);

// Row, bound and integrality check written directly against the CSR data.
bool feasible(const MilpInstance& inst, std::span<const double> x, double tol = 1e-6);

struct MilpReference {
  bool feasible = false;
  double optimum = 0.0;
  std::vector<std::vector<double>> feasible_points;
  std::vector<std::vector<double>> optimal_points;
};

// Exhaustive search over all integer assignments of a pure-integer instance
// with finite bounds. Throws UnsupportedFeature for continuous variables or
// when the domain product exceeds max_points.
MilpReference brute_force(const MilpInstance& inst, double opt_tol = 1e-6, int64_t max_points = 1 << 22,
                          bool keep_feasible = true);

}  // namespace divekit::oracle
