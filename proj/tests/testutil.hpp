#pragma once

#include <vector>

#include "divekit/instance.hpp"
#include "divekit/rng.hpp"

namespace divekit::testutil {

// Random LP in equality form with finite bounds, feasible by construction:
// b = A x0 for an x0 inside the box.
inline StandardLp random_bounded_lp(Rng& rng, int n, int m) {
  StandardLp lp;
  lp.num_rows = m;
  lp.num_cols = n;
  lp.slack_start = n;
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    const double lo = std::round(rng.uniform(-3.0, 1.0));
    lp.lower.push_back(lo);
    lp.upper.push_back(lo + std::round(rng.uniform(1.0, 4.0)));
    lp.objective.push_back(std::round(rng.uniform(-5.0, 5.0) * 4.0) / 4.0);
    lp.origin.push_back(j);
    x0[j] = rng.uniform(lp.lower[j], lp.upper[j]);
  }
  std::vector<std::vector<double>> a(m, std::vector<double>(n, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (rng.bernoulli(0.7)) a[i][j] = std::round(rng.uniform(-4.0, 4.0));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      if (a[i][j] == 0.0) continue;
      lp.row_index.push_back(i);
      lp.values.push_back(a[i][j]);
    }
    lp.col_start.push_back(static_cast<int>(lp.values.size()));
  }
  lp.rhs.assign(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) lp.rhs[i] += a[i][j] * x0[j];
  return lp;
}

// Small pure-binary instance with random LE/GE rows that keeps the all-x0
// point feasible.
inline MilpInstance random_binary_instance(Rng& rng, int n, int m, const std::string& name = "rand") {
  MilpBuilder b(name);
  std::vector<double> x0(n);
  for (int j = 0; j < n; ++j) {
    b.add_binary(static_cast<double>(rng.uniform_int(-10, 10)));
    x0[j] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  for (int i = 0; i < m; ++i) {
    std::vector<RowEntry> row;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!rng.bernoulli(0.5)) continue;
      const double a = static_cast<double>(rng.uniform_int(-5, 5));
      if (a == 0.0) continue;
      row.push_back({j, a});
      act += a * x0[j];
    }
    if (row.empty()) continue;
    if (rng.bernoulli(0.5)) b.add_row(std::move(row), RowSense::kLe, act + rng.uniform_int(0, 3));
    else b.add_row(std::move(row), RowSense::kGe, act - rng.uniform_int(0, 3));
  }
  return std::move(b).build();
}

}  // namespace divekit::testutil
