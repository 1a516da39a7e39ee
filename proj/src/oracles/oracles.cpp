#include "divekit/oracles.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

namespace divekit::oracle {

namespace {

// Advances a combination of k indices out of n; false when exhausted.
bool next_combination(std::vector<int>& idx, int n) {
  const int k = static_cast<int>(idx.size());
  int i = k - 1;
  while (i >= 0 && idx[i] == n - k + i) --i;
  if (i < 0) return false;
  ++idx[i];
  for (int t = i + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  return true;
}

}  // namespace

LpReference enumerate_basic_solutions(const StandardLp& lp, double tol) {
  const int m = lp.num_rows;
  const int n = lp.num_cols;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  for (int j = 0; j < n; ++j)
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) a(lp.row_index[k], j) = lp.values[k];
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) b(i) = lp.rhs[i];

  LpReference best;
  best.objective = std::numeric_limits<double>::infinity();
  if (m > n) return best;

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = i;
  std::vector<char> in_basis(n);
  std::vector<int> nonbasic;
  do {
    std::fill(in_basis.begin(), in_basis.end(), 0);
    for (int j : basis) in_basis[j] = 1;
    nonbasic.clear();
    for (int j = 0; j < n; ++j)
      if (!in_basis[j]) nonbasic.push_back(j);

    Eigen::MatrixXd ab(m, m);
    for (int i = 0; i < m; ++i) ab.col(i) = a.col(basis[i]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(ab);
    if (m > 0 && lu.rank() < m) continue;

    const int64_t placements = int64_t{1} << nonbasic.size();
    for (int64_t mask = 0; mask < placements; ++mask) {
      std::vector<double> x(n, 0.0);
      Eigen::VectorXd r = b;
      for (size_t t = 0; t < nonbasic.size(); ++t) {
        const int j = nonbasic[t];
        x[j] = (mask >> t) & 1 ? lp.upper[j] : lp.lower[j];
        r -= a.col(j) * x[j];
      }
      if (m > 0) {
        const Eigen::VectorXd xb = lu.solve(r);
        for (int i = 0; i < m; ++i) x[basis[i]] = xb(i);
      }
      ++best.vertices_checked;
      bool ok = true;
      for (int j = 0; j < n && ok; ++j) ok = x[j] >= lp.lower[j] - tol && x[j] <= lp.upper[j] + tol;
      if (!ok) continue;
      double z = 0.0;
      for (int j = 0; j < n; ++j) z += lp.objective[j] * x[j];
      if (!best.feasible || z < best.objective) {
        best.feasible = true;
        best.objective = z;
        best.x = x;
      }
    }
  } while (m > 0 && next_combination(basis, n));
  return best;
}

bool feasible(const MilpInstance& inst, std::span<const double> x, double tol) {
  if (static_cast<int>(x.size()) != inst.num_vars) return false;
  for (int j = 0; j < inst.num_vars; ++j) {
    if (!std::isfinite(x[j])) return false;
    if (x[j] < inst.lower[j] - tol || x[j] > inst.upper[j] + tol) return false;
  }
  for (int j : inst.integers)
    if (std::abs(x[j] - std::round(x[j])) > tol) return false;
  for (int i = 0; i < inst.num_rows; ++i) {
    double act = 0.0;
    for (int k = inst.row_start[i]; k < inst.row_start[i + 1]; ++k) act += inst.values[k] * x[inst.col_index[k]];
    switch (inst.sense[i]) {
      case RowSense::kLe:
        if (act > inst.rhs[i] + tol) return false;
        break;
      case RowSense::kGe:
        if (act < inst.rhs[i] - tol) return false;
        break;
      case RowSense::kEq:
        if (std::abs(act - inst.rhs[i]) > tol) return false;
        break;
    }
  }
  return true;
}

MilpReference brute_force(const MilpInstance& inst, double opt_tol, int64_t max_points, bool keep_feasible) {
  const int n = inst.num_vars;
  std::vector<long long> lo(n), span(n);
  int64_t total = 1;
  for (int j = 0; j < n; ++j) {
    if (!inst.is_integer[j]) throw UnsupportedFeature("brute force needs a pure integer instance");
    if (!is_finite_bound(inst.lower[j]) || !is_finite_bound(inst.upper[j]))
      throw UnsupportedFeature("brute force needs finite bounds");
    lo[j] = static_cast<long long>(std::ceil(inst.lower[j] - 1e-9));
    const long long hi = static_cast<long long>(std::floor(inst.upper[j] + 1e-9));
    span[j] = hi - lo[j] + 1;
    if (span[j] <= 0) return {};
    if (total > max_points / span[j]) throw UnsupportedFeature("brute force domain too large");
    total *= span[j];
  }

  MilpReference out;
  std::vector<double> x(n);
  for (int64_t code = 0; code < total; ++code) {
    int64_t rest = code;
    for (int j = 0; j < n; ++j) {
      x[j] = static_cast<double>(lo[j] + rest % span[j]);
      rest /= span[j];
    }
    if (!feasible(inst, x, 1e-9)) continue;
    double z = 0.0;
    for (int j = 0; j < n; ++j) z += inst.objective[j] * x[j];
    if (keep_feasible) out.feasible_points.push_back(x);
    if (!out.feasible || z < out.optimum - opt_tol) {
      out.feasible = true;
      out.optimum = z;
      out.optimal_points.clear();
      out.optimal_points.push_back(x);
    } else if (z <= out.optimum + opt_tol) {
      out.optimal_points.push_back(x);
      if (z < out.optimum) out.optimum = z;
    }
  }
  return out;
}

}  // namespace divekit::oracle
