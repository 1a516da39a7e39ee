#include <cmath>

#include <Eigen/Dense>

#include "divekit/harness.hpp"
#include "divekit/l2dive.hpp"
#include "divekit/oracles.hpp"
#include "divekit/rng.hpp"

namespace divekit {

namespace {

// Equality-form LP with small integer data and a box; b = A x0 keeps it
// feasible. A is redrawn until it has full row rank, which vertex enumeration
// needs.
StandardLp random_lp(Rng& rng, int n, int m) {
  StandardLp lp;
  lp.num_rows = m;
  lp.num_cols = n;
  lp.slack_start = n;
  std::vector<double> x0(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
  do {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.bernoulli(0.7) ? static_cast<double>(rng.uniform_int(-4, 4)) : 0.0;
  } while (Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() < m);
  for (int j = 0; j < n; ++j) {
    const double lo = static_cast<double>(rng.uniform_int(-3, 1));
    lp.lower.push_back(lo);
    lp.upper.push_back(lo + static_cast<double>(rng.uniform_int(1, 4)));
    lp.objective.push_back(static_cast<double>(rng.uniform_int(-20, 20)) / 4.0);
    lp.origin.push_back(j);
    x0[j] = rng.uniform(lp.lower[j], lp.upper[j]);
  }
  lp.rhs.assign(m, 0.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < m; ++i) {
      if (a(i, j) == 0.0) continue;
      lp.row_index.push_back(i);
      lp.values.push_back(a(i, j));
      lp.rhs[i] += a(i, j) * x0[j];
    }
    lp.col_start.push_back(static_cast<int>(lp.values.size()));
  }
  return lp;
}

// Pure-binary instance whose rows are built around a random 0/1 point.
MilpInstance random_binary(Rng& rng, int n, int m, const std::string& name) {
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
      const double a = static_cast<double>(rng.uniform_int(-5, 5));
      if (a == 0.0 || !rng.bernoulli(0.5)) continue;
      row.push_back({j, a});
      act += a * x0[j];
    }
    if (row.empty()) continue;
    if (rng.bernoulli(0.5))
      b.add_row(std::move(row), RowSense::kLe, act + static_cast<double>(rng.uniform_int(0, 3)));
    else
      b.add_row(std::move(row), RowSense::kGe, act - static_cast<double>(rng.uniform_int(0, 3)));
  }
  return std::move(b).build();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(b)); }

}  // namespace

VerifyReport run_verification(const VerifyConfig& cfg) {
  VerifyReport rep;
  Rng rng(derive_seed(cfg.seed, 1));
  for (int k = 0; k < cfg.lp_cases; ++k) {
    const int n = static_cast<int>(rng.uniform_int(3, 8));
    const int m = static_cast<int>(rng.uniform_int(1, std::min(n - 1, 4)));
    const StandardLp lp = random_lp(rng, n, m);
    const auto ref = oracle::enumerate_basic_solutions(lp);
    ++rep.lp_checked;
    try {
      const LpSolution sol = solve_lp(lp);
      if (!ref.feasible || !sol.optimal() || !close(sol.objective, ref.objective)) {
        ++rep.lp_failed;
        rep.failures.push_back("lp case " + std::to_string(k) + ": simplex " + format_number(sol.objective) +
                               " vs enumeration " + format_number(ref.objective));
      }
    } catch (const std::exception& ex) {
      ++rep.lp_failed;
      rep.failures.push_back("lp case " + std::to_string(k) + ": " + ex.what());
    }
  }

  // Each proposition case pairs a random instance with one random feasible
  // integer point; infeasible instances are redrawn.
  Rng prng(derive_seed(cfg.seed, 2));
  int drawn = 0;
  while (rep.proposition_checked < cfg.proposition_cases && drawn < 20 * std::max(cfg.proposition_cases, 1)) {
    const auto inst = random_binary(prng, 8, 5, "verify-prop-" + std::to_string(drawn++));
    const auto ref = oracle::brute_force(inst, 1e-9, 1 << 12, true);
    if (!ref.feasible) continue;
    const auto& xt =
        ref.feasible_points[prng.uniform_int(0, static_cast<int64_t>(ref.feasible_points.size()) - 1)];
    ++rep.proposition_checked;
    try {
      const auto r = verify_proposition1(inst, xt);
      if (!r.feasible || !r.optimal) {
        ++rep.proposition_failed;
        rep.failures.push_back(inst.name + ": tightened optimum " + format_number(r.tightened_objective) +
                               " vs target " + format_number(r.target_objective));
      }
    } catch (const std::exception& ex) {
      ++rep.proposition_failed;
      rep.failures.push_back(inst.name + ": " + ex.what());
    }
  }

  Rng brng(derive_seed(cfg.seed, 3));
  for (int k = 0; k < cfg.bnb_cases; ++k) {
    const int n = static_cast<int>(brng.uniform_int(6, 12));
    const auto inst = random_binary(brng, n, static_cast<int>(brng.uniform_int(3, 7)), "verify-bnb-" + std::to_string(k));
    const auto ref = oracle::brute_force(inst, 1e-9, 1 << 14, false);
    ++rep.bnb_checked;
    try {
      SolveConfig sc;
      sc.time_limit = 1e9;
      const SolveResult res = branch_and_bound(inst, sc);
      const bool ok = ref.feasible ? res.status == SolveStatus::kOptimalProven && close(res.primal_bound, ref.optimum)
                                   : res.status == SolveStatus::kInfeasible;
      if (!ok) {
        ++rep.bnb_failed;
        rep.failures.push_back(inst.name + ": B&B " + to_string(res.status) + " " + format_number(res.primal_bound) +
                               " vs brute force " + (ref.feasible ? format_number(ref.optimum) : "infeasible"));
      }
    } catch (const std::exception& ex) {
      ++rep.bnb_failed;
      rep.failures.push_back(inst.name + ": " + ex.what());
    }
  }
  return rep;
}

}  // namespace divekit
