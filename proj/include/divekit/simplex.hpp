#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divekit/instance.hpp"

namespace divekit {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };
std::string to_string(LpStatus s);

enum class VarStatus : uint8_t { kAtLower, kAtUpper, kBasic, kFree };

// A simplex basis (L, B, U). `basic` lists the column basic in each row
// position; indices >= num_cols denote the fixed-at-zero logical column of
// row (index - num_cols), which the solver uses to start from an empty
// basis. `status` covers the LP's columns only.
struct Basis {
  std::vector<int> basic;
  std::vector<VarStatus> status;

  std::vector<int> at_lower() const;
  std::vector<int> at_upper() const;
  bool empty() const { return basic.empty() && status.empty(); }
};

// Multipliers of the dual  max y_b^T b + y_lb^T lower + y_ub^T upper
// s.t. A^T y_b + y_lb + y_ub = c, y_lb >= 0, y_ub <= 0.
struct DualValues {
  std::vector<double> y_b;
  std::vector<double> y_lb;
  std::vector<double> y_ub;

  // Reduced cost d_j = y_lb_j + y_ub_j.
  double reduced_cost(int j) const { return y_lb[j] + y_ub[j]; }
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::optional<DualValues> duals;  // present iff Optimal
  Basis basis;
  int64_t iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct SimplexOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 50;
  // Consecutive non-improving pivots before switching from Dantzig pricing
  // to Bland's rule.
  int bland_after = 1000;
  std::optional<int64_t> iteration_limit;
  // Called once per pivot with (iteration, entering, leaving or -1 for a
  // bound flip, step length) when set.
  std::function<void(int64_t, int, int, double)> pivot_trace;
};

LpSolution solve_lp(const StandardLp& lp, const Basis* warm = nullptr, const SimplexOptions& opts = {});

inline LpSolution solve_lp(const StandardLp& lp, const Basis* warm, std::optional<int64_t> iter_limit) {
  SimplexOptions opts;
  opts.iteration_limit = iter_limit;
  return solve_lp(lp, warm, opts);
}

struct SlacknessCheck {
  bool holds = true;
  double max_violation = 0.0;
};

// Evaluates |(x - lower) * y_lb| and |(x - upper) * y_ub| over all columns;
// infinite bounds contribute nothing since their duals are zero.
SlacknessCheck check_complementary_slackness(std::span<const double> x, const DualValues& duals,
                                             const StandardLp& lp, double tol);

// Residual diagnostics for an optimal solution.
struct DualityReport {
  double primal_residual = 0.0;     // ||Ax - b||_inf
  double bound_violation = 0.0;     // max over columns of bound excess
  double dual_residual = 0.0;       // ||A^T y_b + y_lb + y_ub - c||_inf
  double sign_violation = 0.0;      // max(-y_lb, y_ub)
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double gap() const;               // |primal - dual|
};

DualityReport duality_report(const StandardLp& lp, const LpSolution& sol);

}  // namespace divekit
