#include "divekit/simplex.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace divekit {

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
  }
  return "unknown";
}

std::vector<int> Basis::at_lower() const {
  std::vector<int> out;
  for (size_t j = 0; j < status.size(); ++j)
    if (status[j] == VarStatus::kAtLower) out.push_back(static_cast<int>(j));
  return out;
}

std::vector<int> Basis::at_upper() const {
  std::vector<int> out;
  for (size_t j = 0; j < status.size(); ++j)
    if (status[j] == VarStatus::kAtUpper) out.push_back(static_cast<int>(j));
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int64_t kDefaultIterationCap = 1'000'000;
constexpr int kMaxSingularRetries = 3;

// Bounded-variable primal simplex with an explicit dense basis inverse,
// refreshed by LU every `refactor_interval` pivots and updated by a rank-one
// eta in between. Columns num_cols .. num_cols + m - 1 are fixed-at-zero
// logicals, one per row, used to start from an all-logical basis; phase 1
// minimizes the sum of basic bound violations.
class PrimalSimplex {
 public:
  PrimalSimplex(const StandardLp& lp, const SimplexOptions& opts)
      : lp_(lp), opts_(opts), m_(lp.num_rows), n_(lp.num_cols), total_(lp.num_cols + lp.num_rows) {
    lo_.assign(total_, 0.0);
    hi_.assign(total_, 0.0);
    cost_.assign(total_, 0.0);
    for (int j = 0; j < n_; ++j) {
      lo_[j] = lp.lower[j];
      hi_[j] = lp.upper[j];
      cost_[j] = lp.objective[j];
    }
    x_.assign(total_, 0.0);
    pos_.assign(total_, -1);
    status_.assign(total_, VarStatus::kAtLower);
  }

  LpSolution run(const Basis* warm) {
    for (int j = 0; j < n_; ++j) {
      if (lo_[j] > hi_[j]) return finish(LpStatus::kInfeasible);
    }
    bool loaded = warm != nullptr && !warm->empty() && load_basis(*warm);
    if (loaded) loaded = refactor();
    if (!loaded) {
      crash_basis();
      if (!refactor()) throw SingularBasis("logical starting basis is singular");
    }
    compute_primal();
    return iterate();
  }

 private:
  bool finite(double v) const { return is_finite_bound(v); }

  template <typename F>
  void for_column(int j, F&& f) const {
    if (j >= n_) {
      f(j - n_, 1.0);
      return;
    }
    for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) f(lp_.row_index[k], lp_.values[k]);
  }

  double column_dot(int j, const Eigen::VectorXd& y) const {
    if (j >= n_) return y(j - n_);
    double s = 0.0;
    for (int k = lp_.col_start[j]; k < lp_.col_start[j + 1]; ++k) s += lp_.values[k] * y(lp_.row_index[k]);
    return s;
  }

  void place_nonbasic(int j, VarStatus preferred) {
    pos_[j] = -1;
    const bool has_lo = finite(lo_[j]);
    const bool has_hi = finite(hi_[j]);
    VarStatus s = preferred;
    if (s == VarStatus::kAtUpper && !has_hi) s = VarStatus::kAtLower;
    if (s == VarStatus::kAtLower && !has_lo) s = has_hi ? VarStatus::kAtUpper : VarStatus::kFree;
    if (s == VarStatus::kFree && (has_lo || has_hi)) s = has_lo ? VarStatus::kAtLower : VarStatus::kAtUpper;
    if (s == VarStatus::kBasic) s = has_lo ? VarStatus::kAtLower : (has_hi ? VarStatus::kAtUpper : VarStatus::kFree);
    status_[j] = s;
    x_[j] = s == VarStatus::kAtLower ? lo_[j] : (s == VarStatus::kAtUpper ? hi_[j] : 0.0);
  }

  void crash_basis() {
    basic_.assign(m_, -1);
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int j = lp_.slack_start; j < n_; ++j) {
      const int i = lp_.slack_row(j);
      if (i >= 0 && basic_[i] < 0) basic_[i] = j;
    }
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < 0) basic_[i] = n_ + i;
    for (int i = 0; i < m_; ++i) {
      pos_[basic_[i]] = i;
      status_[basic_[i]] = VarStatus::kBasic;
    }
    for (int j = 0; j < total_; ++j)
      if (pos_[j] < 0) place_nonbasic(j, VarStatus::kAtLower);
  }

  bool load_basis(const Basis& warm) {
    if (static_cast<int>(warm.basic.size()) != m_ || static_cast<int>(warm.status.size()) != n_) return false;
    std::fill(pos_.begin(), pos_.end(), -1);
    basic_ = warm.basic;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (j < 0 || j >= total_ || pos_[j] >= 0) return false;
      pos_[j] = i;
      status_[j] = VarStatus::kBasic;
    }
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0) continue;
      place_nonbasic(j, j < n_ ? warm.status[j] : VarStatus::kAtLower);
    }
    return true;
  }

  bool refactor() {
    since_refactor_ = 0;
    if (m_ == 0) {
      binv_.resize(0, 0);
      return true;
    }
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m_, m_);
    for (int i = 0; i < m_; ++i) for_column(basic_[i], [&](int r, double v) { b(r, i) = v; });
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-13)) return false;
    binv_ = lu.inverse();
    return binv_.allFinite();
  }

  void compute_primal() {
    Eigen::VectorXd r(m_);
    for (int i = 0; i < m_; ++i) r(i) = lp_.rhs[i];
    for (int j = 0; j < total_; ++j) {
      if (pos_[j] >= 0 || x_[j] == 0.0) continue;
      const double xj = x_[j];
      for_column(j, [&](int row, double v) { r(row) -= v * xj; });
    }
    const Eigen::VectorXd xb = binv_ * r;
    for (int i = 0; i < m_; ++i) x_[basic_[i]] = xb(i);
  }

  // Fills cb with phase costs; returns the total bound violation of basics.
  double phase_costs(Eigen::VectorXd& cb) const {
    cb.resize(m_);
    double infeasibility = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = basic_[i];
      if (x_[j] < lo_[j] - opts_.feasibility_tol) {
        cb(i) = -1.0;
        infeasibility += lo_[j] - x_[j];
      } else if (x_[j] > hi_[j] + opts_.feasibility_tol) {
        cb(i) = 1.0;
        infeasibility += x_[j] - hi_[j];
      } else {
        cb(i) = 0.0;
      }
    }
    if (infeasibility == 0.0)
      for (int i = 0; i < m_; ++i) cb(i) = cost_[basic_[i]];
    return infeasibility;
  }

  LpSolution iterate() {
    const int64_t limit = opts_.iteration_limit.value_or(kDefaultIterationCap);
    Eigen::VectorXd cb, y, alpha(m_);
    bool fresh = true;
    bool bland = false;
    int stall = 0;
    int singular_retries = 0;
    int unblocked_phase1 = 0;

    while (true) {
      if (since_refactor_ >= opts_.refactor_interval) {
        if (!refactor()) {
          if (++singular_retries > kMaxSingularRetries) throw SingularBasis("basis refactorization failed");
          crash_basis();
          if (!refactor()) throw SingularBasis("logical basis is singular");
        }
        compute_primal();
        fresh = true;
      }

      const double infeasibility = phase_costs(cb);
      const bool phase1 = infeasibility > 0.0;
      y = binv_.transpose() * cb;

      // Pricing.
      int q = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < total_; ++j) {
        if (pos_[j] >= 0 || lo_[j] == hi_[j]) continue;
        const double d = (phase1 ? 0.0 : cost_[j]) - column_dot(j, y);
        int cand_dir = 0;
        switch (status_[j]) {
          case VarStatus::kAtLower: cand_dir = d < -opts_.optimality_tol ? 1 : 0; break;
          case VarStatus::kAtUpper: cand_dir = d > opts_.optimality_tol ? -1 : 0; break;
          case VarStatus::kFree:
            cand_dir = d < -opts_.optimality_tol ? 1 : (d > opts_.optimality_tol ? -1 : 0);
            break;
          case VarStatus::kBasic: break;
        }
        if (cand_dir == 0) continue;
        if (bland) {
          q = j;
          dir = cand_dir;
          break;
        }
        if (std::abs(d) > best) {
          best = std::abs(d);
          q = j;
          dir = cand_dir;
        }
      }

      if (q < 0) {
        if (!fresh) {
          if (!refactor()) throw SingularBasis("basis refactorization failed at termination");
          compute_primal();
          fresh = true;
          continue;
        }
        return finish(phase1 ? LpStatus::kInfeasible : LpStatus::kOptimal);
      }
      if (iterations_ >= limit) return finish(LpStatus::kIterationLimit);

      alpha.setZero();
      for_column(q, [&](int r, double v) { alpha += binv_.col(r) * v; });

      // Ratio test. A bound flip of the entering column wins ties.
      double step = (finite(lo_[q]) && finite(hi_[q])) ? hi_[q] - lo_[q] : kInf;
      int leave = -1;
      double leave_value = 0.0;
      bool leave_upper = false;
      double leave_pivot = 0.0;
      for (int i = 0; i < m_; ++i) {
        const double a = alpha(i);
        if (std::abs(a) <= opts_.pivot_tol) continue;
        const double rate = -dir * a;
        const int j = basic_[i];
        const double xv = x_[j];
        double bound;
        bool to_upper;
        if (rate < 0.0) {
          if (xv > hi_[j] + opts_.feasibility_tol && finite(hi_[j])) {
            bound = hi_[j];
            to_upper = true;
          } else if (xv >= lo_[j] - opts_.feasibility_tol) {
            if (!finite(lo_[j])) continue;
            bound = lo_[j];
            to_upper = false;
          } else {
            continue;
          }
        } else {
          if (xv < lo_[j] - opts_.feasibility_tol && finite(lo_[j])) {
            bound = lo_[j];
            to_upper = false;
          } else if (xv <= hi_[j] + opts_.feasibility_tol) {
            if (!finite(hi_[j])) continue;
            bound = hi_[j];
            to_upper = true;
          } else {
            continue;
          }
        }
        const double t = std::max(0.0, (bound - xv) / rate);
        bool take = false;
        if (t < step - 1e-12) {
          take = true;
        } else if (leave >= 0 && t <= step + 1e-12) {
          take = bland ? j < basic_[leave] : std::abs(a) > std::abs(leave_pivot);
        }
        if (take) {
          step = t;
          leave = i;
          leave_value = bound;
          leave_upper = to_upper;
          leave_pivot = a;
        }
      }

      if (!std::isfinite(step)) {
        if (!phase1) return finish(LpStatus::kUnbounded);
        // A phase-1 improving direction must be blocked; refresh and retry.
        if (++unblocked_phase1 > 2) throw NumericalBreakdown("unblocked phase-1 direction");
        if (!refactor()) throw SingularBasis("basis refactorization failed");
        compute_primal();
        fresh = true;
        continue;
      }
      unblocked_phase1 = 0;

      ++iterations_;
      if (opts_.pivot_trace) opts_.pivot_trace(iterations_, q, leave >= 0 ? basic_[leave] : -1, step);

      x_[q] += dir * step;
      if (step > 0.0)
        for (int i = 0; i < m_; ++i) x_[basic_[i]] -= dir * alpha(i) * step;

      if (leave < 0) {
        status_[q] = dir > 0 ? VarStatus::kAtUpper : VarStatus::kAtLower;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
      } else {
        const int p = basic_[leave];
        x_[p] = leave_value;
        pos_[p] = -1;
        status_[p] = (leave_upper && lo_[p] != hi_[p]) ? VarStatus::kAtUpper : VarStatus::kAtLower;
        basic_[leave] = q;
        pos_[q] = leave;
        status_[q] = VarStatus::kBasic;
        const double pivot = alpha(leave);
        const Eigen::RowVectorXd prow = binv_.row(leave) / pivot;
        binv_.noalias() -= alpha * prow;
        binv_.row(leave) = prow;
        ++since_refactor_;
      }
      fresh = false;

      if (step <= 1e-12) {
        if (++stall >= opts_.bland_after) bland = true;
      } else {
        stall = 0;
      }
    }
  }

  LpSolution finish(LpStatus status) {
    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    if (!basic_.empty() || m_ == 0) {
      sol.basis.basic = basic_;
      sol.basis.status.assign(status_.begin(), status_.begin() + n_);
    }
    if (status == LpStatus::kInfeasible && basic_.empty() && m_ > 0) return sol;
    sol.x.assign(x_.begin(), x_.begin() + n_);
    double z = 0.0;
    for (int j = 0; j < n_; ++j) z += cost_[j] * x_[j];
    sol.objective = z;
    if (status != LpStatus::kOptimal) return sol;

    Eigen::VectorXd cb(m_);
    for (int i = 0; i < m_; ++i) cb(i) = cost_[basic_[i]];
    const Eigen::VectorXd y = binv_.transpose() * cb;
    DualValues duals;
    duals.y_b.assign(y.data(), y.data() + m_);
    duals.y_lb.assign(n_, 0.0);
    duals.y_ub.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (pos_[j] >= 0) continue;
      const double d = cost_[j] - column_dot(j, y);
      if (lo_[j] == hi_[j]) {
        duals.y_lb[j] = std::max(d, 0.0);
        duals.y_ub[j] = std::min(d, 0.0);
      } else if (status_[j] == VarStatus::kAtLower) {
        duals.y_lb[j] = std::max(d, 0.0);
      } else if (status_[j] == VarStatus::kAtUpper) {
        duals.y_ub[j] = std::min(d, 0.0);
      }
    }
    sol.duals = std::move(duals);
    return sol;
  }

  const StandardLp& lp_;
  const SimplexOptions& opts_;
  const int m_;
  const int n_;
  const int total_;
  std::vector<double> lo_, hi_, cost_, x_;
  std::vector<int> basic_;
  std::vector<int> pos_;
  std::vector<VarStatus> status_;
  Eigen::MatrixXd binv_;
  int since_refactor_ = 0;
  int64_t iterations_ = 0;
};

}  // namespace

LpSolution solve_lp(const StandardLp& lp, const Basis* warm, const SimplexOptions& opts) {
  PrimalSimplex solver(lp, opts);
  return solver.run(warm);
}

SlacknessCheck check_complementary_slackness(std::span<const double> x, const DualValues& duals,
                                             const StandardLp& lp, double tol) {
  SlacknessCheck out;
  for (int j = 0; j < lp.num_cols; ++j) {
    if (is_finite_bound(lp.lower[j]))
      out.max_violation = std::max(out.max_violation, std::abs((x[j] - lp.lower[j]) * duals.y_lb[j]));
    if (is_finite_bound(lp.upper[j]))
      out.max_violation = std::max(out.max_violation, std::abs((x[j] - lp.upper[j]) * duals.y_ub[j]));
  }
  out.holds = out.max_violation <= tol;
  return out;
}

double DualityReport::gap() const { return std::abs(primal_objective - dual_objective); }

DualityReport duality_report(const StandardLp& lp, const LpSolution& sol) {
  DualityReport rep;
  if (!sol.optimal() || !sol.duals) return rep;
  const auto& d = *sol.duals;
  std::vector<double> ax(lp.num_rows, 0.0);
  for (int j = 0; j < lp.num_cols; ++j) {
    double aty = 0.0;
    for (int k = lp.col_start[j]; k < lp.col_start[j + 1]; ++k) {
      ax[lp.row_index[k]] += lp.values[k] * sol.x[j];
      aty += lp.values[k] * d.y_b[lp.row_index[k]];
    }
    rep.dual_residual = std::max(rep.dual_residual, std::abs(aty + d.y_lb[j] + d.y_ub[j] - lp.objective[j]));
    rep.sign_violation = std::max({rep.sign_violation, -d.y_lb[j], d.y_ub[j]});
    rep.bound_violation = std::max({rep.bound_violation, lp.lower[j] - sol.x[j], sol.x[j] - lp.upper[j]});
    rep.primal_objective += lp.objective[j] * sol.x[j];
    if (is_finite_bound(lp.lower[j])) rep.dual_objective += d.y_lb[j] * lp.lower[j];
    if (is_finite_bound(lp.upper[j])) rep.dual_objective += d.y_ub[j] * lp.upper[j];
  }
  for (int i = 0; i < lp.num_rows; ++i) {
    rep.primal_residual = std::max(rep.primal_residual, std::abs(ax[i] - lp.rhs[i]));
    rep.dual_objective += d.y_b[i] * lp.rhs[i];
  }
  return rep;
}

}  // namespace divekit
