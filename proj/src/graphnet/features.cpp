#include <algorithm>
#include <cmath>

#include "divekit/bnb.hpp"
#include "divekit/graphnet.hpp"

namespace divekit {

namespace {

constexpr double kBoundTol = 1e-9;

double signed_log1p(double v) { return std::copysign(std::log1p(std::abs(v)), v); }

double sign_of(double v) {
  if (v > kBoundTol) return 1.0;
  if (v < -kBoundTol) return -1.0;
  return 0.0;
}

}  // namespace

std::vector<int> BipartiteGraph::candidates() const {
  std::vector<int> out;
  for (int j = 0; j < num_vars(); ++j)
    if (candidate_mask[j]) out.push_back(j);
  return out;
}

BipartiteGraph extract_graph(const MilpInstance& inst, const LpSolution& root) {
  if (!root.optimal() || !root.duals) throw Error("graph extraction needs an optimal root LP with duals");
  if (static_cast<int>(root.x.size()) < inst.num_vars) throw ShapeMismatch("root solution is too short");
  const int n = inst.num_vars;
  const int m = inst.num_rows;
  const auto& duals = *root.duals;

  BipartiteGraph g;
  g.var_feats = Eigen::MatrixXd::Zero(n, kVarFeatures);
  g.cons_feats = Eigen::MatrixXd::Zero(m, kConsFeatures);
  g.candidate_mask = inst.divable;
  g.lower = inst.lower;
  g.upper = inst.upper;

  double cmax = 0.0;
  for (double c : inst.objective) cmax = std::max(cmax, std::abs(c));
  if (cmax == 0.0) cmax = 1.0;

  std::vector<int> var_deg(n, 0);
  std::vector<double> norm(m, 0.0);
  int max_row_deg = 1;
  for (int i = 0; i < m; ++i) {
    auto cols = inst.row_cols(i);
    auto vals = inst.row_values(i);
    double sq = 0.0;
    for (size_t k = 0; k < cols.size(); ++k) {
      var_deg[cols[k]]++;
      sq += vals[k] * vals[k];
    }
    norm[i] = std::sqrt(sq);
    max_row_deg = std::max(max_row_deg, static_cast<int>(cols.size()));
  }
  int max_var_deg = 1;
  for (int d : var_deg) max_var_deg = std::max(max_var_deg, d);
  double max_norm = 0.0;
  for (double v : norm) max_norm = std::max(max_norm, v);
  if (max_norm == 0.0) max_norm = 1.0;

  const Locks locks = compute_locks(inst);
  for (int j = 0; j < n; ++j) {
    const double lo = inst.lower[j];
    const double hi = inst.upper[j];
    const bool flo = is_finite_bound(lo);
    const bool fhi = is_finite_bound(hi);
    const double x = root.x[j];
    auto f = g.var_feats.row(j);
    f(0) = inst.objective[j] / cmax;
    f(1) = flo ? 1.0 : 0.0;
    f(2) = fhi ? 1.0 : 0.0;
    f(3) = flo ? signed_log1p(lo) : 0.0;
    f(4) = fhi ? signed_log1p(hi) : 0.0;
    f(5) = inst.is_integer[j] ? 1.0 : 0.0;
    f(6) = (inst.is_integer[j] && lo == 0.0 && hi == 1.0) ? 1.0 : 0.0;
    f(7) = (flo && fhi && hi > lo) ? (x - lo) / (hi - lo) : signed_log1p(x);
    f(8) = inst.is_integer[j] ? std::abs(x - std::floor(x + 0.5)) : 0.0;
    f(9) = sign_of(duals.reduced_cost(j));
    f(10) = (flo && std::abs(x - lo) <= kBoundTol) ? 1.0 : 0.0;
    f(11) = (fhi && std::abs(x - hi) <= kBoundTol) ? 1.0 : 0.0;
    const double deg = var_deg[j];
    f(12) = deg > 0 ? locks.up[j] / deg : 0.0;
    f(13) = deg > 0 ? locks.down[j] / deg : 0.0;
    f(14) = deg / max_var_deg;
  }

  for (int i = 0; i < m; ++i) {
    auto cols = inst.row_cols(i);
    auto vals = inst.row_values(i);
    const double nrm = norm[i] > 0.0 ? norm[i] : 1.0;
    const double act = inst.row_activity(i, root.x);
    auto f = g.cons_feats.row(i);
    f(0) = inst.sense[i] == RowSense::kLe ? 1.0 : 0.0;
    f(1) = inst.sense[i] == RowSense::kGe ? 1.0 : 0.0;
    f(2) = inst.sense[i] == RowSense::kEq ? 1.0 : 0.0;
    f(3) = inst.rhs[i] / nrm;
    f(4) = norm[i] / max_norm;
    f(5) = duals.y_b[i] * nrm / cmax;
    switch (inst.sense[i]) {
      case RowSense::kLe: f(6) = (inst.rhs[i] - act) / nrm; break;
      case RowSense::kGe: f(6) = (act - inst.rhs[i]) / nrm; break;
      case RowSense::kEq: f(6) = std::abs(act - inst.rhs[i]) / nrm; break;
    }
    f(7) = static_cast<double>(cols.size()) / max_row_deg;
    for (size_t k = 0; k < cols.size(); ++k) {
      g.edge_row.push_back(i);
      g.edge_col.push_back(cols[k]);
      g.edge_coef.push_back(vals[k] / nrm);
    }
  }
  return g;
}

BipartiteGraph concat_graphs(const std::vector<const BipartiteGraph*>& graphs) {
  int n = 0, m = 0;
  for (const auto* g : graphs) {
    n += g->num_vars();
    m += g->num_cons();
  }
  BipartiteGraph out;
  out.var_feats.resize(n, kVarFeatures);
  out.cons_feats.resize(m, kConsFeatures);
  int vo = 0, co = 0;
  for (const auto* g : graphs) {
    out.var_feats.middleRows(vo, g->num_vars()) = g->var_feats;
    out.cons_feats.middleRows(co, g->num_cons()) = g->cons_feats;
    for (int e = 0; e < g->num_edges(); ++e) {
      out.edge_row.push_back(g->edge_row[e] + co);
      out.edge_col.push_back(g->edge_col[e] + vo);
      out.edge_coef.push_back(g->edge_coef[e]);
    }
    out.candidate_mask.insert(out.candidate_mask.end(), g->candidate_mask.begin(), g->candidate_mask.end());
    out.lower.insert(out.lower.end(), g->lower.begin(), g->lower.end());
    out.upper.insert(out.upper.end(), g->upper.begin(), g->upper.end());
    vo += g->num_vars();
    co += g->num_cons();
  }
  return out;
}

}  // namespace divekit
