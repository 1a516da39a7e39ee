#include "divekit/l2dive.hpp"

#include <algorithm>
#include <cmath>

namespace divekit {

namespace {

constexpr double kEqualTol = 1e-9;

}  // namespace

bool TightenSet::contains(int j) const {
  return std::find(lower.begin(), lower.end(), j) != lower.end() ||
         std::find(upper.begin(), upper.end(), j) != upper.end();
}

TightenSet compute_tighten_set(std::span<const int> indices, std::span<const double> x_hat, const LpSolution& sol,
                               const StandardLp& lp, double tol) {
  if (!sol.optimal() || !sol.duals) throw MissingDuals("the tightening set needs duals of an optimal LP");
  if (indices.size() != x_hat.size()) throw ShapeMismatch("one predicted value per index expected");
  const auto& d = *sol.duals;
  TightenSet out;
  for (size_t k = 0; k < indices.size(); ++k) {
    const int j = indices[k];
    // Infinite bounds carry zero duals; skipping them avoids 1e20 * 0 noise.
    if (is_finite_bound(lp.lower[j]) && std::abs((x_hat[k] - lp.lower[j]) * d.y_lb[j]) > tol) out.lower.push_back(j);
    if (is_finite_bound(lp.upper[j]) && std::abs((x_hat[k] - lp.upper[j]) * d.y_ub[j]) > tol) out.upper.push_back(j);
  }
  return out;
}

ScoreDecision direction_decision(int j, double x_hat, double x, double score, DirectionRule rule) {
  ScoreDecision dec;
  dec.var = j;
  dec.value = x_hat;
  dec.score = score;
  if (std::abs(x_hat - x) <= kEqualTol) {
    dec.kind = Tighten::kFix;
  } else if (rule == DirectionRule::kPropositionConsistent) {
    dec.kind = x_hat > x ? Tighten::kLower : Tighten::kUpper;
  } else {
    dec.kind = x_hat < x ? Tighten::kLower : Tighten::kUpper;
  }
  return dec;
}

L2DiveScorer::L2DiveScorer(std::shared_ptr<const GnnParams> model, L2DiveOptions options)
    : model_(std::move(model)), options_(options) {
  if (!model_) throw Error("l2dive needs a model");
}

L2DiveScorer::L2DiveScorer(Prediction fixed, L2DiveOptions options)
    : options_(options), prediction_(std::move(fixed)) {
  if (prediction_.values.size() != prediction_.candidates.size() ||
      prediction_.confidence.size() != prediction_.candidates.size())
    throw ShapeMismatch("prediction arrays differ in length");
}

void L2DiveScorer::begin_dive(const DiveContext& ctx) {
  if (model_) {
    const BipartiteGraph g = extract_graph(*ctx.inst, ctx.root);
    const Eigen::MatrixXd logits = forward(*model_, g, ForwardMode::kEval);
    const auto pred = predicted_distribution(logits, g, model_->config().heads);
    prediction_ = predict_assignment(pred, g, options_.mode, options_.seed + static_cast<uint64_t>(dives_));
    ++predictions_;
  }
  ++dives_;
  slot_.assign(ctx.inst->num_vars, -1);
  for (size_t k = 0; k < prediction_.candidates.size(); ++k) {
    const int j = prediction_.candidates[k];
    if (j < 0 || j >= ctx.inst->num_vars) throw ShapeMismatch("prediction refers to an unknown variable");
    slot_[j] = static_cast<int>(k);
  }
  last_set_ = {};
}

std::optional<ScoreDecision> L2DiveScorer::select(const DiveContext& ctx) {
  std::vector<int> idx;
  std::vector<double> vals;
  for (int j : ctx.candidates)
    if (slot_[j] >= 0) {
      idx.push_back(j);
      vals.push_back(prediction_.values[slot_[j]]);
    }
  if (idx.empty()) return std::nullopt;
  last_set_ = compute_tighten_set(idx, vals, ctx.current, ctx.lp, options_.tol);

  int best = -1;
  double best_score = -1.0;
  for (int j : idx) {
    const double s = prediction_.confidence[slot_[j]] + (last_set_.contains(j) ? 1.0 : 0.0);
    if (s > best_score) {
      best_score = s;
      best = j;
    }
  }
  // The prediction is clamped into the original bounds; the dive may have
  // moved them since, so keep the target inside the current box.
  const double target = std::clamp(prediction_.values[slot_[best]], ctx.lp.lower[best], ctx.lp.upper[best]);
  return direction_decision(best, target, ctx.value(best), best_score, options_.rule);
}

Proposition1Report verify_proposition1(const MilpInstance& inst, std::span<const double> x_tilde, double tol) {
  if (static_cast<int>(x_tilde.size()) != inst.num_vars) throw ShapeMismatch("x_tilde length");
  StandardLp lp = to_standard_form(inst);
  const LpSolution root = solve_lp(lp);
  if (!root.optimal()) throw Error("root LP is not optimal: " + to_string(root.status));

  Proposition1Report rep;
  rep.root_objective = root.objective;
  rep.target_objective = inst.objective_value(x_tilde);
  const std::vector<double> xs = with_slacks(inst, lp, x_tilde);
  std::vector<int> all(lp.num_cols);
  for (int j = 0; j < lp.num_cols; ++j) all[j] = j;
  rep.tighten = compute_tighten_set(all, xs, root, lp, tol);
  for (int j : rep.tighten.lower) lp.lower[j] = std::max(lp.lower[j], xs[j]);
  for (int j : rep.tighten.upper) lp.upper[j] = std::min(lp.upper[j], xs[j]);

  constexpr double kFeasTol = 1e-6;
  rep.feasible = true;
  for (int j = 0; j < lp.num_cols; ++j)
    if (xs[j] < lp.lower[j] - kFeasTol || xs[j] > lp.upper[j] + kFeasTol) rep.feasible = false;
  std::vector<double> act(lp.num_rows, 0.0);
  for (int j = 0; j < lp.num_cols; ++j) {
    auto rows = lp.col_rows(j);
    auto vals = lp.col_values(j);
    for (size_t k = 0; k < rows.size(); ++k) act[rows[k]] += vals[k] * xs[j];
  }
  for (int i = 0; i < lp.num_rows; ++i)
    if (std::abs(act[i] - lp.rhs[i]) > kFeasTol * (1.0 + std::abs(lp.rhs[i]))) rep.feasible = false;

  const LpSolution sol = solve_lp(lp);
  if (!sol.optimal()) throw Error("tightened LP is not optimal: " + to_string(sol.status));
  rep.tightened_objective = sol.objective;
  rep.optimal = std::abs(sol.objective - rep.target_objective) <= 1e-6;
  return rep;
}

}  // namespace divekit
