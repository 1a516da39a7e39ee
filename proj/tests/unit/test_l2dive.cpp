#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "divekit/generators.hpp"
#include "divekit/l2dive.hpp"
#include "divekit/oracles.hpp"
#include "divekit/registry.hpp"
#include "testutil.hpp"

using namespace divekit;

namespace {

// Hand-made context over three binaries and no rows; x and duals are set
// directly rather than solved for.
struct CraftedContext {
  MilpInstance inst;
  DiveContext ctx;
};

CraftedContext crafted(std::vector<double> x, std::vector<double> y_lb, std::vector<double> y_ub) {
  MilpBuilder b("crafted");
  for (size_t j = 0; j < x.size(); ++j) b.add_binary(0.0);
  CraftedContext c{std::move(b).build(), {}};
  c.ctx.inst = &c.inst;
  c.ctx.lp = to_standard_form(c.inst);
  c.ctx.current.status = LpStatus::kOptimal;
  c.ctx.current.x = x;
  c.ctx.current.duals = DualValues{{}, y_lb, y_ub};
  c.ctx.root = c.ctx.current;
  for (size_t j = 0; j < x.size(); ++j) c.ctx.candidates.push_back(static_cast<int>(j));
  return c;
}

Prediction fixed_prediction(std::vector<int> cands, std::vector<double> values, std::vector<double> conf) {
  return Prediction{std::move(cands), std::move(values), std::move(conf)};
}

// Condition scan written from the sign cases: with y_lb >= 0 and y_ub <= 0,
// slackness fails at the lower bound iff the dual is positive and x_hat is
// off that bound, and likewise at the upper bound.
std::pair<std::vector<int>, std::vector<int>> scan(const StandardLp& lp, const DualValues& d,
                                                   const std::vector<double>& xh, double tol) {
  std::vector<int> lo, hi;
  for (int j = 0; j < lp.num_cols; ++j) {
    const double off_lower = xh[j] - lp.lower[j];
    const double off_upper = lp.upper[j] - xh[j];
    if (d.y_lb[j] > 0 && off_lower * d.y_lb[j] > tol) lo.push_back(j);
    if (d.y_ub[j] < 0 && off_upper * -d.y_ub[j] > tol) hi.push_back(j);
  }
  return {lo, hi};
}

MilpInstance fractional_binary_instance(Rng& rng, int n, int m, int& seed) {
  for (;;) {
    auto inst = testutil::random_binary_instance(rng, n, m, "r" + std::to_string(seed++));
    const auto root = solve_lp(to_standard_form(inst));
    if (root.optimal() && !is_integral(inst, root.x)) return inst;
  }
}

}  // namespace

TEST(TightenSet, EmptyAtIntegralLpOptimum) {
  const auto inst = make_independent_set(5, {});
  const auto lp = to_standard_form(inst);
  const auto root = solve_lp(lp);
  ASSERT_TRUE(root.optimal());
  ASSERT_TRUE(is_integral(inst, root.x));
  std::vector<int> idx(lp.num_cols);
  for (int j = 0; j < lp.num_cols; ++j) idx[j] = j;
  EXPECT_TRUE(compute_tighten_set(idx, root.x, root, lp).empty());
}

TEST(TightenSet, PositiveLowerDualOffBound) {
  auto c = crafted({0.0, 0.5, 0.5}, {0.3, 0, 0}, {0, 0, 0});
  const std::vector<int> idx = {0};
  const std::vector<double> xh = {1.0};
  const auto t = compute_tighten_set(idx, xh, c.ctx.current, c.ctx.lp);
  EXPECT_EQ(t.lower, std::vector<int>{0});
  EXPECT_TRUE(t.upper.empty());
}

TEST(TightenSet, MatchesConditionScanOnRandomLps) {
  Rng rng(12);
  int checked = 0;
  while (checked < 100) {
    const auto lp = testutil::random_bounded_lp(rng, 4, 2);
    const auto sol = solve_lp(lp);
    if (!sol.optimal()) continue;
    std::vector<double> xh(4);
    for (int j = 0; j < 4; ++j) xh[j] = static_cast<double>(rng.uniform_int(static_cast<int64_t>(lp.lower[j]),
                                                                            static_cast<int64_t>(lp.upper[j])));
    const std::vector<int> idx = {0, 1, 2, 3};
    const auto t = compute_tighten_set(idx, xh, sol, lp);
    const auto [lo, hi] = scan(lp, *sol.duals, xh, 1e-7);
    EXPECT_EQ(t.lower, lo);
    EXPECT_EQ(t.upper, hi);
    // Under the dual split a column never carries both bound duals.
    for (int j = 0; j < 4; ++j) EXPECT_FALSE(sol.duals->y_lb[j] > 0 && sol.duals->y_ub[j] < 0);
    ++checked;
  }
}

TEST(TightenSet, RequiresDuals) {
  Rng rng(1);
  const auto lp = testutil::random_bounded_lp(rng, 3, 1);
  LpSolution sol;
  sol.status = LpStatus::kIterationLimit;
  const std::vector<int> idx = {0};
  const std::vector<double> xh = {0.0};
  EXPECT_THROW(compute_tighten_set(idx, xh, sol, lp), MissingDuals);
}

TEST(L2DiveScore, MembershipDominatesConfidence) {
  // j = 0 in J with q = 0.6, j = 1 outside J with q = 0.99.
  auto c = crafted({0.0, 0.5}, {0.4, 0}, {0, 0});
  L2DiveScorer s(fixed_prediction({0, 1}, {1, 1}, {0.6, 0.99}));
  s.begin_dive(c.ctx);
  const auto d = s.select(c.ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_NEAR(d->score, 1.6, 1e-15);
}

TEST(L2DiveScore, EmptySetOrdersByConfidence) {
  auto c = crafted({0.5, 0.5, 0.5}, {0, 0, 0}, {0, 0, 0});
  L2DiveScorer s(fixed_prediction({0, 1, 2}, {1, 0, 1}, {0.7, 0.95, 0.8}));
  s.begin_dive(c.ctx);
  const auto d = s.select(c.ctx);
  ASSERT_TRUE(d);
  EXPECT_TRUE(s.last_tighten_set().empty());
  EXPECT_EQ(d->var, 1);
  EXPECT_EQ(d->kind, Tighten::kUpper);
  EXPECT_EQ(d->value, 0.0);
}

TEST(L2DiveScore, CraftedThreeCandidates) {
  // x* = (0.4, 1, 0), y_lb = (0, 0, 0.5), y_ub = (0, -0.2, 0),
  // x_hat = (1, 0, 1), q = (0.7, 0.9, 0.6).
  // J_upper = {1}: (0 - 1)(-0.2) = 0.2.  J_lower = {2}: (1 - 0)(0.5) = 0.5.
  // Scores 0.7, 1.9, 1.6: pick 1; x_hat < x* lowers its upper bound to 0.
  auto c = crafted({0.4, 1.0, 0.0}, {0, 0, 0.5}, {0, -0.2, 0});
  L2DiveScorer s(fixed_prediction({0, 1, 2}, {1, 0, 1}, {0.7, 0.9, 0.6}));
  s.begin_dive(c.ctx);
  auto d = s.select(c.ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(s.last_tighten_set().upper, std::vector<int>{1});
  EXPECT_EQ(s.last_tighten_set().lower, std::vector<int>{2});
  EXPECT_EQ(d->var, 1);
  EXPECT_NEAR(d->score, 1.9, 1e-15);
  EXPECT_EQ(d->kind, Tighten::kUpper);
  EXPECT_EQ(d->value, 0.0);
  // Without candidate 1: pick 2, x_hat > x* raises its lower bound to 1.
  c.ctx.candidates = {0, 2};
  d = s.select(c.ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 2);
  EXPECT_EQ(d->kind, Tighten::kLower);
  EXPECT_EQ(d->value, 1.0);
  // Without candidates 1 and 2: pick 0, also upward.
  c.ctx.candidates = {0};
  d = s.select(c.ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_EQ(d->kind, Tighten::kLower);
}

TEST(L2DiveScore, EqualValueFixes) {
  const auto d = direction_decision(3, 1.0, 1.0, 0.5, DirectionRule::kPropositionConsistent);
  EXPECT_EQ(d.kind, Tighten::kFix);
  EXPECT_EQ(d.value, 1.0);
  EXPECT_EQ(direction_decision(3, 1.0, 1.0, 0.5, DirectionRule::kVerbatim).kind, Tighten::kFix);
}

TEST(L2DiveScore, VerbatimRuleLeavesBinaryBoundsUnchanged) {
  // With x* strictly inside [0, 1], the verbatim rule moves a binary's bound
  // to the side it already sits on; the default rule tightens.
  for (double xstar : {0.2, 0.5, 0.8}) {
    for (double xh : {0.0, 1.0}) {
      const auto v = direction_decision(0, xh, xstar, 1.0, DirectionRule::kVerbatim);
      const double lo = v.kind == Tighten::kLower ? std::max(0.0, v.value) : 0.0;
      const double hi = v.kind == Tighten::kUpper ? std::min(1.0, v.value) : 1.0;
      EXPECT_EQ(lo, 0.0);
      EXPECT_EQ(hi, 1.0);
      const auto p = direction_decision(0, xh, xstar, 1.0, DirectionRule::kPropositionConsistent);
      const double plo = p.kind == Tighten::kLower ? std::max(0.0, p.value) : 0.0;
      const double phi = p.kind == Tighten::kUpper ? std::min(1.0, p.value) : 1.0;
      EXPECT_EQ(plo, xh);
      EXPECT_EQ(phi, xh);
    }
  }
}

TEST(L2DiveScore, VerbatimRuleStallsADive) {
  Rng rng(3);
  int seed = 0;
  const auto inst = fractional_binary_instance(rng, 8, 5, seed);
  const auto opt = oracle::brute_force(inst);
  ASSERT_TRUE(opt.feasible);
  const auto& xt = opt.optimal_points.front();
  std::vector<int> cands;
  std::vector<double> vals, conf;
  for (int j = 0; j < inst.num_vars; ++j) {
    cands.push_back(j);
    vals.push_back(xt[j]);
    conf.push_back(0.9);
  }
  DiveOptions o;
  o.d_max = 20;
  auto ctx = make_root_context(inst, o);
  L2DiveOptions lo;
  lo.rule = DirectionRule::kVerbatim;
  L2DiveScorer verbatim(fixed_prediction(cands, vals, conf), lo);
  const auto before_lo = ctx.lp.lower, before_hi = ctx.lp.upper;
  const double before_z = ctx.current.objective;
  const auto r = dive(ctx, verbatim);
  // Every fractional pick is a no-op, so the LP never changes and the dive
  // runs out its depth.
  EXPECT_EQ(r.termination, DiveTermination::kDepthLimit);
  EXPECT_NEAR(ctx.current.objective, before_z, 1e-9);
  int changed = 0;
  for (int j = 0; j < inst.num_vars; ++j)
    if (ctx.lp.lower[j] != before_lo[j] || ctx.lp.upper[j] != before_hi[j]) ++changed;
  EXPECT_LT(changed, inst.num_vars);

  auto ctx2 = make_root_context(inst, o);
  L2DiveScorer consistent(fixed_prediction(cands, vals, conf));
  const auto r2 = dive(ctx2, consistent);
  EXPECT_FALSE(r2.solutions.empty());
  EXPECT_NEAR(r2.best_z, opt.optimum, 1e-6);
}

TEST(Proposition1, BruteForcedOptimum) {
  Rng rng(44);
  int seed = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto inst = fractional_binary_instance(rng, 8, 5, seed);
    const auto opt = oracle::brute_force(inst);
    ASSERT_TRUE(opt.feasible);
    const auto r = verify_proposition1(inst, opt.optimal_points.front());
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(r.optimal) << r.tightened_objective << " vs " << r.target_objective;
  }
}

TEST(Proposition1, IntegralRootNeedsNoTightening) {
  const auto inst = make_independent_set(6, {});
  const auto root = solve_lp(to_standard_form(inst));
  const auto r = verify_proposition1(inst, std::vector<double>(root.x.begin(), root.x.begin() + inst.num_vars));
  EXPECT_TRUE(r.tighten.empty());
  EXPECT_TRUE(r.optimal);
  EXPECT_NEAR(r.tightened_objective, r.root_objective, 1e-12);
}

TEST(Proposition1, RandomFeasiblePoints) {
  Rng rng(90);
  int seed = 0, pairs = 0;
  for (int k = 0; k < 10; ++k) {
    const auto inst = fractional_binary_instance(rng, 9, 5, seed);
    const auto ref = oracle::brute_force(inst, 1e-9, 1 << 12, true);
    ASSERT_TRUE(ref.feasible);
    for (int t = 0; t < 5; ++t) {
      const auto& xt = ref.feasible_points[rng.uniform_int(0, static_cast<int64_t>(ref.feasible_points.size()) - 1)];
      const auto r = verify_proposition1(inst, xt);
      EXPECT_TRUE(r.feasible);
      EXPECT_TRUE(r.optimal) << inst.name << ": " << r.tightened_objective << " vs " << r.target_objective;
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 50);
}

TEST(L2DiveDive, FeasiblePredictionReachesItsObjective) {
  Rng rng(17);
  int seed = 0;
  for (int k = 0; k < 10; ++k) {
    const auto inst = fractional_binary_instance(rng, 10, 6, seed);
    const auto ref = oracle::brute_force(inst, 1e-9, 1 << 12, true);
    ASSERT_TRUE(ref.feasible);
    const auto& xt = ref.feasible_points[rng.uniform_int(0, static_cast<int64_t>(ref.feasible_points.size()) - 1)];
    std::vector<int> cands;
    std::vector<double> conf;
    for (int j = 0; j < inst.num_vars; ++j) {
      cands.push_back(j);
      conf.push_back(rng.uniform(0.5, 1.0));
    }
    L2DiveScorer s(fixed_prediction(cands, xt, conf));
    auto ctx = make_root_context(inst, {});
    const auto r = dive(ctx, s);
    ASSERT_FALSE(r.solutions.empty()) << inst.name;
    EXPECT_LE(r.best_z, inst.objective_value(xt) + 1e-6);
    for (const auto& x : r.solutions) EXPECT_TRUE(oracle::feasible(inst, x, 1e-6));
  }
}

TEST(L2DiveDive, PredictsOncePerDive) {
  const auto inst = generate_set_cover(15, 30, 0.15, 2);
  auto model = std::make_shared<GnnParams>(GnnParams::init({16, 4}, 3));
  L2DiveScorer s(model);
  auto ctx = make_root_context(inst, {});
  const auto r = dive(ctx, s);
  EXPECT_EQ(s.predictions_made(), 1);
  // The prediction held by the scorer is still the one a fresh forward pass
  // gives: nothing mutated it during the dive.
  const auto g = extract_graph(inst, ctx.root);
  const auto fresh = predict_assignment(predicted_distribution(forward(*model, g, ForwardMode::kEval), g, 4), g,
                                        PredictMode::kMode);
  EXPECT_EQ(s.prediction().values, fresh.values);
  EXPECT_EQ(s.prediction().confidence, fresh.confidence);
  EXPECT_LE(r.depth_reached, 100);
  auto ctx2 = make_root_context(inst, {});
  dive(ctx2, s);
  EXPECT_EQ(s.predictions_made(), 2);
}

TEST(Registry, EveryNameBuilds) {
  ScorerOptions o;
  o.model = std::make_shared<GnnParams>(GnnParams::init({8, 2}, 1));
  for (const auto& name : registered_divers()) {
    auto s = make_scorer(name, o);
    ASSERT_TRUE(s);
    EXPECT_EQ(s->name(), name);
  }
  EXPECT_THROW(make_scorer("nope", o), Error);
  EXPECT_THROW(make_scorer("l2dive", {}), Error);
}

TEST(Registry, HookDivesInsideBranchAndBound) {
  const auto inst = generate_set_cover(20, 40, 0.1, 9);
  SolveConfig cfg;
  cfg.divers.push_back({"fractional", 0, 0, make_dive_hook("fractional", {}, {})});
  const auto res = branch_and_bound(inst, cfg);
  EXPECT_EQ(res.stats.dive_calls, 1);
  EXPECT_EQ(res.status, SolveStatus::kOptimalProven);
}
