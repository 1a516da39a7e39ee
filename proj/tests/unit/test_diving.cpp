#include <gtest/gtest.h>

#include "divekit/diving.hpp"
#include "divekit/generators.hpp"
#include "divekit/oracles.hpp"
#include "testutil.hpp"

using namespace divekit;

namespace {

// A context with a hand-set LP point; bounds [0, 5] for every variable.
DiveContext synthetic_context(const MilpInstance& inst, std::vector<double> x, std::vector<double> root) {
  DiveContext ctx;
  ctx.inst = &inst;
  ctx.lp = to_standard_form(inst);
  ctx.current.status = LpStatus::kOptimal;
  ctx.current.x = std::move(x);
  ctx.root.status = LpStatus::kOptimal;
  ctx.root.x = std::move(root);
  ctx.locks = compute_locks(inst);
  ctx.degree.assign(inst.num_vars, 0);
  for (int k = 0; k < inst.num_nonzeros(); ++k) ctx.degree[inst.col_index[k]]++;
  for (int j = 0; j < inst.num_vars; ++j)
    if (inst.divable[j]) ctx.candidates.push_back(j);
  return ctx;
}

MilpInstance box_instance(int n, std::vector<double> cost = {}) {
  MilpBuilder b;
  for (int j = 0; j < n; ++j) b.add_var(0, 5, cost.empty() ? 0.0 : cost[j], true);
  std::vector<RowEntry> row;
  for (int j = 0; j < n; ++j) row.push_back({j, 1.0});
  b.add_row(row, RowSense::kLe, 100);
  return std::move(b).build();
}

MilpInstance fractional_cover(uint64_t start) {
  for (uint64_t seed = start;; ++seed) {
    auto inst = generate_set_cover(30, 60, 0.1, seed);
    const auto root = solve_lp(to_standard_form(inst));
    if (!is_integral(inst, root.x)) return inst;
  }
}

}  // namespace

TEST(Fractional, PicksLeastFractional) {
  const auto inst = box_instance(2);
  auto ctx = synthetic_context(inst, {0.9, 0.5}, {0, 0});
  FractionalScorer s;
  const auto d = s.select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_EQ(d->kind, Tighten::kLower);
  EXPECT_EQ(d->value, 1.0);
  EXPECT_NEAR(d->score, -0.1, 1e-12);
}

TEST(Fractional, TieGoesToLowestIndexAndHalfRoundsUp) {
  const auto inst = box_instance(2);
  auto ctx = synthetic_context(inst, {2.5, 1.5}, {0, 0});
  const auto d = FractionalScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_EQ(d->kind, Tighten::kLower);
  EXPECT_EQ(d->value, 3.0);
}

TEST(Coefficient, FewestLocksWins) {
  // x0 is in three LE rows (3 up-locks), x1 in one.
  MilpBuilder b;
  b.add_var(0, 1, 0, true);
  b.add_var(0, 1, 0, true);
  b.add_row({{0, 1.0}, {1, 1.0}}, RowSense::kLe, 2);
  b.add_row({{0, 1.0}}, RowSense::kLe, 2);
  b.add_row({{0, 1.0}}, RowSense::kLe, 2);
  const auto inst = std::move(b).build();
  auto ctx = synthetic_context(inst, {0.5, 0.3}, {0, 0});
  const auto d = CoefficientScorer().select(ctx);
  ASSERT_TRUE(d);
  // Both have zero down-locks; ties broken by fractionality -> x1 (0.3).
  EXPECT_EQ(d->var, 1);
  EXPECT_EQ(d->kind, Tighten::kUpper);  // fewer down-locks than up-locks
  EXPECT_EQ(d->value, 0.0);
}

TEST(Coefficient, DirectionFollowsFewerLocks) {
  MilpBuilder b;
  b.add_var(0, 1, 0, true);
  b.add_row({{0, 1.0}}, RowSense::kGe, 0);
  b.add_row({{0, 1.0}}, RowSense::kGe, 0);
  b.add_row({{0, 1.0}}, RowSense::kLe, 2);
  const auto inst = std::move(b).build();
  auto ctx = synthetic_context(inst, {0.2}, {0});
  const auto locks = compute_locks(inst);
  ASSERT_EQ(locks.down[0], 2);
  ASSERT_EQ(locks.up[0], 1);
  const auto d = CoefficientScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->kind, Tighten::kLower);
  EXPECT_EQ(d->value, 1.0);
}

TEST(Linesearch, RayIntersection) {
  const auto inst = box_instance(2);
  auto ctx = synthetic_context(inst, {0.8, 0.4}, {0.0, 0.0});
  const auto d = LinesearchScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_EQ(d->kind, Tighten::kLower);
  EXPECT_NEAR(d->score, -1.25, 1e-12);
}

TEST(Linesearch, ZeroRayFallsBackToFractional) {
  const auto inst = box_instance(2);
  auto ctx = synthetic_context(inst, {0.3, 0.9}, {0.3, 0.9});
  const auto d = LinesearchScorer().select(ctx);
  const auto f = FractionalScorer().select(ctx);
  ASSERT_TRUE(d && f);
  EXPECT_EQ(d->var, f->var);
  EXPECT_EQ(d->value, f->value);
}

TEST(Linesearch, SingleFractionalChosen) {
  const auto inst = box_instance(2);
  auto ctx = synthetic_context(inst, {1.0, 0.01}, {0.0, 0.0});
  const auto d = LinesearchScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 1);
}

TEST(VectorLength, HandRatios) {
  // c = 1, x = 0.4, 5 rows: up ratio 0.6/5 = 0.12, down ratio 1e-9/5.
  MilpBuilder b;
  b.add_var(0, 1, 1, true);
  for (int i = 0; i < 5; ++i) b.add_row({{0, 1.0}}, RowSense::kLe, 2);
  const auto inst = std::move(b).build();
  auto ctx = synthetic_context(inst, {0.4}, {0});
  const auto d = VectorLengthScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->kind, Tighten::kUpper);
  EXPECT_NEAR(d->score, -2e-10, 1e-22);
}

TEST(VectorLength, EqualDeltasLowestIndex) {
  const auto inst = box_instance(3, {0, 0, 0});
  auto ctx = synthetic_context(inst, {1.5, 0.5, 2.5}, {0, 0, 0});
  const auto d = VectorLengthScorer().select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 0);
  EXPECT_EQ(d->kind, Tighten::kUpper);
}

TEST(Pseudocost, ColdStartUsesObjective) {
  const auto inst = box_instance(2, {4.0, 1.0});
  auto ctx = synthetic_context(inst, {0.5, 0.5}, {0, 0});
  PseudocostScorer s;
  s.begin_dive(ctx);
  EXPECT_EQ(s.estimate(0, true), 4.0);
  const auto d = s.select(ctx);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->var, 1);  // 1.0 * 0.5 < 4.0 * 0.5
}

TEST(Pseudocost, RunningMeans) {
  const auto inst = box_instance(2, {4.0, 1.0});
  auto ctx = synthetic_context(inst, {0.5, 0.5}, {0, 0});
  PseudocostScorer s;
  s.begin_dive(ctx);
  s.observe({0, true, 0.5, 1.0});  // 2 per unit
  EXPECT_DOUBLE_EQ(s.estimate(0, true), 2.0);
  EXPECT_EQ(s.samples(0, true), 1);
  // Second dive on the same instance keeps the statistics.
  s.begin_dive(ctx);
  s.observe({0, true, 0.25, 1.5});  // 6 per unit
  s.observe({0, false, 0.8, 0.4});  // 0.5 per unit
  EXPECT_DOUBLE_EQ(s.estimate(0, true), 4.0);
  EXPECT_DOUBLE_EQ(s.estimate(0, false), 0.5);
  EXPECT_DOUBLE_EQ(s.estimate(1, false), 1.0);
  s.observe({1, false, 0.0, 3.0});  // zero distance ignored
  EXPECT_EQ(s.samples(1, false), 0);
}

TEST(BoundScorers, LowerUpperRandom) {
  const auto inst = box_instance(3);
  auto ctx = synthetic_context(inst, {0.5, 0.5, 0.5}, {0, 0, 0});
  ctx.candidates = {1, 2};
  auto lo = BoundScorer(BoundSide::kLower).select(ctx);
  auto hi = BoundScorer(BoundSide::kUpper).select(ctx);
  ASSERT_TRUE(lo && hi);
  EXPECT_EQ(lo->var, 1);
  EXPECT_EQ(lo->kind, Tighten::kFix);
  EXPECT_EQ(lo->value, 0.0);
  EXPECT_EQ(hi->value, 5.0);
  BoundScorer r1(BoundSide::kRandom, 17), r2(BoundSide::kRandom, 17);
  for (int k = 0; k < 50; ++k) EXPECT_EQ(r1.select(ctx)->value, r2.select(ctx)->value);
}

TEST(Dive, IntegralRootStopsAtDepthZero) {
  MilpBuilder b;
  b.add_binary(1);
  b.add_binary(1);
  b.add_row({{0, 1.0}, {1, 1.0}}, RowSense::kGe, 1);
  const auto inst = std::move(b).build();
  auto ctx = make_root_context(inst, {});
  FractionalScorer s;
  const auto res = dive(ctx, s);
  EXPECT_EQ(res.termination, DiveTermination::kIntegral);
  EXPECT_EQ(res.depth_reached, 0);
  ASSERT_EQ(res.solutions.size(), 1u);
  EXPECT_DOUBLE_EQ(res.best_z, 1.0);
}

TEST(Dive, ZeroDepthOnlyRounds) {
  const auto inst = fractional_cover(0);
  DiveOptions opt;
  opt.d_max = 0;
  auto ctx = make_root_context(inst, opt);
  FractionalScorer s;
  const auto res = dive(ctx, s);
  EXPECT_EQ(res.depth_reached, 0);
  EXPECT_EQ(res.termination, DiveTermination::kDepthLimit);
  EXPECT_EQ(res.lp_iterations, 0);
}

TEST(Dive, SolutionsPassIndependentChecker) {
  const auto inst = generate_set_cover(6, 10, 0.3, 1);
  std::vector<std::unique_ptr<Scorer>> scorers;
  scorers.push_back(std::make_unique<FractionalScorer>());
  scorers.push_back(std::make_unique<CoefficientScorer>());
  scorers.push_back(std::make_unique<LinesearchScorer>());
  scorers.push_back(std::make_unique<VectorLengthScorer>());
  scorers.push_back(std::make_unique<PseudocostScorer>());
  scorers.push_back(std::make_unique<BoundScorer>(BoundSide::kLower));
  scorers.push_back(std::make_unique<BoundScorer>(BoundSide::kUpper));
  scorers.push_back(std::make_unique<BoundScorer>(BoundSide::kRandom, 3));
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto cover = fractional_cover(seed * 7);
    for (auto& s : scorers) {
      for (const auto* in : {&inst, &cover}) {
        auto ctx = make_root_context(*in, {});
        const size_t c0 = ctx.candidates.size();
        const auto res = dive(ctx, *s);
        EXPECT_LE(res.depth_reached, 100);
        EXPECT_LE(ctx.candidates.size(), c0);
        EXPECT_NE(res.termination, DiveTermination::kAborted) << s->name();
        double best = kInfinity;
        for (const auto& x : res.solutions) {
          EXPECT_TRUE(oracle::feasible(*in, x)) << s->name();
          best = std::min(best, in->objective_value(x));
        }
        EXPECT_EQ(best, res.best_z);
      }
    }
  }
}

TEST(Dive, LowerDiverOnEdgelessIndependentSet) {
  const auto inst = make_independent_set(5, {});
  // The LP is integral at the root (x = 1); force a real dive by starting
  // from a hand-made fractional node.
  auto ctx = make_root_context(inst, {});
  BoundScorer lower(BoundSide::kLower);
  ctx.current.x.assign(ctx.current.x.size(), 0.5);
  const auto res = dive(ctx, lower);
  // Fixing x0 = 0 and resolving gives the integral point (0,1,1,1,1).
  ASSERT_FALSE(res.solutions.empty());
  EXPECT_EQ(res.termination, DiveTermination::kIntegral);
  EXPECT_EQ(res.depth_reached, 1);
  EXPECT_DOUBLE_EQ(res.best_z, -4.0);
}

TEST(Dive, CutoffStopsDive) {
  const auto inst = fractional_cover(3);
  DiveOptions opt;
  auto ctx = make_root_context(inst, opt);
  ctx.options.cutoff = ctx.current.objective + 1e-6;
  BoundScorer upper(BoundSide::kUpper);
  const auto res = dive(ctx, upper);
  EXPECT_TRUE(res.termination == DiveTermination::kCutoffExceeded || res.termination == DiveTermination::kIntegral);
}

TEST(Dive, IterationLimit) {
  const auto inst = fractional_cover(5);
  DiveOptions opt;
  opt.lp_iter_limit = 0;
  auto ctx = make_root_context(inst, opt);
  BoundScorer upper(BoundSide::kUpper);
  const auto res = dive(ctx, upper);
  EXPECT_TRUE(res.termination == DiveTermination::kIterLimit || res.depth_reached > 0);
}

namespace {

// Replays a fixed list of decisions, then gives up.
struct ScriptedScorer : Scorer {
  std::vector<ScoreDecision> script;
  size_t next = 0;
  std::string name() const override { return "scripted"; }
  std::optional<ScoreDecision> select(const DiveContext&) override {
    if (next >= script.size()) return std::nullopt;
    return script[next++];
  }
};

}  // namespace

TEST(Dive, TighteningKeptByLpSolutionIsFree) {
  const auto inst = fractional_cover(40);
  auto ctx = make_root_context(inst, {});
  ScriptedScorer s;
  int zeros = 0;
  for (int j : ctx.candidates)
    if (ctx.value(j) < 1e-12 && zeros++ < 5) s.script.push_back({j, Tighten::kFix, 0.0, 0.0});
  ASSERT_GE(zeros, 5);
  const auto before = ctx.current.x;
  const auto res = dive(ctx, s);
  EXPECT_EQ(res.free_tightenings, 5);
  EXPECT_EQ(res.depth_reached, 0);
  EXPECT_EQ(res.termination, DiveTermination::kAborted);
  EXPECT_EQ(res.lp_iterations, 0);
  EXPECT_EQ(ctx.current.x, before);
  EXPECT_EQ(ctx.candidates.size() + 5, make_root_context(inst, {}).candidates.size());
}

TEST(Dive, TighteningThatMovesNoBoundCostsDepth) {
  const auto inst = fractional_cover(40);
  auto ctx = make_root_context(inst, {});
  ScriptedScorer s;
  const int j = ctx.candidates.front();
  for (int k = 0; k < 3; ++k) s.script.push_back({j, Tighten::kUpper, 1.0, 0.0});
  const auto res = dive(ctx, s);
  EXPECT_EQ(res.free_tightenings, 0);
  EXPECT_EQ(res.depth_reached, 3);
}

TEST(Dive, CutOffSolutionResolves) {
  const auto inst = fractional_cover(40);
  auto ctx = make_root_context(inst, {});
  int frac = -1;
  for (int j : ctx.candidates)
    if (is_fractional(ctx.value(j))) frac = j;
  ASSERT_GE(frac, 0);
  ScriptedScorer s;
  s.script.push_back({frac, Tighten::kFix, 1.0, 0.0});
  const auto res = dive(ctx, s);
  EXPECT_EQ(res.depth_reached, 1);
  EXPECT_EQ(res.free_tightenings, 0);
  EXPECT_NEAR(ctx.value(frac), 1.0, 1e-9);
}
