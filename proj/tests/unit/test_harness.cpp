#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "divekit/generators.hpp"
#include "divekit/harness.hpp"
#include "divekit/oracles.hpp"
#include "testutil.hpp"

using namespace divekit;

namespace {

SolveTrace trace_of(std::initializer_list<TracePoint> pts) {
  SolveTrace t;
  for (const auto& p : pts) t.record(p.time, p.work, p.primal, p.dual);
  return t;
}

// Small set covers whose root LP is fractional, so collection keeps them.
std::vector<MilpInstance> small_set_covers(int count, uint64_t seed) {
  std::vector<MilpInstance> out;
  for (uint64_t k = 0; static_cast<int>(out.size()) < count; ++k) {
    auto inst = generate_set_cover(25, 16, 0.12, derive_seed(seed, k));
    if (!is_integral(inst, solve_lp(to_standard_form(inst)).x)) out.push_back(std::move(inst));
  }
  return out;
}

CollectConfig quick_collect() {
  CollectConfig cfg;
  cfg.solve.time_limit = 1e9;
  cfg.solve.node_limit = 20000;
  return cfg;
}

}  // namespace

TEST(Metrics, PrimalDualGapFixtures) {
  EXPECT_NEAR(primal_dual_gap(5.0, 5.0), 0.0, 1e-12);
  EXPECT_NEAR(primal_dual_gap(2.0, 1.0), 0.5, 1e-12);
  EXPECT_NEAR(primal_dual_gap(1.0, -1.0), 1.0, 1e-12);
  EXPECT_EQ(primal_dual_gap(0.0, 0.0), 1.0);
  EXPECT_EQ(primal_dual_gap(kInfinity, 3.0), 1.0);
  EXPECT_EQ(primal_dual_gap(3.0, -kInfinity), 1.0);
  EXPECT_EQ(primal_dual_gap(HUGE_VAL, 1.0), 1.0);
  EXPECT_NEAR(primal_dual_gap(-2.0, -4.0), 0.5, 1e-12);
}

TEST(Metrics, GapStaysInUnitInterval) {
  Rng rng(3);
  for (int k = 0; k < 1000; ++k) {
    const double d = rng.uniform(-100.0, 100.0);
    const double p = d + rng.uniform(0.0, 100.0);
    const double g = primal_dual_gap(p, d);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(Metrics, StepIntegralFixture) {
  // Gap 1 on [0, 2), 0.5 on [2, 4).
  const auto t = trace_of({{2.0, 0.0, 2.0, 1.0}});
  EXPECT_NEAR(primal_dual_integral(t, 4.0), 3.0, 1e-12);
}

TEST(Metrics, IntegralTrivialCases) {
  EXPECT_NEAR(primal_dual_integral(SolveTrace{}, 10.0), 10.0, 1e-12);
  const auto solved = trace_of({{0.0, 0.0, 7.0, 7.0}});
  EXPECT_NEAR(primal_dual_integral(solved, 10.0), 0.0, 1e-12);
}

TEST(Metrics, IntegralUsesChosenClock) {
  const auto t = trace_of({{1.0, 30.0, 4.0, 2.0}, {2.0, 50.0, 4.0, 4.0}});
  EXPECT_NEAR(primal_dual_integral(t, 100.0, SolveTrace::Clock::kWork), 30.0 + 0.5 * 20.0, 1e-12);
  EXPECT_NEAR(primal_dual_integral(t, 100.0, SolveTrace::Clock::kWall), 1.0 + 0.5, 1e-12);
}

TEST(Metrics, IntegralIgnoresEventsAfterHorizon) {
  const auto t = trace_of({{5.0, 0.0, 2.0, 1.0}});
  EXPECT_NEAR(primal_dual_integral(t, 4.0), 4.0, 1e-12);
}

TEST(Metrics, IntegralBoundedByHorizon) {
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    SolveTrace t;
    double time = 0.0, primal = 100.0, dual = 1.0;
    for (int i = 0; i < 6; ++i) {
      time += rng.uniform(0.0, 3.0);
      primal -= rng.uniform(0.0, 10.0);
      dual += rng.uniform(0.0, 5.0);
      t.record(time, 0.0, primal, dual);
    }
    const double v = primal_dual_integral(t, 10.0);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 10.0 + 1e-12);
  }
}

TEST(Metrics, PrimalGapIsUnnormalized) {
  EXPECT_NEAR(primal_gap(12.0, 12.0), 0.0, 1e-12);
  EXPECT_NEAR(primal_gap(15.0, 12.0), 3.0, 1e-12);
}

TEST(Metrics, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(kInfinity), "inf");
  EXPECT_EQ(format_number(-kInfinity), "-inf");
  EXPECT_EQ(format_number(0.5), "0.5");
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(Metrics, FamilyFromName) {
  EXPECT_EQ(family_of(generate_set_cover(5, 6, 0.5, 1).name), Family::kSetCover);
  EXPECT_EQ(family_of(generate_indep_set(8, 2, 1).name), Family::kIndepSet);
  EXPECT_FALSE(family_of("rand").has_value());
}

TEST(ParallelFor, EveryIndexOnceAndRethrows) {
  std::vector<int> hits(100, 0);
  parallel_for(100, 4, [&](size_t i) { ++hits[i]; });
  for (int h : hits) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(10, 3, [](size_t i) { if (i == 7) throw Error("boom"); }), Error);
}

TEST(Collect, DropsRootSolvedAndKeepsOrder) {
  std::vector<MilpInstance> insts = small_set_covers(3, 11);
  insts.insert(insts.begin() + 1, make_independent_set(5, {}, "indset-edgeless"));
  const auto rep = collect_data(insts, quick_collect());
  EXPECT_EQ(rep.dropped_root_solved, 1);
  EXPECT_EQ(rep.failed, 0);
  ASSERT_EQ(rep.corpus.entries.size(), 3u);
  EXPECT_EQ(rep.corpus.entries[0].instance.name, insts[0].name);
  EXPECT_EQ(rep.corpus.entries[1].instance.name, insts[2].name);
  EXPECT_EQ(rep.corpus.entries[2].instance.name, insts[3].name);
}

TEST(Collect, BestObjectiveMatchesBruteForce) {
  const auto rep = collect_data(small_set_covers(4, 21), quick_collect());
  for (const auto& e : rep.corpus.entries) {
    ASSERT_TRUE(e.proven);
    const auto ref = oracle::brute_force(e.instance, 1e-9, 1 << 17, false);
    EXPECT_NEAR(e.best_z, ref.optimum, 1e-6) << e.instance.name;
  }
}

TEST(Collect, SymmetricFamilyPoolSharesOptimum) {
  // Set cover is flagged symmetric: the pool holds enumerated optima.
  const auto rep = collect_data(small_set_covers(4, 31), quick_collect());
  ASSERT_FALSE(rep.corpus.entries.empty());
  for (const auto& e : rep.corpus.entries) {
    EXPECT_TRUE(e.augmented);
    EXPECT_GE(e.pool.size(), 1u);
    for (const auto& s : e.pool.entries()) EXPECT_NEAR(s.z, e.best_z, 1e-6);
  }
}

TEST(Collect, NonSymmetricFamilyKeepsIncumbentOnly) {
  std::vector<MilpInstance> insts;
  for (int k = 0; k < 6; ++k) insts.push_back(generate_comb_auction(8, 20, derive_seed(41, k)));
  const auto rep = collect_data(insts, quick_collect());
  ASSERT_FALSE(rep.corpus.entries.empty());
  for (const auto& e : rep.corpus.entries) {
    EXPECT_FALSE(e.augmented);
    EXPECT_EQ(e.pool.size(), 1u);
  }
}

TEST(Collect, CorpusRoundTripAndDeterminism) {
  const auto insts = small_set_covers(3, 51);
  const auto a = collect_data(insts, quick_collect()).corpus.to_json();
  auto cfg = quick_collect();
  cfg.jobs = 3;
  const auto b = collect_data(insts, cfg).corpus.to_json();
  EXPECT_EQ(a, b);
  EXPECT_EQ(Corpus::from_json(a).to_json(), a);
  EXPECT_THROW(Corpus::from_json("{\"format\":\"other\"}"), Error);
}

TEST(Collect, LogsFailuresAndContinues) {
  MilpBuilder b("infeasible");
  const int x = b.add_binary(1.0);
  b.add_row({{x, 1.0}}, RowSense::kGe, 2.0);
  std::vector<MilpInstance> insts = small_set_covers(2, 61);
  insts.push_back(std::move(b).build());
  const auto rep = collect_data(insts, quick_collect());
  EXPECT_EQ(rep.failed, 1);
  EXPECT_EQ(rep.corpus.entries.size(), 2u);
  EXPECT_EQ(rep.log.size(), 1u);
}

TEST(EvalDives, RefusesMixedBudgets) {
  DiveEvalConfig cfg;
  cfg.divers = {{"fractional", 100, {}}, {"random", 50, {}}};
  EXPECT_THROW(cfg.validate(), BudgetMismatch);
  cfg.divers = {{"fractional", 100, {}}, {"random", 100, 20}};
  EXPECT_THROW(cfg.validate(), BudgetMismatch);
  cfg.divers = {{"fractional", 100, {}}, {"random", 100, {}}};
  EXPECT_NO_THROW(cfg.validate());
}

TEST(EvalDives, RecordsAndSummaries) {
  const auto corpus = collect_data(small_set_covers(4, 71), quick_collect()).corpus;
  DiveEvalConfig cfg;
  for (const auto& name : {"fractional", "lower", "upper", "random"}) cfg.divers.push_back({name, 100, {}});
  cfg.seeds = {0, 1};
  const auto r = eval_dives(corpus, cfg);
  ASSERT_EQ(r.records.size(), corpus.entries.size() * 4 * 2);
  ASSERT_EQ(r.summary.size(), 4u);
  for (const auto& rec : r.records) {
    EXPECT_TRUE(is_registered_diver(rec.diver));
    EXPECT_LE(rec.depth, 100);
    if (rec.found) EXPECT_GE(rec.primal_gap, -1e-6);
    else EXPECT_EQ(rec.primal_gap, kInfinity);
  }
  for (const auto& s : r.summary) EXPECT_EQ(s.runs, static_cast<int>(corpus.entries.size() * 2));
  EXPECT_EQ(dive_summary_csv(r, cfg), dive_summary_csv(eval_dives(corpus, cfg), cfg));
}

TEST(EvalDives, SummaryStatisticsByHand) {
  // One entry whose optimum we shift so the gaps are known.
  auto corpus = collect_data(small_set_covers(1, 81), quick_collect()).corpus;
  ASSERT_EQ(corpus.entries.size(), 1u);
  DiveEvalConfig cfg;
  cfg.divers = {{"random", 100, {}}};
  cfg.seeds = {0, 1, 2};
  const auto r = eval_dives(corpus, cfg);
  std::vector<double> g;
  for (const auto& rec : r.records)
    if (rec.found) g.push_back(rec.primal_gap);
  ASSERT_FALSE(g.empty());
  double m = 0.0;
  for (double v : g) m += v;
  m /= g.size();
  EXPECT_NEAR(r.summary[0].mean_gap, m, 1e-12);
  EXPECT_EQ(r.summary[0].failed, static_cast<int>(3 - g.size()));
}

TEST(EvalBnb, NoDivingConfigAndWins) {
  const auto corpus = collect_data(small_set_covers(3, 91), quick_collect()).corpus;
  BnbEvalConfig cfg;
  cfg.configs = {named_config("none"), named_config("default")};
  cfg.seeds = {0, 1};
  cfg.clock = SolveTrace::Clock::kWork;
  cfg.horizon = 1e6;
  cfg.time_limit = 1e9;
  const auto r = eval_bnb(corpus, cfg);
  ASSERT_EQ(r.records.size(), corpus.entries.size() * 2 * 2);
  int wins = 0;
  for (const auto& s : r.summary) {
    wins += s.wins;
    EXPECT_EQ(s.solved, static_cast<int>(corpus.entries.size() * 2));
  }
  // Every instance awards at least one win; ties may award more.
  EXPECT_GE(wins, static_cast<int>(corpus.entries.size()));
  EXPECT_LE(wins, static_cast<int>(corpus.entries.size() * 2));
  for (const auto& rec : r.records) {
    EXPECT_NEAR(rec.gap, 0.0, 1e-9);
    EXPECT_LE(rec.integral, cfg.horizon);
  }
}

TEST(EvalBnb, SingleConfigWinsEverything) {
  const auto corpus = collect_data(small_set_covers(2, 101), quick_collect()).corpus;
  BnbEvalConfig cfg;
  cfg.configs = {named_config("none")};
  cfg.seeds = {0};
  cfg.clock = SolveTrace::Clock::kWork;
  cfg.time_limit = 1e9;
  const auto r = eval_bnb(corpus, cfg);
  EXPECT_EQ(r.summary[0].wins, static_cast<int>(corpus.entries.size()));
}

TEST(EvalBnb, RootDiverNeverWorsensRootPrimalBound) {
  // With only the root processed the diver can only add solutions.
  const auto corpus = collect_data(small_set_covers(4, 111), quick_collect()).corpus;
  BnbEvalConfig cfg;
  cfg.configs = {named_config("none"), {"frac-root", {{"fractional", 0, 0}}}};
  cfg.seeds = {0};
  cfg.node_limit = 1;
  cfg.time_limit = 1e9;
  const auto r = eval_bnb(corpus, cfg);
  for (size_t i = 0; i < corpus.entries.size(); ++i)
    EXPECT_LE(r.records[2 * i + 1].primal, r.records[2 * i].primal + 1e-9);
}

TEST(EvalBnb, CsvIsDeterministicOnWorkClock) {
  const auto corpus = collect_data(small_set_covers(2, 121), quick_collect()).corpus;
  BnbEvalConfig cfg;
  cfg.configs = {named_config("none"), named_config("default")};
  cfg.seeds = {0};
  cfg.clock = SolveTrace::Clock::kWork;
  cfg.horizon = 5000;
  cfg.time_limit = 1e9;
  const auto a = eval_bnb(corpus, cfg);
  cfg.jobs = 2;
  const auto b = eval_bnb(corpus, cfg);
  EXPECT_EQ(bnb_records_csv(a, cfg), bnb_records_csv(b, cfg));
  EXPECT_EQ(bnb_summary_csv(a, cfg), bnb_summary_csv(b, cfg));
  EXPECT_NE(bnb_summary_csv(a, cfg).find("config_hash="), std::string::npos);
}

TEST(NamedConfig, KnownNames) {
  EXPECT_TRUE(named_config("none").schedule.empty());
  EXPECT_EQ(named_config("default").schedule.size(), 5u);
  EXPECT_EQ(named_config("l2dive").schedule.back().diver, "l2dive");
  EXPECT_THROW(named_config("bogus"), Error);
}

TEST(Tune, OneSampleReturnsThatSample) {
  const auto corpus = collect_data(small_set_covers(2, 131), quick_collect()).corpus;
  TuneConfig cfg;
  cfg.samples = 1;
  cfg.include_default = false;
  cfg.eval.seeds = {0};
  cfg.eval.clock = SolveTrace::Clock::kWork;
  cfg.eval.time_limit = 1e9;
  const auto r = tune_ensemble(corpus, cfg);
  ASSERT_EQ(r.evaluated.size(), 1u);
  EXPECT_EQ(r.best.name, r.evaluated[0].first.name);
  EXPECT_EQ(r.solver_calls, static_cast<int64_t>(corpus.entries.size()));
}

TEST(Tune, OffOnlyYieldsNoDiving) {
  const auto corpus = collect_data(small_set_covers(2, 141), quick_collect()).corpus;
  TuneConfig cfg;
  cfg.samples = 3;
  cfg.include_default = false;
  cfg.freq_choices = {FreqChoice::kOff};
  cfg.eval.seeds = {0};
  cfg.eval.time_limit = 1e9;
  const auto r = tune_ensemble(corpus, cfg);
  EXPECT_TRUE(r.best.schedule.empty());
}

TEST(Tune, BestNoWorseThanIncludedDefault) {
  const auto corpus = collect_data(small_set_covers(2, 151), quick_collect()).corpus;
  TuneConfig cfg;
  cfg.samples = 4;
  cfg.eval.seeds = {0};
  cfg.eval.clock = SolveTrace::Clock::kWork;
  cfg.eval.horizon = 2000;
  cfg.eval.time_limit = 1e9;
  const auto r = tune_ensemble(corpus, cfg);
  ASSERT_EQ(r.evaluated.front().first.name, "default");
  EXPECT_LE(r.best_objective, r.evaluated.front().second);
  EXPECT_EQ(r.solver_calls, static_cast<int64_t>(5 * corpus.entries.size()));
}

TEST(Tune, RejectsZeroSamples) {
  TuneConfig cfg;
  cfg.samples = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Verify, SmallRunPasses) {
  VerifyConfig cfg;
  cfg.lp_cases = 20;
  cfg.proposition_cases = 10;
  cfg.bnb_cases = 5;
  const auto rep = run_verification(cfg);
  EXPECT_TRUE(rep.ok());
  EXPECT_EQ(rep.lp_checked, 20);
  EXPECT_EQ(rep.proposition_checked, 10);
  EXPECT_EQ(rep.bnb_checked, 5);
}
