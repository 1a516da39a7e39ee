#include <algorithm>
#include <cmath>

#include "divekit/diving.hpp"

namespace divekit {

std::string to_string(DiveTermination t) {
  switch (t) {
    case DiveTermination::kInfeasible: return "infeasible";
    case DiveTermination::kDepthLimit: return "depth_limit";
    case DiveTermination::kIterLimit: return "iter_limit";
    case DiveTermination::kIntegral: return "integral";
    case DiveTermination::kCutoffExceeded: return "cutoff";
    case DiveTermination::kAborted: return "aborted";
  }
  return "unknown";
}

double fractionality(double x) { return std::abs(x - std::floor(x + 0.5)); }

bool is_fractional(double x, double tol) { return fractionality(x) > tol; }

ScoreDecision nearest_decision(const DiveContext& ctx, int j, double score) {
  const double x = ctx.value(j);
  ScoreDecision d;
  d.var = j;
  d.score = score;
  if (x - std::floor(x) >= 0.5) {
    d.kind = Tighten::kLower;
    d.value = std::ceil(x);
  } else {
    d.kind = Tighten::kUpper;
    d.value = std::floor(x);
  }
  return d;
}

DiveContext make_dive_context(const MilpInstance& inst, const StandardLp& node_lp, const LpSolution& node,
                              const LpSolution& root, const DiveOptions& options) {
  if (!node.optimal()) throw Error("a dive must start from an optimal LP");
  DiveContext ctx;
  ctx.inst = &inst;
  ctx.lp = node_lp;
  ctx.current = node;
  ctx.root = root;
  ctx.options = options;
  ctx.locks = compute_locks(inst);
  ctx.degree.assign(inst.num_vars, 0);
  for (int k = 0; k < inst.num_nonzeros(); ++k) ctx.degree[inst.col_index[k]]++;
  for (int j = 0; j < inst.num_vars; ++j)
    if (inst.divable[j] && node_lp.lower[j] < node_lp.upper[j]) ctx.candidates.push_back(j);
  return ctx;
}

DiveContext make_root_context(const MilpInstance& inst, const DiveOptions& options) {
  const StandardLp lp = to_standard_form(inst);
  const LpSolution root = solve_lp(lp, nullptr, options.lp);
  return make_dive_context(inst, lp, root, root, options);
}

namespace {

// Slack for deciding that the LP value already satisfies a new bound.
constexpr double kFreeTol = 1e-9;

bool integral_on_integers(const DiveContext& ctx) {
  for (int j : ctx.inst->integers)
    if (is_fractional(ctx.value(j))) return false;
  return true;
}

void record(DiveContext& ctx, DiveResult& res, std::vector<double> x) {
  const double z = ctx.inst->objective_value(x);
  res.best_z = std::min(res.best_z, z);
  res.solutions.push_back(std::move(x));
}

// Solutions are checked against the original instance only: tightenings are
// heuristic and never claimed globally valid.
void try_rounding(DiveContext& ctx, DiveResult& res) {
  std::span<const double> x(ctx.current.x.data(), static_cast<size_t>(ctx.inst->num_vars));
  if (auto r = round_solution(x, *ctx.inst, &ctx.locks)) record(ctx, res, std::move(*r));
}

}  // namespace

DiveResult dive(DiveContext& ctx, Scorer& scorer) {
  DiveResult res;
  const auto& opt = ctx.options;
  scorer.begin_dive(ctx);

  if (integral_on_integers(ctx)) {
    try_rounding(ctx, res);
    res.termination = res.solutions.empty() ? DiveTermination::kInfeasible : DiveTermination::kIntegral;
    return res;
  }
  try_rounding(ctx, res);

  SimplexOptions lp_opts = opt.lp;
  lp_opts.iteration_limit = opt.lp_iter_limit;
  res.termination = DiveTermination::kDepthLimit;
  while (ctx.depth < opt.d_max) {
    if (ctx.candidates.empty()) {
      res.termination = DiveTermination::kAborted;
      break;
    }
    const auto decision = scorer.select(ctx);
    if (!decision || !std::binary_search(ctx.candidates.begin(), ctx.candidates.end(), decision->var)) {
      res.termination = DiveTermination::kAborted;
      break;
    }
    const int j = decision->var;
    double lo = ctx.lp.lower[j];
    double hi = ctx.lp.upper[j];
    if (decision->kind != Tighten::kUpper) lo = std::max(lo, decision->value);
    if (decision->kind != Tighten::kLower) hi = std::min(hi, decision->value);
    const bool moved = lo > ctx.lp.lower[j] || hi < ctx.lp.upper[j];
    if (moved && lo <= hi && ctx.value(j) >= lo - kFreeTol && ctx.value(j) <= hi + kFreeTol) {
      ctx.lp.lower[j] = lo;
      ctx.lp.upper[j] = hi;
      ++res.free_tightenings;
      if (lo >= hi) std::erase(ctx.candidates, j);
      continue;
    }
    ++ctx.depth;
    if (lo > hi) {
      res.termination = DiveTermination::kInfeasible;
      break;
    }
    ctx.lp.lower[j] = lo;
    ctx.lp.upper[j] = hi;

    const double x_before = ctx.value(j);
    const double z_before = ctx.current.objective;
    LpSolution sol = solve_lp(ctx.lp, &ctx.current.basis, lp_opts);
    res.lp_iterations += sol.iterations;
    if (sol.status == LpStatus::kInfeasible || sol.status == LpStatus::kUnbounded) {
      res.termination = DiveTermination::kInfeasible;
      break;
    }
    if (sol.status == LpStatus::kIterationLimit) {
      res.termination = DiveTermination::kIterLimit;
      break;
    }
    ctx.current = std::move(sol);
    const double x_after = ctx.value(j);
    const bool up =
        decision->kind == Tighten::kLower || (decision->kind == Tighten::kFix && decision->value > x_before);
    scorer.observe({j, up, std::abs(x_after - x_before),
                    std::max(ctx.current.objective - z_before, 0.0)});

    if (opt.cutoff && ctx.current.objective >= *opt.cutoff - 1e-9) {
      res.termination = DiveTermination::kCutoffExceeded;
      break;
    }
    if (integral_on_integers(ctx)) {
      try_rounding(ctx, res);
      res.termination = DiveTermination::kIntegral;
      break;
    }
    try_rounding(ctx, res);

    std::erase_if(ctx.candidates, [&](int k) { return ctx.lp.lower[k] >= ctx.lp.upper[k]; });
  }
  res.depth_reached = ctx.depth;
  return res;
}

}  // namespace divekit
