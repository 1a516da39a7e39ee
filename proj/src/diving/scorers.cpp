#include <cmath>
#include <limits>

#include "divekit/diving.hpp"

namespace divekit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lowest fractionality among fractional candidates, lowest index on ties.
std::optional<ScoreDecision> most_integral(const DiveContext& ctx) {
  int best = -1;
  double best_frac = kInf;
  for (int j : ctx.candidates) {
    const double f = fractionality(ctx.value(j));
    if (!is_fractional(ctx.value(j))) continue;
    if (f < best_frac) {
      best_frac = f;
      best = j;
    }
  }
  if (best < 0) {
    // Every candidate is integral at x* while the LP is not integral on I
    // (possible only for fixed non-divable integers rounding badly); fix the
    // first candidate at its current value so the dive keeps moving.
    if (ctx.candidates.empty()) return std::nullopt;
    const int j = ctx.candidates.front();
    return ScoreDecision{j, Tighten::kFix, std::round(ctx.value(j)), 0.0};
  }
  return nearest_decision(ctx, best, -best_frac);
}

ScoreDecision directed(int j, bool up, double x, double score) {
  ScoreDecision d;
  d.var = j;
  d.score = score;
  d.kind = up ? Tighten::kLower : Tighten::kUpper;
  d.value = up ? std::ceil(x) : std::floor(x);
  return d;
}

}  // namespace

std::optional<ScoreDecision> FractionalScorer::select(const DiveContext& ctx) { return most_integral(ctx); }

std::optional<ScoreDecision> CoefficientScorer::select(const DiveContext& ctx) {
  int best = -1;
  int best_locks = std::numeric_limits<int>::max();
  double best_frac = kInf;
  for (int j : ctx.candidates) {
    const double x = ctx.value(j);
    if (!is_fractional(x)) continue;
    const int l = std::min(ctx.locks.up[j], ctx.locks.down[j]);
    const double f = fractionality(x);
    if (l < best_locks || (l == best_locks && f < best_frac)) {
      best = j;
      best_locks = l;
      best_frac = f;
    }
  }
  if (best < 0) return most_integral(ctx);
  const int up = ctx.locks.up[best];
  const int down = ctx.locks.down[best];
  if (up == down) return nearest_decision(ctx, best, -static_cast<double>(best_locks));
  return directed(best, up < down, ctx.value(best), -static_cast<double>(best_locks));
}

std::optional<ScoreDecision> LinesearchScorer::select(const DiveContext& ctx) {
  int best = -1;
  bool best_up = false;
  double best_t = kInf;
  for (int j : ctx.candidates) {
    const double x = ctx.value(j);
    const double r = ctx.root_value(j);
    if (!is_fractional(x) || x == r) continue;
    const bool up = x > r;
    const double t = up ? (std::ceil(x) - r) / (x - r) : (r - std::floor(x)) / (r - x);
    if (t < best_t) {
      best_t = t;
      best = j;
      best_up = up;
    }
  }
  if (best < 0) return most_integral(ctx);
  return directed(best, best_up, ctx.value(best), -best_t);
}

std::optional<ScoreDecision> VectorLengthScorer::select(const DiveContext& ctx) {
  constexpr double kEps = 1e-9;
  int best = -1;
  bool best_up = false;
  double best_ratio = kInf;
  for (int j : ctx.candidates) {
    const double x = ctx.value(j);
    if (!is_fractional(x) || ctx.degree[j] == 0) continue;
    const double c = ctx.inst->objective[j];
    const double rows = static_cast<double>(ctx.degree[j]);
    const double down = (std::max(c * (std::floor(x) - x), 0.0) + kEps) / rows;
    const double up = (std::max(c * (std::ceil(x) - x), 0.0) + kEps) / rows;
    if (down < best_ratio) {
      best_ratio = down;
      best = j;
      best_up = false;
    }
    if (up < best_ratio) {
      best_ratio = up;
      best = j;
      best_up = true;
    }
  }
  if (best < 0) return most_integral(ctx);
  return directed(best, best_up, ctx.value(best), -best_ratio);
}

void PseudocostScorer::begin_dive(const DiveContext& ctx) {
  const size_t n = static_cast<size_t>(ctx.inst->num_vars);
  if (objective_.size() == n && objective_ == ctx.inst->objective) return;
  objective_ = ctx.inst->objective;
  sum_up_.assign(n, 0.0);
  sum_down_.assign(n, 0.0);
  count_up_.assign(n, 0);
  count_down_.assign(n, 0);
}

double PseudocostScorer::estimate(int j, bool up) const {
  const int64_t n = up ? count_up_[j] : count_down_[j];
  if (n == 0) return std::abs(objective_[j]);
  return (up ? sum_up_[j] : sum_down_[j]) / static_cast<double>(n);
}

int64_t PseudocostScorer::samples(int j, bool up) const { return up ? count_up_[j] : count_down_[j]; }

void PseudocostScorer::observe(const DiveObservation& obs) {
  if (obs.var < 0 || obs.var >= static_cast<int>(objective_.size()) || obs.distance <= 1e-9) return;
  const double unit = obs.degradation / obs.distance;
  if (obs.up) {
    sum_up_[obs.var] += unit;
    ++count_up_[obs.var];
  } else {
    sum_down_[obs.var] += unit;
    ++count_down_[obs.var];
  }
}

std::optional<ScoreDecision> PseudocostScorer::select(const DiveContext& ctx) {
  int best = -1;
  bool best_up = false;
  double best_cost = kInf;
  for (int j : ctx.candidates) {
    const double x = ctx.value(j);
    if (!is_fractional(x)) continue;
    const double f = x - std::floor(x);
    const double down = estimate(j, false) * f;
    const double up = estimate(j, true) * (1.0 - f);
    // Equal estimates go to the nearer integer.
    const bool go_up = up < down || (up == down && f >= 0.5);
    const double cost = go_up ? up : down;
    if (cost < best_cost) {
      best_cost = cost;
      best = j;
      best_up = go_up;
    }
  }
  if (best < 0) return most_integral(ctx);
  return directed(best, best_up, ctx.value(best), -best_cost);
}

std::string BoundScorer::name() const {
  switch (side_) {
    case BoundSide::kLower: return "lower";
    case BoundSide::kUpper: return "upper";
    case BoundSide::kRandom: return "random";
  }
  return "bound";
}

std::optional<ScoreDecision> BoundScorer::select(const DiveContext& ctx) {
  if (ctx.candidates.empty()) return std::nullopt;
  const int j = ctx.candidates.front();
  bool up = side_ == BoundSide::kUpper;
  if (side_ == BoundSide::kRandom) up = rng_.bernoulli(0.5);
  const double lo = ctx.lp.lower[j];
  const double hi = ctx.lp.upper[j];
  const double x = ctx.value(j);
  if (up) {
    if (is_finite_bound(hi)) return ScoreDecision{j, Tighten::kFix, hi, 0.0};
    return ScoreDecision{j, Tighten::kLower, std::max(std::ceil(x), lo), 0.0};
  }
  if (is_finite_bound(lo)) return ScoreDecision{j, Tighten::kFix, lo, 0.0};
  return ScoreDecision{j, Tighten::kUpper, std::min(std::floor(x), hi), 0.0};
}

}  // namespace divekit
