#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "divekit/bnb.hpp"
#include "divekit/instance.hpp"
#include "divekit/rng.hpp"
#include "divekit/simplex.hpp"

namespace divekit {

enum class DiveTermination {
  kInfeasible,
  kDepthLimit,
  kIterLimit,
  kIntegral,
  kCutoffExceeded,
  kAborted,  // the scorer returned no decision for a nonempty candidate set
};
std::string to_string(DiveTermination t);

// kLower raises the lower bound to `value`, kUpper lowers the upper bound,
// kFix does both.
enum class Tighten { kLower, kUpper, kFix };

struct ScoreDecision {
  int var = -1;
  Tighten kind = Tighten::kFix;
  double value = 0.0;
  double score = 0.0;
};

struct DiveOptions {
  int d_max = 100;
  std::optional<int64_t> lp_iter_limit;  // per resolve
  std::optional<double> cutoff;          // abort once the LP objective reaches it
  SimplexOptions lp;
};

struct DiveContext {
  const MilpInstance* inst = nullptr;
  StandardLp lp;  // bounds carry the dive's tightenings
  LpSolution current;
  LpSolution root;
  std::vector<int> candidates;  // divable and unfixed, ascending
  int depth = 0;
  DiveOptions options;
  Locks locks;
  std::vector<int> degree;  // rows per original variable

  double value(int j) const { return current.x[j]; }
  double root_value(int j) const { return root.x[j]; }
};

// Starts a dive from `node` (optimal for `node_lp`). The candidate set is
// every divable variable unfixed in node_lp.
DiveContext make_dive_context(const MilpInstance& inst, const StandardLp& node_lp, const LpSolution& node,
                              const LpSolution& root, const DiveOptions& options);
// Convenience: dive from the root relaxation of `inst`.
DiveContext make_root_context(const MilpInstance& inst, const DiveOptions& options);

// One resolve as seen by scorers that learn from dives.
struct DiveObservation {
  int var = -1;
  bool up = false;
  double distance = 0.0;     // |x_after_j - x_before_j|
  double degradation = 0.0;  // max(z_after - z_before, 0)
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::string name() const = 0;
  virtual void begin_dive(const DiveContext& /*ctx*/) {}
  virtual std::optional<ScoreDecision> select(const DiveContext& ctx) = 0;
  virtual void observe(const DiveObservation& /*obs*/) {}
};

struct DiveResult {
  std::vector<std::vector<double>> solutions;
  double best_z = kInfinity;
  int depth_reached = 0;      // diving LPs solved
  int free_tightenings = 0;   // bound changes the current LP solution already satisfied
  DiveTermination termination = DiveTermination::kDepthLimit;
  int64_t lp_iterations = 0;
};

// A tightening that moves a bound but keeps the current LP solution inside
// the box leaves that solution optimal; it is applied without a resolve and
// does not count towards d_max.
DiveResult dive(DiveContext& ctx, Scorer& scorer);

// Fractionality |x - floor(x + 0.5)|.
double fractionality(double x);
bool is_fractional(double x, double tol = 1e-6);

// Nearest-integer decision for j (0.5 rounds up).
ScoreDecision nearest_decision(const DiveContext& ctx, int j, double score);

class FractionalScorer : public Scorer {
 public:
  std::string name() const override { return "fractional"; }
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;
};

class CoefficientScorer : public Scorer {
 public:
  std::string name() const override { return "coefficient"; }
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;
};

class LinesearchScorer : public Scorer {
 public:
  std::string name() const override { return "linesearch"; }
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;
};

class VectorLengthScorer : public Scorer {
 public:
  std::string name() const override { return "vectorlength"; }
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;
};

// Pseudocost diving with statistics gathered only from this scorer's own
// resolves: per variable and direction, the mean objective degradation per
// unit of movement, defaulting to |c_j| until observed.
class PseudocostScorer : public Scorer {
 public:
  std::string name() const override { return "pseudocost"; }
  void begin_dive(const DiveContext& ctx) override;
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;
  void observe(const DiveObservation& obs) override;

  double estimate(int j, bool up) const;
  int64_t samples(int j, bool up) const;

 private:
  std::vector<double> objective_;
  std::vector<double> sum_up_, sum_down_;
  std::vector<int64_t> count_up_, count_down_;
};

enum class BoundSide { kLower, kUpper, kRandom };

// Fixes the lowest-index candidate to a bound (lower, upper, or a seeded coin
// flip). An infinite target bound falls back to rounding the LP value toward
// it.
class BoundScorer : public Scorer {
 public:
  explicit BoundScorer(BoundSide side, uint64_t seed = 0) : side_(side), rng_(seed) {}
  std::string name() const override;
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;

 private:
  BoundSide side_;
  Rng rng_;
};

}  // namespace divekit
