#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "divekit/diving.hpp"
#include "divekit/graphnet.hpp"

namespace divekit {

// Indices whose value in x_hat violates complementary slackness against the
// duals of an optimal LP: (x_hat_j - lower_j) * y_lb_j or
// (x_hat_j - upper_j) * y_ub_j nonzero beyond tol. Both products are
// nonnegative for x_hat inside the bounds, so "nonzero" means "> tol" there.
struct TightenSet {
  std::vector<int> lower;  // tighten x_j >= x_hat_j
  std::vector<int> upper;  // tighten x_j <= x_hat_j

  bool contains(int j) const;
  bool empty() const { return lower.empty() && upper.empty(); }
};

// `indices` are LP columns and x_hat[k] is the value for indices[k]. Throws
// MissingDuals unless `sol` is optimal with duals.
TightenSet compute_tighten_set(std::span<const int> indices, std::span<const double> x_hat, const LpSolution& sol,
                               const StandardLp& lp, double tol = 1e-7);

// How a selected variable's bound moves toward its prediction.
//  kPropositionConsistent: x_hat > x* raises the lower bound, x_hat < x*
//    lowers the upper bound, equality fixes. This is the direction that the
//    tightening set prescribes.
//  kVerbatim: lower <- x_hat when x_hat <= x*, upper <- x_hat when
//    x_hat >= x*, both on equality. For a binary with fractional x* this
//    leaves the bounds unchanged.
enum class DirectionRule { kPropositionConsistent, kVerbatim };

struct L2DiveOptions {
  PredictMode mode = PredictMode::kMode;
  uint64_t seed = 0;  // for PredictMode::kSample; each dive draws from seed + dive index
  double tol = 1e-7;
  DirectionRule rule = DirectionRule::kPropositionConsistent;
};

// Learned diver: predicts x_hat once per dive from the root graph, then
// selects argmax q(x_hat_j) + 1{j in J}, lowest index on ties.
class L2DiveScorer : public Scorer {
 public:
  L2DiveScorer(std::shared_ptr<const GnnParams> model, L2DiveOptions options = {});
  // Uses a fixed prediction instead of a model (tests, external predictors).
  explicit L2DiveScorer(Prediction fixed, L2DiveOptions options = {});

  std::string name() const override { return "l2dive"; }
  void begin_dive(const DiveContext& ctx) override;
  std::optional<ScoreDecision> select(const DiveContext& ctx) override;

  const Prediction& prediction() const { return prediction_; }
  const TightenSet& last_tighten_set() const { return last_set_; }
  int64_t predictions_made() const { return predictions_; }

 private:
  std::shared_ptr<const GnnParams> model_;
  L2DiveOptions options_;
  Prediction prediction_;
  std::vector<int> slot_;  // variable -> position in prediction_, -1 if absent
  TightenSet last_set_;
  int64_t predictions_ = 0;
  int64_t dives_ = 0;
};

// Tightening decision for variable j predicted at x_hat with LP value x.
ScoreDecision direction_decision(int j, double x_hat, double x, double score, DirectionRule rule);

struct Proposition1Report {
  TightenSet tighten;         // over all standard-form columns, slacks included
  bool feasible = false;      // x_tilde lies in the tightened polyhedron
  bool optimal = false;       // re-solved optimum equals c^T x_tilde within 1e-6
  double target_objective = 0.0;
  double tightened_objective = 0.0;
  double root_objective = 0.0;
};

// Tightens the root LP of `inst` by the tightening set of x_tilde and
// re-solves. Throws if the root LP is not optimal or the re-solve fails.
Proposition1Report verify_proposition1(const MilpInstance& inst, std::span<const double> x_tilde,
                                       double tol = 1e-7);

}  // namespace divekit
