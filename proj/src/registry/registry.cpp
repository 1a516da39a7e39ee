#include "divekit/registry.hpp"

#include <algorithm>

namespace divekit {

const std::vector<std::string>& registered_divers() {
  static const std::vector<std::string> names = {"fractional", "coefficient", "linesearch", "vectorlength",
                                                 "pseudocost", "lower",       "upper",      "random",
                                                 "l2dive"};
  return names;
}

bool is_registered_diver(const std::string& name) {
  const auto& n = registered_divers();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::unique_ptr<Scorer> make_scorer(const std::string& name, const ScorerOptions& opts) {
  if (name == "fractional") return std::make_unique<FractionalScorer>();
  if (name == "coefficient") return std::make_unique<CoefficientScorer>();
  if (name == "linesearch") return std::make_unique<LinesearchScorer>();
  if (name == "vectorlength") return std::make_unique<VectorLengthScorer>();
  if (name == "pseudocost") return std::make_unique<PseudocostScorer>();
  if (name == "lower") return std::make_unique<BoundScorer>(BoundSide::kLower, opts.seed);
  if (name == "upper") return std::make_unique<BoundScorer>(BoundSide::kUpper, opts.seed);
  if (name == "random") return std::make_unique<BoundScorer>(BoundSide::kRandom, opts.seed);
  if (name == "l2dive") {
    if (!opts.model) throw Error("diver l2dive needs a model checkpoint");
    L2DiveOptions lo = opts.l2dive;
    lo.seed = opts.seed;
    return std::make_unique<L2DiveScorer>(opts.model, lo);
  }
  throw Error("unknown diver '" + name + "'");
}

DiveHook make_dive_hook(const std::string& name, const ScorerOptions& opts, const DiveOptions& dive) {
  std::shared_ptr<Scorer> scorer = make_scorer(name, opts);
  return [scorer, dive](const MilpInstance& inst, const StandardLp& lp, const LpSolution& node,
                        const LpSolution& root, double incumbent) {
    DiveOptions o = dive;
    if (incumbent < kInfinity) o.cutoff = incumbent;
    DiveContext ctx = make_dive_context(inst, lp, node, root, o);
    DiveResult r = divekit::dive(ctx, *scorer);
    return DiveReport{std::move(r.solutions), r.lp_iterations};
  };
}

}  // namespace divekit
