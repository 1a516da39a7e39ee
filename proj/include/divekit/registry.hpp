#pragma once

#include <memory>
#include <string>
#include <vector>

#include "divekit/bnb.hpp"
#include "divekit/diving.hpp"
#include "divekit/l2dive.hpp"

namespace divekit {

struct ScorerOptions {
  uint64_t seed = 0;                        // random diver and sampled predictions
  std::shared_ptr<const GnnParams> model;   // required by "l2dive"
  L2DiveOptions l2dive;
};

// Every diver name accepted by make_scorer, in a fixed order.
const std::vector<std::string>& registered_divers();
bool is_registered_diver(const std::string& name);

// Throws Error for an unknown name or "l2dive" without a model.
std::unique_ptr<Scorer> make_scorer(const std::string& name, const ScorerOptions& opts);

// A B&B hook running one dive per call. The scorer is created once and shared
// by every call of this hook; the incumbent becomes the dive cutoff.
DiveHook make_dive_hook(const std::string& name, const ScorerOptions& opts, const DiveOptions& dive);

}  // namespace divekit
