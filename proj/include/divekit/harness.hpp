#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "divekit/bnb.hpp"
#include "divekit/diving.hpp"
#include "divekit/generators.hpp"
#include "divekit/graphnet.hpp"
#include "divekit/registry.hpp"

namespace divekit {

// (primal - dual) / max(|primal|, |dual|) when 0 < primal * dual < inf,
// otherwise 1. Values at or beyond kInfinity count as infinite.
double primal_dual_gap(double primal, double dual);

// Integral over [0, T] of the step function of primal_dual_gap implied by the
// trace, on the chosen clock. The gap is 1 before the first point.
double primal_dual_integral(const SolveTrace& trace, double horizon,
                            SolveTrace::Clock clock = SolveTrace::Clock::kWall);

// Unnormalized z - z_ref.
double primal_gap(double z, double z_ref);

// 64-bit FNV-1a, used to fingerprint configurations in output headers.
uint64_t fnv1a(const std::string& text);
std::string hex64(uint64_t v);

// Family inferred from a generated instance name ("set-cover-..."), if any.
std::optional<Family> family_of(const std::string& instance_name);

// Runs fn(0..n-1) on up to `jobs` threads. Results must be written to
// per-index slots so that aggregation order never depends on scheduling.
// The first exception thrown by any task is rethrown after all finish.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn);

struct CorpusEntry {
  MilpInstance instance;
  SolutionPool pool{1};
  double best_z = kInfinity;
  bool proven = false;      // best_z is the proven optimum
  bool augmented = false;   // pool holds enumerated optima
  bool complete = false;    // enumeration found every optimal assignment
};

struct Corpus {
  std::vector<CorpusEntry> entries;

  std::string to_json() const;
  static Corpus from_json(const std::string& text);
};

struct CollectConfig {
  SolveConfig solve;             // limits for the reference solve
  size_t enumerate_capacity = 10;
  bool augment_symmetric = true;
  int jobs = 1;
};

struct CollectReport {
  Corpus corpus;
  int dropped_root_solved = 0;
  int failed = 0;
  std::vector<std::string> log;  // one line per dropped or failed instance
};

// Per instance: root LP, reference B&B, pool {x_best} or the enumerated
// optima for symmetric families. Instances whose root LP is already integral
// are dropped; failures are logged and skipped.
CollectReport collect_data(const std::vector<MilpInstance>& instances, const CollectConfig& cfg);

// Training pairs for every corpus entry (root LP re-solved, graph extracted).
std::vector<TrainingExample> corpus_examples(const Corpus& corpus, std::optional<double> tau = std::nullopt,
                                             int jobs = 1);

struct DiverSpec {
  std::string name;
  int d_max = 100;
  std::optional<int64_t> lp_iter_limit;
};

struct DiveEvalConfig {
  std::vector<DiverSpec> divers;
  ScorerOptions scorer;  // model for l2dive; seed replaced per run
  std::vector<uint64_t> seeds{0};
  SimplexOptions lp;
  int jobs = 1;

  // Throws BudgetMismatch when divers differ in d_max or lp_iter_limit.
  void validate() const;
};

struct DiveRecord {
  std::string instance;
  std::string diver;
  uint64_t seed = 0;
  bool found = false;
  double z = kInfinity;
  double primal_gap = kInfinity;  // sentinel when nothing was found
  int depth = 0;
  DiveTermination termination = DiveTermination::kDepthLimit;
  int64_t lp_iterations = 0;
};

struct DiverSummary {
  std::string diver;
  int runs = 0;
  int failed = 0;
  double mean_gap = 0.0;    // over successful runs
  double stderr_gap = 0.0;  // standard error of that mean
  double mean_depth = 0.0;
};

struct DiveEvalResult {
  std::vector<DiveRecord> records;  // instance-major, then diver, then seed
  std::vector<DiverSummary> summary;
};

// One dive per instance x diver x seed from the root LP; primal gap against
// each entry's best_z.
DiveEvalResult eval_dives(const Corpus& corpus, const DiveEvalConfig& cfg);

struct ScheduleEntry {
  std::string diver;
  int freq = 0;
  int offset = 0;
};

struct BnbConfigSpec {
  std::string name;
  std::vector<ScheduleEntry> schedule;
};

// Frequencies and offsets of the standard divers in the default ensemble.
std::vector<ScheduleEntry> default_schedule();
// "none", "default", "l2dive" (default plus l2dive at the root).
BnbConfigSpec named_config(const std::string& name);

struct BnbEvalConfig {
  std::vector<BnbConfigSpec> configs;
  double time_limit = 60.0;
  int64_t node_limit = 50000;
  std::vector<uint64_t> seeds{0, 1, 2};
  SolveTrace::Clock clock = SolveTrace::Clock::kWall;
  double horizon = 60.0;  // T of the integral, in clock units
  ScorerOptions scorer;
  DiveOptions dive;
  int jobs = 1;
};

struct BnbRecord {
  std::string instance;
  std::string config;
  uint64_t seed = 0;
  SolveStatus status = SolveStatus::kLimit;
  double primal = kInfinity;
  double dual = -kInfinity;
  double gap = 1.0;        // primal-dual gap at the end
  double integral = 0.0;   // over [0, horizon]
  double finish = 0.0;     // clock value at termination
  int64_t nodes = 0;
  int64_t lp_iterations = 0;
};

struct BnbSummary {
  std::string config;
  double mean_integral = 0.0;
  double stderr_integral = 0.0;  // over per-seed means
  double mean_finish = 0.0;
  int solved = 0;
  int wins = 0;  // instances where this config has the lowest mean integral (ties: all)
};

struct BnbEvalResult {
  std::vector<BnbRecord> records;
  std::vector<BnbSummary> summary;
};

BnbEvalResult eval_bnb(const Corpus& corpus, const BnbEvalConfig& cfg);

enum class FreqChoice { kOff, kDouble, kDefault, kHalf };
enum class TuneObjective { kIntegral, kTime };

struct TuneConfig {
  int samples = 16;
  std::vector<FreqChoice> freq_choices{FreqChoice::kOff, FreqChoice::kDouble, FreqChoice::kDefault,
                                       FreqChoice::kHalf};
  bool vary_offset = true;       // offset 0 or default, equally likely
  bool include_default = true;   // also evaluate the default ensemble
  TuneObjective objective = TuneObjective::kIntegral;
  uint64_t seed = 0;
  BnbEvalConfig eval;            // limits, seeds, clock; configs are ignored

  void validate() const;
};

struct TuneResult {
  BnbConfigSpec best;
  double best_objective = kInfinity;
  std::vector<std::pair<BnbConfigSpec, double>> evaluated;  // in sampling order
  int64_t solver_calls = 0;
};

TuneResult tune_ensemble(const Corpus& validation, const TuneConfig& cfg);

struct VerifyConfig {
  uint64_t seed = 0;
  int lp_cases = 200;
  int proposition_cases = 100;
  int bnb_cases = 50;
};

struct VerifyReport {
  int lp_checked = 0, lp_failed = 0;
  int proposition_checked = 0, proposition_failed = 0;
  int bnb_checked = 0, bnb_failed = 0;
  std::vector<std::string> failures;

  bool ok() const { return lp_failed == 0 && proposition_failed == 0 && bnb_failed == 0; }
};

// Simplex against vertex enumeration, the tightening-set property, and B&B
// against brute force, all on small random instances.
VerifyReport run_verification(const VerifyConfig& cfg);

// CSV writers. Each starts with '#'-prefixed metadata lines (command, key
// settings, config hash) and contains nothing time-dependent unless the
// clock is wall time.
std::string dive_summary_csv(const DiveEvalResult& r, const DiveEvalConfig& cfg);
std::string dive_records_csv(const DiveEvalResult& r, const DiveEvalConfig& cfg);
std::string bnb_summary_csv(const BnbEvalResult& r, const BnbEvalConfig& cfg);
std::string bnb_records_csv(const BnbEvalResult& r, const BnbEvalConfig& cfg);

// Doubles as shortest round-trip text; infinities as inf / -inf.
std::string format_number(double v);

}  // namespace divekit
