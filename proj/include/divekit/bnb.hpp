#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divekit/instance.hpp"
#include "divekit/simplex.hpp"

namespace divekit {

// Number of rows that can become violated when x_j moves up / down.
struct Locks {
  std::vector<int> up;
  std::vector<int> down;
};
Locks compute_locks(const MilpInstance& inst);

// Tries, in order: x already integral on I, lock-free rounding, nearest
// rounding. Continuous coordinates are kept. Returns the first candidate that
// is feasible for the original instance.
std::optional<std::vector<double>> round_solution(std::span<const double> x, const MilpInstance& inst,
                                                  const Locks* locks = nullptr);

struct PoolEntry {
  std::vector<double> x;
  double z = 0.0;
};

// Best feasible solutions, sorted by objective, unique on the rounded values
// of divable variables.
class SolutionPool {
 public:
  explicit SolutionPool(size_t capacity = 10);

  // Snaps integer coordinates, checks feasibility against `inst` and inserts.
  // A duplicate key keeps the better objective. Returns true when x is in the
  // pool afterwards.
  bool add(const MilpInstance& inst, std::vector<double> x);

  const std::vector<PoolEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  size_t capacity() const { return capacity_; }
  const PoolEntry& best() const;

  std::string to_json(const MilpInstance& inst) const;
  static SolutionPool from_json(const std::string& text, const MilpInstance& inst);

 private:
  size_t capacity_;
  std::vector<PoolEntry> entries_;
  std::vector<std::vector<long long>> keys_;
};

struct TracePoint {
  double time = 0.0;  // wall seconds
  double work = 0.0;  // cumulative simplex iterations
  double primal = kInfinity;
  double dual = -kInfinity;
};

// Bound history. record() keeps the primal bound non-increasing, the dual
// bound non-decreasing and dual <= primal; unchanged points are skipped.
struct SolveTrace {
  std::vector<TracePoint> points;

  void record(double time, double work, double primal, double dual);
  double final_primal() const { return points.empty() ? kInfinity : points.back().primal; }
  double final_dual() const { return points.empty() ? -kInfinity : points.back().dual; }

  enum class Clock { kWall, kWork };
  // Columns t,primal_bound,dual_bound.
  std::string to_csv(Clock clock) const;
};

enum class SolveStatus { kOptimalProven, kInfeasible, kLimit, kUnbounded };
std::string to_string(SolveStatus s);

enum class SolveMode { kOptimize, kEnumerate };

// What a diver invocation inside the tree reports back.
struct DiveReport {
  std::vector<std::vector<double>> solutions;
  int64_t lp_iterations = 0;
};

// Runs one dive from a node: the instance, the node's standard-form LP (with
// node bounds), its optimal solution, the root solution and the incumbent
// objective (kInfinity when none).
using DiveHook = std::function<DiveReport(const MilpInstance&, const StandardLp&, const LpSolution& node,
                                          const LpSolution& root, double incumbent)>;

// freq 0: root only; freq < 0: never; freq k > 0: every k-th processed node
// starting at node `offset` (the root is node 0).
struct ScheduledDiver {
  std::string name;
  int freq = 0;
  int offset = 0;
  DiveHook hook;

  bool due(int64_t node_index) const;
};

struct SolveConfig {
  double time_limit = 60.0;  // seconds
  int64_t node_limit = 50000;
  size_t pool_capacity = 10;
  SolveMode mode = SolveMode::kOptimize;
  std::vector<ScheduledDiver> divers;
  SimplexOptions lp;
  uint64_t seed = 0;

  void validate() const;
};

struct SolveStats {
  int64_t nodes = 0;
  int64_t lp_iterations = 0;
  int64_t node_errors = 0;  // node LPs that failed numerically and were pruned
  int64_t dive_calls = 0;
  int64_t dive_solutions = 0;
  double wall_seconds = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::kLimit;
  std::optional<std::vector<double>> incumbent;
  double primal_bound = kInfinity;
  double dual_bound = -kInfinity;
  SolutionPool pool;
  SolveTrace trace;
  SolveStats stats;
  std::optional<LpSolution> root;
};

SolveResult branch_and_bound(const MilpInstance& inst, const SolveConfig& cfg);

struct EnumerationResult {
  std::vector<std::vector<double>> solutions;  // distinct on divable variables
  double optimum = kInfinity;
  bool complete = false;  // false when a limit or the capacity cut the search short
};

// Solves for z*, then explores the face c^T x = z* (+-1e-6) without incumbent
// pruning and collects every distinct optimal assignment of the divable
// variables, up to cfg.pool_capacity.
EnumerationResult enumerate_optima(const MilpInstance& inst, const SolveConfig& cfg);

}  // namespace divekit
