#include "divekit/bnb.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace divekit {

Locks compute_locks(const MilpInstance& inst) {
  Locks locks;
  locks.up.assign(inst.num_vars, 0);
  locks.down.assign(inst.num_vars, 0);
  for (int i = 0; i < inst.num_rows; ++i) {
    auto cols = inst.row_cols(i);
    auto vals = inst.row_values(i);
    for (size_t k = 0; k < cols.size(); ++k) {
      const int j = cols[k];
      const double a = vals[k];
      if (a == 0.0) continue;
      switch (inst.sense[i]) {
        case RowSense::kLe:
          (a > 0 ? locks.up : locks.down)[j]++;
          break;
        case RowSense::kGe:
          (a > 0 ? locks.down : locks.up)[j]++;
          break;
        case RowSense::kEq:
          locks.up[j]++;
          locks.down[j]++;
          break;
      }
    }
  }
  return locks;
}

namespace {

constexpr double kIntTol = 1e-6;

bool fractional(double v) { return std::abs(v - std::round(v)) > kIntTol; }

double clamp_to(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

}  // namespace

std::optional<std::vector<double>> round_solution(std::span<const double> x, const MilpInstance& inst,
                                                  const Locks* locks) {
  std::vector<double> cand(x.begin(), x.end());
  bool integral = true;
  for (int j : inst.integers) integral = integral && !fractional(x[j]);
  if (integral) {
    for (int j : inst.integers) cand[j] = std::round(x[j]);
    if (is_feasible(inst, cand)) return cand;
    return std::nullopt;
  }

  Locks own;
  if (locks == nullptr) {
    own = compute_locks(inst);
    locks = &own;
  }
  for (int j : inst.integers) {
    if (!fractional(x[j])) {
      cand[j] = std::round(x[j]);
    } else if (locks->down[j] == 0) {
      cand[j] = std::floor(x[j]);
    } else if (locks->up[j] == 0) {
      cand[j] = std::ceil(x[j]);
    } else {
      cand[j] = std::round(x[j]);
    }
    cand[j] = clamp_to(cand[j], inst.lower[j], inst.upper[j]);
  }
  if (is_feasible(inst, cand)) return cand;

  for (int j : inst.integers) cand[j] = clamp_to(std::round(x[j]), inst.lower[j], inst.upper[j]);
  if (is_feasible(inst, cand)) return cand;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

SolutionPool::SolutionPool(size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw Error("pool capacity must be >= 1");
}

const PoolEntry& SolutionPool::best() const {
  if (entries_.empty()) throw EmptyPool("solution pool is empty");
  return entries_.front();
}

bool SolutionPool::add(const MilpInstance& inst, std::vector<double> x) {
  if (static_cast<int>(x.size()) != inst.num_vars) return false;
  for (int j : inst.integers) x[j] = std::round(x[j]);
  if (!is_feasible(inst, x)) return false;
  const double z = inst.objective_value(x);
  std::vector<long long> key;
  for (int j = 0; j < inst.num_vars; ++j)
    if (inst.divable[j]) key.push_back(std::llround(x[j]));

  for (size_t k = 0; k < keys_.size(); ++k) {
    if (keys_[k] != key) continue;
    if (z >= entries_[k].z) return true;
    entries_.erase(entries_.begin() + static_cast<long>(k));
    keys_.erase(keys_.begin() + static_cast<long>(k));
    break;
  }
  // Stable: equal objectives keep insertion order.
  size_t pos = 0;
  while (pos < entries_.size() && entries_[pos].z <= z) ++pos;
  if (pos >= capacity_) return false;
  entries_.insert(entries_.begin() + static_cast<long>(pos), PoolEntry{std::move(x), z});
  keys_.insert(keys_.begin() + static_cast<long>(pos), std::move(key));
  if (entries_.size() > capacity_) {
    entries_.pop_back();
    keys_.pop_back();
  }
  return true;
}

std::string SolutionPool::to_json(const MilpInstance& inst) const {
  nlohmann::json j;
  j["format"] = "divekit-pool";
  j["version"] = 1;
  j["instance"] = inst.name;
  j["capacity"] = capacity_;
  auto arr = nlohmann::json::array();
  for (const auto& e : entries_) arr.push_back({{"z", e.z}, {"x", e.x}});
  j["entries"] = std::move(arr);
  return j.dump();
}

SolutionPool SolutionPool::from_json(const std::string& text, const MilpInstance& inst) {
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", std::string{}) != "divekit-pool") throw ParseError(1, "not a divekit-pool document");
    if (j.at("version").get<int>() != 1) throw UnsupportedFeature("pool format version");
    SolutionPool pool(j.at("capacity").get<size_t>());
    for (const auto& e : j.at("entries")) {
      if (!pool.add(inst, e.at("x").get<std::vector<double>>()))
        throw ParseError(1, "pool entry infeasible for instance '" + inst.name + "'");
    }
    return pool;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, std::string("pool schema error: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

void SolveTrace::record(double time, double work, double primal, double dual) {
  if (!points.empty()) {
    primal = std::min(primal, points.back().primal);
    dual = std::max(dual, points.back().dual);
  }
  dual = std::min(dual, primal);
  if (!points.empty() && points.back().primal == primal && points.back().dual == dual) return;
  points.push_back({time, work, primal, dual});
}

namespace {

std::string fmt_bound(double v) {
  if (v >= kInfinity) return "inf";
  if (v <= -kInfinity) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string SolveTrace::to_csv(Clock clock) const {
  std::ostringstream os;
  os << "t,primal_bound,dual_bound\n";
  for (const auto& p : points) {
    os << fmt_bound(clock == Clock::kWall ? p.time : p.work) << ',' << fmt_bound(p.primal) << ','
       << fmt_bound(p.dual) << '\n';
  }
  return os.str();
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimalProven: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kLimit: return "limit";
    case SolveStatus::kUnbounded: return "unbounded";
  }
  return "unknown";
}

bool ScheduledDiver::due(int64_t node_index) const {
  if (freq < 0 || !hook) return false;
  if (freq == 0) return node_index == 0;
  return node_index >= offset && (node_index - offset) % freq == 0;
}

void SolveConfig::validate() const {
  if (!(time_limit > 0.0)) throw Error("time limit must be positive");
  if (node_limit < 1) throw Error("node limit must be >= 1");
  if (pool_capacity < 1) throw Error("pool capacity must be >= 1");
}

// ---------------------------------------------------------------------------

namespace {

struct BoundChange {
  int col;
  double lower;
  double upper;
};

struct Node {
  std::vector<BoundChange> changes;  // cumulative from the root
  std::shared_ptr<const Basis> basis;
  double bound = -kInfinity;
  int depth = 0;
  int64_t id = 0;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

constexpr int kPlungeDepth = 4;
constexpr double kPruneTol = 1e-9;

// Shared tree search. In optimize mode nodes are pruned against the
// incumbent; in enumerate mode the caller has already restricted the
// instance to the optimal face and every integral leaf is collected.
class TreeSearch {
 public:
  TreeSearch(const MilpInstance& inst, const SolveConfig& cfg, bool enumerate)
      : inst_(inst),
        cfg_(cfg),
        enumerate_(enumerate),
        lp_(to_standard_form(inst)),
        root_lower_(lp_.lower),
        root_upper_(lp_.upper),
        locks_(compute_locks(inst)),
        start_(std::chrono::steady_clock::now()) {
    result_.pool = SolutionPool(cfg.pool_capacity);
  }

  SolveResult run() {
    Node root;
    root.id = next_id_++;
    open_.push(std::move(root));
    bool limit_hit = false;
    std::optional<Node> plunge;
    int plunge_len = 0;

    while (!open_.empty() || plunge) {
      if (result_.stats.nodes >= cfg_.node_limit || elapsed() >= cfg_.time_limit) {
        limit_hit = true;
        break;
      }
      if (enumerate_ && collected_.size() >= cfg_.pool_capacity) {
        limit_hit = true;
        break;
      }
      Node node;
      if (plunge) {
        node = std::move(*plunge);
        plunge.reset();
      } else {
        node = open_.top();
        open_.pop();
        plunge_len = 0;
      }
      record_bounds(open_.empty() ? node.bound : std::min(node.bound, open_.top().bound));
      if (!enumerate_ && node.bound >= incumbent_ - kPruneTol) continue;

      std::optional<Node> down, up;
      process(node, down, up);
      ++result_.stats.nodes;

      // Plunge into the child the LP leans towards; queue the sibling.
      if (down && up) {
        Node& first = prefer_up_ ? *up : *down;
        Node& second = prefer_up_ ? *down : *up;
        open_.push(std::move(second));
        if (plunge_len < kPlungeDepth) {
          plunge = std::move(first);
          ++plunge_len;
        } else {
          open_.push(std::move(first));
        }
      } else if (down || up) {
        Node& only = down ? *down : *up;
        if (plunge_len < kPlungeDepth) {
          plunge = std::move(only);
          ++plunge_len;
        } else {
          open_.push(std::move(only));
        }
      }
    }

    result_.stats.wall_seconds = elapsed();
    if (result_.status == SolveStatus::kUnbounded) return finish();
    if (limit_hit) {
      result_.status = SolveStatus::kLimit;
      double open_bound = plunge ? plunge->bound : kInfinity;
      if (!open_.empty()) open_bound = std::min(open_bound, open_.top().bound);
      record_bounds(std::min(open_bound, incumbent_));
    } else {
      complete_ = true;
      result_.status = incumbent_ < kInfinity || !collected_.empty() ? SolveStatus::kOptimalProven
                                                                       : SolveStatus::kInfeasible;
      record_bounds(incumbent_);
    }
    return finish();
  }

  bool complete() const { return complete_; }
  const std::vector<std::vector<double>>& collected() const { return collected_; }

 private:
  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  void record_bounds(double open_bound) {
    double dual = std::min(open_bound, incumbent_);
    if (!enumerate_) result_.trace.record(elapsed(), static_cast<double>(result_.stats.lp_iterations),
                                          incumbent_, dual);
  }

  void offer(std::vector<double> x) {
    for (int j : inst_.integers) x[j] = std::round(x[j]);
    if (!is_feasible(inst_, x)) return;
    const double z = inst_.objective_value(x);
    if (enumerate_) {
      std::vector<long long> key;
      for (int j = 0; j < inst_.num_vars; ++j)
        if (inst_.divable[j]) key.push_back(std::llround(x[j]));
      if (seen_.insert(key).second && collected_.size() < cfg_.pool_capacity) collected_.push_back(x);
      return;
    }
    result_.pool.add(inst_, x);
    if (z < incumbent_) {
      incumbent_ = z;
      result_.incumbent = x;
      result_.trace.record(elapsed(), static_cast<double>(result_.stats.lp_iterations), incumbent_,
                           result_.trace.final_dual());
    }
  }

  void apply_bounds(const Node& node) {
    lp_.lower = root_lower_;
    lp_.upper = root_upper_;
    for (const auto& c : node.changes) {
      lp_.lower[c.col] = c.lower;
      lp_.upper[c.col] = c.upper;
    }
  }

  void process(const Node& node, std::optional<Node>& down, std::optional<Node>& up) {
    apply_bounds(node);
    LpSolution sol;
    try {
      sol = solve_lp(lp_, node.basis.get(), cfg_.lp);
    } catch (const SingularBasis&) {
      ++result_.stats.node_errors;
      return;
    } catch (const NumericalBreakdown&) {
      ++result_.stats.node_errors;
      return;
    }
    result_.stats.lp_iterations += sol.iterations;
    const bool is_root = result_.stats.nodes == 0;
    if (is_root) result_.root = sol;

    switch (sol.status) {
      case LpStatus::kInfeasible:
        return;
      case LpStatus::kUnbounded:
        if (is_root) result_.status = SolveStatus::kUnbounded;
        else ++result_.stats.node_errors;
        if (is_root) open_ = {};
        return;
      case LpStatus::kIterationLimit:
        ++result_.stats.node_errors;
        return;
      case LpStatus::kOptimal:
        break;
    }
    if (is_root) result_.trace.record(elapsed(), static_cast<double>(result_.stats.lp_iterations), incumbent_,
                                      sol.objective);
    if (!enumerate_ && sol.objective >= incumbent_ - kPruneTol) return;

    std::vector<double> x(sol.x.begin(), sol.x.begin() + inst_.num_vars);

    // Branching candidate: most fractional integer, lowest index on ties.
    int branch = -1;
    double best_frac = -1.0;
    for (int j : inst_.integers) {
      const double f = x[j] - std::floor(x[j]);
      if (!fractional(x[j])) continue;
      const double closeness = std::min(f, 1.0 - f);
      if (closeness > best_frac) {
        best_frac = closeness;
        branch = j;
      }
    }

    if (branch < 0) {
      offer(x);
      if (!enumerate_) return;
      // Split the face further on the first unfixed divable variable.
      for (int j = 0; j < inst_.num_vars; ++j) {
        if (inst_.divable[j] && lp_.lower[j] < lp_.upper[j]) {
          branch = j;
          break;
        }
      }
      if (branch < 0) return;
    } else {
      if (auto r = round_solution(x, inst_, &locks_)) offer(std::move(*r));
      if (!enumerate_) run_divers(sol);
      if (!enumerate_ && sol.objective >= incumbent_ - kPruneTol) return;
    }

    const double v = x[branch];
    double down_hi = std::floor(v + kIntTol);
    double up_lo = std::ceil(v - kIntTol);
    if (down_hi == up_lo) {
      // Integral value (enumerate mode): split into [lo, v] / [v+1, hi], or
      // [lo, v-1] / [v, hi] when v is the upper bound.
      if (up_lo + 1.0 <= lp_.upper[branch]) {
        up_lo += 1.0;
      } else {
        down_hi -= 1.0;
      }
    }
    prefer_up_ = (v - std::floor(v)) >= 0.5;
    auto basis = std::make_shared<const Basis>(sol.basis);
    auto make_child = [&](double lo, double hi) {
      Node child;
      child.changes = node.changes;
      bool replaced = false;
      for (auto& c : child.changes) {
        if (c.col == branch) {
          c.lower = lo;
          c.upper = hi;
          replaced = true;
        }
      }
      if (!replaced) child.changes.push_back({branch, lo, hi});
      child.basis = basis;
      child.bound = sol.objective;
      child.depth = node.depth + 1;
      child.id = next_id_++;
      return child;
    };
    if (down_hi >= lp_.lower[branch]) down = make_child(lp_.lower[branch], down_hi);
    if (up_lo <= lp_.upper[branch]) up = make_child(up_lo, lp_.upper[branch]);
  }

  void run_divers(const LpSolution& sol) {
    const int64_t index = result_.stats.nodes;
    for (const auto& d : cfg_.divers) {
      if (!d.due(index)) continue;
      ++result_.stats.dive_calls;
      DiveReport rep;
      try {
        rep = d.hook(inst_, lp_, sol, *result_.root, incumbent_);
      } catch (const SingularBasis&) {
        ++result_.stats.node_errors;
        continue;
      } catch (const NumericalBreakdown&) {
        ++result_.stats.node_errors;
        continue;
      }
      result_.stats.lp_iterations += rep.lp_iterations;
      for (auto& s : rep.solutions) {
        ++result_.stats.dive_solutions;
        offer(std::move(s));
      }
    }
  }

  SolveResult finish() {
    result_.primal_bound = incumbent_;
    result_.dual_bound = result_.trace.final_dual();
    if (result_.status == SolveStatus::kOptimalProven && !enumerate_) result_.dual_bound = incumbent_;
    return std::move(result_);
  }

  const MilpInstance& inst_;
  const SolveConfig& cfg_;
  const bool enumerate_;
  StandardLp lp_;
  const std::vector<double> root_lower_;
  const std::vector<double> root_upper_;
  const Locks locks_;
  const std::chrono::steady_clock::time_point start_;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  int64_t next_id_ = 0;
  double incumbent_ = kInfinity;
  bool prefer_up_ = false;
  bool complete_ = false;
  SolveResult result_;
  std::set<std::vector<long long>> seen_;
  std::vector<std::vector<double>> collected_;
};

constexpr double kFaceTol = 1e-6;

}  // namespace

namespace {

// Collects the distinct optimal assignments once z* is known.
EnumerationResult enumerate_face(const MilpInstance& inst, const SolveConfig& cfg, double optimum) {
  EnumerationResult out;
  out.optimum = optimum;
  MilpInstance face = inst;
  std::vector<int> cols;
  std::vector<double> vals;
  for (int j = 0; j < inst.num_vars; ++j) {
    if (inst.objective[j] == 0.0) continue;
    cols.push_back(j);
    vals.push_back(inst.objective[j]);
  }
  for (int side = 0; side < 2; ++side) {
    face.col_index.insert(face.col_index.end(), cols.begin(), cols.end());
    face.values.insert(face.values.end(), vals.begin(), vals.end());
    face.row_start.push_back(static_cast<int>(face.values.size()));
    face.sense.push_back(side == 0 ? RowSense::kLe : RowSense::kGe);
    face.rhs.push_back(side == 0 ? optimum + kFaceTol : optimum - kFaceTol);
    face.row_names.push_back(side == 0 ? "face_le" : "face_ge");
    ++face.num_rows;
  }

  SolveConfig enum_cfg = cfg;
  enum_cfg.divers.clear();
  TreeSearch search(face, enum_cfg, true);
  search.run();
  out.solutions = search.collected();
  std::sort(out.solutions.begin(), out.solutions.end());
  out.complete = search.complete();
  return out;
}

}  // namespace

EnumerationResult enumerate_optima(const MilpInstance& inst, const SolveConfig& cfg) {
  cfg.validate();
  SolveConfig opt = cfg;
  opt.mode = SolveMode::kOptimize;
  const SolveResult first = branch_and_bound(inst, opt);
  if (first.status == SolveStatus::kOptimalProven) return enumerate_face(inst, cfg, first.primal_bound);

  EnumerationResult out;
  out.complete = first.status == SolveStatus::kInfeasible;
  if (first.incumbent) {
    out.optimum = first.primal_bound;
    out.solutions.push_back(*first.incumbent);
  }
  return out;
}

SolveResult branch_and_bound(const MilpInstance& inst, const SolveConfig& cfg) {
  cfg.validate();
  if (cfg.mode == SolveMode::kEnumerate) {
    SolveConfig opt = cfg;
    opt.mode = SolveMode::kOptimize;
    SolveResult res = branch_and_bound(inst, opt);
    if (res.status != SolveStatus::kOptimalProven) return res;
    const auto en = enumerate_face(inst, cfg, res.primal_bound);
    SolutionPool pool(cfg.pool_capacity);
    for (const auto& x : en.solutions) pool.add(inst, x);
    res.pool = std::move(pool);
    if (!en.complete) res.status = SolveStatus::kLimit;
    return res;
  }
  TreeSearch search(inst, cfg, false);
  return search.run();
}

}  // namespace divekit
