#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "divekit/harness.hpp"
#include "divekit/rng.hpp"

namespace divekit {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sample standard deviation over sqrt(k); 0 for fewer than two values.
double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
}

std::string join_seeds(const std::vector<uint64_t>& seeds) {
  std::string s;
  for (size_t i = 0; i < seeds.size(); ++i) s += (i ? ";" : "") + std::to_string(seeds[i]);
  return s;
}

std::string model_fingerprint(const ScorerOptions& o) {
  return o.model ? hex64(fnv1a(o.model->to_json())) : std::string("none");
}

// Metadata lines followed by the config hash over exactly those lines.
std::string header(const std::vector<std::string>& lines) {
  std::string body;
  for (const auto& l : lines) body += "# " + l + "\n";
  return body + "# config_hash=" + hex64(fnv1a(body)) + "\n";
}

std::string schedule_text(const BnbConfigSpec& c) {
  std::string s = c.name + ":";
  if (c.schedule.empty()) return s + "no-diving";
  for (size_t i = 0; i < c.schedule.size(); ++i)
    s += (i ? "," : "") + c.schedule[i].diver + "/" + std::to_string(c.schedule[i].freq) + "/" +
         std::to_string(c.schedule[i].offset);
  return s;
}

}  // namespace

void DiveEvalConfig::validate() const {
  if (divers.empty()) throw Error("no divers to evaluate");
  if (seeds.empty()) throw Error("no seeds");
  for (const auto& d : divers) {
    if (!is_registered_diver(d.name)) throw Error("unknown diver '" + d.name + "'");
    if (d.d_max != divers.front().d_max || d.lp_iter_limit != divers.front().lp_iter_limit)
      throw BudgetMismatch("diver " + d.name + " has a different diving budget than " + divers.front().name);
  }
}

DiveEvalResult eval_dives(const Corpus& corpus, const DiveEvalConfig& cfg) {
  cfg.validate();
  const size_t nd = cfg.divers.size(), ns = cfg.seeds.size();
  const size_t tasks = corpus.entries.size() * nd * ns;
  DiveEvalResult out;
  out.records.resize(tasks);
  parallel_for(tasks, cfg.jobs, [&](size_t t) {
    const size_t i = t / (nd * ns), d = (t / ns) % nd, s = t % ns;
    const auto& e = corpus.entries[i];
    const auto& spec = cfg.divers[d];
    DiveOptions o;
    o.d_max = spec.d_max;
    o.lp_iter_limit = spec.lp_iter_limit;
    o.lp = cfg.lp;
    ScorerOptions so = cfg.scorer;
    so.seed = derive_seed(cfg.seeds[s], i);
    auto scorer = make_scorer(spec.name, so);
    DiveContext ctx = make_root_context(e.instance, o);
    const DiveResult r = dive(ctx, *scorer);

    DiveRecord& rec = out.records[t];
    rec.instance = e.instance.name;
    rec.diver = spec.name;
    rec.seed = cfg.seeds[s];
    rec.found = !r.solutions.empty();
    rec.z = r.best_z;
    rec.primal_gap = rec.found ? primal_gap(r.best_z, e.best_z) : kInfinity;
    rec.depth = r.depth_reached;
    rec.termination = r.termination;
    rec.lp_iterations = r.lp_iterations;
  });

  for (const auto& spec : cfg.divers) {
    DiverSummary s;
    s.diver = spec.name;
    std::vector<double> gaps;
    double depth = 0.0;
    for (const auto& r : out.records) {
      if (r.diver != spec.name) continue;
      ++s.runs;
      depth += r.depth;
      if (r.found)
        gaps.push_back(r.primal_gap);
      else
        ++s.failed;
    }
    s.mean_gap = mean_of(gaps);
    s.stderr_gap = stderr_of(gaps);
    s.mean_depth = s.runs ? depth / s.runs : 0.0;
    out.summary.push_back(s);
  }
  return out;
}

std::vector<ScheduleEntry> default_schedule() {
  return {{"coefficient", 10, 1}, {"fractional", 10, 3}, {"linesearch", 10, 6},
          {"pseudocost", 10, 2},  {"vectorlength", 10, 4}};
}

BnbConfigSpec named_config(const std::string& name) {
  if (name == "none") return {"none", {}};
  if (name == "default") return {"default", default_schedule()};
  if (name == "l2dive") {
    auto s = default_schedule();
    s.push_back({"l2dive", 0, 0});
    return {"l2dive", s};
  }
  throw Error("unknown solver configuration '" + name + "'");
}

BnbEvalResult eval_bnb(const Corpus& corpus, const BnbEvalConfig& cfg) {
  if (cfg.configs.empty() || cfg.seeds.empty()) throw Error("nothing to evaluate");
  const size_t nc = cfg.configs.size(), ns = cfg.seeds.size(), ni = corpus.entries.size();
  BnbEvalResult out;
  out.records.resize(ni * nc * ns);
  parallel_for(out.records.size(), cfg.jobs, [&](size_t t) {
    const size_t i = t / (nc * ns), c = (t / ns) % nc, s = t % ns;
    const auto& e = corpus.entries[i];
    const auto& spec = cfg.configs[c];
    SolveConfig sc;
    sc.time_limit = cfg.time_limit;
    sc.node_limit = cfg.node_limit;
    sc.seed = cfg.seeds[s];
    ScorerOptions so = cfg.scorer;
    so.seed = derive_seed(cfg.seeds[s], i);
    for (const auto& d : spec.schedule)
      sc.divers.push_back({d.diver, d.freq, d.offset, make_dive_hook(d.diver, so, cfg.dive)});
    const SolveResult res = branch_and_bound(e.instance, sc);

    BnbRecord& r = out.records[t];
    r.instance = e.instance.name;
    r.config = spec.name;
    r.seed = cfg.seeds[s];
    r.status = res.status;
    r.primal = res.primal_bound;
    r.dual = res.dual_bound;
    r.gap = primal_dual_gap(res.primal_bound, res.dual_bound);
    r.integral = primal_dual_integral(res.trace, cfg.horizon, cfg.clock);
    r.finish = cfg.clock == SolveTrace::Clock::kWall ? res.stats.wall_seconds
                                                     : static_cast<double>(res.stats.lp_iterations);
    r.nodes = res.stats.nodes;
    r.lp_iterations = res.stats.lp_iterations;
  });

  // mean[i][c] over seeds, for win counting.
  std::vector<std::vector<double>> inst_mean(ni, std::vector<double>(nc, 0.0));
  for (size_t t = 0; t < out.records.size(); ++t) {
    const size_t i = t / (nc * ns), c = (t / ns) % nc;
    inst_mean[i][c] += out.records[t].integral / static_cast<double>(ns);
  }
  for (size_t c = 0; c < nc; ++c) {
    BnbSummary s;
    s.config = cfg.configs[c].name;
    std::vector<double> all, finish, per_seed(ns, 0.0);
    for (size_t t = 0; t < out.records.size(); ++t) {
      if ((t / ns) % nc != c) continue;
      const auto& r = out.records[t];
      all.push_back(r.integral);
      finish.push_back(r.finish);
      per_seed[t % ns] += r.integral / static_cast<double>(ni);
      if (r.status == SolveStatus::kOptimalProven) ++s.solved;
    }
    s.mean_integral = mean_of(all);
    s.stderr_integral = stderr_of(per_seed);
    s.mean_finish = mean_of(finish);
    out.summary.push_back(s);
  }
  for (size_t i = 0; i < ni; ++i) {
    const double best = *std::min_element(inst_mean[i].begin(), inst_mean[i].end());
    const double tol = 1e-9 * std::max(1.0, std::abs(best));
    for (size_t c = 0; c < nc; ++c)
      if (inst_mean[i][c] <= best + tol) ++out.summary[c].wins;
  }
  return out;
}

void TuneConfig::validate() const {
  if (samples < 1) throw Error("tuning needs at least one sample");
  if (freq_choices.empty()) throw Error("tuning needs at least one frequency choice");
}

TuneResult tune_ensemble(const Corpus& validation, const TuneConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  std::vector<BnbConfigSpec> specs;
  if (cfg.include_default) specs.push_back(named_config("default"));
  for (int k = 0; k < cfg.samples; ++k) {
    BnbConfigSpec spec{"sample-" + std::to_string(k), {}};
    for (const auto& d : default_schedule()) {
      const FreqChoice choice = cfg.freq_choices[rng.uniform_int(0, static_cast<int64_t>(cfg.freq_choices.size()) - 1)];
      const bool zero_offset = cfg.vary_offset && rng.bernoulli(0.5);
      int freq = d.freq;
      switch (choice) {
        case FreqChoice::kOff: freq = -1; break;
        case FreqChoice::kDouble: freq = d.freq / 2; break;
        case FreqChoice::kDefault: break;
        case FreqChoice::kHalf: freq = d.freq * 2; break;
      }
      if (freq < 0) continue;
      spec.schedule.push_back({d.diver, freq, zero_offset ? 0 : d.offset});
    }
    specs.push_back(std::move(spec));
  }

  BnbEvalConfig ec = cfg.eval;
  ec.configs = specs;
  const BnbEvalResult r = eval_bnb(validation, ec);
  TuneResult out;
  out.solver_calls = static_cast<int64_t>(r.records.size());
  for (size_t c = 0; c < specs.size(); ++c) {
    const double obj =
        cfg.objective == TuneObjective::kIntegral ? r.summary[c].mean_integral : r.summary[c].mean_finish;
    out.evaluated.emplace_back(specs[c], obj);
    if (obj < out.best_objective) {
      out.best_objective = obj;
      out.best = specs[c];
    }
  }
  return out;
}

std::string dive_summary_csv(const DiveEvalResult& r, const DiveEvalConfig& cfg) {
  std::string names;
  for (const auto& d : cfg.divers) names += (names.empty() ? "" : ";") + d.name;
  std::ostringstream os;
  os << header({"divekit eval-dive summary", "divers=" + names, "d_max=" + std::to_string(cfg.divers.front().d_max),
                "lp_iter_limit=" + (cfg.divers.front().lp_iter_limit
                                        ? std::to_string(*cfg.divers.front().lp_iter_limit)
                                        : std::string("none")),
                "seeds=" + join_seeds(cfg.seeds), "model=" + model_fingerprint(cfg.scorer),
                "primal_gap=z-z_best; failed runs excluded from means and counted in 'failed'"});
  os << "diver,runs,failed,mean_primal_gap,stderr_primal_gap,mean_depth\n";
  for (const auto& s : r.summary)
    os << s.diver << ',' << s.runs << ',' << s.failed << ',' << format_number(s.mean_gap) << ','
       << format_number(s.stderr_gap) << ',' << format_number(s.mean_depth) << '\n';
  return os.str();
}

std::string dive_records_csv(const DiveEvalResult& r, const DiveEvalConfig& cfg) {
  std::ostringstream os;
  os << header({"divekit eval-dive records", "d_max=" + std::to_string(cfg.divers.front().d_max),
                "seeds=" + join_seeds(cfg.seeds), "model=" + model_fingerprint(cfg.scorer)});
  os << "instance,diver,seed,found,z,primal_gap,depth,termination,lp_iterations\n";
  for (const auto& x : r.records)
    os << x.instance << ',' << x.diver << ',' << x.seed << ',' << (x.found ? 1 : 0) << ',' << format_number(x.z)
       << ',' << format_number(x.primal_gap) << ',' << x.depth << ',' << to_string(x.termination) << ','
       << x.lp_iterations << '\n';
  return os.str();
}

namespace {

std::vector<std::string> bnb_meta(const std::string& title, const BnbEvalConfig& cfg) {
  std::vector<std::string> lines = {title,
                                    "clock=" + std::string(cfg.clock == SolveTrace::Clock::kWall ? "wall" : "work"),
                                    "horizon=" + format_number(cfg.horizon),
                                    "time_limit=" + format_number(cfg.time_limit),
                                    "node_limit=" + std::to_string(cfg.node_limit),
                                    "seeds=" + join_seeds(cfg.seeds),
                                    "d_max=" + std::to_string(cfg.dive.d_max),
                                    "model=" + model_fingerprint(cfg.scorer),
                                    "wins: lowest mean integral per instance; ties award every tied config"};
  for (const auto& c : cfg.configs) lines.push_back("config " + schedule_text(c));
  return lines;
}

}  // namespace

std::string bnb_summary_csv(const BnbEvalResult& r, const BnbEvalConfig& cfg) {
  std::ostringstream os;
  os << header(bnb_meta("divekit eval-bnb summary", cfg));
  os << "config,mean_integral,stderr_integral,mean_finish,solved,wins\n";
  for (const auto& s : r.summary)
    os << s.config << ',' << format_number(s.mean_integral) << ',' << format_number(s.stderr_integral) << ','
       << format_number(s.mean_finish) << ',' << s.solved << ',' << s.wins << '\n';
  return os.str();
}

std::string bnb_records_csv(const BnbEvalResult& r, const BnbEvalConfig& cfg) {
  std::ostringstream os;
  os << header(bnb_meta("divekit eval-bnb records", cfg));
  os << "instance,config,seed,status,primal,dual,gap,integral,finish,nodes,lp_iterations\n";
  for (const auto& x : r.records)
    os << x.instance << ',' << x.config << ',' << x.seed << ',' << to_string(x.status) << ','
       << format_number(x.primal) << ',' << format_number(x.dual) << ',' << format_number(x.gap) << ','
       << format_number(x.integral) << ',' << format_number(x.finish) << ',' << x.nodes << ',' << x.lp_iterations
       << '\n';
  return os.str();
}

}  // namespace divekit
