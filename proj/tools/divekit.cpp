#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>

#include "divekit/harness.hpp"
#include "divekit/instance_io.hpp"

namespace fs = std::filesystem;
using namespace divekit;

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<uint64_t> seed_list(uint64_t seed, int count) {
  std::vector<uint64_t> out;
  for (int k = 0; k < count; ++k) out.push_back(seed + static_cast<uint64_t>(k));
  return out;
}

std::vector<fs::path> instance_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    const auto ext = e.path().extension();
    if (e.is_regular_file() && (ext == ".json" || ext == ".mps")) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::shared_ptr<const GnnParams> load_model(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const GnnParams>(GnnParams::from_json(read_text_file(path)));
}

Corpus load_corpus(const std::string& path) { return Corpus::from_json(read_text_file(path)); }

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text_file(path, text);
}

SolveTrace::Clock parse_clock(const std::string& s) {
  if (s == "wall") return SolveTrace::Clock::kWall;
  if (s == "work") return SolveTrace::Clock::kWork;
  throw Error("unknown clock '" + s + "' (wall or work)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned diving heuristics for mixed integer linear programs"};
  app.require_subcommand(1);

  uint64_t seed = 0;
  int jobs = 1;
  app.add_option("--seed", seed, "Base seed")->capture_default_str();
  app.add_option("--jobs", jobs, "Worker threads")->capture_default_str();

  // gen
  auto* gen = app.add_subcommand("gen", "Generate instances");
  std::string family = "set-cover", gen_out;
  int count = 1;
  GeneratorConfig gcfg;
  gen->add_option("--family", family, "set-cover, comb-auction, facility-location, indep-set")->capture_default_str();
  gen->add_option("--count", count)->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", seed);
  gen->add_option("--rows", gcfg.rows)->capture_default_str();
  gen->add_option("--cols", gcfg.cols)->capture_default_str();
  gen->add_option("--density", gcfg.density)->capture_default_str();
  gen->add_option("--items", gcfg.items)->capture_default_str();
  gen->add_option("--bids", gcfg.bids)->capture_default_str();
  gen->add_option("--customers", gcfg.customers)->capture_default_str();
  gen->add_option("--facilities", gcfg.facilities)->capture_default_str();
  gen->add_option("--nodes", gcfg.nodes)->capture_default_str();
  gen->add_option("--affinity", gcfg.affinity)->capture_default_str();

  // collect
  auto* collect = app.add_subcommand("collect", "Solve instances and build a training corpus");
  std::string collect_in, collect_out;
  CollectConfig ccfg;
  collect->add_option("--in", collect_in, "Instance directory")->required();
  collect->add_option("--out", collect_out, "Corpus file")->required();
  collect->add_option("--time-limit", ccfg.solve.time_limit)->capture_default_str();
  collect->add_option("--node-limit", ccfg.solve.node_limit)->capture_default_str();
  collect->add_option("--pool-size", ccfg.enumerate_capacity, "Optima kept for symmetric families")
      ->capture_default_str();
  collect->add_option("--seed", seed);
  collect->add_option("--jobs", jobs);

  // train
  auto* trn = app.add_subcommand("train", "Train the graph network on a corpus");
  std::string train_corpus, valid_corpus, train_out, train_log;
  TrainingConfig tcfg;
  GnnConfig gnn;
  double tau = 0.0;
  trn->add_option("--corpus", train_corpus)->required();
  trn->add_option("--valid", valid_corpus, "Validation corpus");
  trn->add_option("--out", train_out, "Checkpoint file")->required();
  trn->add_option("--log", train_log, "Loss curve CSV");
  trn->add_option("--epochs", tcfg.epochs)->capture_default_str();
  trn->add_option("--batch-size", tcfg.batch_size)->capture_default_str();
  trn->add_option("--lr", tcfg.adam.lr)->capture_default_str();
  trn->add_option("--tau", tau, "Target temperature (default: per-pool)");
  trn->add_option("--hidden", gnn.hidden)->capture_default_str();
  trn->add_option("--heads", gnn.heads)->capture_default_str();
  trn->add_option("--seed", seed);
  trn->add_option("--jobs", jobs);

  // eval-dive
  auto* edive = app.add_subcommand("eval-dive", "Single dives from the root node");
  std::string edive_corpus, edive_out, divers = "fractional,coefficient,linesearch,vectorlength,pseudocost,lower,upper,random",
                                       model_path, records_out;
  int d_max = 100, seed_count = 1;
  edive->add_option("--corpus", edive_corpus)->required();
  edive->add_option("--divers", divers)->capture_default_str();
  edive->add_option("--d-max", d_max)->capture_default_str();
  edive->add_option("--model", model_path, "Checkpoint for l2dive");
  edive->add_option("--seeds", seed_count, "Number of seeds starting at --seed")->capture_default_str();
  edive->add_option("--out", edive_out, "Summary CSV (default stdout)");
  edive->add_option("--records", records_out, "Per-dive CSV");
  edive->add_option("--seed", seed);
  edive->add_option("--jobs", jobs);

  // eval-bnb
  auto* ebnb = app.add_subcommand("eval-bnb", "Branch and bound with diver schedules");
  std::string ebnb_corpus, ebnb_out, configs = "none,default", clock = "wall", bnb_records;
  BnbEvalConfig bcfg;
  int bnb_seeds = 3;
  bool horizon_set = false;
  ebnb->add_option("--corpus", ebnb_corpus)->required();
  ebnb->add_option("--configs", configs, "none, default, l2dive")->capture_default_str();
  ebnb->add_option("--time-limit", bcfg.time_limit)->capture_default_str();
  ebnb->add_option("--node-limit", bcfg.node_limit)->capture_default_str();
  ebnb->add_option("--clock", clock, "wall or work (simplex iterations)")->capture_default_str();
  ebnb->add_option("--horizon", bcfg.horizon, "Integral horizon in clock units (default: time limit)");
  ebnb->add_option("--seeds", bnb_seeds)->capture_default_str();
  ebnb->add_option("--d-max", d_max)->capture_default_str();
  ebnb->add_option("--model", model_path);
  ebnb->add_option("--out", ebnb_out, "Summary CSV (default stdout)");
  ebnb->add_option("--records", bnb_records, "Per-run CSV");
  ebnb->add_option("--seed", seed);
  ebnb->add_option("--jobs", jobs);

  // tune
  auto* tune = app.add_subcommand("tune", "Random search over diver frequencies and offsets");
  std::string tune_corpus, tune_out, objective = "integral";
  TuneConfig ucfg;
  tune->add_option("--corpus", tune_corpus, "Validation corpus")->required();
  tune->add_option("--samples", ucfg.samples)->capture_default_str();
  tune->add_option("--objective", objective, "integral or time")->capture_default_str();
  tune->add_option("--time-limit", ucfg.eval.time_limit)->capture_default_str();
  tune->add_option("--node-limit", ucfg.eval.node_limit)->capture_default_str();
  tune->add_option("--clock", clock)->capture_default_str();
  tune->add_option("--seeds", bnb_seeds)->capture_default_str();
  tune->add_option("--out", tune_out, "Result CSV (default stdout)");
  tune->add_option("--seed", seed);
  tune->add_option("--jobs", jobs);

  // verify
  auto* verify = app.add_subcommand("verify", "Check the solvers against the reference oracles");
  VerifyConfig vcfg;
  verify->add_option("--lp-cases", vcfg.lp_cases)->capture_default_str();
  verify->add_option("--proposition-cases", vcfg.proposition_cases)->capture_default_str();
  verify->add_option("--bnb-cases", vcfg.bnb_cases)->capture_default_str();
  verify->add_option("--seed", seed);

  CLI11_PARSE(app, argc, argv);
  horizon_set = ebnb->count("--horizon") > 0;

  try {
    if (*gen) {
      gcfg.family = family_from_name(family);
      fs::create_directories(gen_out);
      for (int k = 0; k < count; ++k) {
        gcfg.seed = derive_seed(seed, static_cast<uint64_t>(k));
        const MilpInstance inst = generate(gcfg);
        write_instance(inst, fs::path(gen_out) / (inst.name + ".json"));
      }
      std::cerr << "wrote " << count << " instances to " << gen_out << "\n";
      return 0;
    }

    if (*collect) {
      ccfg.jobs = jobs;
      ccfg.solve.seed = seed;
      std::vector<MilpInstance> insts;
      int unreadable = 0;
      for (const auto& p : instance_files(collect_in)) {
        try {
          insts.push_back(read_instance(p));
        } catch (const Error& ex) {
          std::cerr << p.string() << ": " << ex.what() << "\n";
          ++unreadable;
        }
      }
      const CollectReport rep = collect_data(insts, ccfg);
      for (const auto& line : rep.log) std::cerr << line << "\n";
      write_text_file(collect_out, rep.corpus.to_json());
      std::cerr << "corpus: " << rep.corpus.entries.size() << " entries, " << rep.dropped_root_solved
                << " solved at the root, " << rep.failed + unreadable << " failed\n";
      return rep.failed + unreadable == 0 ? 0 : 2;
    }

    if (*trn) {
      tcfg.seed = seed;
      if (trn->count("--tau")) tcfg.tau = tau;
      tcfg.validate();
      const auto data = corpus_examples(load_corpus(train_corpus), tcfg.tau, jobs);
      std::vector<TrainingExample> valid;
      if (!valid_corpus.empty()) valid = corpus_examples(load_corpus(valid_corpus), tcfg.tau, jobs);
      GnnParams params = GnnParams::init(gnn, seed);
      const TrainingReport rep = train(params, data, valid, tcfg);
      write_text_file(train_out, params.to_json());
      std::ostringstream log;
      log << "epoch,train_loss,valid_loss\n";
      for (size_t i = 0; i < rep.epochs.size(); ++i)
        log << rep.epochs[i] << ',' << format_number(rep.train_loss[i]) << ','
            << (i < rep.valid_loss.size() ? format_number(rep.valid_loss[i]) : "") << '\n';
      if (!train_log.empty()) write_text_file(train_log, log.str());
      std::cerr << "best epoch " << rep.best_epoch << " loss " << format_number(rep.best_loss) << " ("
                << rep.skipped_steps << " skipped steps)\n";
      return 0;
    }

    if (*edive) {
      DiveEvalConfig cfg;
      for (const auto& name : split_list(divers)) cfg.divers.push_back({name, d_max, std::nullopt});
      cfg.scorer.model = load_model(model_path);
      cfg.seeds = seed_list(seed, seed_count);
      cfg.jobs = jobs;
      const auto r = eval_dives(load_corpus(edive_corpus), cfg);
      write_output(edive_out, dive_summary_csv(r, cfg));
      if (!records_out.empty()) write_text_file(records_out, dive_records_csv(r, cfg));
      return 0;
    }

    if (*ebnb) {
      for (const auto& name : split_list(configs)) bcfg.configs.push_back(named_config(name));
      bcfg.clock = parse_clock(clock);
      if (!horizon_set) bcfg.horizon = bcfg.time_limit;
      bcfg.seeds = seed_list(seed, bnb_seeds);
      bcfg.scorer.model = load_model(model_path);
      bcfg.dive.d_max = d_max;
      bcfg.jobs = jobs;
      const auto r = eval_bnb(load_corpus(ebnb_corpus), bcfg);
      write_output(ebnb_out, bnb_summary_csv(r, bcfg));
      if (!bnb_records.empty()) write_text_file(bnb_records, bnb_records_csv(r, bcfg));
      return 0;
    }

    if (*tune) {
      if (objective == "integral")
        ucfg.objective = TuneObjective::kIntegral;
      else if (objective == "time")
        ucfg.objective = TuneObjective::kTime;
      else
        throw Error("unknown objective '" + objective + "'");
      ucfg.seed = seed;
      ucfg.eval.clock = parse_clock(clock);
      ucfg.eval.horizon = ucfg.eval.time_limit;
      ucfg.eval.seeds = seed_list(seed, bnb_seeds);
      ucfg.eval.jobs = jobs;
      const auto r = tune_ensemble(load_corpus(tune_corpus), ucfg);
      std::ostringstream os;
      os << "# divekit tune\n# samples=" << ucfg.samples << "\n# objective=" << objective
         << "\n# solver_calls=" << r.solver_calls << "\n";
      os << "config,objective,best,schedule\n";
      for (const auto& [spec, obj] : r.evaluated) {
        std::string sched;
        for (const auto& e : spec.schedule)
          sched += (sched.empty() ? "" : ";") + e.diver + "/" + std::to_string(e.freq) + "/" + std::to_string(e.offset);
        os << spec.name << ',' << format_number(obj) << ',' << (spec.name == r.best.name ? 1 : 0) << ','
           << (sched.empty() ? "no-diving" : sched) << '\n';
      }
      write_output(tune_out, os.str());
      return 0;
    }

    if (*verify) {
      vcfg.seed = seed;
      const VerifyReport rep = run_verification(vcfg);
      for (const auto& f : rep.failures) std::cerr << f << "\n";
      std::cout << "lp " << rep.lp_checked - rep.lp_failed << "/" << rep.lp_checked << "\n"
                << "tightening " << rep.proposition_checked - rep.proposition_failed << "/"
                << rep.proposition_checked << "\n"
                << "bnb " << rep.bnb_checked - rep.bnb_failed << "/" << rep.bnb_checked << "\n";
      return rep.ok() ? 0 : 2;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
