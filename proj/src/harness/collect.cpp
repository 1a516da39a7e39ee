#include <json.hpp>

#include "divekit/harness.hpp"
#include "divekit/instance_io.hpp"

namespace divekit {

namespace {

constexpr int kCorpusVersion = 1;

struct Slot {
  std::optional<CorpusEntry> entry;
  bool dropped = false;
  bool failed = false;
  std::string message;
};

Slot collect_one(const MilpInstance& inst, const CollectConfig& cfg) {
  Slot slot;
  const LpSolution root = solve_lp(to_standard_form(inst), nullptr, cfg.solve.lp);
  if (!root.optimal()) {
    slot.failed = true;
    slot.message = inst.name + ": root LP " + to_string(root.status);
    return slot;
  }
  if (is_integral(inst, root.x)) {
    slot.dropped = true;
    slot.message = inst.name + ": solved at the root";
    return slot;
  }
  const SolveResult res = branch_and_bound(inst, cfg.solve);
  if (!res.incumbent) {
    slot.failed = true;
    slot.message = inst.name + ": no feasible solution (" + to_string(res.status) + ")";
    return slot;
  }
  CorpusEntry e;
  e.instance = inst;
  e.best_z = res.primal_bound;
  e.proven = res.status == SolveStatus::kOptimalProven;
  const auto fam = family_of(inst.name);
  if (cfg.augment_symmetric && e.proven && fam && family_is_symmetric(*fam)) {
    SolveConfig ec = cfg.solve;
    ec.pool_capacity = cfg.enumerate_capacity;
    ec.divers.clear();
    const EnumerationResult en = enumerate_optima(inst, ec);
    e.pool = SolutionPool(cfg.enumerate_capacity);
    for (const auto& x : en.solutions) e.pool.add(inst, x);
    e.augmented = true;
    e.complete = en.complete;
  }
  if (e.pool.empty()) {
    e.pool = SolutionPool(1);
    e.pool.add(inst, *res.incumbent);
    e.augmented = false;
  }
  slot.entry = std::move(e);
  return slot;
}

}  // namespace

std::string Corpus::to_json() const {
  nlohmann::json j;
  j["format"] = "divekit-corpus";
  j["version"] = kCorpusVersion;
  j["entries"] = nlohmann::json::array();
  for (const auto& e : entries) {
    nlohmann::json je;
    je["instance"] = nlohmann::json::parse(instance_to_json(e.instance));
    je["pool"] = nlohmann::json::parse(e.pool.to_json(e.instance));
    je["best_z"] = e.best_z;
    je["proven"] = e.proven;
    je["augmented"] = e.augmented;
    je["complete"] = e.complete;
    j["entries"].push_back(std::move(je));
  }
  return j.dump();
}

Corpus Corpus::from_json(const std::string& text) {
  Corpus c;
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.value("format", "") != "divekit-corpus") throw Error("not a corpus file");
    if (j.value("version", -1) != kCorpusVersion) throw Error("unsupported corpus version");
    for (const auto& je : j.at("entries")) {
      CorpusEntry e;
      e.instance = instance_from_json(je.at("instance").dump());
      e.pool = SolutionPool::from_json(je.at("pool").dump(), e.instance);
      e.best_z = je.at("best_z").get<double>();
      e.proven = je.at("proven").get<bool>();
      e.augmented = je.value("augmented", false);
      e.complete = je.value("complete", false);
      c.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error(std::string("malformed corpus: ") + ex.what());
  }
  return c;
}

CollectReport collect_data(const std::vector<MilpInstance>& instances, const CollectConfig& cfg) {
  cfg.solve.validate();
  std::vector<Slot> slots(instances.size());
  parallel_for(instances.size(), cfg.jobs, [&](size_t i) {
    try {
      slots[i] = collect_one(instances[i], cfg);
    } catch (const std::exception& ex) {
      slots[i] = Slot{};
      slots[i].failed = true;
      slots[i].message = instances[i].name + ": " + ex.what();
    }
  });
  CollectReport rep;
  for (auto& s : slots) {
    if (s.entry) rep.corpus.entries.push_back(std::move(*s.entry));
    if (s.dropped) ++rep.dropped_root_solved;
    if (s.failed) ++rep.failed;
    if (!s.message.empty()) rep.log.push_back(std::move(s.message));
  }
  return rep;
}

std::vector<TrainingExample> corpus_examples(const Corpus& corpus, std::optional<double> tau, int jobs) {
  std::vector<TrainingExample> out(corpus.entries.size());
  parallel_for(corpus.entries.size(), jobs, [&](size_t i) {
    const auto& e = corpus.entries[i];
    const LpSolution root = solve_lp(to_standard_form(e.instance));
    if (!root.optimal()) throw Error(e.instance.name + ": root LP is not optimal");
    out[i] = make_example(e.instance.name, e.instance, root, e.pool, tau);
  });
  return out;
}

}  // namespace divekit
