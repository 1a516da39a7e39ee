#include <numeric>

#include "divekit/graphnet.hpp"
#include "divekit/rng.hpp"

namespace divekit {

void TrainingConfig::validate() const {
  if (tau && !(*tau > 0.0)) throw Error("temperature must be positive");
  if (!(adam.lr > 0.0) || !(adam.eps > 0.0)) throw Error("learning rate and epsilon must be positive");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0 && adam.beta2 >= 0.0 && adam.beta2 < 1.0))
    throw Error("Adam betas must lie in [0, 1)");
  if (epochs < 0 || batch_size <= 0 || validate_every <= 0) throw Error("invalid training schedule");
  if (!(bn_momentum >= 0.0 && bn_momentum <= 1.0)) throw Error("batch-norm momentum must lie in [0, 1]");
}

TrainingExample make_example(std::string name, const MilpInstance& inst, const LpSolution& root,
                             const SolutionPool& pool, std::optional<double> tau) {
  TrainingExample ex;
  ex.name = std::move(name);
  ex.graph = extract_graph(inst, root);
  ex.target = target_distribution(pool, inst, tau ? *tau : default_temperature(pool));
  return ex;
}

double mean_loss(const GnnParams& params, const std::vector<TrainingExample>& data) {
  if (data.empty()) return 0.0;
  const int heads = params.config().heads;
  double sum = 0.0;
  for (const auto& ex : data) {
    const Eigen::MatrixXd logits = forward(params, ex.graph, ForwardMode::kEval);
    sum += kl_loss_and_grad(logits, ex.graph, ex.target, heads, nullptr);
  }
  return sum / static_cast<double>(data.size());
}

TrainingReport train(GnnParams& params, const std::vector<TrainingExample>& data,
                     const std::vector<TrainingExample>& valid, const TrainingConfig& cfg) {
  cfg.validate();
  if (data.empty()) throw Error("no training examples");
  const int heads = params.config().heads;

  std::vector<const BipartiteGraph*> graphs;
  for (const auto& ex : data) graphs.push_back(&ex.graph);
  init_running_stats(params, graphs);

  TrainingReport report;
  GnnParams best = params;
  auto evaluate = [&](int epoch) {
    const double tl = mean_loss(params, data);
    report.epochs.push_back(epoch);
    report.train_loss.push_back(tl);
    double score = tl;
    if (!valid.empty()) {
      score = mean_loss(params, valid);
      report.valid_loss.push_back(score);
    }
    if (epoch == 0 || score < report.best_loss) {
      report.best_loss = score;
      report.best_epoch = epoch;
      best = params;
    }
  };
  evaluate(0);

  AdamState state;
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, static_cast<uint64_t>(epoch)));
    rng.shuffle(order);
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + static_cast<size_t>(cfg.batch_size));
      std::vector<const BipartiteGraph*> batch;
      for (size_t k = start; k < end; ++k) batch.push_back(&data[order[k]].graph);
      const BipartiteGraph g = concat_graphs(batch);

      ForwardCache cache;
      const Eigen::MatrixXd logits = forward(params, g, ForwardMode::kTrain, &cache);
      Eigen::MatrixXd dlogits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
      const double scale = 1.0 / static_cast<double>(end - start);
      int offset = 0;
      for (size_t k = start; k < end; ++k) {
        const auto& ex = data[order[k]];
        const int n = ex.graph.num_vars();
        Eigen::MatrixXd d;
        kl_loss_and_grad(logits.middleRows(offset, n), ex.graph, ex.target, heads, &d);
        dlogits.middleRows(offset, n) = scale * d;
        offset += n;
      }
      const GnnParams grads = backward(params, g, cache, dlogits);
      try {
        adam_step(params, grads, state, cfg.adam);
      } catch (const NonFiniteGradient&) {
        ++report.skipped_steps;
        continue;
      }
      update_running_stats(params, cache, cfg.bn_momentum);
    }
    if (epoch % cfg.validate_every == 0 || epoch == cfg.epochs) evaluate(epoch);
  }
  params = best;
  return report;
}

}  // namespace divekit
