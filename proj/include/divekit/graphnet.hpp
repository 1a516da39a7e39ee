#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divekit/bnb.hpp"
#include "divekit/instance.hpp"
#include "divekit/simplex.hpp"

namespace divekit {

inline constexpr int kVarFeatures = 15;
inline constexpr int kConsFeatures = 8;
inline constexpr const char* kFeatureVersion = "divekit-features-v1";

// Variable–constraint graph of an instance at its root LP.
//
// Variable features: objective / max|c|, finite-lower flag, finite-upper
// flag, signed log1p of each finite bound, integer flag, binary flag, root
// LP value (scaled into [0,1] when both bounds are finite), fractionality,
// reduced-cost sign, at-lower flag, at-upper flag, up-locks / degree,
// down-locks / degree, degree / max degree.
//
// Constraint features: sense one-hot (LE, GE, EQ), rhs / ||a_i||,
// ||a_i|| / max norm, y_b * ||a_i|| / max|c|, oriented slack / ||a_i||
// (nonnegative when satisfied), degree / max degree.
//
// Edge feature: a_ij / ||a_i||.
struct BipartiteGraph {
  Eigen::MatrixXd var_feats;   // n x kVarFeatures
  Eigen::MatrixXd cons_feats;  // m x kConsFeatures
  std::vector<int> edge_row;
  std::vector<int> edge_col;
  std::vector<double> edge_coef;
  std::vector<char> candidate_mask;
  std::vector<double> lower;  // variable bounds, used for bit encoding
  std::vector<double> upper;

  int num_vars() const { return static_cast<int>(var_feats.rows()); }
  int num_cons() const { return static_cast<int>(cons_feats.rows()); }
  int num_edges() const { return static_cast<int>(edge_coef.size()); }
  std::vector<int> candidates() const;
};

// `root` must be an optimal solution of to_standard_form(inst).
BipartiteGraph extract_graph(const MilpInstance& inst, const LpSolution& root);

// Disjoint union, node indices offset in order.
BipartiteGraph concat_graphs(const std::vector<const BipartiteGraph*>& graphs);

struct GnnConfig {
  int hidden = 64;
  int heads = 4;  // bits per variable; binaries use one
};

// A named weight block. Biases are 1 x k.
struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
};

class GnnParams {
 public:
  enum Index {
    kBnVarGamma, kBnVarBeta, kBnConsGamma, kBnConsBeta,
    kVarW1, kVarB1, kVarW2, kVarB2,
    kConsW1, kConsB1, kConsW2, kConsB2,
    kVcMsgW, kVcMsgB, kVcOutW, kVcOutB,
    kCvMsgW, kCvMsgB, kCvOutW, kCvOutB,
    kOutW1, kOutB1, kOutW2, kOutB2,
    kNumTensors
  };

  GnnParams() = default;
  // Glorot-uniform weights, zero biases, unit batch-norm scale.
  static GnnParams init(const GnnConfig& cfg, uint64_t seed);
  // Same shapes, every entry zero (including running statistics).
  GnnParams zeros_like() const;

  const GnnConfig& config() const { return cfg_; }
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  Eigen::MatrixXd& operator[](Index i) { return tensors_[i].value; }
  const Eigen::MatrixXd& operator[](Index i) const { return tensors_[i].value; }
  int64_t size() const;

  // Batch-norm running statistics (not trained by gradient).
  Eigen::RowVectorXd var_mean, var_var, cons_mean, cons_var;

  std::string to_json() const;
  static GnnParams from_json(const std::string& text);

 private:
  GnnConfig cfg_;
  std::vector<Tensor> tensors_;
};

enum class ForwardMode { kTrain, kEval };

// Activations kept for the backward pass.
struct ForwardCache {
  Eigen::MatrixXd xv_hat, xc_hat;  // normalized inputs
  Eigen::RowVectorXd v_mean, v_var, c_mean, c_var;  // batch statistics (train)
  Eigen::MatrixXd xv_bn, av1, hv1, av2, hv;
  Eigen::MatrixXd xc_bn, ac1, hc1, ac2, hc;
  Eigen::MatrixXd m_vc, agg_c, pc, hc2;
  Eigen::MatrixXd m_cv, agg_v, pv, hv2;
  Eigen::MatrixXd q1, r1;
  Eigen::SparseMatrix<double> s_cv;  // m x n, e_ij / sqrt(deg_i)
  Eigen::SparseMatrix<double> s_vc;  // n x m, e_ij / sqrt(deg_j)
};

// Returns logits (num_vars x heads). Eval mode normalizes with running
// statistics, train mode with the statistics of this (batch) graph.
Eigen::MatrixXd forward(const GnnParams& params, const BipartiteGraph& g, ForwardMode mode,
                        ForwardCache* cache = nullptr);

// running <- (1 - momentum) * running + momentum * batch
void update_running_stats(GnnParams& params, const ForwardCache& cache, double momentum);
// Sets running statistics to the exact statistics of all nodes in `graphs`.
void init_running_stats(GnnParams& params, const std::vector<const BipartiteGraph*>& graphs);

// ceil(log2(hi - lo + 1)) clamped to [1, heads]; heads when a bound is infinite.
int bit_width(double lower, double upper, int heads);
// Bits of (value - origin), saturated at 2^width - 1. The origin is the lower
// bound, or 0 when it is infinite.
std::vector<int> encode_bits(double value, double lower, double upper, int width);
double decode_bits(const std::vector<int>& bits, double lower, double upper);

struct PredictedDistribution {
  std::vector<int> candidates;
  std::vector<std::vector<double>> means;  // Bernoulli means per bit
};

PredictedDistribution predicted_distribution(const Eigen::MatrixXd& logits, const BipartiteGraph& g, int heads);

// p_tau restricted to the candidates: duplicates merged, weights
// exp(-(z - z_min) / tau).
struct TargetDistribution {
  std::vector<int> candidates;
  std::vector<std::vector<double>> support;  // candidate values per point
  std::vector<double> prob;
};

TargetDistribution target_distribution(const SolutionPool& pool, const MilpInstance& inst, double tau);
// 0.5 * (max z - min z + 1) over the pool.
double default_temperature(const SolutionPool& pool);

// KL(p || q) with q factorized over candidates and bits; log arguments
// clamped at 1e-12.
double kl_loss(const PredictedDistribution& pred, const TargetDistribution& target, const BipartiteGraph& g);

// Loss and d loss / d logits for one graph given its logits.
double kl_loss_and_grad(const Eigen::MatrixXd& logits, const BipartiteGraph& g, const TargetDistribution& target,
                        int heads, Eigen::MatrixXd* dlogits);

// Gradients of a loss with respect to every tensor, given d loss / d logits
// of the train-mode forward that produced `cache`.
GnnParams backward(const GnnParams& params, const BipartiteGraph& g, const ForwardCache& cache,
                   const Eigen::MatrixXd& dlogits);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<Eigen::MatrixXd> m, v;
  int64_t t = 0;
};

// Standard bias-corrected Adam. Throws NonFiniteGradient (leaving params and
// state untouched) when a gradient entry is NaN or infinite.
void adam_step(GnnParams& params, const GnnParams& grads, AdamState& state, const AdamConfig& cfg);

enum class PredictMode { kMode, kSample };

struct Prediction {
  std::vector<int> candidates;
  std::vector<double> values;      // decoded integer per candidate
  std::vector<double> confidence;  // model probability of that value
};

// Mode rounds each mean at 0.5 (exactly 0.5 gives 0); Sample draws each bit.
Prediction predict_assignment(const PredictedDistribution& pred, const BipartiteGraph& g, PredictMode mode,
                              uint64_t seed = 0);

struct TrainingExample {
  std::string name;
  BipartiteGraph graph;
  TargetDistribution target;
};

// Pool plus root LP turned into a training pair. Without `tau` the pool's
// default temperature is used.
TrainingExample make_example(std::string name, const MilpInstance& inst, const LpSolution& root,
                             const SolutionPool& pool, std::optional<double> tau = std::nullopt);

struct TrainingConfig {
  std::optional<double> tau;  // target temperature; per-pool default when unset
  AdamConfig adam;
  int epochs = 100;
  int batch_size = 8;
  int validate_every = 1;
  double bn_momentum = 0.1;
  uint64_t seed = 0;

  void validate() const;
};

struct TrainingReport {
  std::vector<int> epochs;         // evaluated epochs; 0 is before the first update
  std::vector<double> train_loss;  // per evaluated epoch
  std::vector<double> valid_loss;  // empty without validation data
  int best_epoch = 0;
  double best_loss = 0.0;
  int skipped_steps = 0;  // updates dropped for non-finite gradients
};

// Mean KL over examples with eval-mode forward.
double mean_loss(const GnnParams& params, const std::vector<TrainingExample>& data);

// Trains in place and leaves `params` at the epoch with the lowest
// validation loss (training loss when `valid` is empty).
TrainingReport train(GnnParams& params, const std::vector<TrainingExample>& data,
                     const std::vector<TrainingExample>& valid, const TrainingConfig& cfg);

}  // namespace divekit
