#include <algorithm>
#include <cmath>
#include <map>

#include "divekit/graphnet.hpp"
#include "divekit/rng.hpp"

namespace divekit {

namespace {

constexpr double kLogClamp = 1e-12;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double encoding_origin(double lower) { return is_finite_bound(lower) ? lower : 0.0; }

// Target support values encoded once per (candidate, point).
struct EncodedTarget {
  std::vector<int> width;
  std::vector<std::vector<std::vector<int>>> bits;  // [point][candidate][bit]
};

EncodedTarget encode_target(const TargetDistribution& t, const BipartiteGraph& g, int heads) {
  EncodedTarget enc;
  for (int j : t.candidates) enc.width.push_back(bit_width(g.lower[j], g.upper[j], heads));
  for (const auto& point : t.support) {
    if (point.size() != t.candidates.size()) throw ShapeMismatch("target point length");
    auto& pb = enc.bits.emplace_back();
    for (size_t k = 0; k < point.size(); ++k) {
      const int j = t.candidates[k];
      pb.push_back(encode_bits(point[k], g.lower[j], g.upper[j], enc.width[k]));
    }
  }
  return enc;
}

double entropy_term(const TargetDistribution& t) {
  double s = 0.0;
  for (double p : t.prob)
    if (p > 0.0) s += p * std::log(p);
  return s;
}

}  // namespace

int bit_width(double lower, double upper, int heads) {
  if (!is_finite_bound(lower) || !is_finite_bound(upper)) return heads;
  const double range = std::floor(upper - lower + 0.5);
  int w = 0;
  while (w < heads && std::ldexp(1.0, w) < range + 1.0) ++w;
  return std::max(w, 1);
}

std::vector<int> encode_bits(double value, double lower, double /*upper*/, int width) {
  const double cap = std::ldexp(1.0, width) - 1.0;
  const double v = std::clamp(std::floor(value - encoding_origin(lower) + 0.5), 0.0, cap);
  auto u = static_cast<uint64_t>(v);
  std::vector<int> bits(width);
  for (int k = 0; k < width; ++k) bits[k] = static_cast<int>((u >> k) & 1U);
  return bits;
}

double decode_bits(const std::vector<int>& bits, double lower, double upper) {
  double v = encoding_origin(lower);
  for (size_t k = 0; k < bits.size(); ++k)
    if (bits[k]) v += std::ldexp(1.0, static_cast<int>(k));
  return std::clamp(v, lower, upper);
}

PredictedDistribution predicted_distribution(const Eigen::MatrixXd& logits, const BipartiteGraph& g, int heads) {
  if (logits.rows() != g.num_vars() || logits.cols() < heads) throw ShapeMismatch("logits shape");
  PredictedDistribution pred;
  pred.candidates = g.candidates();
  for (int j : pred.candidates) {
    const int w = bit_width(g.lower[j], g.upper[j], heads);
    auto& means = pred.means.emplace_back(w);
    for (int k = 0; k < w; ++k) means[k] = sigmoid(logits(j, k));
  }
  return pred;
}

double default_temperature(const SolutionPool& pool) {
  if (pool.empty()) throw EmptyPool("temperature of an empty pool");
  double lo = kInfinity, hi = -kInfinity;
  for (const auto& e : pool.entries()) {
    lo = std::min(lo, e.z);
    hi = std::max(hi, e.z);
  }
  return 0.5 * (hi - lo + 1.0);
}

TargetDistribution target_distribution(const SolutionPool& pool, const MilpInstance& inst, double tau) {
  if (pool.empty()) throw EmptyPool("cannot build a target from an empty pool");
  if (!(tau > 0.0)) throw Error("temperature must be positive");
  TargetDistribution t;
  for (int j = 0; j < inst.num_vars; ++j)
    if (inst.divable[j]) t.candidates.push_back(j);

  double zmin = kInfinity;
  for (const auto& e : pool.entries()) zmin = std::min(zmin, e.z);

  std::map<std::vector<double>, size_t> index;
  for (const auto& e : pool.entries()) {
    std::vector<double> key;
    key.reserve(t.candidates.size());
    for (int j : t.candidates) key.push_back(std::round(e.x[j]));
    const double w = std::exp(-(e.z - zmin) / tau);
    auto [it, fresh] = index.emplace(key, t.support.size());
    if (fresh) {
      t.support.push_back(std::move(key));
      t.prob.push_back(w);
    } else {
      t.prob[it->second] += w;
    }
  }
  double total = 0.0;
  for (double w : t.prob) total += w;
  for (double& w : t.prob) w /= total;
  return t;
}

double kl_loss(const PredictedDistribution& pred, const TargetDistribution& target, const BipartiteGraph& g) {
  if (pred.candidates != target.candidates) throw ShapeMismatch("prediction and target cover different candidates");
  double loss = entropy_term(target);
  for (size_t s = 0; s < target.support.size(); ++s) {
    double log_q = 0.0;
    for (size_t k = 0; k < pred.candidates.size(); ++k) {
      const int j = pred.candidates[k];
      const auto& mu = pred.means[k];
      const auto bits = encode_bits(target.support[s][k], g.lower[j], g.upper[j], static_cast<int>(mu.size()));
      for (size_t b = 0; b < mu.size(); ++b)
        log_q += std::log(std::max(bits[b] ? mu[b] : 1.0 - mu[b], kLogClamp));
    }
    loss -= target.prob[s] * log_q;
  }
  return loss;
}

double kl_loss_and_grad(const Eigen::MatrixXd& logits, const BipartiteGraph& g, const TargetDistribution& target,
                        int heads, Eigen::MatrixXd* dlogits) {
  if (logits.rows() != g.num_vars() || logits.cols() != heads) throw ShapeMismatch("logits shape");
  const EncodedTarget enc = encode_target(target, g, heads);
  if (dlogits) *dlogits = Eigen::MatrixXd::Zero(logits.rows(), logits.cols());
  double loss = entropy_term(target);
  for (size_t s = 0; s < target.support.size(); ++s) {
    const double p = target.prob[s];
    for (size_t k = 0; k < target.candidates.size(); ++k) {
      const int j = target.candidates[k];
      for (int b = 0; b < enc.width[k]; ++b) {
        const double z = logits(j, b);
        const bool one = enc.bits[s][k][b] != 0;
        // sigma(-z) is 1 - sigma(z) without cancellation.
        const double prob = one ? sigmoid(z) : sigmoid(-z);
        if (prob <= kLogClamp) {
          loss -= p * std::log(kLogClamp);
          continue;
        }
        loss -= p * std::log(prob);
        if (dlogits) (*dlogits)(j, b) += p * (sigmoid(z) - (one ? 1.0 : 0.0));
      }
    }
  }
  return loss;
}

void adam_step(GnnParams& params, const GnnParams& grads, AdamState& state, const AdamConfig& cfg) {
  auto& ps = params.tensors();
  const auto& gs = grads.tensors();
  if (ps.size() != gs.size()) throw ShapeMismatch("gradient set does not match parameters");
  for (size_t i = 0; i < gs.size(); ++i) {
    if (gs[i].value.rows() != ps[i].value.rows() || gs[i].value.cols() != ps[i].value.cols())
      throw ShapeMismatch("gradient shape for " + ps[i].name);
    if (!gs[i].value.allFinite()) throw NonFiniteGradient("non-finite gradient in " + ps[i].name);
  }
  if (state.m.empty()) {
    for (const auto& t : ps) {
      state.m.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
      state.v.push_back(Eigen::MatrixXd::Zero(t.value.rows(), t.value.cols()));
    }
  }
  ++state.t;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (size_t i = 0; i < ps.size(); ++i) {
    const auto& g = gs[i].value;
    state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
    state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    ps[i].value.array() -=
        cfg.lr * (state.m[i].array() / c1) / ((state.v[i].array() / c2).sqrt() + cfg.eps);
  }
}

Prediction predict_assignment(const PredictedDistribution& pred, const BipartiteGraph& g, PredictMode mode,
                              uint64_t seed) {
  Prediction out;
  out.candidates = pred.candidates;
  Rng rng(seed);
  for (size_t k = 0; k < pred.candidates.size(); ++k) {
    const int j = pred.candidates[k];
    const auto& mu = pred.means[k];
    std::vector<int> bits(mu.size());
    double conf = 1.0;
    for (size_t b = 0; b < mu.size(); ++b) {
      bits[b] = mode == PredictMode::kMode ? (mu[b] > 0.5 ? 1 : 0) : (rng.uniform() < mu[b] ? 1 : 0);
      conf *= bits[b] ? mu[b] : 1.0 - mu[b];
    }
    out.values.push_back(decode_bits(bits, g.lower[j], g.upper[j]));
    out.confidence.push_back(conf);
  }
  return out;
}

}  // namespace divekit
