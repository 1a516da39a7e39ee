#include <cmath>
#include <json.hpp>

#include "divekit/graphnet.hpp"
#include "divekit/rng.hpp"

namespace divekit {

namespace {

constexpr double kBnEps = 1e-5;
constexpr int kCheckpointVersion = 1;

const char* const kTensorNames[GnnParams::kNumTensors] = {
    "bn_var_gamma", "bn_var_beta", "bn_cons_gamma", "bn_cons_beta",
    "var_w1",       "var_b1",      "var_w2",        "var_b2",
    "cons_w1",      "cons_b1",     "cons_w2",       "cons_b2",
    "vc_msg_w",     "vc_msg_b",    "vc_out_w",      "vc_out_b",
    "cv_msg_w",     "cv_msg_b",    "cv_out_w",      "cv_out_b",
    "out_w1",       "out_b1",      "out_w2",        "out_b2",
};

std::pair<int, int> tensor_shape(int idx, const GnnConfig& cfg) {
  const int h = cfg.hidden;
  switch (idx) {
    case GnnParams::kBnVarGamma:
    case GnnParams::kBnVarBeta: return {1, kVarFeatures};
    case GnnParams::kBnConsGamma:
    case GnnParams::kBnConsBeta: return {1, kConsFeatures};
    case GnnParams::kVarW1: return {kVarFeatures, h};
    case GnnParams::kConsW1: return {kConsFeatures, h};
    case GnnParams::kOutW2: return {h, cfg.heads};
    case GnnParams::kOutB2: return {1, cfg.heads};
    case GnnParams::kVarW2:
    case GnnParams::kConsW2:
    case GnnParams::kVcMsgW:
    case GnnParams::kVcOutW:
    case GnnParams::kCvMsgW:
    case GnnParams::kCvOutW:
    case GnnParams::kOutW1: return {h, h};
    default: return {1, h};  // remaining biases
  }
}

bool is_weight(int idx) {
  switch (idx) {
    case GnnParams::kVarW1: case GnnParams::kVarW2: case GnnParams::kConsW1: case GnnParams::kConsW2:
    case GnnParams::kVcMsgW: case GnnParams::kVcOutW: case GnnParams::kCvMsgW: case GnnParams::kCvOutW:
    case GnnParams::kOutW1: case GnnParams::kOutW2:
      return true;
    default:
      return false;
  }
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& a) { return a.cwiseMax(0.0); }

Eigen::MatrixXd relu_grad(const Eigen::MatrixXd& d, const Eigen::MatrixXd& pre) {
  return (pre.array() > 0.0).select(d, 0.0);
}

// x W + b with b broadcast over rows.
Eigen::MatrixXd affine(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = x * w;
  out.rowwise() += b.row(0);
  return out;
}

void batch_stats(const Eigen::MatrixXd& x, Eigen::RowVectorXd& mean, Eigen::RowVectorXd& var) {
  if (x.rows() == 0) {
    mean = Eigen::RowVectorXd::Zero(x.cols());
    var = Eigen::RowVectorXd::Ones(x.cols());
    return;
  }
  mean = x.colwise().mean();
  var = (x.rowwise() - mean).array().square().colwise().mean();
}

Eigen::MatrixXd normalize(const Eigen::MatrixXd& x, const Eigen::RowVectorXd& mean, const Eigen::RowVectorXd& var) {
  Eigen::RowVectorXd inv = (var.array() + kBnEps).rsqrt();
  return (x.rowwise() - mean).array().rowwise() * inv.array();
}

void check_shapes(const GnnParams& p, const BipartiteGraph& g) {
  if (static_cast<int>(p.tensors().size()) != GnnParams::kNumTensors) throw ShapeMismatch("parameter set is incomplete");
  for (int i = 0; i < GnnParams::kNumTensors; ++i) {
    auto [r, c] = tensor_shape(i, p.config());
    const auto& t = p.tensors()[i].value;
    if (t.rows() != r || t.cols() != c) throw ShapeMismatch("tensor " + p.tensors()[i].name + " has the wrong shape");
  }
  if (g.var_feats.cols() != kVarFeatures || g.cons_feats.cols() != kConsFeatures)
    throw ShapeMismatch("feature width does not match the model");
  const size_t ne = g.edge_coef.size();
  if (g.edge_row.size() != ne || g.edge_col.size() != ne) throw ShapeMismatch("edge arrays differ in length");
  for (size_t e = 0; e < ne; ++e)
    if (g.edge_row[e] < 0 || g.edge_row[e] >= g.num_cons() || g.edge_col[e] < 0 || g.edge_col[e] >= g.num_vars())
      throw ShapeMismatch("edge endpoint out of range");
  if (static_cast<int>(g.candidate_mask.size()) != g.num_vars()) throw ShapeMismatch("candidate mask length");
}

void build_adjacency(const BipartiteGraph& g, Eigen::SparseMatrix<double>& s_cv, Eigen::SparseMatrix<double>& s_vc) {
  const int n = g.num_vars(), m = g.num_cons();
  std::vector<int> deg_c(m, 0), deg_v(n, 0);
  for (int e = 0; e < g.num_edges(); ++e) {
    deg_c[g.edge_row[e]]++;
    deg_v[g.edge_col[e]]++;
  }
  std::vector<Eigen::Triplet<double>> tc, tv;
  tc.reserve(g.num_edges());
  tv.reserve(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    const int i = g.edge_row[e], j = g.edge_col[e];
    tc.emplace_back(i, j, g.edge_coef[e] / std::sqrt(static_cast<double>(deg_c[i])));
    tv.emplace_back(j, i, g.edge_coef[e] / std::sqrt(static_cast<double>(deg_v[j])));
  }
  s_cv.resize(m, n);
  s_vc.resize(n, m);
  s_cv.setFromTriplets(tc.begin(), tc.end());
  s_vc.setFromTriplets(tv.begin(), tv.end());
}

}  // namespace

GnnParams GnnParams::init(const GnnConfig& cfg, uint64_t seed) {
  if (cfg.hidden <= 0 || cfg.heads <= 0 || cfg.heads > 30) throw Error("invalid network configuration");
  GnnParams p;
  p.cfg_ = cfg;
  Rng rng(seed);
  for (int i = 0; i < kNumTensors; ++i) {
    auto [r, c] = tensor_shape(i, cfg);
    Tensor t{kTensorNames[i], Eigen::MatrixXd::Zero(r, c)};
    if (is_weight(i)) {
      const double limit = std::sqrt(6.0 / (r + c));
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < c; ++b) t.value(a, b) = rng.uniform(-limit, limit);
    } else if (i == kBnVarGamma || i == kBnConsGamma) {
      t.value.setOnes();
    }
    p.tensors_.push_back(std::move(t));
  }
  p.var_mean = Eigen::RowVectorXd::Zero(kVarFeatures);
  p.var_var = Eigen::RowVectorXd::Ones(kVarFeatures);
  p.cons_mean = Eigen::RowVectorXd::Zero(kConsFeatures);
  p.cons_var = Eigen::RowVectorXd::Ones(kConsFeatures);
  return p;
}

GnnParams GnnParams::zeros_like() const {
  GnnParams p = *this;
  for (auto& t : p.tensors_) t.value.setZero();
  p.var_mean.setZero();
  p.var_var.setZero();
  p.cons_mean.setZero();
  p.cons_var.setZero();
  return p;
}

int64_t GnnParams::size() const {
  int64_t s = 0;
  for (const auto& t : tensors_) s += t.value.size();
  return s;
}

Eigen::MatrixXd forward(const GnnParams& p, const BipartiteGraph& g, ForwardMode mode, ForwardCache* cache) {
  check_shapes(p, g);
  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  using P = GnnParams;

  if (mode == ForwardMode::kTrain) {
    batch_stats(g.var_feats, c.v_mean, c.v_var);
    batch_stats(g.cons_feats, c.c_mean, c.c_var);
    c.xv_hat = normalize(g.var_feats, c.v_mean, c.v_var);
    c.xc_hat = normalize(g.cons_feats, c.c_mean, c.c_var);
  } else {
    c.xv_hat = normalize(g.var_feats, p.var_mean, p.var_var);
    c.xc_hat = normalize(g.cons_feats, p.cons_mean, p.cons_var);
  }
  c.xv_bn = (c.xv_hat.array().rowwise() * p[P::kBnVarGamma].row(0).array()).rowwise() +
            p[P::kBnVarBeta].row(0).array();
  c.xc_bn = (c.xc_hat.array().rowwise() * p[P::kBnConsGamma].row(0).array()).rowwise() +
            p[P::kBnConsBeta].row(0).array();

  c.av1 = affine(c.xv_bn, p[P::kVarW1], p[P::kVarB1]);
  c.hv1 = relu(c.av1);
  c.av2 = affine(c.hv1, p[P::kVarW2], p[P::kVarB2]);
  c.hv = relu(c.av2);
  c.ac1 = affine(c.xc_bn, p[P::kConsW1], p[P::kConsB1]);
  c.hc1 = relu(c.ac1);
  c.ac2 = affine(c.hc1, p[P::kConsW2], p[P::kConsB2]);
  c.hc = relu(c.ac2);

  build_adjacency(g, c.s_cv, c.s_vc);

  c.m_vc = affine(c.hv, p[P::kVcMsgW], p[P::kVcMsgB]);
  c.agg_c = c.s_cv * c.m_vc;
  c.pc = c.hc + affine(c.agg_c, p[P::kVcOutW], p[P::kVcOutB]);
  c.hc2 = relu(c.pc);

  c.m_cv = affine(c.hc2, p[P::kCvMsgW], p[P::kCvMsgB]);
  c.agg_v = c.s_vc * c.m_cv;
  c.pv = c.hv + affine(c.agg_v, p[P::kCvOutW], p[P::kCvOutB]);
  c.hv2 = relu(c.pv);

  c.q1 = affine(c.hv2, p[P::kOutW1], p[P::kOutB1]);
  c.r1 = relu(c.q1);
  return affine(c.r1, p[P::kOutW2], p[P::kOutB2]);
}

GnnParams backward(const GnnParams& p, const BipartiteGraph& g, const ForwardCache& c,
                   const Eigen::MatrixXd& dz) {
  using P = GnnParams;
  if (dz.rows() != g.num_vars() || dz.cols() != p.config().heads) throw ShapeMismatch("logit gradient shape");
  GnnParams grad = p.zeros_like();
  auto dense = [&](P::Index w, P::Index b, const Eigen::MatrixXd& in, const Eigen::MatrixXd& dout) {
    grad[w] += in.transpose() * dout;
    grad[b] += dout.colwise().sum();
    return Eigen::MatrixXd(dout * p[w].transpose());
  };

  Eigen::MatrixXd dr1 = dense(P::kOutW2, P::kOutB2, c.r1, dz);
  Eigen::MatrixXd dhv2 = dense(P::kOutW1, P::kOutB1, c.hv2, relu_grad(dr1, c.q1));

  const Eigen::MatrixXd dpv = relu_grad(dhv2, c.pv);
  Eigen::MatrixXd dhv = dpv;
  const Eigen::MatrixXd dagg_v = dense(P::kCvOutW, P::kCvOutB, c.agg_v, dpv);
  const Eigen::MatrixXd dm_cv = c.s_vc.transpose() * dagg_v;
  const Eigen::MatrixXd dhc2 = dense(P::kCvMsgW, P::kCvMsgB, c.hc2, dm_cv);

  const Eigen::MatrixXd dpc = relu_grad(dhc2, c.pc);
  const Eigen::MatrixXd dhc = dpc;
  const Eigen::MatrixXd dagg_c = dense(P::kVcOutW, P::kVcOutB, c.agg_c, dpc);
  const Eigen::MatrixXd dm_vc = c.s_cv.transpose() * dagg_c;
  dhv += dense(P::kVcMsgW, P::kVcMsgB, c.hv, dm_vc);

  Eigen::MatrixXd dhv1 = dense(P::kVarW2, P::kVarB2, c.hv1, relu_grad(dhv, c.av2));
  const Eigen::MatrixXd dxv_bn = dense(P::kVarW1, P::kVarB1, c.xv_bn, relu_grad(dhv1, c.av1));
  Eigen::MatrixXd dhc1 = dense(P::kConsW2, P::kConsB2, c.hc1, relu_grad(dhc, c.ac2));
  const Eigen::MatrixXd dxc_bn = dense(P::kConsW1, P::kConsB1, c.xc_bn, relu_grad(dhc1, c.ac1));

  // Batch statistics depend on the inputs only, so the affine parameters are
  // the last trainable step.
  grad[P::kBnVarGamma] = (dxv_bn.array() * c.xv_hat.array()).colwise().sum();
  grad[P::kBnVarBeta] = dxv_bn.colwise().sum();
  grad[P::kBnConsGamma] = (dxc_bn.array() * c.xc_hat.array()).colwise().sum();
  grad[P::kBnConsBeta] = dxc_bn.colwise().sum();
  return grad;
}

void update_running_stats(GnnParams& params, const ForwardCache& cache, double momentum) {
  params.var_mean = (1.0 - momentum) * params.var_mean + momentum * cache.v_mean;
  params.var_var = (1.0 - momentum) * params.var_var + momentum * cache.v_var;
  params.cons_mean = (1.0 - momentum) * params.cons_mean + momentum * cache.c_mean;
  params.cons_var = (1.0 - momentum) * params.cons_var + momentum * cache.c_var;
}

void init_running_stats(GnnParams& params, const std::vector<const BipartiteGraph*>& graphs) {
  const BipartiteGraph all = concat_graphs(graphs);
  batch_stats(all.var_feats, params.var_mean, params.var_var);
  batch_stats(all.cons_feats, params.cons_mean, params.cons_var);
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
  nlohmann::json data = nlohmann::json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Eigen::MatrixXd matrix_from(const nlohmann::json& j) {
  const int r = j.at("rows").get<int>(), c = j.at("cols").get<int>();
  const auto& data = j.at("data");
  if (static_cast<int>(data.size()) != r * c) throw ShapeMismatch("checkpoint matrix data length");
  Eigen::MatrixXd m(r, c);
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < c; ++b) m(a, b) = data[a * c + b].get<double>();
  return m;
}

}  // namespace

std::string GnnParams::to_json() const {
  nlohmann::json j;
  j["format"] = "divekit-gnn";
  j["version"] = kCheckpointVersion;
  j["features"] = kFeatureVersion;
  j["hidden"] = cfg_.hidden;
  j["heads"] = cfg_.heads;
  for (const auto& t : tensors_) j["tensors"][t.name] = matrix_json(t.value);
  j["running"]["var_mean"] = matrix_json(var_mean);
  j["running"]["var_var"] = matrix_json(var_var);
  j["running"]["cons_mean"] = matrix_json(cons_mean);
  j["running"]["cons_var"] = matrix_json(cons_var);
  return j.dump();
}

GnnParams GnnParams::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "divekit-gnn") throw Error("not a model checkpoint");
  if (j.value("version", -1) != kCheckpointVersion)
    throw Error("unsupported checkpoint version " + j.value("version", nlohmann::json(-1)).dump());
  if (j.value("features", "") != kFeatureVersion)
    throw Error("checkpoint was trained on feature set " + j.value("features", std::string("?")));
  GnnConfig cfg;
  cfg.hidden = j.at("hidden").get<int>();
  cfg.heads = j.at("heads").get<int>();
  GnnParams p = init(cfg, 0);
  try {
    for (int i = 0; i < kNumTensors; ++i) {
      Eigen::MatrixXd m = matrix_from(j.at("tensors").at(kTensorNames[i]));
      if (m.rows() != p.tensors_[i].value.rows() || m.cols() != p.tensors_[i].value.cols())
        throw ShapeMismatch(std::string("checkpoint tensor ") + kTensorNames[i] + " has the wrong shape");
      p.tensors_[i].value = std::move(m);
    }
    const auto& run = j.at("running");
    auto row = [&](const char* key) {
      Eigen::MatrixXd m = matrix_from(run.at(key));
      if (m.rows() != 1) throw ShapeMismatch(std::string("checkpoint statistic ") + key + " is not a row");
      return Eigen::RowVectorXd(m.row(0));
    };
    p.var_mean = row("var_mean");
    p.var_var = row("var_var");
    p.cons_mean = row("cons_mean");
    p.cons_var = row("cons_var");
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed checkpoint: ") + e.what());
  }
  if (p.var_mean.size() != kVarFeatures || p.cons_mean.size() != kConsFeatures ||
      p.var_var.size() != kVarFeatures || p.cons_var.size() != kConsFeatures)
    throw ShapeMismatch("checkpoint batch-norm statistics have the wrong length");
  return p;
}

}  // namespace divekit
