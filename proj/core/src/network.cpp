#include "proxpool/network.hpp"

#include "proxpool/errors.hpp"
#include "proxpool/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace proxpool {

using diff::Tape;
using diff::Var;

void ModelConfig::validate() const {
  if (feature_dim == 0) throw ContractError("model config: feature_dim must be positive");
  if (num_classes < 1) throw ContractError("model config: num_classes must be positive");
  if (hidden_dim == 0) throw ContractError("model config: hidden_dim must be positive");
  if (proj_dim == 0 || proj_dim >= hidden_dim) {
    throw ContractError("model config: proj_dim must satisfy 0 < d' < hidden_dim");
  }
  if (!(pooling_ratio > 0.0 && pooling_ratio <= 1.0)) {
    throw ContractError("model config: pooling ratio must lie in (0, 1]");
  }
  if (hop_s < 1) throw ContractError("model config: s must be >= 1");
  if (!(tau > 0.0)) throw ContractError("model config: tau must be positive");
}

namespace {

Matrix glorot(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = dist(rng);
  return m;
}

}  // namespace

ProxPoolNet init_network(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  const auto f = static_cast<Eigen::Index>(config.feature_dim);
  const auto h = static_cast<Eigen::Index>(config.hidden_dim);
  const auto p = static_cast<Eigen::Index>(config.proj_dim);
  const auto c = static_cast<Eigen::Index>(config.num_classes);
  const auto r = static_cast<Eigen::Index>(config.readout_dim());

  ProxPoolNet net;
  net.config = config;
  net.params.add("conv1.weight", glorot(f, h, rng));
  net.params.add("conv2.weight", glorot(h, h, rng));
  net.params.add("conv3.weight", glorot(h, h, rng));
  net.params.add("pool1.proj", glorot(h, p, rng));
  net.params.add("pool2.proj", glorot(h, p, rng));
  net.params.add("fc1.weight", glorot(r, h, rng));
  net.params.add("fc1.bias", Matrix::Zero(1, h));
  net.params.add("fc2.weight", glorot(h, c, rng));
  net.params.add("fc2.bias", Matrix::Zero(1, c));
  return net;
}

double ForwardDiagnostics::min_cutoff_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pools) gap = std::min(gap, p.cutoff_gap);
  return gap;
}

double ForwardDiagnostics::min_score_gap() const {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : pools) gap = std::min(gap, p.min_score_gap);
  return gap;
}

namespace layers {

Var conv_forward(Var adjacency, Var features, Var weight) {
  return diff::row_l2_normalize(
      diff::relu(diff::matmul(diff::add_identity(adjacency), diff::matmul(features, weight))));
}

Var structure_kernel(Var adjacency, int s) {
  if (s < 1) throw ContractError("structure kernel: s must be >= 1");
  const Var r = diff::inv_sqrt_degree(diff::row_sum(adjacency));
  const Var m = diff::scale(diff::add_identity(diff::diag_scale(adjacency, r)), 0.5);
  Var p = m;
  for (int step = 1; step < s; ++step) p = diff::matmul(p, m);
  const Var b = diff::diag_scale(p, r);
  const Var k = diff::diag_scale(b, diff::inv_sqrt_degree(diff::diagonal(b)));
  return diff::symmetrize(k);
}

PoolOutput pool_layer(Var adjacency, Var features, Var projection, const ModelConfig& config) {
  Tape& tape = adjacency.tape();
  const Eigen::Index n = adjacency.rows();

  const Var kt = structure_kernel(adjacency, config.hop_s);
  Var prox;
  switch (config.variant) {
    case Variant::full: {
      const Var ks = diff::pairwise_sq_dist_exp(diff::matmul(features, projection), config.tau);
      prox = diff::hadamard(kt, ks);
      break;
    }
    case Variant::nt: {
      const Var ks = diff::pairwise_sq_dist_exp(diff::matmul(features, projection), config.tau);
      prox = diff::hadamard(adjacency, ks);
      break;
    }
    case Variant::ns:
      prox = kt;
      break;
  }

  PoolOutput out;
  LevelTrace& trace = out.trace;
  trace.input_nodes = static_cast<std::size_t>(n);
  const CouplingScores eps = coupling_factor(prox.value());
  const SeedSelection seeds = select_seeds(eps, config.pooling_ratio);
  trace.coupling = eps.scores;
  trace.seeds = seeds.idx;
  for (std::size_t s : seeds.idx) tape.note_decision(s);

  std::vector<double> sorted(eps.scores.data(), eps.scores.data() + n);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    trace.min_score_gap = std::min(trace.min_score_gap, sorted[k - 1] - sorted[k]);
  }
  if (seeds.idx.size() < sorted.size()) {
    trace.cutoff_gap = sorted[seeds.idx.size() - 1] - sorted[seeds.idx.size()];
  }

  const Matrix& eligibility = config.variant == Variant::nt ? adjacency.value() : kt.value();
  std::vector<bool> is_seed(static_cast<std::size_t>(n), false);
  for (std::size_t s : seeds.idx) is_seed[s] = true;
  const auto rows = static_cast<Eigen::Index>(seeds.idx.size());
  diff::BoolMatrix mask(rows, n);
  Matrix delta = Matrix::Zero(rows, n);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto seed = static_cast<Eigen::Index>(seeds.idx[static_cast<std::size_t>(i)]);
    delta(i, seed) = 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      mask(i, j) = eligibility(seed, j) > 0.0 && !is_seed[static_cast<std::size_t>(j)];
    }
  }

  const Var assign = diff::sparsemax_rows(diff::gather_rows(prox, seeds.idx), mask);
  const Var c = diff::add(assign, tape.constant(std::move(delta)));
  out.adjacency =
      diff::symmetrize(diff::matmul(diff::matmul(c, adjacency), diff::transpose(c)));
  out.features = diff::matmul(c, features);

  trace.coarsening = c.value();
  trace.adjacency = out.adjacency.value();
  trace.features = out.features.value();
  return out;
}

Var readout(const std::vector<Var>& conv_outputs) {
  std::vector<Var> parts;
  parts.reserve(2 * conv_outputs.size());
  for (const Var& x : conv_outputs) {
    if (x.rows() == 0) throw ContractError("readout: empty graph");
    parts.push_back(diff::colwise_sum(x));
    parts.push_back(diff::colwise_max(x));
  }
  return diff::concat_cols(parts);
}

Var predict(Var h, Var fc1_weight, Var fc1_bias, Var fc2_weight, Var fc2_bias) {
  const Var hidden = diff::relu(diff::add(diff::matmul(h, fc1_weight), fc1_bias));
  return diff::add(diff::matmul(hidden, fc2_weight), fc2_bias);
}

}  // namespace layers

ForwardResult forward(const Graph& g, const ModelConfig& config, const diff::ParameterSet& params,
                      diff::GradientMap* grads) {
  if (g.feature_dim() != config.feature_dim) {
    throw ContractError("forward: graph has " + std::to_string(g.feature_dim()) +
                        " feature columns, model expects " + std::to_string(config.feature_dim));
  }
  if (g.num_nodes() == 0) throw ContractError("forward: empty graph");
  if (grads != nullptr && !g.label) throw ContractError("forward: gradients need a labelled graph");

  Tape tape(grads != nullptr);
  auto param = [&](const char* name) { return tape.parameter(params, name); };

  const Var a0 = tape.constant(g.dense_adjacency());
  const Var x0 = tape.constant(g.features);

  const Var h1 = layers::conv_forward(a0, x0, param("conv1.weight"));
  const layers::PoolOutput p1 = layers::pool_layer(a0, h1, param("pool1.proj"), config);
  const Var h2 = layers::conv_forward(p1.adjacency, p1.features, param("conv2.weight"));
  const layers::PoolOutput p2 = layers::pool_layer(p1.adjacency, h2, param("pool2.proj"), config);
  const Var h3 = layers::conv_forward(p2.adjacency, p2.features, param("conv3.weight"));

  const Var h = layers::readout({h1, h2, h3});
  const Var logits = layers::predict(h, param("fc1.weight"), param("fc1.bias"),
                                     param("fc2.weight"), param("fc2.bias"));

  ForwardResult result;
  result.logits = logits.value().row(0);
  if (!result.logits.allFinite()) throw NumericError("forward: non-finite logits");
  if (g.label) {
    const Var loss = diff::softmax_cross_entropy(logits, *g.label);
    result.loss = loss.value()(0, 0);
    if (grads != nullptr) tape.backward(loss, *grads);
  }

  auto& d = result.diagnostics;
  d.level_sizes = {g.num_nodes(), p1.trace.seeds.size(), p2.trace.seeds.size()};
  d.pools = {p1.trace, p2.trace};
  d.kink_margin = tape.kink_margin();
  d.decision_signature = tape.decision_signature();
  return result;
}

ForwardResult forward(const Graph& g, const ProxPoolNet& net, diff::GradientMap* grads) {
  return forward(g, net.config, net.params, grads);
}

diff::Objective graph_objective(const Graph& g, const ModelConfig& config) {
  return [&g, config](const diff::ParameterSet& params, diff::GradientMap* grads) {
    return *forward(g, config, params, grads).loss;
  };
}

int predicted_class(const Eigen::RowVectorXd& logits) {
  int best = 0;
  for (Eigen::Index k = 1; k < logits.size(); ++k) {
    if (logits(k) > logits(best)) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace proxpool
