#pragma once

#include "proxpool/diff/gradcheck.hpp"
#include "proxpool/diff/ops.hpp"
#include "proxpool/diff/parameters.hpp"
#include "proxpool/graph.hpp"
#include "proxpool/kernels.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace proxpool {

struct ModelConfig {
  std::size_t feature_dim = 0;
  int num_classes = 2;
  std::size_t hidden_dim = 64;
  std::size_t proj_dim = 16;
  double pooling_ratio = 0.3;
  int hop_s = 2;
  double tau = 1.0;
  Variant variant = Variant::full;

  /// Throws ContractError when a field is out of range.
  void validate() const;
  std::size_t readout_dim() const { return 6 * hidden_dim; }
};

/// [conv-pool] x 2 - conv, sum/max readout over the three conv outputs, and a
/// two-layer predictor.  Parameter names:
///   conv1.weight conv2.weight conv3.weight   (no bias)
///   pool1.proj pool2.proj                    (hidden x proj)
///   fc1.weight fc1.bias fc2.weight fc2.bias
struct ProxPoolNet {
  ModelConfig config;
  diff::ParameterSet params;
};

/// Glorot-uniform weights, zero biases, seeded.
ProxPoolNet init_network(const ModelConfig& config, std::uint64_t seed);

/// What one pooling level decided, recorded as plain values.
struct LevelTrace {
  std::size_t input_nodes = 0;
  std::vector<std::size_t> seeds;
  Vector coupling;
  // eps gap between the last kept and first dropped node (inf when nothing dropped).
  double cutoff_gap = std::numeric_limits<double>::infinity();
  // Smallest gap between consecutive sorted coupling scores.
  double min_score_gap = std::numeric_limits<double>::infinity();
  Matrix coarsening;
  Matrix adjacency;  // coarsened
  Matrix features;   // coarsened
};

struct ForwardDiagnostics {
  std::vector<std::size_t> level_sizes;  // input graph, after pool 1, after pool 2
  std::vector<LevelTrace> pools;
  double kink_margin = std::numeric_limits<double>::infinity();
  // Tape::decision_signature of the pass; equal values mean the same smooth piece.
  std::uint64_t decision_signature = 0;

  double min_cutoff_gap() const;
  double min_score_gap() const;
};

struct ForwardResult {
  Eigen::RowVectorXd logits;
  std::optional<double> loss;  // present when the graph is labelled
  ForwardDiagnostics diagnostics;
};

namespace layers {

/// l2-normalised rows of relu((A + I) X W).
diff::Var conv_forward(diff::Var adjacency, diff::Var features, diff::Var weight);

/// Structure kernel recorded on the tape so that gradients reach a coarsened
/// adjacency.  Matches proxpool::structure_kernel up to rounding.
diff::Var structure_kernel(diff::Var adjacency, int s);

struct PoolOutput {
  diff::Var adjacency;
  diff::Var features;
  LevelTrace trace;
};

/// One ProxPool level.  Seed ranking and eligibility masks are computed from
/// values and held constant; gradients flow through R, the sparsemax weights,
/// and C.  `projection` is ignored for the ns variant.
PoolOutput pool_layer(diff::Var adjacency, diff::Var features, diff::Var projection,
                      const ModelConfig& config);

/// [colsum | colmax] for each conv output, concatenated.
diff::Var readout(const std::vector<diff::Var>& conv_outputs);

diff::Var predict(diff::Var h, diff::Var fc1_weight, diff::Var fc1_bias, diff::Var fc2_weight,
                  diff::Var fc2_bias);

}  // namespace layers

/// Full forward pass.  When `grads` is non-null the graph must be labelled and
/// d(loss)/d(params) is accumulated into it.
ForwardResult forward(const Graph& g, const ModelConfig& config, const diff::ParameterSet& params,
                      diff::GradientMap* grads = nullptr);
ForwardResult forward(const Graph& g, const ProxPoolNet& net, diff::GradientMap* grads = nullptr);

/// Cross-entropy of one labelled graph as a gradient-checkable objective.
diff::Objective graph_objective(const Graph& g, const ModelConfig& config);

/// argmax with ties resolved to the smaller class index.
int predicted_class(const Eigen::RowVectorXd& logits);

}  // namespace proxpool
