#include "proxpool/errors.hpp"
#include "proxpool/network.hpp"
#include "proxpool/pooling.hpp"
#include "support/generators.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace proxpool;
using proxpool::diff::Var;
using proxpool::testing::permute_graph;
using proxpool::testing::random_graph;
using proxpool::testing::random_permutation;

namespace {

ModelConfig small_config(std::size_t feature_dim, Variant variant = Variant::full) {
  ModelConfig c;
  c.feature_dim = feature_dim;
  c.num_classes = 3;
  c.variant = variant;
  return c;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() ? (a - b).cwiseAbs().maxCoeff()
                                                      : std::numeric_limits<double>::infinity();
}

}  // namespace

TEST(Conv, PathExample) {
  diff::Tape t;
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  Matrix x(2, 1);
  x << 1, 0;
  const Matrix y = layers::conv_forward(t.constant(a), t.constant(x),
                                        t.constant(Matrix::Ones(1, 1)))
                       .value();
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(y(1, 0), 1.0);
}

TEST(Conv, ZeroWeightGivesZero) {
  diff::Tape t;
  std::mt19937_64 rng(1);
  const Graph g = random_graph(6, 0.5, 3, rng);
  const Matrix y = layers::conv_forward(t.constant(g.dense_adjacency()), t.constant(g.features),
                                        t.constant(Matrix::Zero(3, 4)))
                       .value();
  EXPECT_EQ(y, Matrix::Zero(6, 4));
}

TEST(Conv, SingleNodeIsNormalisedProjection) {
  diff::Tape t;
  Matrix x(1, 2);
  x << 3, -1;
  Matrix w(2, 2);
  w << 1, 0, 0, 1;
  const Matrix y =
      layers::conv_forward(t.constant(Matrix::Zero(1, 1)), t.constant(x), t.constant(w)).value();
  EXPECT_DOUBLE_EQ(y(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(y(0, 1), 0.0);
}

TEST(TapeKernel, MatchesPlainStructureKernel) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(4 + trial, 0.3, 2, rng);
    for (int s = 1; s <= 4; ++s) {
      diff::Tape t(false);
      const Matrix k = layers::structure_kernel(t.constant(g.dense_adjacency()), s).value();
      EXPECT_LT(max_abs_diff(k, structure_kernel(g, s).matrix), 1e-12);
    }
  }
}

TEST(TapeKernel, MatchesPlainOnWeightedSelfLoopGraph) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  Matrix a(5, 5);
  for (int i = 0; i < 5; ++i) {
    for (int j = i; j < 5; ++j) a(i, j) = a(j, i) = u(rng);
  }
  diff::Tape t(false);
  const Matrix k = layers::structure_kernel(t.constant(a), 2).value();
  EXPECT_LT(max_abs_diff(k, structure_kernel(a, 2).matrix), 1e-12);
}

TEST(PoolLayer, TapeMatchesPlainPipeline) {
  std::mt19937_64 rng(5);
  for (Variant v : {Variant::full, Variant::nt, Variant::ns}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Graph g = random_graph(8 + trial, 0.35, 64, rng);
      ModelConfig c = small_config(64, v);
      const ProxPoolNet net = init_network(c, static_cast<std::uint64_t>(trial));
      const Matrix& wq = net.params.value("pool1.proj");

      diff::Tape t(false);
      const layers::PoolOutput out = layers::pool_layer(
          t.constant(g.dense_adjacency()), t.constant(g.features), t.constant(wq), c);

      PoolingOptions opts{c.pooling_ratio, c.hop_s, c.tau, v};
      const PoolingTrace plain = pool_graph(g, wq, opts);
      EXPECT_EQ(out.trace.seeds, plain.seeds.idx);
      EXPECT_LT(max_abs_diff(out.trace.coarsening, plain.coarsening.matrix), 1e-12);
      EXPECT_LT(max_abs_diff(out.trace.adjacency, plain.coarsened.graph.dense_adjacency()),
                1e-10);
      EXPECT_LT(max_abs_diff(out.trace.features, plain.coarsened.graph.features), 1e-12);
    }
  }
}

TEST(PoolLayer, RhoOneKeepsGraph) {
  Matrix a(2, 2);
  a << 0, 1, 1, 0;
  Matrix x(2, 2);
  x << 1, 2, 3, 4;
  ModelConfig c = small_config(2);
  c.pooling_ratio = 1.0;
  diff::Tape t(false);
  const auto out = layers::pool_layer(t.constant(a), t.constant(x),
                                      t.constant(Matrix::Identity(2, 1)), c);
  EXPECT_EQ(out.trace.seeds.size(), 2u);
  EXPECT_EQ(out.adjacency.value(), a);
  EXPECT_EQ(out.features.value(), x);
}

TEST(PoolLayer, NsIgnoresProjection) {
  std::mt19937_64 rng(6);
  const Graph g = random_graph(10, 0.4, 4, rng);
  ModelConfig c = small_config(4, Variant::ns);
  diff::Tape t(false);
  const auto a = layers::pool_layer(t.constant(g.dense_adjacency()), t.constant(g.features),
                                    t.constant(Matrix::Random(4, 2)), c);
  const auto b = layers::pool_layer(t.constant(g.dense_adjacency()), t.constant(g.features),
                                    t.constant(Matrix::Random(4, 2) * 7.0), c);
  EXPECT_EQ(a.adjacency.value(), b.adjacency.value());
  EXPECT_EQ(a.features.value(), b.features.value());
}

TEST(Readout, ShapeAndSingleNode) {
  diff::Tape t;
  Matrix row = Eigen::RowVectorXd::LinSpaced(64, -1.0, 1.0);
  const Var x = t.constant(row);
  const Matrix h = layers::readout({x, x, x}).value();
  ASSERT_EQ(h.cols(), 384);
  for (int k = 0; k < 6; ++k) EXPECT_EQ(Matrix(h.block(0, 64 * k, 1, 64)), row);
}

TEST(Readout, EmptyGraphIsContractError) {
  diff::Tape t;
  const Var x = t.constant(Matrix(0, 4));
  EXPECT_THROW(layers::readout({x}), ContractError);
}

TEST(Predict, ZeroInputZeroWeights) {
  diff::Tape t;
  const Matrix z = layers::predict(t.constant(Matrix::Zero(1, 384)),
                                   t.constant(Matrix::Zero(384, 64)),
                                   t.constant(Matrix::Zero(1, 64)),
                                   t.constant(Matrix::Zero(64, 2)), t.constant(Matrix::Zero(1, 2)))
                       .value();
  EXPECT_EQ(z, Matrix::Zero(1, 2));
}

TEST(Network, ParameterShapes) {
  const ProxPoolNet net = init_network(small_config(7), 0);
  EXPECT_EQ(net.params.value("conv1.weight").rows(), 7);
  EXPECT_EQ(net.params.value("conv1.weight").cols(), 64);
  EXPECT_EQ(net.params.value("conv2.weight").rows(), 64);
  EXPECT_EQ(net.params.value("pool1.proj").cols(), 16);
  EXPECT_EQ(net.params.value("fc1.weight").rows(), 384);
  EXPECT_EQ(net.params.value("fc2.weight").cols(), 3);
  EXPECT_EQ(net.params.value("fc1.bias"), Matrix::Zero(1, 64));
  const double bound = std::sqrt(6.0 / (384 + 64));
  EXPECT_LE(net.params.value("fc1.weight").cwiseAbs().maxCoeff(), bound);
}

TEST(Network, ConfigValidation) {
  ModelConfig c = small_config(3);
  c.pooling_ratio = 0.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = small_config(3);
  c.proj_dim = 64;
  EXPECT_THROW(c.validate(), ContractError);
  c = small_config(3);
  c.tau = 0.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = small_config(3);
  c.hop_s = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(Network, LevelSizesForTwentyNodes) {
  std::mt19937_64 rng(7);
  const Graph g = random_graph(20, 0.3, 5, rng, 1);
  const ForwardResult r = forward(g, init_network(small_config(5), 1));
  EXPECT_EQ(r.diagnostics.level_sizes, (std::vector<std::size_t>{20, 6, 2}));
  EXPECT_TRUE(r.loss.has_value());
}

TEST(Network, SingleNodeGraph) {
  const Graph g = Graph::from_dense(Matrix::Zero(1, 1), Matrix::Ones(1, 3), 0);
  const ForwardResult r = forward(g, init_network(small_config(3), 2));
  EXPECT_EQ(r.diagnostics.level_sizes, (std::vector<std::size_t>{1, 1, 1}));
  EXPECT_TRUE(r.logits.allFinite());
}

TEST(Network, FeatureDimMismatch) {
  const Graph g = Graph::from_dense(Matrix::Zero(1, 1), Matrix::Ones(1, 3));
  EXPECT_THROW(forward(g, init_network(small_config(4), 0)), ContractError);
}

TEST(Network, DeterministicLogits) {
  std::mt19937_64 rng(8);
  const Graph g = random_graph(15, 0.3, 5, rng, 2);
  const ProxPoolNet net = init_network(small_config(5), 3);
  diff::GradientMap g1, g2;
  const ForwardResult a = forward(g, net, &g1);
  const ForwardResult b = forward(g, net, &g2);
  EXPECT_EQ(a.logits, b.logits);
  for (const auto& [name, m] : g1) EXPECT_EQ(m, g2.at(name)) << name;
}

TEST(Network, NsVariantHasZeroProjectionGradient) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = random_graph(12, 0.3, 5, rng, trial % 3);
    const ProxPoolNet net = init_network(small_config(5, Variant::ns), trial);
    diff::GradientMap grads;
    forward(g, net, &grads);
    for (const char* name : {"pool1.proj", "pool2.proj"}) {
      const Matrix gq = grads.count(name) ? grads.at(name) : Matrix::Zero(1, 1);
      EXPECT_EQ(gq.cwiseAbs().maxCoeff(), 0.0) << name;
    }
    EXPECT_GT(grads.at("conv1.weight").cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(Network, PermutationInvariantLogits) {
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int trial = 0; trial < 30 && checked < 10; ++trial) {
    const Graph g = random_graph(10 + trial % 8, 0.35, 4, rng);
    const ProxPoolNet net = init_network(small_config(4), trial);
    const ForwardResult base = forward(g, net);
    if (base.diagnostics.min_score_gap() < 1e-9) continue;
    const auto perm = random_permutation(static_cast<int>(g.num_nodes()), rng);
    const ForwardResult moved = forward(permute_graph(g, perm), net);
    EXPECT_LT((base.logits - moved.logits).cwiseAbs().maxCoeff(), 1e-9);
    // Seeds of the permuted graph map back to the original seed list.
    std::vector<std::size_t> mapped;
    for (std::size_t s : moved.diagnostics.pools[0].seeds) mapped.push_back(perm[s]);
    EXPECT_EQ(mapped, base.diagnostics.pools[0].seeds);
    ++checked;
  }
  EXPECT_GE(checked, 5);
}

TEST(Network, GradCheckSmallGraph) {
  std::mt19937_64 rng(11);
  const Graph g = random_graph(9, 0.4, 4, rng, 1);
  ModelConfig c = small_config(4);
  c.hidden_dim = 8;
  c.proj_dim = 3;
  const ProxPoolNet net = init_network(c, 4);
  ASSERT_GT(forward(g, net).diagnostics.kink_margin, 1e-6);
  const auto r = diff::gradient_check(graph_objective(g, c), net.params);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_EQ(r.per_parameter.size(), 9u);
}

TEST(Network, PredictedClassTiesGoLow) {
  Eigen::RowVectorXd z(3);
  z << 0.5, 0.5, 0.1;
  EXPECT_EQ(predicted_class(z), 0);
  z << 0.1, 0.7, 0.7;
  EXPECT_EQ(predicted_class(z), 1);
}
