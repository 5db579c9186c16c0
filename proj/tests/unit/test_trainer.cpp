#include "proxpool/errors.hpp"
#include "proxpool/synth.hpp"
#include "proxpool/trainer.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <queue>
#include <vector>

using namespace proxpool;

namespace {

TrainConfig quick(std::size_t epochs = 3) {
  TrainConfig c;
  c.max_epochs = epochs;
  c.batch_size = 8;
  return c;
}

bool connected(const Matrix& a) {
  std::vector<bool> seen(static_cast<std::size_t>(a.rows()), false);
  std::queue<Eigen::Index> q;
  q.push(0);
  seen[0] = true;
  std::size_t count = 1;
  while (!q.empty()) {
    const Eigen::Index u = q.front();
    q.pop();
    for (Eigen::Index v = 0; v < a.rows(); ++v) {
      if (a(u, v) != 0.0 && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        ++count;
        q.push(v);
      }
    }
  }
  return count == static_cast<std::size_t>(a.rows());
}

void expect_same_report(const RunReport& a, const RunReport& b) {
  ASSERT_EQ(a.epochs.size(), b.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    EXPECT_EQ(a.epochs[e].train_loss, b.epochs[e].train_loss);
    EXPECT_EQ(a.epochs[e].train_accuracy, b.epochs[e].train_accuracy);
    EXPECT_EQ(a.epochs[e].val_accuracy, b.epochs[e].val_accuracy);
    EXPECT_EQ(a.epochs[e].val_loss, b.epochs[e].val_loss);
  }
  EXPECT_EQ(a.selected_epoch, b.selected_epoch);
  EXPECT_EQ(a.test_accuracy, b.test_accuracy);
  EXPECT_EQ(a.test_loss, b.test_loss);
}

}  // namespace

TEST(Synth, BalancedConnectedDeterministic) {
  const Dataset a = synth_dataset(40, 5);
  const Dataset b = synth_dataset(40, 5);
  ASSERT_EQ(a.size(), 40u);
  EXPECT_EQ(a.num_classes, 2);
  int ones = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Graph& g = a.graphs[k];
    ones += *g.label;
    EXPECT_EQ(g.dense_adjacency(), b.graphs[k].dense_adjacency());
    EXPECT_TRUE(connected(g.dense_adjacency()));
    EXPECT_TRUE(validate_graph(g).empty());
    EXPECT_EQ(g.features.cols(), static_cast<Eigen::Index>(a.feature_dim));
    EXPECT_LE(a.feature_dim, 6u);
  }
  EXPECT_EQ(ones, 20);
  EXPECT_THROW(synth_dataset(19, 0), ContractError);
}

TEST(Synth, TwoCommunityClassHasBottleneck) {
  const Dataset ds = synth_dataset(20, 8);
  for (const Graph& g : ds.graphs) {
    const Vector ev =
        Eigen::SelfAdjointEigenSolver<Matrix>(normalized_laplacian(g)).eigenvalues();
    // A single bridge between the two blocks keeps the spectral gap small.
    if (*g.label == 1) EXPECT_LT(ev(1), 0.15);
  }
}

TEST(Trainer, ZeroLearningRateKeepsParameters) {
  const Dataset ds = synth_dataset(30, 1);
  TrainConfig c = quick(3);
  c.lr = 0.0;
  const ModelConfig m = model_config_for(ds);
  const TrainResult r = train(ds, split_dataset(ds, 0), m, c);
  const ProxPoolNet init = init_network(m, c.seed);
  for (const auto& [name, p] : init.params) EXPECT_EQ(r.best.params.value(name), p.value);
  for (const EpochRecord& e : r.report.epochs) {
    EXPECT_EQ(e.train_loss, r.report.epochs.front().train_loss);
  }
}

TEST(Trainer, DeterministicAcrossRunsAndThreads) {
  const Dataset ds = synth_dataset(30, 2);
  const SplitSpec s = split_dataset(ds, 3);
  const ModelConfig m = model_config_for(ds);
  TrainConfig c = quick(3);
  const TrainResult a = train(ds, s, m, c);
  const TrainResult b = train(ds, s, m, c);
  c.threads = 3;
  const TrainResult d = train(ds, s, m, c);
  expect_same_report(a.report, b.report);
  expect_same_report(a.report, d.report);
  for (const auto& [name, p] : a.best.params) EXPECT_EQ(d.best.params.value(name), p.value);
}

TEST(Trainer, SelectedEpochMaximisesValidation) {
  const Dataset ds = synth_dataset(40, 4);
  const TrainResult r = train(ds, split_dataset(ds, 1), model_config_for(ds), quick(8));
  double best = -1.0;
  std::size_t first = 0;
  for (const EpochRecord& e : r.report.epochs) {
    if (e.val_accuracy > best) {
      best = e.val_accuracy;
      first = e.epoch;
    }
  }
  EXPECT_EQ(r.report.selected_epoch, first);
  EXPECT_EQ(r.report.best_val_accuracy, best);
  const Evaluation test = evaluate(r.best, ds, r.report.split.test_idx);
  EXPECT_EQ(test.accuracy, r.report.test_accuracy);
}

TEST(Trainer, EarlyStopping) {
  const Dataset ds = synth_dataset(30, 6);
  TrainConfig c = quick(50);
  c.patience = 2;
  c.lr = 0.0;
  const TrainResult r = train(ds, split_dataset(ds, 0), model_config_for(ds), c);
  EXPECT_TRUE(r.report.stopped_early);
  EXPECT_EQ(r.report.epochs.size(), 3u);
  EXPECT_EQ(r.report.selected_epoch, 1u);
}

TEST(Trainer, ConfigValidation) {
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = TrainConfig{};
  c.lr = -1.0;
  EXPECT_THROW(c.validate(), ContractError);
  c = TrainConfig{};
  c.threads = 0;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(Evaluate, UniformLogitsPickClassZero) {
  const Dataset ds = synth_dataset(20, 0);
  ProxPoolNet net = init_network(model_config_for(ds), 0);
  for (auto& [name, p] : net.params) p.value.setZero();
  std::vector<std::size_t> idx = {0, 1, 2, 4};  // labels 0, 1, 0, 0
  const Evaluation e = evaluate(net, ds, idx);
  EXPECT_EQ(e.count, 4u);
  EXPECT_DOUBLE_EQ(e.accuracy, 0.75);
  EXPECT_NEAR(e.mean_loss, std::log(2.0), 1e-12);
}

TEST(Evaluate, EmptyIndexList) {
  const Dataset ds = synth_dataset(20, 0);
  const ProxPoolNet net = init_network(model_config_for(ds), 0);
  try {
    evaluate(net, ds, std::vector<std::size_t>{});
    FAIL() << "expected ContractError";
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("no graphs to evaluate"), std::string::npos);
  }
}

TEST(RunSplits, SingleRunHasZeroSpread) {
  const Dataset ds = synth_dataset(30, 3);
  const SplitsReport r = run_splits(ds, 1, model_config_for(ds), quick(2));
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.mean_test_accuracy, r.runs[0].test_accuracy);
  EXPECT_EQ(r.stddev_test_accuracy, 0.0);
  EXPECT_TRUE(r.failures.empty());
}

TEST(RunSplits, SeedsAdvance) {
  const Dataset ds = synth_dataset(30, 3);
  TrainConfig c = quick(1);
  c.seed = 10;
  const SplitsReport r = run_splits(ds, 2, model_config_for(ds), c);
  ASSERT_EQ(r.runs.size(), 2u);
  EXPECT_EQ(r.runs[0].split.seed, 10u);
  EXPECT_EQ(r.runs[1].split.seed, 11u);
}

TEST(Stats, MeanAndSampleStddev) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  const auto [mean, sd] = mean_and_stddev(v);
  EXPECT_DOUBLE_EQ(mean, 2.5);
  EXPECT_NEAR(sd, std::sqrt(5.0 / 3.0), 1e-15);
  const std::vector<double> same = {0.7, 0.7, 0.7};
  EXPECT_EQ(mean_and_stddev(same).second, 0.0);
}

TEST(Grid, EnumeratesAxes) {
  const Dataset ds = synth_dataset(20, 9);
  GridAxes axes;
  axes.taus = {0.1, 1.0};
  axes.hops = {2};
  axes.weight_decays = {0.0, 1e-4};
  const GridReport r =
      grid_search(ds, split_dataset(ds, 0), model_config_for(ds), quick(1), axes);
  ASSERT_EQ(r.points.size(), 4u);
  for (const GridPoint& p : r.points) {
    EXPECT_LE(p.best_val_accuracy, r.points[r.selected].best_val_accuracy);
  }
}
