#pragma once

#include "proxpool/graph.hpp"
#include "proxpool/network.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace proxpool {

struct TrainConfig {
  double lr = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 300;
  std::size_t patience = 50;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  // Workers for per-graph forward/backward.  Results do not depend on it.
  std::size_t threads = 1;
  bool verbose = false;

  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct RunReport {
  std::vector<EpochRecord> epochs;
  std::size_t selected_epoch = 0;
  double best_val_accuracy = 0.0;
  double test_accuracy = 0.0;
  double test_loss = 0.0;
  double wall_clock_seconds = 0.0;
  bool stopped_early = false;
  ModelConfig model_config;
  TrainConfig train_config;
  SplitSpec split;
};

struct TrainResult {
  ProxPoolNet best;  // parameters at the selected epoch
  RunReport report;
};

struct Evaluation {
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::size_t count = 0;
};

/// Model config with feature_dim / num_classes taken from the dataset.
ModelConfig model_config_for(const Dataset& d, ModelConfig base = {});

/// Mini-batch Adam over per-graph forward/backward passes.  Each batch's
/// update uses the mean loss; per-graph gradients are reduced in dataset
/// index order.  The checkpoint with the best validation accuracy (earliest
/// on ties) is kept, and training stops after `patience` epochs without
/// improvement.
TrainResult train(const Dataset& dataset, const SplitSpec& split, const ModelConfig& model,
                  const TrainConfig& config);

/// Throws ContractError("no graphs to evaluate") for an empty index list.
Evaluation evaluate(const ProxPoolNet& net, const Dataset& dataset,
                    std::span<const std::size_t> indices, std::size_t threads = 1);

struct SplitsReport {
  std::vector<RunReport> runs;
  std::vector<std::string> failures;
  double mean_test_accuracy = 0.0;
  double stddev_test_accuracy = 0.0;  // sample (n - 1); 0 for a single run
};

/// k runs with split and init seeds config.seed + 0 ... config.seed + k - 1.
SplitsReport run_splits(const Dataset& dataset, std::size_t k, const ModelConfig& model,
                        const TrainConfig& config);

/// Sample mean and (n - 1) standard deviation.
std::pair<double, double> mean_and_stddev(std::span<const double> values);

struct GridPoint {
  double tau = 1.0;
  int hop_s = 2;
  double weight_decay = 0.0;
  double best_val_accuracy = 0.0;
  double test_accuracy = 0.0;
};

struct GridAxes {
  std::vector<double> taus{0.1, 1.0};
  std::vector<int> hops{2, 3, 4};
  std::vector<double> weight_decays{0.0, 1e-5, 1e-4};
};

struct GridReport {
  std::vector<GridPoint> points;
  std::size_t selected = 0;  // highest validation accuracy, earliest on ties
};

/// Exhaustive enumeration of the given axes on one split.
GridReport grid_search(const Dataset& dataset, const SplitSpec& split, const ModelConfig& model,
                       const TrainConfig& config, const GridAxes& axes = {});

std::string to_json(const RunReport& report, int indent = 2);
std::string to_json(const SplitsReport& report, int indent = 2);
std::string to_json(const GridReport& report, int indent = 2);
std::string to_json(const Evaluation& eval, int indent = 2);

}  // namespace proxpool
