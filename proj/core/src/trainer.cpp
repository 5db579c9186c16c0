#include "proxpool/trainer.hpp"

#include "proxpool/diff/adam.hpp"
#include "proxpool/errors.hpp"
#include "json_io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <thread>

namespace proxpool {
namespace {

/// Runs body(k) for k in [0, count) on up to `threads` workers.  Each k is
/// handled by exactly one worker; callers write results into slot k.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < count; k += threads) body(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : workers) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct GraphPass {
  double loss = 0.0;
  bool correct = false;
  diff::GradientMap grads;
};

}  // namespace

void TrainConfig::validate() const {
  if (!(lr >= 0.0)) throw ContractError("train config: lr must be non-negative");
  if (batch_size == 0) throw ContractError("train config: batch size must be positive");
  if (max_epochs == 0) throw ContractError("train config: max_epochs must be positive");
  if (patience == 0) throw ContractError("train config: patience must be positive");
  if (!(weight_decay >= 0.0)) throw ContractError("train config: weight decay must be >= 0");
  if (threads == 0) throw ContractError("train config: threads must be positive");
}

ModelConfig model_config_for(const Dataset& d, ModelConfig base) {
  base.feature_dim = d.feature_dim;
  base.num_classes = d.num_classes;
  return base;
}

Evaluation evaluate(const ProxPoolNet& net, const Dataset& dataset,
                    std::span<const std::size_t> indices, std::size_t threads) {
  if (indices.empty()) throw ContractError("no graphs to evaluate");
  std::vector<double> losses(indices.size());
  std::vector<int> correct(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    const Graph& g = dataset.graphs.at(indices[k]);
    const ForwardResult r = forward(g, net);
    losses[k] = r.loss.value_or(0.0);
    correct[k] = g.label && predicted_class(r.logits) == *g.label ? 1 : 0;
  });
  Evaluation e;
  e.count = indices.size();
  const double n = static_cast<double>(indices.size());
  e.accuracy = static_cast<double>(std::accumulate(correct.begin(), correct.end(), 0)) / n;
  e.mean_loss = std::accumulate(losses.begin(), losses.end(), 0.0) / n;
  return e;
}

TrainResult train(const Dataset& dataset, const SplitSpec& split, const ModelConfig& model,
                  const TrainConfig& config) {
  config.validate();
  model.validate();
  if (split.train_idx.empty()) throw ContractError("train: empty training split");
  if (split.val_idx.empty()) throw ContractError("train: empty validation split");
  for (std::size_t idx : split.train_idx) {
    if (idx >= dataset.size()) throw ContractError("train: split index out of range");
    if (!dataset.graphs[idx].label) throw ContractError("train: unlabelled training graph");
  }

  const auto started = std::chrono::steady_clock::now();
  ProxPoolNet net = init_network(model, config.seed);
  ProxPoolNet best = net;
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  const diff::AdamOptions adam{config.lr, config.weight_decay};

  RunReport report;
  report.model_config = model;
  report.train_config = config;
  report.split = split;
  double best_val = -1.0;
  std::size_t since_best = 0;

  std::vector<std::size_t> order = split.train_idx;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    // Per-graph results keyed by dataset index keep epoch statistics
    // independent of the visiting order.
    std::vector<double> epoch_loss(dataset.size(), 0.0);
    std::size_t epoch_correct = 0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      std::vector<std::size_t> batch(order.begin() + static_cast<std::ptrdiff_t>(start),
                                     order.begin() + static_cast<std::ptrdiff_t>(stop));
      std::sort(batch.begin(), batch.end());

      std::vector<GraphPass> passes(batch.size());
      parallel_for(batch.size(), config.threads, [&](std::size_t k) {
        const Graph& g = dataset.graphs[batch[k]];
        GraphPass& pass = passes[k];
        pass.grads = diff::zero_gradients(net.params);
        const ForwardResult r = forward(g, net, &pass.grads);
        pass.loss = *r.loss;
        pass.correct = predicted_class(r.logits) == *g.label;
      });

      diff::GradientMap total = diff::zero_gradients(net.params);
      const double inv = 1.0 / static_cast<double>(batch.size());
      for (std::size_t k = 0; k < batch.size(); ++k) {
        if (!std::isfinite(passes[k].loss)) {
          throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + ", graph " +
                              std::to_string(batch[k]));
        }
        epoch_loss[batch[k]] = passes[k].loss;
        epoch_correct += passes[k].correct ? 1 : 0;
        diff::accumulate(total, passes[k].grads, inv);
      }
      diff::adam_step(net.params, total, adam);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = std::accumulate(epoch_loss.begin(), epoch_loss.end(), 0.0) /
                     static_cast<double>(order.size());
    rec.train_accuracy =
        static_cast<double>(epoch_correct) / static_cast<double>(order.size());
    const Evaluation val = evaluate(net, dataset, split.val_idx, config.threads);
    rec.val_loss = val.mean_loss;
    rec.val_accuracy = val.accuracy;
    report.epochs.push_back(rec);

    if (config.verbose) {
      std::cerr << "epoch " << epoch << " loss " << rec.train_loss << " train_acc "
                << rec.train_accuracy << " val_acc " << rec.val_accuracy << '\n';
    }

    if (rec.val_accuracy > best_val) {
      best_val = rec.val_accuracy;
      best = net;
      report.selected_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      report.stopped_early = true;
      break;
    }
  }

  report.best_val_accuracy = best_val;
  if (!split.test_idx.empty()) {
    const Evaluation test = evaluate(best, dataset, split.test_idx, config.threads);
    report.test_accuracy = test.accuracy;
    report.test_loss = test.mean_loss;
  }
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return {std::move(best), std::move(report)};
}

std::pair<double, double> mean_and_stddev(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  // Identical runs report exactly zero spread rather than rounding residue.
  if (std::adjacent_find(values.begin(), values.end(), std::not_equal_to<>()) == values.end()) {
    return {values.front(), 0.0};
  }
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

SplitsReport run_splits(const Dataset& dataset, std::size_t k, const ModelConfig& model,
                        const TrainConfig& config) {
  if (k == 0) throw ContractError("run_splits: k must be >= 1");
  SplitsReport out;
  std::vector<double> accuracies;
  for (std::size_t i = 0; i < k; ++i) {
    TrainConfig run = config;
    run.seed = config.seed + i;
    try {
      const SplitSpec split = split_dataset(dataset, run.seed);
      TrainResult r = train(dataset, split, model, run);
      accuracies.push_back(r.report.test_accuracy);
      out.runs.push_back(std::move(r.report));
    } catch (const Error& e) {
      out.failures.push_back("seed " + std::to_string(run.seed) + ": " + e.what());
      std::cerr << "warning: run with seed " << run.seed << " failed and is excluded: "
                << e.what() << '\n';
    }
  }
  std::tie(out.mean_test_accuracy, out.stddev_test_accuracy) = mean_and_stddev(accuracies);
  return out;
}

GridReport grid_search(const Dataset& dataset, const SplitSpec& split, const ModelConfig& model,
                       const TrainConfig& config, const GridAxes& axes) {
  GridReport out;
  double best = -1.0;
  for (double tau : axes.taus) {
    for (int s : axes.hops) {
      for (double wd : axes.weight_decays) {
        ModelConfig m = model;
        m.tau = tau;
        m.hop_s = s;
        TrainConfig t = config;
        t.weight_decay = wd;
        const TrainResult r = train(dataset, split, m, t);
        out.points.push_back({tau, s, wd, r.report.best_val_accuracy, r.report.test_accuracy});
        if (r.report.best_val_accuracy > best) {
          best = r.report.best_val_accuracy;
          out.selected = out.points.size() - 1;
        }
      }
    }
  }
  return out;
}

namespace {

using nlohmann::json;

json train_config_json(const TrainConfig& c) {
  return {{"lr", c.lr},           {"batch_size", c.batch_size}, {"max_epochs", c.max_epochs},
          {"patience", c.patience}, {"weight_decay", c.weight_decay}, {"seed", c.seed}};
}

json report_json(const RunReport& r) {
  json epochs = json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"train_accuracy", e.train_accuracy},
                      {"val_loss", e.val_loss},
                      {"val_accuracy", e.val_accuracy}});
  }
  return {{"epochs", epochs},
          {"selected_epoch", r.selected_epoch},
          {"best_val_accuracy", r.best_val_accuracy},
          {"test_accuracy", r.test_accuracy},
          {"test_loss", r.test_loss},
          {"stopped_early", r.stopped_early},
          {"wall_clock_seconds", r.wall_clock_seconds},
          {"model_config", detail::model_config_to_json(r.model_config)},
          {"train_config", train_config_json(r.train_config)},
          {"split",
           {{"seed", r.split.seed},
            {"train", r.split.train_idx.size()},
            {"val", r.split.val_idx.size()},
            {"test", r.split.test_idx.size()}}}};
}

}  // namespace

std::string to_json(const RunReport& report, int indent) { return report_json(report).dump(indent); }

std::string to_json(const SplitsReport& report, int indent) {
  json runs = json::array();
  json acc = json::array();
  for (const auto& r : report.runs) {
    runs.push_back(report_json(r));
    acc.push_back(r.test_accuracy);
  }
  return json{{"test_accuracies", acc},
              {"mean_test_accuracy", report.mean_test_accuracy},
              {"stddev_test_accuracy", report.stddev_test_accuracy},
              {"failures", report.failures},
              {"runs", runs}}
      .dump(indent);
}

std::string to_json(const GridReport& report, int indent) {
  json points = json::array();
  for (const auto& p : report.points) {
    points.push_back({{"tau", p.tau},
                      {"s", p.hop_s},
                      {"weight_decay", p.weight_decay},
                      {"best_val_accuracy", p.best_val_accuracy},
                      {"test_accuracy", p.test_accuracy}});
  }
  return json{{"points", points}, {"selected", report.selected}}.dump(indent);
}

std::string to_json(const Evaluation& eval, int indent) {
  return json{{"accuracy", eval.accuracy}, {"mean_loss", eval.mean_loss}, {"count", eval.count}}
      .dump(indent);
}

}  // namespace proxpool
