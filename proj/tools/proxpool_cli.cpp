// proxpool command-line interface.

#include "proxpool/checkpoint.hpp"
#include "proxpool/csv.hpp"
#include "proxpool/errors.hpp"
#include "proxpool/kernels.hpp"
#include "proxpool/network.hpp"
#include "proxpool/synth.hpp"
#include "proxpool/trainer.hpp"
#include "proxpool/tu_format.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace proxpool;

namespace {

struct DataOptions {
  std::string data_dir;
  std::string dataset = "SYNTH";
  std::size_t synth_graphs = 250;
  std::uint64_t synth_seed = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data-dir", data_dir, "Directory holding the TU-format files");
    cmd->add_option("--dataset", dataset, "Dataset name (file prefix)");
    cmd->add_option("--synth-graphs", synth_graphs,
                    "Graph count when --dataset SYNTH is generated in memory");
    cmd->add_option("--synth-seed", synth_seed, "Seed for the in-memory SYNTH dataset");
  }

  Dataset load() const {
    if (data_dir.empty()) {
      if (dataset != "SYNTH") {
        throw ContractError("--data-dir is required for dataset '" + dataset + "'");
      }
      return synth_dataset(synth_graphs, synth_seed);
    }
    Dataset ds = load_tu_dataset(data_dir, dataset);
    for (const auto& w : ds.load_summary.warnings()) std::cerr << "warning: " << w << '\n';
    return ds;
  }
};

struct ModelOptions {
  double rho = 0.3;
  int s = 2;
  double tau = 1.0;
  std::string variant = "full";
  std::size_t hidden = 64;
  std::size_t proj = 16;

  void attach(CLI::App* cmd) {
    cmd->add_option("--rho", rho, "Pooling ratio in (0, 1]");
    cmd->add_option("--s", s, "Structure kernel hop count");
    cmd->add_option("--tau", tau, "RBF precision");
    cmd->add_option("--variant", variant, "full | nt | ns")
        ->check(CLI::IsMember({"full", "nt", "ns"}));
    cmd->add_option("--hidden-dim", hidden, "Conv width");
    cmd->add_option("--proj-dim", proj, "Pooling projection width");
  }

  ModelConfig config(const Dataset& ds) const {
    ModelConfig m;
    m.pooling_ratio = rho;
    m.hop_s = s;
    m.tau = tau;
    m.variant = parse_variant(variant);
    m.hidden_dim = hidden;
    m.proj_dim = proj;
    return model_config_for(ds, m);
  }
};

struct TrainOptions {
  TrainConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--lr", config.lr, "Adam learning rate");
    cmd->add_option("--weight-decay", config.weight_decay, "L2 weight decay");
    cmd->add_option("--seed", config.seed, "Split and initialisation seed");
    cmd->add_option("--batch-size", config.batch_size, "Graphs per Adam step");
    cmd->add_option("--epochs", config.max_epochs, "Maximum epochs");
    cmd->add_option("--patience", config.patience, "Early-stopping patience in epochs");
    cmd->add_option("--threads", config.threads, "Worker threads");
    cmd->add_flag("--verbose", config.verbose, "Log every epoch to stderr");
  }
};

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw IngestionError(out_path, "cannot write output");
  out << text << '\n';
}

const Graph& pick_graph(const Dataset& ds, std::size_t index) {
  if (index >= ds.size()) {
    throw ContractError("graph index " + std::to_string(index) + " out of range (dataset has " +
                        std::to_string(ds.size()) + " graphs)");
  }
  return ds.graphs[index];
}

ProxPoolNet model_for(const std::string& checkpoint, const ModelOptions& model,
                      const Dataset& ds, std::uint64_t seed) {
  if (!checkpoint.empty()) return load_checkpoint(checkpoint).net;
  return init_network(model.config(ds), seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ProxPool graph pooling: kernels, pooling, training"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Write the synthetic two-class dataset in TU format");
  std::size_t synth_n = 250;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  std::string synth_name = "SYNTH";
  synth->add_option("--n", synth_n, "Number of graphs (>= 20)");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--name", synth_name, "File prefix");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train on one 8:1:1 split");
  DataOptions train_data;
  ModelOptions train_model;
  TrainOptions train_opts;
  std::string train_out, train_ckpt;
  train_data.attach(train_cmd);
  train_model.attach(train_cmd);
  train_opts.attach(train_cmd);
  train_cmd->add_option("--out", train_out, "Run report JSON path (stdout if omitted)");
  train_cmd->add_option("--checkpoint", train_ckpt, "Where to save the selected checkpoint");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a split");
  DataOptions eval_data;
  std::string eval_ckpt, eval_split = "test";
  std::optional<std::uint64_t> eval_seed;
  std::size_t eval_threads = 1;
  eval_data.attach(eval_cmd);
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint JSON")->required();
  eval_cmd->add_option("--split", eval_split, "train | val | test")
      ->check(CLI::IsMember({"train", "val", "test"}));
  eval_cmd->add_option("--seed", eval_seed, "Split seed (defaults to the checkpoint's)");
  eval_cmd->add_option("--threads", eval_threads, "Worker threads");

  // run-splits
  auto* splits_cmd = app.add_subcommand("run-splits", "Repeat training over k random splits");
  DataOptions splits_data;
  ModelOptions splits_model;
  TrainOptions splits_opts;
  std::size_t splits_k = 20;
  std::string splits_out;
  splits_data.attach(splits_cmd);
  splits_model.attach(splits_cmd);
  splits_opts.attach(splits_cmd);
  splits_cmd->add_option("--k", splits_k, "Number of splits");
  splits_cmd->add_option("--out", splits_out, "Report JSON path (stdout if omitted)");

  // grid
  auto* grid_cmd = app.add_subcommand("grid", "Grid over tau x s x weight decay on one split");
  DataOptions grid_data;
  ModelOptions grid_model;
  TrainOptions grid_opts;
  GridAxes axes;
  std::string grid_out;
  grid_data.attach(grid_cmd);
  grid_model.attach(grid_cmd);
  grid_opts.attach(grid_cmd);
  grid_cmd->add_option("--taus", axes.taus, "tau values")->delimiter(',');
  grid_cmd->add_option("--hops", axes.hops, "s values")->delimiter(',');
  grid_cmd->add_option("--weight-decays", axes.weight_decays, "weight decay values")
      ->delimiter(',');
  grid_cmd->add_option("--out", grid_out, "Report JSON path (stdout if omitted)");

  // kernel-dump
  auto* kdump = app.add_subcommand("kernel-dump", "Emit K_t, K_s and R of one input graph as CSV");
  DataOptions kdump_data;
  std::size_t kdump_index = 0;
  int kdump_s = 2;
  double kdump_tau = 1.0;
  bool kdump_oracle = false;
  std::string kdump_variant = "full";
  std::string kdump_out;
  kdump_data.attach(kdump);
  kdump->add_option("--graph-index", kdump_index, "0-based graph index");
  kdump->add_option("--s", kdump_s, "Hop count");
  kdump->add_option("--tau", kdump_tau, "RBF precision");
  kdump->add_flag("--oracle", kdump_oracle, "Use the eigendecomposition path for K_t");
  kdump->add_option("--variant", kdump_variant, "full | nt | ns")
      ->check(CLI::IsMember({"full", "nt", "ns"}));
  kdump->add_option("--out", kdump_out,
                    "Directory for kt.csv, ks.csv, r.csv (stdout sections if omitted)");

  // pool-dump
  auto* pdump = app.add_subcommand("pool-dump", "Emit per-level seeds, C, coarsened graph");
  DataOptions pdump_data;
  ModelOptions pdump_model;
  std::size_t pdump_index = 0;
  std::string pdump_ckpt, pdump_out;
  std::uint64_t pdump_seed = 0;
  pdump_data.attach(pdump);
  pdump_model.attach(pdump);
  pdump->add_option("--graph-index", pdump_index, "0-based graph index");
  pdump->add_option("--checkpoint", pdump_ckpt, "Use trained weights instead of a fresh init");
  pdump->add_option("--seed", pdump_seed, "Initialisation seed without --checkpoint");
  pdump->add_option("--out", pdump_out, "Output directory")->required();

  // gradcheck
  auto* gcheck = app.add_subcommand("gradcheck", "Finite-difference check of the model gradient");
  DataOptions gcheck_data;
  ModelOptions gcheck_model;
  std::size_t gcheck_index = 0;
  double gcheck_eps = 1e-5;
  std::string gcheck_ckpt;
  std::uint64_t gcheck_seed = 0;
  gcheck_data.attach(gcheck);
  gcheck_model.attach(gcheck);
  gcheck->add_option("--graph-index", gcheck_index, "0-based graph index");
  gcheck->add_option("--epsilon", gcheck_eps, "Central-difference step");
  gcheck->add_option("--checkpoint", gcheck_ckpt, "Check at trained weights");
  gcheck->add_option("--seed", gcheck_seed, "Initialisation seed without --checkpoint");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      Dataset ds = synth_dataset(synth_n, synth_seed);
      write_tu_dataset(ds, synth_out, synth_name);
      json summary = {{"graphs", ds.size()},
                      {"feature_dim", ds.feature_dim},
                      {"num_classes", ds.num_classes},
                      {"out", synth_out},
                      {"name", synth_name}};
      std::cout << summary.dump(2) << '\n';
    } else if (*train_cmd) {
      const Dataset ds = train_data.load();
      const SplitSpec split = split_dataset(ds, train_opts.config.seed);
      const TrainResult r = train(ds, split, train_model.config(ds), train_opts.config);
      if (!train_ckpt.empty()) {
        save_checkpoint(train_ckpt, {r.best, {ds.name, split.seed, r.report.selected_epoch}});
      }
      emit(to_json(r.report), train_out);
    } else if (*eval_cmd) {
      const Checkpoint ckpt = load_checkpoint(eval_ckpt);
      const Dataset ds = eval_data.load();
      const SplitSpec split = split_dataset(ds, eval_seed.value_or(ckpt.meta.split_seed));
      const auto& idx = eval_split == "train" ? split.train_idx
                        : eval_split == "val" ? split.val_idx
                                              : split.test_idx;
      std::cout << to_json(evaluate(ckpt.net, ds, idx, eval_threads)) << '\n';
    } else if (*splits_cmd) {
      const Dataset ds = splits_data.load();
      const SplitsReport r = run_splits(ds, splits_k, splits_model.config(ds), splits_opts.config);
      emit(to_json(r), splits_out);
    } else if (*grid_cmd) {
      const Dataset ds = grid_data.load();
      const SplitSpec split = split_dataset(ds, grid_opts.config.seed);
      emit(to_json(grid_search(ds, split, grid_model.config(ds), grid_opts.config, axes)),
           grid_out);
    } else if (*kdump) {
      const Dataset ds = kdump_data.load();
      const Graph& g = pick_graph(ds, kdump_index);
      const StructureKernel kt =
          kdump_oracle ? structure_kernel_oracle(g, kdump_s) : structure_kernel(g, kdump_s);
      // Identity projection: K_s on the raw input signals.
      const Matrix eye = Matrix::Identity(g.features.cols(), g.features.cols());
      const SignalKernel ks = signal_kernel(g.features, eye, kdump_tau);
      const Proximity r = proximity(kt, ks, parse_variant(kdump_variant), g.dense_adjacency());
      if (kdump_out.empty()) {
        std::cout << "# K_t\n";
        write_csv(std::cout, kt.matrix);
        std::cout << "# K_s\n";
        write_csv(std::cout, ks.matrix);
        std::cout << "# R\n";
        write_csv(std::cout, r.matrix);
      } else {
        fs::create_directories(kdump_out);
        write_csv(fs::path(kdump_out) / "kt.csv", kt.matrix);
        write_csv(fs::path(kdump_out) / "ks.csv", ks.matrix);
        write_csv(fs::path(kdump_out) / "r.csv", r.matrix);
      }
    } else if (*pdump) {
      const Dataset ds = pdump_data.load();
      const Graph& g = pick_graph(ds, pdump_index);
      const ProxPoolNet net = model_for(pdump_ckpt, pdump_model, ds, pdump_seed);
      const ForwardResult fr = forward(g, net);
      const fs::path out(pdump_out);
      fs::create_directories(out);
      json summary = {{"level_sizes", fr.diagnostics.level_sizes}, {"logits", json::array()}};
      for (Eigen::Index k = 0; k < fr.logits.size(); ++k) summary["logits"].push_back(fr.logits(k));
      for (std::size_t level = 0; level < fr.diagnostics.pools.size(); ++level) {
        const LevelTrace& t = fr.diagnostics.pools[level];
        const std::string prefix = "level" + std::to_string(level + 1) + "_";
        std::ofstream(out / (prefix + "seeds.json")) << json(t.seeds).dump() << '\n';
        write_csv(out / (prefix + "C.csv"), t.coarsening);
        std::ofstream edges(out / (prefix + "edges.csv"));
        write_edge_list(edges, t.adjacency);
        write_csv(out / (prefix + "features.csv"), t.features);
        summary["levels"].push_back({{"seeds", t.seeds}, {"input_nodes", t.input_nodes}});
      }
      std::cout << summary.dump(2) << '\n';
    } else if (*gcheck) {
      const Dataset ds = gcheck_data.load();
      const Graph& g = pick_graph(ds, gcheck_index);
      const ProxPoolNet net = model_for(gcheck_ckpt, gcheck_model, ds, gcheck_seed);
      diff::GradCheckOptions opts;
      opts.epsilon = gcheck_eps;
      const ForwardResult probe = forward(g, net);
      const diff::GradCheckReport r =
          diff::gradient_check(graph_objective(g, net.config), net.params, opts);
      json out = {{"max_relative_error", r.max_relative_error},
                  {"per_parameter", r.per_parameter},
                  {"coordinates_checked", r.coordinates_checked},
                  {"kink_margin", probe.diagnostics.kink_margin},
                  {"min_cutoff_gap", probe.diagnostics.min_cutoff_gap()}};
      std::cout << out.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
