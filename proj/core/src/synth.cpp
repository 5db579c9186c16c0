#include "proxpool/synth.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace proxpool {
namespace {

using Rng = std::mt19937_64;

void erdos_renyi_block(Matrix& a, Eigen::Index offset, Eigen::Index size, double p, Rng& rng) {
  std::bernoulli_distribution edge(p);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = i + 1; j < size; ++j) {
      if (edge(rng)) {
        a(offset + i, offset + j) = 1.0;
        a(offset + j, offset + i) = 1.0;
      }
    }
  }
}

/// Joins the connected components of the block [offset, offset + size) into
/// one by linking a random node of each component to a random node of the
/// first.
void connect_block(Matrix& a, Eigen::Index offset, Eigen::Index size, Rng& rng) {
  std::vector<int> comp(static_cast<std::size_t>(size), -1);
  std::vector<std::vector<Eigen::Index>> members;
  for (Eigen::Index start = 0; start < size; ++start) {
    if (comp[static_cast<std::size_t>(start)] >= 0) continue;
    const int id = static_cast<int>(members.size());
    members.emplace_back();
    std::vector<Eigen::Index> stack{start};
    comp[static_cast<std::size_t>(start)] = id;
    while (!stack.empty()) {
      const Eigen::Index v = stack.back();
      stack.pop_back();
      members.back().push_back(v);
      for (Eigen::Index w = 0; w < size; ++w) {
        if (a(offset + v, offset + w) != 0.0 && comp[static_cast<std::size_t>(w)] < 0) {
          comp[static_cast<std::size_t>(w)] = id;
          stack.push_back(w);
        }
      }
    }
  }
  for (std::size_t c = 1; c < members.size(); ++c) {
    std::uniform_int_distribution<std::size_t> pick_a(0, members[0].size() - 1);
    std::uniform_int_distribution<std::size_t> pick_b(0, members[c].size() - 1);
    const Eigen::Index u = offset + members[0][pick_a(rng)];
    const Eigen::Index v = offset + members[c][pick_b(rng)];
    a(u, v) = 1.0;
    a(v, u) = 1.0;
    members[0].insert(members[0].end(), members[c].begin(), members[c].end());
  }
}

}  // namespace

Dataset synth_dataset(std::size_t n_graphs, std::uint64_t seed) {
  if (n_graphs < 20) throw ContractError("synth_dataset needs at least 20 graphs");
  Rng rng(seed);
  Dataset ds;
  ds.name = "SYNTH";
  ds.num_classes = 2;

  std::vector<Matrix> adjacency;
  std::vector<std::vector<long>> degree_labels;
  for (std::size_t g = 0; g < n_graphs; ++g) {
    Matrix a = Matrix::Zero(20, 20);
    if (g % 2 == 0) {
      erdos_renyi_block(a, 0, 20, 0.3, rng);
      connect_block(a, 0, 20, rng);
    } else {
      erdos_renyi_block(a, 0, 10, 0.5, rng);
      erdos_renyi_block(a, 10, 10, 0.5, rng);
      connect_block(a, 0, 10, rng);
      connect_block(a, 10, 10, rng);
      std::uniform_int_distribution<Eigen::Index> pick(0, 9);
      const Eigen::Index u = pick(rng);
      const Eigen::Index v = 10 + pick(rng);
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    }
    std::vector<long> labels(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
      labels[static_cast<std::size_t>(i)] = std::min(5L, static_cast<long>(a.row(i).sum()));
    }
    adjacency.push_back(std::move(a));
    degree_labels.push_back(std::move(labels));
  }

  std::vector<Matrix> features;
  ds.feature_dim = one_hot_encode(degree_labels, features);
  for (std::size_t g = 0; g < n_graphs; ++g) {
    ds.graphs.push_back(
        Graph::from_dense(adjacency[g], std::move(features[g]), static_cast<int>(g % 2)));
  }
  return ds;
}

}  // namespace proxpool
