#include "support/generators.hpp"

#include <algorithm>
#include <numeric>

namespace proxpool::testing {

Matrix random_connected_adjacency(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution edge(p);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) a(i, j) = a(j, i) = 1.0;
    }
  }
  // Union-find over the sampled edges, then bridge components in order.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (a(i, j) != 0.0) parent[find(i)] = find(j);
    }
  }
  for (int i = 1; i < n; ++i) {
    if (find(i) != find(0)) {
      std::uniform_int_distribution<int> pick(0, i - 1);
      int u = pick(rng);
      while (find(u) == find(i)) u = pick(rng);
      a(u, i) = a(i, u) = 1.0;
      parent[find(i)] = find(0);
    }
  }
  return a;
}

Graph random_graph(int n, double p, int feature_dim, std::mt19937_64& rng,
                   std::optional<int> label) {
  std::normal_distribution<double> normal;
  Matrix x(n, feature_dim);
  const Matrix a = random_connected_adjacency(n, p, rng);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < feature_dim; ++k) x(i, k) = normal(rng);
  }
  return Graph::from_dense(a, x, label);
}

Matrix path_adjacency(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) a(i, i + 1) = a(i + 1, i) = 1.0;
  return a;
}

Matrix star_adjacency(int n) {
  Matrix a = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) a(0, i) = a(i, 0) = 1.0;
  return a;
}

Matrix complete_adjacency(int n) {
  return Matrix::Ones(n, n) - Matrix::Identity(n, n);
}

std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

Graph permute_graph(const Graph& g, const std::vector<int>& perm) {
  const Matrix a = g.dense_adjacency();
  const int n = static_cast<int>(perm.size());
  Matrix pa(n, n);
  Matrix px(n, g.features.cols());
  for (int i = 0; i < n; ++i) {
    px.row(i) = g.features.row(perm[i]);
    for (int j = 0; j < n; ++j) pa(i, j) = a(perm[i], perm[j]);
  }
  return Graph::from_dense(pa, px, g.label);
}

}  // namespace proxpool::testing
