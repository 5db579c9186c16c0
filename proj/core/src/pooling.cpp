#include "proxpool/pooling.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace proxpool {

bool SeedSelection::contains(std::size_t node) const {
  return std::find(idx.begin(), idx.end(), node) != idx.end();
}

CouplingScores coupling_factor(const Matrix& r) {
  if (r.rows() != r.cols()) throw ContractError("coupling factor: proximity must be square");
  const Eigen::Index n = r.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(r(i, j) >= 0.0)) {
        throw ContractError("coupling factor: proximity entry (" + std::to_string(i) + ", " +
                            std::to_string(j) + ") = " + std::to_string(r(i, j)) +
                            " is negative or NaN");
      }
    }
  }
  Vector column_mass = Vector::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k != j) column_mass(j) += r(k, j);
    }
  }
  Vector eps = Vector::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i && column_mass(j) > 0.0) eps(i) += r(i, j) / column_mass(j);
    }
  }
  return {eps};
}

std::size_t pooled_size(std::size_t n, double rho) {
  if (!(rho > 0.0 && rho <= 1.0)) {
    throw ContractError("pooling ratio must lie in (0, 1], got " + std::to_string(rho));
  }
  // The small slack keeps products like 0.1 * 30 from rounding up a whole node.
  const double target = std::ceil(rho * static_cast<double>(n) - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(target, 1.0)), 1,
                                 std::max<std::size_t>(n, 1));
}

SeedSelection select_seeds(const CouplingScores& eps, double rho) {
  const auto n = static_cast<std::size_t>(eps.scores.size());
  const std::size_t keep = pooled_size(n, rho);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return eps.scores(static_cast<Eigen::Index>(a)) > eps.scores(static_cast<Eigen::Index>(b));
  });
  order.resize(std::min(keep, n));
  return {order, rho};
}

SparsemaxResult sparsemax_detail(const Vector& z) {
  const Eigen::Index n = z.size();
  std::vector<double> finite;
  finite.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::isnan(z(i))) throw NumericError("sparsemax: NaN input");
    if (z(i) == std::numeric_limits<double>::infinity()) {
      throw NumericError("sparsemax: +inf input");
    }
    if (z(i) != kMasked) finite.push_back(z(i));
  }
  SparsemaxResult out;
  out.p = Vector::Zero(n);
  if (finite.empty()) return out;

  std::sort(finite.begin(), finite.end(), std::greater<>());
  double cumulative = 0.0;
  double support_sum = 0.0;
  std::size_t k_star = 0;
  for (std::size_t k = 1; k <= finite.size(); ++k) {
    cumulative += finite[k - 1];
    if (1.0 + static_cast<double>(k) * finite[k - 1] > cumulative) {
      k_star = k;
      support_sum = cumulative;
    }
  }
  out.threshold = (support_sum - 1.0) / static_cast<double>(k_star);
  out.support = k_star;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (z(i) != kMasked) out.p(i) = std::max(z(i) - out.threshold, 0.0);
  }
  return out;
}

Vector sparsemax(const Vector& z) { return sparsemax_detail(z).p; }

Matrix assignment_scores(const Matrix& r, const Matrix& eligibility, const SeedSelection& seeds) {
  const Eigen::Index n = r.rows();
  if (r.cols() != n || eligibility.rows() != n || eligibility.cols() != n) {
    throw ContractError("assignment scores: shape mismatch");
  }
  std::vector<bool> is_seed(static_cast<std::size_t>(n), false);
  for (std::size_t s : seeds.idx) {
    if (s >= static_cast<std::size_t>(n)) throw ContractError("seed index out of range");
    is_seed[s] = true;
  }
  Matrix scores(static_cast<Eigen::Index>(seeds.idx.size()), n);
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const auto seed = static_cast<Eigen::Index>(seeds.idx[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool eligible = eligibility(seed, j) > 0.0 && !is_seed[static_cast<std::size_t>(j)];
      scores(i, j) = eligible ? r(seed, j) : kMasked;
    }
  }
  return scores;
}

CoarseningMatrix coarsening_matrix(const Matrix& scores, const SeedSelection& seeds,
                                   std::size_t n) {
  const auto rows = static_cast<Eigen::Index>(seeds.idx.size());
  if (scores.rows() != rows || scores.cols() != static_cast<Eigen::Index>(n)) {
    throw ContractError("coarsening matrix: scores must be n' x n");
  }
  Matrix c(rows, static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < rows; ++i) {
    c.row(i) = sparsemax(scores.row(i).transpose()).transpose();
    // Seed columns are masked in the scores, so their sparsemax weight is 0.
    c(i, static_cast<Eigen::Index>(seeds.idx[static_cast<std::size_t>(i)])) = 1.0;
  }
  return {c};
}

CoarsenedGraph coarsen(const CoarseningMatrix& c, const Graph& g) {
  const Matrix& cm = c.matrix;
  if (cm.cols() != static_cast<Eigen::Index>(g.num_nodes())) {
    throw ContractError("coarsen: C has " + std::to_string(cm.cols()) + " columns for " +
                        std::to_string(g.num_nodes()) + " nodes");
  }
  const Matrix product = cm * (g.adjacency * cm.transpose());
  CoarsenedGraph out;
  out.asymmetry_before = (product - product.transpose()).cwiseAbs().maxCoeff();
  const Matrix sym = 0.5 * (product + product.transpose());
  out.graph = Graph::from_dense(sym, cm * g.features, g.label);
  return out;
}

PoolingTrace pool_graph(const Graph& g, const Matrix& projection, const PoolingOptions& options) {
  const Matrix a = g.dense_adjacency();
  PoolingTrace t;
  t.structure = structure_kernel(g, options.hop_s);
  if (options.variant != Variant::ns) {
    t.signal = signal_kernel(g.features, projection, options.tau);
  }
  t.proximity = proximity(t.structure, t.signal, options.variant, a);
  t.coupling = coupling_factor(t.proximity.matrix);
  t.seeds = select_seeds(t.coupling, options.rho);
  t.scores = assignment_scores(t.proximity.matrix,
                               eligibility_kernel(options.variant, t.structure, a), t.seeds);
  t.coarsening = coarsening_matrix(t.scores, t.seeds, g.num_nodes());
  t.coarsened = coarsen(t.coarsening, g);
  return t;
}

}  // namespace proxpool
