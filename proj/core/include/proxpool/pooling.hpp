#pragma once

#include "proxpool/graph.hpp"
#include "proxpool/kernels.hpp"

#include <cstddef>
#include <limits>
#include <vector>

namespace proxpool {

inline constexpr double kMasked = -std::numeric_limits<double>::infinity();

struct CouplingScores {
  Vector scores;
};

struct SeedSelection {
  std::vector<std::size_t> idx;  // descending score, ties by lower index
  double rho = 1.0;

  bool contains(std::size_t node) const;
};

struct CoarseningMatrix {
  Matrix matrix;  // n' x n
};

struct CoarsenedGraph {
  Graph graph;
  // max |M - M^T| of C A C^T before symmetrisation.
  double asymmetry_before = 0.0;
};

/// eps_i = sum_{j != i} R_ij / sum_{k != j} R_kj.  Columns without off-diagonal
/// mass contribute nothing.  Throws ContractError on a negative entry.
CouplingScores coupling_factor(const Matrix& proximity);

/// max(1, ceil(rho * n)) seeds.
std::size_t pooled_size(std::size_t n, double rho);

SeedSelection select_seeds(const CouplingScores& eps, double rho);

struct SparsemaxResult {
  Vector p;
  double threshold = 0.0;
  std::size_t support = 0;
};

/// Euclidean projection onto the simplex over the finite entries; -inf entries
/// map to 0, and an all -inf input maps to all zeros.  Throws NumericError on NaN.
Vector sparsemax(const Vector& z);
SparsemaxResult sparsemax_detail(const Vector& z);

/// Row i, column j holds R[idx[i]][j] when the eligibility kernel is positive
/// there and j is not a seed; every other entry is -inf.
Matrix assignment_scores(const Matrix& proximity, const Matrix& eligibility,
                         const SeedSelection& seeds);

/// Row i: sparsemax of the score row on non-seed columns plus 1 at idx[i].
CoarseningMatrix coarsening_matrix(const Matrix& scores, const SeedSelection& seeds,
                                   std::size_t n);

/// A' = C A C^T (exactly symmetrised, self-loops kept) and X' = C X.
CoarsenedGraph coarsen(const CoarseningMatrix& c, const Graph& g);

struct PoolingOptions {
  double rho = 0.3;
  int hop_s = 2;
  double tau = 1.0;
  Variant variant = Variant::full;
};

struct PoolingTrace {
  StructureKernel structure;
  SignalKernel signal;
  Proximity proximity;
  CouplingScores coupling;
  SeedSelection seeds;
  Matrix scores;
  CoarseningMatrix coarsening;
  CoarsenedGraph coarsened;
};

/// One full pooling level on plain matrices, keeping every intermediate.
PoolingTrace pool_graph(const Graph& g, const Matrix& projection, const PoolingOptions& options);

}  // namespace proxpool
