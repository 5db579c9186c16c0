#pragma once

#include "proxpool/graph.hpp"

#include <cstddef>
#include <string_view>

namespace proxpool {

/// Cosine gram matrix of the filtered proxy signals; support is the s-hop
/// neighbourhood of each node.
struct StructureKernel {
  Matrix matrix;
  int hop_s = 1;
};

struct SpectralDecomposition {
  Vector eigenvalues;  // ascending
  Matrix eigenvectors;  // columns, orthonormal
};

struct SignalKernel {
  Matrix matrix;
  double precision_tau = 1.0;
  Matrix projection;  // d x d'
};

enum class Variant { full, nt, ns };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view text);

struct Proximity {
  Matrix matrix;
  Variant variant = Variant::full;
};

inline constexpr std::size_t kDefaultOracleCap = 512;

/// (I - L/2)^s via sparse products, then degree and self-similarity
/// normalisation.  Entries for nodes farther than s hops apart are exactly 0.
StructureKernel structure_kernel(const Graph& g, int s);
StructureKernel structure_kernel(const Matrix& adjacency, int s);

/// Dense eigendecomposition of the normalized Laplacian.
SpectralDecomposition spectral_decomposition(const Matrix& adjacency);

/// Same kernel through the explicit spectrum: U g(Lambda) U^T with
/// g(lambda) = (1 - lambda/2)^s.  Test and debugging path only.
StructureKernel structure_kernel_oracle(const Graph& g, int s,
                                        std::size_t oracle_cap = kDefaultOracleCap);
StructureKernel structure_kernel_oracle(const Matrix& adjacency, int s,
                                        std::size_t oracle_cap = kDefaultOracleCap);

/// f(lambda) = (1 - lambda/2)^{s/2}.  Bases within 1e-12 of zero (lambda at the
/// top of the spectrum up to eigensolver noise) are clamped to exactly 0.
double proxy_filter(double lambda, int s);

/// Number of eigenvalues with f(lambda) > 1e-8.
std::size_t filter_support_size(const SpectralDecomposition& spectrum, int s);

/// Numerical rank (singular values > 1e-8) of D^{-1/2} U f(Lambda).
/// Throws ContractError if the graph has an isolated vertex.
std::size_t proxy_signal_rank(const Graph& g, int s, std::size_t oracle_cap = kDefaultOracleCap);
std::size_t proxy_signal_rank(const Matrix& adjacency, int s,
                              std::size_t oracle_cap = kDefaultOracleCap);

/// K_s[i][j] = exp(-tau * ||q_i - q_j||^2) with Q = X W_Q.
SignalKernel signal_kernel(const Matrix& features, const Matrix& projection, double tau);

/// Pairwise RBF on already-projected rows.  Distances are accumulated from
/// coordinate differences so the diagonal is exactly 1.
Matrix rbf_gram(const Matrix& projected, double tau);

Proximity proximity(const StructureKernel& kt, const SignalKernel& ks, Variant variant,
                    const Matrix& adjacency);

/// Matrix whose positive entries mark assignment eligibility: K_t, or A for nt.
const Matrix& eligibility_kernel(Variant variant, const StructureKernel& kt,
                                 const Matrix& adjacency);

double min_eigenvalue(const Matrix& symmetric);

}  // namespace proxpool
