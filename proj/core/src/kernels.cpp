#include "proxpool/kernels.hpp"

#include "proxpool/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>

namespace proxpool {
namespace {

void require_hops(int s) {
  if (s < 1) throw ContractError("hop count s must be >= 1, got " + std::to_string(s));
}

void require_square(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) throw ContractError(std::string(what) + " must be square");
}

/// D~^{-1/2} B D~^{-1/2}, with B already degree-scaled.
Matrix cosine_normalize(const Matrix& b) {
  const Eigen::Index n = b.rows();
  Vector scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = b(i, i);
    if (!(d > 0.0)) {
      throw NumericError("structure kernel: non-positive self-similarity at node " +
                         std::to_string(i));
    }
    scale(i) = 1.0 / std::sqrt(d);
  }
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = scale(i) * b(i, j) * scale(j);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void require_cap(Eigen::Index n, std::size_t cap) {
  if (static_cast<std::size_t>(n) > cap) {
    throw ContractError("oracle path limited to " + std::to_string(cap) + " nodes, got " +
                        std::to_string(n));
  }
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::nt: return "nt";
    case Variant::ns: return "ns";
  }
  return "full";
}

Variant parse_variant(std::string_view text) {
  if (text == "full") return Variant::full;
  if (text == "nt") return Variant::nt;
  if (text == "ns") return Variant::ns;
  throw ContractError("unknown variant '" + std::string(text) + "' (expected full|nt|ns)");
}

StructureKernel structure_kernel(const Graph& g, int s) {
  require_hops(s);
  const Eigen::Index n = g.adjacency.rows();
  const Vector r = inverse_sqrt_degrees(degree_info(g).degrees);

  // M = I - L/2 = (I + D^{-1/2} A D^{-1/2}) / 2; every entry is non-negative, so
  // products never cancel and the sparsity pattern of M^s is the s-hop pattern.
  SparseMatrix m = r.asDiagonal() * g.adjacency * r.asDiagonal();
  SparseMatrix eye(n, n);
  eye.setIdentity();
  m = 0.5 * (eye + m);

  SparseMatrix p = m;
  for (int step = 1; step < s; ++step) p = SparseMatrix(p * m);

  const Matrix b = r.asDiagonal() * Matrix(p) * r.asDiagonal();
  return {cosine_normalize(b), s};
}

StructureKernel structure_kernel(const Matrix& adjacency, int s) {
  require_square(adjacency, "adjacency");
  Graph g;
  g.adjacency = adjacency.sparseView();
  return structure_kernel(g, s);
}

SpectralDecomposition spectral_decomposition(const Matrix& adjacency) {
  require_square(adjacency, "adjacency");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(normalized_laplacian(adjacency));
  if (solver.info() != Eigen::Success) {
    throw NumericError("eigensolver failed to converge on normalized Laplacian");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

StructureKernel structure_kernel_oracle(const Matrix& adjacency, int s, std::size_t oracle_cap) {
  require_hops(s);
  require_cap(adjacency.rows(), oracle_cap);
  const SpectralDecomposition spec = spectral_decomposition(adjacency);
  const Vector r = inverse_sqrt_degrees(adjacency.rowwise().sum());

  Vector g(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    g(k) = std::pow(1.0 - 0.5 * spec.eigenvalues(k), s);
  }
  const Matrix& u = spec.eigenvectors;
  const Matrix filtered = u * g.asDiagonal() * u.transpose();
  const Matrix b = r.asDiagonal() * filtered * r.asDiagonal();
  return {cosine_normalize(b), s};
}

StructureKernel structure_kernel_oracle(const Graph& g, int s, std::size_t oracle_cap) {
  return structure_kernel_oracle(g.dense_adjacency(), s, oracle_cap);
}

double proxy_filter(double lambda, int s) {
  double base = 1.0 - 0.5 * lambda;
  if (base < 1e-12) base = 0.0;
  return std::pow(base, 0.5 * s);
}

std::size_t filter_support_size(const SpectralDecomposition& spectrum, int s) {
  std::size_t t = 0;
  for (Eigen::Index k = 0; k < spectrum.eigenvalues.size(); ++k) {
    if (proxy_filter(spectrum.eigenvalues(k), s) > 1e-8) ++t;
  }
  return t;
}

std::size_t proxy_signal_rank(const Matrix& adjacency, int s, std::size_t oracle_cap) {
  require_hops(s);
  require_cap(adjacency.rows(), oracle_cap);
  const DegreeInfo deg = degree_info(adjacency);
  if (deg.num_isolated() > 0) {
    throw ContractError("proxy signal rank requires a graph without isolated vertices");
  }
  const SpectralDecomposition spec = spectral_decomposition(adjacency);
  Vector f(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < f.size(); ++k) f(k) = proxy_filter(spec.eigenvalues(k), s);

  const Matrix phi =
      inverse_sqrt_degrees(deg.degrees).asDiagonal() * spec.eigenvectors * f.asDiagonal();
  const Eigen::JacobiSVD<Matrix> svd(phi);
  const Vector& sigma = svd.singularValues();
  return static_cast<std::size_t>((sigma.array() > 1e-8).count());
}

std::size_t proxy_signal_rank(const Graph& g, int s, std::size_t oracle_cap) {
  return proxy_signal_rank(g.dense_adjacency(), s, oracle_cap);
}

Matrix rbf_gram(const Matrix& q, double tau) {
  const Eigen::Index n = q.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d2 = (q.row(i) - q.row(j)).squaredNorm();
      const double v = std::exp(-tau * d2);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

SignalKernel signal_kernel(const Matrix& features, const Matrix& projection, double tau) {
  if (features.cols() != projection.rows()) {
    throw ContractError("signal kernel: feature width " + std::to_string(features.cols()) +
                        " does not match projection rows " + std::to_string(projection.rows()));
  }
  if (!(tau > 0.0)) throw ContractError("signal kernel: tau must be positive");
  if (!features.allFinite() || !projection.allFinite()) {
    throw NumericError("signal kernel: non-finite features or projection");
  }
  return {rbf_gram(features * projection, tau), tau, projection};
}

Proximity proximity(const StructureKernel& kt, const SignalKernel& ks, Variant variant,
                    const Matrix& adjacency) {
  const Eigen::Index n = kt.matrix.rows();
  auto check = [n](const Matrix& m, const char* what) {
    if (m.rows() != n || m.cols() != n) {
      throw ContractError(std::string("proximity: ") + what + " shape mismatch");
    }
  };
  check(adjacency, "adjacency");
  switch (variant) {
    case Variant::full:
      check(ks.matrix, "signal kernel");
      return {kt.matrix.cwiseProduct(ks.matrix), variant};
    case Variant::nt:
      check(ks.matrix, "signal kernel");
      return {adjacency.cwiseProduct(ks.matrix), variant};
    case Variant::ns:
      return {kt.matrix, variant};
  }
  return {kt.matrix, variant};
}

const Matrix& eligibility_kernel(Variant variant, const StructureKernel& kt,
                                 const Matrix& adjacency) {
  return variant == Variant::nt ? adjacency : kt.matrix;
}

double min_eigenvalue(const Matrix& symmetric) {
  if (symmetric.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("eigensolver failed");
  return solver.eigenvalues()(0);
}

}  // namespace proxpool
