#pragma once

// Independent reference implementations used only by tests.

#include "proxpool/graph.hpp"

#include <vector>

namespace proxpool::testing {

/// Hop distances by breadth-first search; -1 for unreachable pairs.
std::vector<std::vector<int>> bfs_distances(const Matrix& adjacency);

/// Euclidean projection of z onto the simplex by exhaustive search over
/// support sets.  Only for small inputs (|z| <= 12).
Vector simplex_projection_bruteforce(const Vector& z);

/// K_t computed through a dense eigendecomposition with the isolated-vertex
/// convention, written independently of the library.
Matrix structure_kernel_reference(const Matrix& adjacency, int s);

/// Permutation matrix P with (P x)[i] = x[perm[i]].
Matrix permutation_matrix(const std::vector<int>& perm);

}  // namespace proxpool::testing
