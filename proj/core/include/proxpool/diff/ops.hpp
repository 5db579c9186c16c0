#pragma once

#include "proxpool/diff/tape.hpp"

#include <vector>

namespace proxpool::diff {

using BoolMatrix = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double factor);
Var hadamard(Var a, Var b);
Var transpose(Var a);
Var add_identity(Var a);

/// relu'(0) = 0.
Var relu(Var a);

/// Each row divided by its l2 norm; zero rows stay zero and pass zero gradient.
Var row_l2_normalize(Var a);

/// K[i][j] = exp(-tau ||q_i - q_j||^2) over the rows of q.
Var pairwise_sq_dist_exp(Var q, double tau);

/// Row-wise sparsemax.  Entries where `eligible` is false act as -inf.  The
/// backward pass uses the projection Jacobian on each row's support.
Var sparsemax_rows(Var z, const BoolMatrix& eligible);

Var concat_cols(const std::vector<Var>& parts);

/// 1 x c column sums.
Var colwise_sum(Var a);

/// 1 x c column maxima; the gradient goes to the first maximising row.
Var colwise_max(Var a);

/// logsumexp(z) - z[label] for a 1 x c logit row, as a 1 x 1 node.
Var softmax_cross_entropy(Var logits, int label);

/// 1 x 1 sum of all entries.
Var sum_all(Var a);

/// (a + a^T) / 2.
Var symmetrize(Var a);

/// n x 1 row sums.
Var row_sum(Var a);

/// n x 1 diagonal.
Var diagonal(Var a);

/// Elementwise d^{-1/2} on an n x 1 vector, with zero entries mapped to the
/// constant 1 (isolated-vertex convention).
Var inv_sqrt_degree(Var d);

/// diag(v) m diag(v) for an n x 1 vector v.
Var diag_scale(Var m, Var v);

Var gather_rows(Var a, const std::vector<std::size_t>& rows);

}  // namespace proxpool::diff
