#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace proxpool {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Undirected weighted graph with node signals.
///
/// The adjacency is stored sparse so large benchmark graphs stay cheap to keep
/// resident; the pooling pipeline densifies per graph as needed.  Graphs are
/// treated as immutable once loaded.
struct Graph {
  SparseMatrix adjacency;
  Matrix features;
  std::optional<int> label;

  std::size_t num_nodes() const { return static_cast<std::size_t>(adjacency.rows()); }
  std::size_t feature_dim() const { return static_cast<std::size_t>(features.cols()); }
  Matrix dense_adjacency() const { return Matrix(adjacency); }

  static Graph from_dense(const Matrix& adjacency, Matrix features,
                          std::optional<int> label = std::nullopt);
};

struct DegreeInfo {
  Vector degrees;
  std::vector<bool> isolated_mask;

  std::size_t num_isolated() const;
};

DegreeInfo degree_info(const Graph& g);
DegreeInfo degree_info(const Matrix& adjacency);

/// d_i^{-1/2}, with isolated vertices treated as d_i = 1.
Vector inverse_sqrt_degrees(const Vector& degrees);

/// L = I - D^{-1/2} A D^{-1/2}.  Isolated vertices get an identity row.
Matrix normalized_laplacian(const Graph& g);
Matrix normalized_laplacian(const Matrix& adjacency);

enum class IssueKind {
  asymmetric,
  negative_weight,
  nonzero_diagonal,
  feature_shape,
  non_finite,
  isolated_vertex,
};

const char* to_string(IssueKind kind);

struct ValidationIssue {
  IssueKind kind;
  std::size_t row = 0;
  std::size_t col = 0;
  bool warning = false;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const;  // true when every issue is a warning
  bool empty() const { return issues.empty(); }
  std::size_t errors() const;
  std::size_t warnings() const;
};

struct ValidationOptions {
  // Coarsened graphs legitimately carry self-loops from intra-cluster edges.
  bool allow_diagonal = false;
};

ValidationReport validate_graph(const Graph& g, ValidationOptions options = {});

/// Throws ContractError summarising the first error-level issue, if any.
void require_valid(const Graph& g, ValidationOptions options = {});

struct LoadSummary {
  std::size_t edges_read = 0;
  std::size_t asymmetric_repaired = 0;
  std::size_t duplicate_edges = 0;
  std::size_t self_loops_dropped = 0;

  std::vector<std::string> warnings() const;
};

struct Dataset {
  std::string name;
  std::vector<Graph> graphs;
  int num_classes = 0;
  std::size_t feature_dim = 0;
  LoadSummary load_summary;

  std::size_t size() const { return graphs.size(); }
  double mean_num_nodes() const;
};

struct SplitSpec {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> val_idx;
  std::vector<std::size_t> test_idx;
  std::uint64_t seed = 0;
};

/// Seeded 8:1:1 split; val and test sizes are max(1, floor(n/10)), train takes
/// the rest.  Fewer than 3 graphs is a SplitError.
SplitSpec split_dataset(const Dataset& d, std::uint64_t seed);
SplitSpec split_dataset(std::size_t num_graphs, std::uint64_t seed);

/// Maps arbitrary integer categories to contiguous one-hot columns, ordered by
/// value over the whole collection.  Returns the column count.
std::size_t one_hot_encode(const std::vector<std::vector<long>>& labels_per_graph,
                           std::vector<Matrix>& out);

}  // namespace proxpool
