#include "proxpool/graph.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace proxpool {

Graph Graph::from_dense(const Matrix& adjacency, Matrix features, std::optional<int> label) {
  if (adjacency.rows() != adjacency.cols()) {
    throw ContractError("adjacency must be square");
  }
  Graph g;
  g.adjacency = adjacency.sparseView();
  g.adjacency.makeCompressed();
  g.features = std::move(features);
  g.label = label;
  return g;
}

std::size_t DegreeInfo::num_isolated() const {
  return static_cast<std::size_t>(std::count(isolated_mask.begin(), isolated_mask.end(), true));
}

namespace {

DegreeInfo make_degree_info(Vector degrees) {
  DegreeInfo info;
  info.isolated_mask.resize(static_cast<std::size_t>(degrees.size()));
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    info.isolated_mask[static_cast<std::size_t>(i)] = degrees(i) == 0.0;
  }
  info.degrees = std::move(degrees);
  return info;
}

}  // namespace

DegreeInfo degree_info(const Graph& g) {
  Vector d = Vector::Zero(g.adjacency.rows());
  for (Eigen::Index r = 0; r < g.adjacency.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(g.adjacency, r); it; ++it) d(r) += it.value();
  }
  return make_degree_info(std::move(d));
}

DegreeInfo degree_info(const Matrix& adjacency) {
  return make_degree_info(adjacency.rowwise().sum());
}

Vector inverse_sqrt_degrees(const Vector& degrees) {
  Vector out(degrees.size());
  for (Eigen::Index i = 0; i < degrees.size(); ++i) {
    out(i) = degrees(i) > 0.0 ? 1.0 / std::sqrt(degrees(i)) : 1.0;
  }
  return out;
}

Matrix normalized_laplacian(const Matrix& adjacency) {
  const Vector r = inverse_sqrt_degrees(adjacency.rowwise().sum());
  const Eigen::Index n = adjacency.rows();
  Matrix lap = -(r.asDiagonal() * adjacency * r.asDiagonal());
  lap.diagonal().array() += 1.0;
  // Keep L exactly symmetric regardless of evaluation order.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) lap(j, i) = lap(i, j);
  }
  return lap;
}

Matrix normalized_laplacian(const Graph& g) { return normalized_laplacian(g.dense_adjacency()); }

const char* to_string(IssueKind kind) {
  switch (kind) {
    case IssueKind::asymmetric: return "asymmetric";
    case IssueKind::negative_weight: return "negative_weight";
    case IssueKind::nonzero_diagonal: return "nonzero_diagonal";
    case IssueKind::feature_shape: return "feature_shape";
    case IssueKind::non_finite: return "non_finite";
    case IssueKind::isolated_vertex: return "isolated_vertex";
  }
  return "unknown";
}

bool ValidationReport::ok() const { return errors() == 0; }

std::size_t ValidationReport::errors() const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [](const auto& i) { return !i.warning; }));
}

std::size_t ValidationReport::warnings() const { return issues.size() - errors(); }

ValidationReport validate_graph(const Graph& g, ValidationOptions options) {
  ValidationReport report;
  auto add = [&](IssueKind kind, std::size_t r, std::size_t c, bool warning, std::string msg) {
    report.issues.push_back({kind, r, c, warning, std::move(msg)});
  };

  const auto& a = g.adjacency;
  if (a.rows() != a.cols()) {
    add(IssueKind::feature_shape, 0, 0, false, "adjacency is not square");
    return report;
  }
  if (static_cast<std::size_t>(g.features.rows()) != g.num_nodes()) {
    std::ostringstream os;
    os << "features have " << g.features.rows() << " rows for " << g.num_nodes() << " nodes";
    add(IssueKind::feature_shape, 0, 0, false, os.str());
  }
  if (!g.features.allFinite()) add(IssueKind::non_finite, 0, 0, false, "non-finite feature");

  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(a, r); it; ++it) {
      const auto i = static_cast<std::size_t>(it.row());
      const auto j = static_cast<std::size_t>(it.col());
      const double v = it.value();
      if (!std::isfinite(v)) {
        add(IssueKind::non_finite, i, j, false, "non-finite edge weight");
        continue;
      }
      if (v < 0.0) add(IssueKind::negative_weight, i, j, false, "negative edge weight");
      if (i == j && v != 0.0 && !options.allow_diagonal) {
        add(IssueKind::nonzero_diagonal, i, j, false, "self-loop on input graph");
      }
    }
  }
  // A - A^T is antisymmetric, so scanning its upper triangle finds every bad pair once.
  const SparseMatrix skew = SparseMatrix(a - SparseMatrix(a.transpose()));
  for (Eigen::Index r = 0; r < skew.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(skew, r); it; ++it) {
      if (it.row() < it.col() && it.value() != 0.0) {
        add(IssueKind::asymmetric, static_cast<std::size_t>(it.row()),
            static_cast<std::size_t>(it.col()), false, "A[i][j] != A[j][i]");
      }
    }
  }

  const DegreeInfo deg = degree_info(g);
  for (std::size_t i = 0; i < deg.isolated_mask.size(); ++i) {
    if (deg.isolated_mask[i]) add(IssueKind::isolated_vertex, i, i, true, "isolated vertex");
  }
  return report;
}

void require_valid(const Graph& g, ValidationOptions options) {
  const ValidationReport report = validate_graph(g, options);
  for (const auto& issue : report.issues) {
    if (!issue.warning) {
      std::ostringstream os;
      os << "invalid graph: " << to_string(issue.kind) << " at (" << issue.row << ", "
         << issue.col << "): " << issue.message;
      throw ContractError(os.str());
    }
  }
}

std::vector<std::string> LoadSummary::warnings() const {
  std::vector<std::string> out;
  if (asymmetric_repaired > 0) {
    out.push_back(std::to_string(asymmetric_repaired) +
                  " edge(s) listed in one direction only; symmetrized");
  }
  if (duplicate_edges > 0) {
    out.push_back(std::to_string(duplicate_edges) + " duplicate edge line(s) ignored");
  }
  if (self_loops_dropped > 0) {
    out.push_back(std::to_string(self_loops_dropped) + " self-loop(s) dropped");
  }
  return out;
}

double Dataset::mean_num_nodes() const {
  if (graphs.empty()) return 0.0;
  double total = 0.0;
  for (const auto& g : graphs) total += static_cast<double>(g.num_nodes());
  return total / static_cast<double>(graphs.size());
}

SplitSpec split_dataset(std::size_t num_graphs, std::uint64_t seed) {
  if (num_graphs < 3) {
    throw SplitError("need at least 3 graphs to split, got " + std::to_string(num_graphs));
  }
  std::vector<std::size_t> perm(num_graphs);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const std::size_t holdout = std::max<std::size_t>(1, num_graphs / 10);
  SplitSpec split;
  split.seed = seed;
  const auto train_end = perm.begin() + static_cast<std::ptrdiff_t>(num_graphs - 2 * holdout);
  const auto val_end = train_end + static_cast<std::ptrdiff_t>(holdout);
  split.train_idx.assign(perm.begin(), train_end);
  split.val_idx.assign(train_end, val_end);
  split.test_idx.assign(val_end, perm.end());
  return split;
}

SplitSpec split_dataset(const Dataset& d, std::uint64_t seed) {
  return split_dataset(d.graphs.size(), seed);
}

std::size_t one_hot_encode(const std::vector<std::vector<long>>& labels_per_graph,
                           std::vector<Matrix>& out) {
  std::map<long, Eigen::Index> column;
  for (const auto& labels : labels_per_graph) {
    for (long v : labels) column.emplace(v, 0);
  }
  Eigen::Index next = 0;
  for (auto& [value, col] : column) col = next++;

  const auto width = std::max<Eigen::Index>(1, next);
  out.clear();
  out.reserve(labels_per_graph.size());
  for (const auto& labels : labels_per_graph) {
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), width);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      x(static_cast<Eigen::Index>(i), column.at(labels[i])) = 1.0;
    }
    out.push_back(std::move(x));
  }
  return static_cast<std::size_t>(width);
}

}  // namespace proxpool
