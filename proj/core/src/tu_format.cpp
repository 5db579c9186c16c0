#include "proxpool/tu_format.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <utility>

namespace proxpool {
namespace {

namespace fs = std::filesystem;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

long parse_long(std::string_view token, const std::string& file, std::size_t line) {
  token = trim(token);
  long value = 0;
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw FormatError(file, line, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

std::ifstream open_or_throw(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError(path.string(), "cannot open file");
  return in;
}

/// One integer per non-empty line.
std::vector<long> read_column(const fs::path& path) {
  auto in = open_or_throw(path);
  std::vector<long> values;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (trim(text).empty()) continue;
    values.push_back(parse_long(text, path.filename().string(), line));
  }
  return values;
}

}  // namespace

Dataset load_tu_dataset(const fs::path& directory, const std::string& name) {
  const fs::path edges_path = directory / (name + "_A.txt");
  const fs::path indicator_path = directory / (name + "_graph_indicator.txt");
  const fs::path graph_labels_path = directory / (name + "_graph_labels.txt");
  const fs::path node_labels_path = directory / (name + "_node_labels.txt");
  for (const auto& p : {edges_path, indicator_path, graph_labels_path, node_labels_path}) {
    if (!fs::exists(p)) throw IngestionError(p.string(), "missing dataset file");
  }

  const std::vector<long> indicator = read_column(indicator_path);
  const std::vector<long> graph_labels = read_column(graph_labels_path);
  const std::vector<long> node_labels = read_column(node_labels_path);
  const std::size_t total_nodes = indicator.size();

  if (node_labels.size() != total_nodes) {
    throw FormatError(node_labels_path.filename().string(), node_labels.size() + 1,
                      "node label count " + std::to_string(node_labels.size()) +
                          " does not match graph indicator count " +
                          std::to_string(total_nodes));
  }

  // Graph ids in ascending order define graph order; graph_labels is read in that order.
  std::map<long, std::size_t> graph_slot;
  for (long id : indicator) graph_slot.emplace(id, 0);
  {
    std::size_t next = 0;
    for (auto& [id, slot] : graph_slot) slot = next++;
  }
  const std::size_t num_graphs = graph_slot.size();
  if (graph_labels.size() != num_graphs) {
    throw FormatError(graph_labels_path.filename().string(), graph_labels.size() + 1,
                      "expected " + std::to_string(num_graphs) + " graph labels, found " +
                          std::to_string(graph_labels.size()));
  }

  // Global node id (0-based) -> (graph slot, local index).
  std::vector<std::size_t> owner(total_nodes);
  std::vector<std::size_t> local(total_nodes);
  std::vector<std::size_t> sizes(num_graphs, 0);
  std::vector<std::vector<long>> labels_per_graph(num_graphs);
  for (std::size_t v = 0; v < total_nodes; ++v) {
    const std::size_t g = graph_slot.at(indicator[v]);
    owner[v] = g;
    local[v] = sizes[g]++;
    labels_per_graph[g].push_back(node_labels[v]);
  }

  Dataset ds;
  ds.name = name;
  LoadSummary& summary = ds.load_summary;

  std::vector<std::set<std::pair<std::size_t, std::size_t>>> directed(num_graphs);
  {
    auto in = open_or_throw(edges_path);
    const std::string file = edges_path.filename().string();
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
      ++line;
      const auto body = trim(text);
      if (body.empty()) continue;
      const auto comma = body.find(',');
      if (comma == std::string_view::npos) {
        throw FormatError(file, line, "expected 'u, v'");
      }
      const long u = parse_long(body.substr(0, comma), file, line);
      const long w = parse_long(body.substr(comma + 1), file, line);
      for (long id : {u, w}) {
        if (id < 1 || static_cast<std::size_t>(id) > total_nodes) {
          throw FormatError(file, line,
                            "node id " + std::to_string(id) + " outside [1, " +
                                std::to_string(total_nodes) + "]");
        }
      }
      const auto a = static_cast<std::size_t>(u - 1);
      const auto b = static_cast<std::size_t>(w - 1);
      if (owner[a] != owner[b]) {
        throw FormatError(file, line,
                          "edge (" + std::to_string(u) + ", " + std::to_string(w) +
                              ") joins nodes from different graphs");
      }
      ++summary.edges_read;
      if (a == b) {
        ++summary.self_loops_dropped;
        continue;
      }
      if (!directed[owner[a]].emplace(local[a], local[b]).second) ++summary.duplicate_edges;
    }
  }

  std::vector<Matrix> features;
  ds.feature_dim = one_hot_encode(labels_per_graph, features);

  std::map<long, int> class_of;
  for (long y : graph_labels) class_of.emplace(y, 0);
  {
    int next = 0;
    for (auto& [value, cls] : class_of) cls = next++;
  }
  ds.num_classes = static_cast<int>(class_of.size());

  ds.graphs.resize(num_graphs);
  for (std::size_t g = 0; g < num_graphs; ++g) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& [i, j] : directed[g]) {
      if (!directed[g].contains({j, i})) {
        ++summary.asymmetric_repaired;
        triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), 1.0);
      }
      triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), 1.0);
    }
    const auto n = static_cast<Eigen::Index>(sizes[g]);
    Graph& graph = ds.graphs[g];
    graph.adjacency.resize(n, n);
    // Duplicates only arise from repaired pairs, which are added exactly once.
    graph.adjacency.setFromTriplets(triplets.begin(), triplets.end());
    graph.adjacency.makeCompressed();
    graph.features = std::move(features[g]);
    graph.label = class_of.at(graph_labels[g]);
  }
  return ds;
}

void write_tu_dataset(const Dataset& ds, const fs::path& directory, const std::string& name) {
  fs::create_directories(directory);
  auto open = [&](const std::string& suffix) {
    const fs::path p = directory / (name + suffix);
    std::ofstream out(p);
    if (!out) throw IngestionError(p.string(), "cannot write file");
    return out;
  };
  auto edges = open("_A.txt");
  auto indicator = open("_graph_indicator.txt");
  auto graph_labels = open("_graph_labels.txt");
  auto node_labels = open("_node_labels.txt");

  std::size_t offset = 0;
  for (std::size_t g = 0; g < ds.graphs.size(); ++g) {
    const Graph& graph = ds.graphs[g];
    for (Eigen::Index r = 0; r < graph.adjacency.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(graph.adjacency, r); it; ++it) {
        if (it.value() == 0.0) continue;
        edges << offset + static_cast<std::size_t>(it.row()) + 1 << ", "
              << offset + static_cast<std::size_t>(it.col()) + 1 << '\n';
      }
    }
    for (Eigen::Index i = 0; i < graph.features.rows(); ++i) {
      Eigen::Index col = 0;
      graph.features.row(i).maxCoeff(&col);
      indicator << g + 1 << '\n';
      node_labels << col << '\n';
    }
    graph_labels << graph.label.value_or(0) << '\n';
    offset += graph.num_nodes();
  }
}

}  // namespace proxpool
