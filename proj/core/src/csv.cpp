#include "proxpool/csv.hpp"

#include "proxpool/errors.hpp"
#include "json_io.hpp"

#include <cstdio>
#include <fstream>

namespace proxpool {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw IngestionError(path.string(), "cannot write CSV");
  write_csv(out, m);
}

void write_edge_list(std::ostream& out, const Matrix& adjacency) {
  out << "source,target,weight\n";
  for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
    for (Eigen::Index j = i; j < adjacency.cols(); ++j) {
      if (adjacency(i, j) != 0.0) {
        out << i << ',' << j << ',' << format_double(adjacency(i, j)) << '\n';
      }
    }
  }
}

namespace detail {

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json data = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw FormatError("matrix", 0, "data length does not match rows x cols");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data[k++].get<double>();
  }
  return m;
}

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return {{"feature_dim", c.feature_dim}, {"num_classes", c.num_classes},
          {"hidden_dim", c.hidden_dim},   {"proj_dim", c.proj_dim},
          {"pooling_ratio", c.pooling_ratio}, {"hop_s", c.hop_s},
          {"tau", c.tau},                 {"variant", std::string(to_string(c.variant))}};
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.feature_dim = j.at("feature_dim").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
  c.proj_dim = j.at("proj_dim").get<std::size_t>();
  c.pooling_ratio = j.at("pooling_ratio").get<double>();
  c.hop_s = j.at("hop_s").get<int>();
  c.tau = j.at("tau").get<double>();
  c.variant = parse_variant(j.at("variant").get<std::string>());
  return c;
}

}  // namespace detail
}  // namespace proxpool
