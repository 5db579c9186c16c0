#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace proxpool::diff {

using Matrix = Eigen::MatrixXd;

struct Parameter {
  Matrix value;
  Matrix first_moment;
  Matrix second_moment;
};

/// Named trainable matrices plus Adam state.  Ordered by name so that every
/// traversal (serialisation, reduction, gradient checks) is deterministic.
class ParameterSet {
 public:
  void add(const std::string& name, Matrix value);
  bool contains(const std::string& name) const;
  const Matrix& value(const std::string& name) const;
  Matrix& value(const std::string& name);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;

  std::vector<std::string> names() const;
  std::size_t num_scalars() const;

  std::int64_t step = 0;

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, Parameter> entries_;
};

using GradientMap = std::map<std::string, Matrix>;

GradientMap zero_gradients(const ParameterSet& params);

/// into[k] += from[k]; missing keys in `into` are created.
void accumulate(GradientMap& into, const GradientMap& from, double scale = 1.0);

}  // namespace proxpool::diff
