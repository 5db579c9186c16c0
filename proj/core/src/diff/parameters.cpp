#include "proxpool/diff/parameters.hpp"

#include "proxpool/errors.hpp"

namespace proxpool::diff {

void ParameterSet::add(const std::string& name, Matrix value) {
  Parameter p;
  p.first_moment = Matrix::Zero(value.rows(), value.cols());
  p.second_moment = Matrix::Zero(value.rows(), value.cols());
  p.value = std::move(value);
  if (!entries_.emplace(name, std::move(p)).second) {
    throw ContractError("duplicate parameter '" + name + "'");
  }
}

bool ParameterSet::contains(const std::string& name) const { return entries_.contains(name); }

Parameter& ParameterSet::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const Parameter& ParameterSet::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw ContractError("unknown parameter '" + name + "'");
  return it->second;
}

const Matrix& ParameterSet::value(const std::string& name) const { return at(name).value; }
Matrix& ParameterSet::value(const std::string& name) { return at(name).value; }

std::vector<std::string> ParameterSet::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, p] : entries_) out.push_back(name);
  return out;
}

std::size_t ParameterSet::num_scalars() const {
  std::size_t total = 0;
  for (const auto& [name, p] : entries_) total += static_cast<std::size_t>(p.value.size());
  return total;
}

GradientMap zero_gradients(const ParameterSet& params) {
  GradientMap grads;
  for (const auto& [name, p] : params) {
    grads.emplace(name, Matrix::Zero(p.value.rows(), p.value.cols()));
  }
  return grads;
}

void accumulate(GradientMap& into, const GradientMap& from, double scale) {
  for (const auto& [name, g] : from) {
    auto it = into.find(name);
    if (it == into.end()) {
      into.emplace(name, scale * g);
    } else {
      if (it->second.rows() != g.rows() || it->second.cols() != g.cols()) {
        throw ContractError("gradient shape mismatch for '" + name + "'");
      }
      it->second += scale * g;
    }
  }
}

}  // namespace proxpool::diff
