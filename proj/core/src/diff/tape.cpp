#include "proxpool/diff/tape.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <cmath>

namespace proxpool::diff {

const Matrix& Var::value() const { return tape_->value(id_); }
bool Var::requires_grad() const { return tape_->requires_grad(id_); }

void Adjoints::add(std::size_t id, const Matrix& g) {
  Matrix& slot = grads_[id];
  if (slot.size() == 0) {
    slot = g;
  } else {
    slot += g;
  }
}

Var Tape::add_node(Node node) {
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  return add_node(std::move(n));
}

Var Tape::parameter(const std::string& name, const Matrix& value) {
  Node n;
  n.value = value;
  if (record_) {
    n.requires_grad = true;
    n.parameter = name;
  }
  return add_node(std::move(n));
}

Var Tape::parameter(const ParameterSet& params, const std::string& name) {
  return parameter(name, params.value(name));
}

Var Tape::push(Matrix value, std::vector<std::size_t> parents, BackwardFn backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = record_ && std::any_of(parents.begin(), parents.end(), [&](std::size_t p) {
                      return nodes_[p].requires_grad;
                    });
  if (n.requires_grad) {
    n.parents = std::move(parents);
    n.backward = std::move(backward);
  }
  return add_node(std::move(n));
}

void Tape::note_decision(std::uint64_t choice) {
  // splitmix64 finaliser over (state ^ choice).
  std::uint64_t z = signature_ ^ (choice + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  signature_ = z ^ (z >> 31);
}

void Tape::note_kink(double distance) {
  kink_margin_ = std::min(kink_margin_, std::abs(distance));
}

void Tape::backward(Var loss, GradientMap& grads) const {
  const Matrix& out = value(loss.id());
  if (out.rows() != 1 || out.cols() != 1) {
    throw ContractError("backward: loss must be a 1x1 scalar, got " +
                        std::to_string(out.rows()) + "x" + std::to_string(out.cols()));
  }
  if (!std::isfinite(out(0, 0))) throw NumericError("backward: loss is not finite");
  if (!nodes_[loss.id()].requires_grad) return;

  Adjoints adj(loss.id() + 1);
  adj.add(loss.id(), Matrix::Ones(1, 1));
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.requires_grad || adj.get(id).size() == 0) continue;
    if (!node.parameter.empty()) {
      auto it = grads.find(node.parameter);
      if (it == grads.end()) {
        grads.emplace(node.parameter, adj.get(id));
      } else {
        it->second += adj.get(id);
      }
      continue;
    }
    node.backward(adj.get(id), adj);
  }
}

GradientMap backward(Var loss, const ParameterSet& params) {
  GradientMap grads = zero_gradients(params);
  loss.tape().backward(loss, grads);
  return grads;
}

}  // namespace proxpool::diff
