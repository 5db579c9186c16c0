#pragma once

#include "proxpool/diff/parameters.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace proxpool::diff {

class Tape;

/// Handle to a value recorded on a Tape.  Cheap to copy; only valid while the
/// owning tape is alive.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  bool requires_grad() const;

  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Adjoint buffers for one backward sweep.  Buffers are allocated lazily so
/// untouched branches cost nothing.
class Adjoints {
 public:
  explicit Adjoints(std::size_t n) : grads_(n) {}

  void add(std::size_t id, const Matrix& g);
  template <typename Expr>
  void add(std::size_t id, const Eigen::MatrixBase<Expr>& g) {
    add(id, Matrix(g));
  }
  const Matrix& get(std::size_t id) const { return grads_[id]; }

 private:
  std::vector<Matrix> grads_;
};

/// Dynamically recorded computation over dense matrices.
///
/// Nodes are appended in evaluation order, so iterating ids downwards is a
/// reverse topological sweep that visits each node once.
class Tape {
 public:
  using BackwardFn = std::function<void(const Matrix& grad_out, Adjoints& adj)>;

  /// When `record` is false every leaf is a constant and no backward closures
  /// are kept; useful for evaluation.
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  Var parameter(const std::string& name, const Matrix& value);
  Var parameter(const ParameterSet& params, const std::string& name);

  /// Registers a derived node.  `backward` is dropped when no parent needs a
  /// gradient.
  Var push(Matrix value, std::vector<std::size_t> parents, BackwardFn backward);

  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  bool recording() const { return record_; }
  std::size_t size() const { return nodes_.size(); }

  /// Accumulates d(loss)/d(parameter) into `grads` for every parameter leaf
  /// reachable from `loss`.  Throws ContractError for a non-scalar loss.
  void backward(Var loss, GradientMap& grads) const;

  /// Smallest distance of any recorded activation to a non-differentiable
  /// point (relu at 0, sparsemax support boundary, column-max ties).
  double kink_margin() const { return kink_margin_; }
  void note_kink(double distance);

  /// Running hash of every discrete choice made while recording (relu signs,
  /// sparsemax supports, column-max winners, pooling seeds).  Two evaluations
  /// with equal signatures lie on the same smooth piece.
  std::uint64_t decision_signature() const { return signature_; }
  void note_decision(std::uint64_t choice);

 private:
  struct Node {
    Matrix value;
    std::vector<std::size_t> parents;
    BackwardFn backward;
    bool requires_grad = false;
    std::string parameter;
  };

  Var add_node(Node node);

  std::vector<Node> nodes_;
  bool record_;
  double kink_margin_ = std::numeric_limits<double>::infinity();
  std::uint64_t signature_ = 0x243f6a8885a308d3ULL;
};

/// Zero-initialised gradient map for every parameter, then accumulated from
/// `loss`.  Parameters the loss does not reach keep an exact zero gradient.
GradientMap backward(Var loss, const ParameterSet& params);

}  // namespace proxpool::diff
