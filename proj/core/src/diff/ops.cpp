#include "proxpool/diff/ops.hpp"

#include "proxpool/errors.hpp"
#include "proxpool/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace proxpool::diff {
namespace {

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void same_tape(Var a, Var b, const char* op) {
  if (&a.tape() != &b.tape()) throw ContractError(std::string(op) + ": operands on different tapes");
}

void same_shape(Var a, Var b, const char* op) {
  same_tape(a, b, op);
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ContractError(std::string(op) + ": shape mismatch " + shape(a.value()) + " vs " +
                        shape(b.value()));
  }
}

void column_vector(Var v, const char* op) {
  if (v.cols() != 1) throw ContractError(std::string(op) + ": expected n x 1, got " + shape(v.value()));
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape(a, b, "matmul");
  if (a.cols() != b.rows()) {
    throw ContractError("matmul: inner dimensions differ " + shape(a.value()) + " * " +
                        shape(b.value()));
  }
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(a.value() * b.value(), {ia, ib}, [&t, ia, ib](const Matrix& g, Adjoints& adj) {
    if (t.requires_grad(ia)) adj.add(ia, g * t.value(ib).transpose());
    if (t.requires_grad(ib)) adj.add(ib, t.value(ia).transpose() * g);
  });
}

Var add(Var a, Var b) {
  same_shape(a, b, "add");
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(a.value() + b.value(), {ia, ib}, [&t, ia, ib](const Matrix& g, Adjoints& adj) {
    if (t.requires_grad(ia)) adj.add(ia, g);
    if (t.requires_grad(ib)) adj.add(ib, g);
  });
}

Var sub(Var a, Var b) {
  same_shape(a, b, "sub");
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(a.value() - b.value(), {ia, ib}, [&t, ia, ib](const Matrix& g, Adjoints& adj) {
    if (t.requires_grad(ia)) adj.add(ia, g);
    if (t.requires_grad(ib)) adj.add(ib, -g);
  });
}

Var scale(Var a, double factor) {
  const std::size_t ia = a.id();
  return a.tape().push(factor * a.value(), {ia}, [ia, factor](const Matrix& g, Adjoints& adj) {
    adj.add(ia, factor * g);
  });
}

Var hadamard(Var a, Var b) {
  same_shape(a, b, "hadamard");
  Tape& t = a.tape();
  const std::size_t ia = a.id(), ib = b.id();
  return t.push(a.value().cwiseProduct(b.value()), {ia, ib},
                [&t, ia, ib](const Matrix& g, Adjoints& adj) {
                  if (t.requires_grad(ia)) adj.add(ia, g.cwiseProduct(t.value(ib)));
                  if (t.requires_grad(ib)) adj.add(ib, g.cwiseProduct(t.value(ia)));
                });
}

Var transpose(Var a) {
  const std::size_t ia = a.id();
  return a.tape().push(a.value().transpose(), {ia},
                       [ia](const Matrix& g, Adjoints& adj) { adj.add(ia, g.transpose()); });
}

Var add_identity(Var a) {
  if (a.rows() != a.cols()) throw ContractError("add_identity: matrix must be square");
  const std::size_t ia = a.id();
  Matrix v = a.value();
  v.diagonal().array() += 1.0;
  return a.tape().push(std::move(v), {ia},
                       [ia](const Matrix& g, Adjoints& adj) { adj.add(ia, g); });
}

Var relu(Var a) {
  Tape& t = a.tape();
  const Matrix& x = a.value();
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    // Exact zeros do not move under perturbation of upstream parameters.
    if (x.data()[k] != 0.0) t.note_kink(x.data()[k]);
    t.note_decision(x.data()[k] > 0.0);
  }
  const std::size_t ia = a.id();
  return t.push(x.cwiseMax(0.0), {ia}, [&t, ia](const Matrix& g, Adjoints& adj) {
    adj.add(ia, g.cwiseProduct((t.value(ia).array() > 0.0).cast<double>().matrix()));
  });
}

Var row_l2_normalize(Var a) {
  Tape& t = a.tape();
  const Matrix& x = a.value();
  Vector norms = x.rowwise().norm();
  Matrix y = Matrix::Zero(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (norms(i) > 0.0) y.row(i) = x.row(i) / norms(i);
  }
  const std::size_t ia = a.id();
  const std::size_t slot = t.size();
  return t.push(std::move(y), {ia},
                [&t, ia, slot, norms = std::move(norms)](const Matrix& g, Adjoints& adj) {
                  const Matrix& out = t.value(slot);
                  Matrix dx = Matrix::Zero(g.rows(), g.cols());
                  for (Eigen::Index i = 0; i < g.rows(); ++i) {
                    if (norms(i) == 0.0) continue;
                    const double proj = out.row(i).dot(g.row(i));
                    dx.row(i) = (g.row(i) - proj * out.row(i)) / norms(i);
                  }
                  adj.add(ia, dx);
                });
}

Var pairwise_sq_dist_exp(Var q, double tau) {
  if (!(tau > 0.0)) throw ContractError("pairwise_sq_dist_exp: tau must be positive");
  Tape& t = q.tape();
  const std::size_t iq = q.id();
  const std::size_t slot = t.size();
  return t.push(rbf_gram(q.value(), tau), {iq}, [&t, iq, slot, tau](const Matrix& g, Adjoints& adj) {
    const Matrix& k = t.value(slot);
    const Matrix& qv = t.value(iq);
    const Matrix w = (g + g.transpose()).cwiseProduct(k);
    const Vector mass = w.rowwise().sum();
    adj.add(iq, -2.0 * tau * (mass.asDiagonal() * qv - w * qv));
  });
}

Var sparsemax_rows(Var z, const BoolMatrix& eligible) {
  const Matrix& zv = z.value();
  if (eligible.rows() != zv.rows() || eligible.cols() != zv.cols()) {
    throw ContractError("sparsemax_rows: mask shape mismatch");
  }
  Tape& t = z.tape();
  Matrix p(zv.rows(), zv.cols());
  for (Eigen::Index i = 0; i < zv.rows(); ++i) {
    Vector row(zv.cols());
    for (Eigen::Index j = 0; j < zv.cols(); ++j) row(j) = eligible(i, j) ? zv(i, j) : kMasked;
    const SparsemaxResult r = sparsemax_detail(row);
    p.row(i) = r.p.transpose();
    for (Eigen::Index j = 0; j < zv.cols(); ++j) {
      if (eligible(i, j) && r.support > 0) t.note_kink(zv(i, j) - r.threshold);
      t.note_decision(r.p(j) > 0.0);
    }
  }
  const std::size_t iz = z.id();
  const std::size_t slot = t.size();
  return t.push(std::move(p), {iz}, [&t, iz, slot](const Matrix& g, Adjoints& adj) {
    const Matrix& out = t.value(slot);
    Matrix dz = Matrix::Zero(g.rows(), g.cols());
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      double total = 0.0;
      Eigen::Index count = 0;
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if (out(i, j) > 0.0) {
          total += g(i, j);
          ++count;
        }
      }
      if (count == 0) continue;
      const double mean = total / static_cast<double>(count);
      for (Eigen::Index j = 0; j < g.cols(); ++j) {
        if (out(i, j) > 0.0) dz(i, j) = g(i, j) - mean;
      }
    }
    adj.add(iz, dz);
  });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  Tape& t = parts.front().tape();
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  std::vector<std::size_t> ids;
  std::vector<Eigen::Index> widths;
  for (const Var& p : parts) {
    same_tape(parts.front(), p, "concat_cols");
    if (p.rows() != rows) throw ContractError("concat_cols: row counts differ");
    cols += p.cols();
    ids.push_back(p.id());
    widths.push_back(p.cols());
  }
  Matrix out(rows, cols);
  Eigen::Index offset = 0;
  for (const Var& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return t.push(std::move(out), ids, [&t, ids, widths](const Matrix& g, Adjoints& adj) {
    Eigen::Index off = 0;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (t.requires_grad(ids[k])) adj.add(ids[k], g.middleCols(off, widths[k]));
      off += widths[k];
    }
  });
}

Var colwise_sum(Var a) {
  const std::size_t ia = a.id();
  const Eigen::Index n = a.rows();
  return a.tape().push(a.value().colwise().sum(), {ia}, [ia, n](const Matrix& g, Adjoints& adj) {
    adj.add(ia, Matrix::Ones(n, 1) * g);
  });
}

Var colwise_max(Var a) {
  const Matrix& x = a.value();
  if (x.rows() == 0) throw ContractError("colwise_max: empty matrix");
  Tape& t = a.tape();
  Matrix out(1, x.cols());
  std::vector<Eigen::Index> argmax(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < x.rows(); ++i) {
      if (x(i, j) > x(best, j)) best = i;
    }
    argmax[static_cast<std::size_t>(j)] = best;
    t.note_decision(static_cast<std::uint64_t>(best));
    out(0, j) = x(best, j);
    if (x.rows() > 1 && x(best, j) > 0.0) {
      double second = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (i != best) second = std::max(second, x(i, j));
      }
      t.note_kink(x(best, j) - second);
    }
  }
  const std::size_t ia = a.id();
  const Eigen::Index rows = x.rows();
  return t.push(std::move(out), {ia},
                [ia, rows, argmax = std::move(argmax)](const Matrix& g, Adjoints& adj) {
                  Matrix dx = Matrix::Zero(rows, g.cols());
                  for (Eigen::Index j = 0; j < g.cols(); ++j) {
                    dx(argmax[static_cast<std::size_t>(j)], j) = g(0, j);
                  }
                  adj.add(ia, dx);
                });
}

Var softmax_cross_entropy(Var logits, int label) {
  const Matrix& z = logits.value();
  if (z.rows() != 1) throw ContractError("softmax_cross_entropy: logits must be 1 x c");
  if (label < 0 || label >= z.cols()) {
    throw ContractError("softmax_cross_entropy: label " + std::to_string(label) +
                        " out of range for " + std::to_string(z.cols()) + " classes");
  }
  const double top = z.maxCoeff();
  const Matrix shifted = (z.array() - top).exp().matrix();
  const double total = shifted.sum();
  const double loss = std::log(total) + top - z(0, label);
  Matrix probs = shifted / total;
  const std::size_t il = logits.id();
  return logits.tape().push(Matrix::Constant(1, 1, loss), {il},
                            [il, label, probs = std::move(probs)](const Matrix& g, Adjoints& adj) {
                              Matrix d = probs;
                              d(0, label) -= 1.0;
                              adj.add(il, g(0, 0) * d);
                            });
}

Var sum_all(Var a) {
  const std::size_t ia = a.id();
  const Eigen::Index r = a.rows(), c = a.cols();
  return a.tape().push(Matrix::Constant(1, 1, a.value().sum()), {ia},
                       [ia, r, c](const Matrix& g, Adjoints& adj) {
                         adj.add(ia, Matrix::Constant(r, c, g(0, 0)));
                       });
}

Var symmetrize(Var a) {
  if (a.rows() != a.cols()) throw ContractError("symmetrize: matrix must be square");
  const std::size_t ia = a.id();
  const Matrix& v = a.value();
  return a.tape().push(0.5 * (v + v.transpose()), {ia}, [ia](const Matrix& g, Adjoints& adj) {
    adj.add(ia, 0.5 * (g + g.transpose()));
  });
}

Var row_sum(Var a) {
  const std::size_t ia = a.id();
  const Eigen::Index c = a.cols();
  return a.tape().push(a.value().rowwise().sum(), {ia}, [ia, c](const Matrix& g, Adjoints& adj) {
    adj.add(ia, g * Matrix::Ones(1, c));
  });
}

Var diagonal(Var a) {
  if (a.rows() != a.cols()) throw ContractError("diagonal: matrix must be square");
  const std::size_t ia = a.id();
  return a.tape().push(a.value().diagonal(), {ia}, [ia](const Matrix& g, Adjoints& adj) {
    adj.add(ia, Matrix(g.col(0).asDiagonal()));
  });
}

Var inv_sqrt_degree(Var d) {
  column_vector(d, "inv_sqrt_degree");
  const Matrix& dv = d.value();
  Matrix out(dv.rows(), 1);
  Matrix slope(dv.rows(), 1);
  for (Eigen::Index i = 0; i < dv.rows(); ++i) {
    const double x = dv(i, 0);
    if (x < 0.0) throw ContractError("inv_sqrt_degree: negative degree");
    if (x > 0.0) {
      out(i, 0) = 1.0 / std::sqrt(x);
      slope(i, 0) = -0.5 * out(i, 0) / x;
    } else {
      out(i, 0) = 1.0;
      slope(i, 0) = 0.0;
    }
  }
  const std::size_t id = d.id();
  return d.tape().push(std::move(out), {id},
                       [id, slope = std::move(slope)](const Matrix& g, Adjoints& adj) {
                         adj.add(id, g.cwiseProduct(slope));
                       });
}

Var diag_scale(Var m, Var v) {
  same_tape(m, v, "diag_scale");
  column_vector(v, "diag_scale");
  if (m.rows() != m.cols() || m.rows() != v.rows()) {
    throw ContractError("diag_scale: shape mismatch " + shape(m.value()) + " vs " +
                        shape(v.value()));
  }
  Tape& t = m.tape();
  const Vector s = v.value().col(0);
  const std::size_t im = m.id(), iv = v.id();
  return t.push(s.asDiagonal() * m.value() * s.asDiagonal(), {im, iv},
                [&t, im, iv](const Matrix& g, Adjoints& adj) {
                  const Vector s = t.value(iv).col(0);
                  if (t.requires_grad(im)) adj.add(im, s.asDiagonal() * g * s.asDiagonal());
                  if (t.requires_grad(iv)) {
                    const Matrix gm = g.cwiseProduct(t.value(im));
                    adj.add(iv, gm * s + gm.transpose() * s);
                  }
                });
}

Var gather_rows(Var a, const std::vector<std::size_t>& rows) {
  const Matrix& x = a.value();
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] >= static_cast<std::size_t>(x.rows())) {
      throw ContractError("gather_rows: index out of range");
    }
    out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
  }
  const std::size_t ia = a.id();
  const Eigen::Index n = x.rows();
  return a.tape().push(std::move(out), {ia}, [ia, n, rows](const Matrix& g, Adjoints& adj) {
    Matrix dx = Matrix::Zero(n, g.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      dx.row(static_cast<Eigen::Index>(rows[k])) += g.row(static_cast<Eigen::Index>(k));
    }
    adj.add(ia, dx);
  });
}

}  // namespace proxpool::diff
