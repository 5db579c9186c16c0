#include "proxpool/diff/adam.hpp"

#include "proxpool/errors.hpp"

#include <cmath>

namespace proxpool::diff {

void adam_step(ParameterSet& params, const GradientMap& grads, const AdamOptions& options) {
  for (const auto& [name, p] : params) {
    auto it = grads.find(name);
    if (it == grads.end()) throw ContractError("adam_step: missing gradient for '" + name + "'");
    const Matrix& g = it->second;
    if (g.rows() != p.value.rows() || g.cols() != p.value.cols()) {
      throw ContractError("adam_step: gradient shape mismatch for '" + name + "'");
    }
    if (!g.allFinite()) {
      throw NumericError("adam_step: non-finite gradient for '" + name + "'; step aborted");
    }
  }

  ++params.step;
  const double t = static_cast<double>(params.step);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);

  for (auto& [name, p] : params) {
    Matrix g = grads.at(name);
    if (options.weight_decay != 0.0) g += options.weight_decay * p.value;
    p.first_moment = options.beta1 * p.first_moment + (1.0 - options.beta1) * g;
    p.second_moment =
        options.beta2 * p.second_moment + (1.0 - options.beta2) * g.cwiseProduct(g);
    const auto m_hat = p.first_moment.array() / correction1;
    const auto v_hat = p.second_moment.array() / correction2;
    p.value.array() -= options.lr * m_hat / (v_hat.sqrt() + options.eps);
  }
}

}  // namespace proxpool::diff
