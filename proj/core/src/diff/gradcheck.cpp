#include "proxpool/diff/gradcheck.hpp"

#include "proxpool/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace proxpool::diff {

GradCheckReport gradient_check(const Objective& f, const ParameterSet& params,
                               const GradCheckOptions& options) {
  if (!(options.epsilon >= 1e-7 && options.epsilon <= 1e-3)) {
    throw ContractError("gradient_check: epsilon must lie in [1e-7, 1e-3]");
  }
  if (!(options.absolute_floor > 0.0)) {
    throw ContractError("gradient_check: absolute_floor must be positive");
  }
  GradientMap analytic = zero_gradients(params);
  f(params, &analytic);

  std::mt19937_64 rng(options.seed);
  ParameterSet probe = params;
  GradCheckReport report;

  for (const auto& [name, p] : params) {
    const auto size = static_cast<std::size_t>(p.value.size());
    std::vector<std::size_t> coords(size);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (size > options.max_coordinates) {
      std::shuffle(coords.begin(), coords.end(), rng);
      coords.resize(options.max_coordinates);
      std::sort(coords.begin(), coords.end());
    }

    double worst = 0.0;
    Matrix& theta = probe.value(name);
    const Matrix& grad = analytic.at(name);
    for (std::size_t k : coords) {
      const auto idx = static_cast<Eigen::Index>(k);
      const double saved = theta.data()[idx];
      theta.data()[idx] = saved + options.epsilon;
      const double up = f(probe, nullptr);
      theta.data()[idx] = saved - options.epsilon;
      const double down = f(probe, nullptr);
      theta.data()[idx] = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw NumericError("gradient_check: non-finite objective perturbing " + name + "[" +
                           std::to_string(k) + "]");
      }
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = grad.data()[idx];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.absolute_floor});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
    report.per_parameter[name] = worst;
    report.max_relative_error = std::max(report.max_relative_error, worst);
    report.coordinates_checked += coords.size();
  }
  return report;
}

}  // namespace proxpool::diff
