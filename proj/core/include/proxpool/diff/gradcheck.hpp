#pragma once

#include "proxpool/diff/parameters.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>

namespace proxpool::diff {

/// Evaluates the scalar objective at `params`; when `grads` is non-null it is
/// also filled with the analytic gradient.
using Objective = std::function<double(const ParameterSet& params, GradientMap* grads)>;

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Parameters larger than this are checked on a seeded random subset.
  std::size_t max_coordinates = 2000;
  std::uint64_t seed = 0;
  // Denominator floor.  Central differences at epsilon = 1e-5 carry roughly
  // 1e-11 of rounding noise, so gradients below this are compared absolutely.
  double absolute_floor = 1e-6;
};

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::map<std::string, double> per_parameter;
  std::size_t coordinates_checked = 0;
};

/// Central differences against the analytic gradient, scored per coordinate as
/// |a - n| / max(|a|, |n|, absolute_floor).  Throws NumericError naming the coordinate
/// when a perturbed evaluation is not finite.
GradCheckReport gradient_check(const Objective& f, const ParameterSet& params,
                               const GradCheckOptions& options = {});

}  // namespace proxpool::diff
