#pragma once

#include "proxpool/diff/parameters.hpp"

namespace proxpool::diff {

struct AdamOptions {
  double lr = 1e-3;
  double weight_decay = 0.0;  // classic L2: added to the gradient
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update.  Every parameter must have a gradient;
/// a non-finite gradient aborts the step with NumericError before any
/// parameter is touched.
void adam_step(ParameterSet& params, const GradientMap& grads, const AdamOptions& options);

}  // namespace proxpool::diff
