#include "proxpool/diff/gradcheck.hpp"
#include "proxpool/diff/ops.hpp"
#include "proxpool/errors.hpp"

#include <gtest/gtest.h>

using namespace proxpool;
using namespace proxpool::diff;

namespace {

// f(W) = ||X W||^2 with X fixed.
Objective quadratic(const Matrix& x) {
  return [x](const ParameterSet& ps, GradientMap* grads) {
    Tape t;
    const Var xw = matmul(t.constant(x), t.parameter(ps, "w"));
    const Var loss = sum_all(hadamard(xw, xw));
    if (grads) t.backward(loss, *grads);
    return loss.value()(0, 0);
  };
}

}  // namespace

TEST(GradCheck, QuadraticIsExact) {
  ParameterSet ps;
  ps.add("w", Matrix::Random(3, 2));
  const GradCheckReport r = gradient_check(quadratic(Matrix::Random(5, 3)), ps);
  EXPECT_LT(r.max_relative_error, 1e-6);
  EXPECT_EQ(r.coordinates_checked, 6u);
  EXPECT_EQ(r.per_parameter.count("w"), 1u);
}

TEST(GradCheck, DetectsWrongGradient) {
  ParameterSet ps;
  ps.add("w", Matrix::Ones(2, 2));
  const Objective wrong = [](const ParameterSet& p, GradientMap* grads) {
    const double s = p.value("w").squaredNorm();
    if (grads) (*grads)["w"] = p.value("w");  // missing factor 2
    return s;
  };
  EXPECT_GT(gradient_check(wrong, ps).max_relative_error, 0.3);
}

TEST(GradCheck, SubsetsLargeParameters) {
  ParameterSet ps;
  ps.add("w", Matrix::Random(40, 30));
  GradCheckOptions o;
  o.max_coordinates = 50;
  const GradCheckReport r = gradient_check(quadratic(Matrix::Random(4, 40)), ps, o);
  EXPECT_EQ(r.coordinates_checked, 50u);
  EXPECT_LT(r.max_relative_error, 1e-6);
}

TEST(GradCheck, EpsilonRange) {
  ParameterSet ps;
  ps.add("w", Matrix::Ones(1, 1));
  GradCheckOptions o;
  o.epsilon = 1e-2;
  EXPECT_THROW(gradient_check(quadratic(Matrix::Ones(1, 1)), ps, o), ContractError);
}

TEST(GradCheck, NonFiniteEvaluationNamesCoordinate) {
  ParameterSet ps;
  ps.add("w", Matrix::Zero(1, 2));
  const Objective blowup = [](const ParameterSet& p, GradientMap* grads) {
    if (grads) (*grads)["w"] = Matrix::Zero(1, 2);
    return p.value("w")(0, 1) != 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  };
  try {
    gradient_check(blowup, ps);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("w"), std::string::npos);
  }
}
