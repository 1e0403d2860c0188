#pragma once

#include "levywave/exponent.hpp"

namespace levywave {

enum class GaugeMode { ClosedForm, Quadrature };

enum class ZeroCriterion { ZerosExist, NoZeros, Inconclusive };

const char* to_string(ZeroCriterion c);

struct QuadratureSettings {
  double rel_tol = 1e-8;    // adaptive refinement target per panel
  double tail_tol = 1e-12;  // stop extending the radial cutoff when a panel
                            // contributes less than this fraction of the total
  int max_depth = 48;
};

// Evaluator for the gauge function
//   Phi(lambda) = (2 pi)^{-d} \int exp(-lambda Psi(xi)) dxi,
// which is also the density at the origin, at time lambda, of the Levy
// process associated with Psi. Strictly positive and non-increasing.
//
// The closed-form path uses the radial/product reduction of the stable
// families (and the Gaussian formula for quadratic forms); the quadrature
// path integrates the same reduced one-dimensional forms numerically.
class GaugeFunction {
 public:
  explicit GaugeFunction(LevyExponent exp, GaugeMode mode = GaugeMode::ClosedForm,
                         QuadratureSettings settings = {});

  const LevyExponent& exponent() const { return exp_; }
  GaugeMode mode() const { return mode_; }

  double operator()(double lambda) const;

  // limsup_{lambda -> 0} log Phi(lambda) / log(1/lambda).
  // Closed form: d/alpha, sum_j 1/alpha_j, or d/2. Quadrature: negated
  // log-log slope over a geometric grid in [1e-6, 1e-2]; throws when the
  // fit has R^2 < 0.999.
  double upper_index() const;

  // Convergence of int_0^1 lambda Phi(lambda) dlambda.
  ZeroCriterion zero_criterion() const;

  // N - upper_index; a negative value means the zero set is empty.
  double dimension_formula(int N) const;

 private:
  double eval_closed(double lambda) const;
  double eval_quadrature(double lambda) const;

  LevyExponent exp_;
  GaugeMode mode_;
  QuadratureSettings settings_;
  double prefactor_ = 0.0;     // closed-form constant, stable families
  double closed_index_ = 0.0;  // exact upper index for all three families
};

}  // namespace levywave
