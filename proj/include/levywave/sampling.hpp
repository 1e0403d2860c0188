#pragma once

#include <Eigen/Dense>
#include <vector>

#include "levywave/exponent.hpp"
#include "levywave/rng.hpp"

namespace levywave {

// Symmetric alpha-stable draw with characteristic function exp(-|xi|^alpha)
// (Chambers-Mallows-Stuck; alpha = 2 falls back to sqrt(2) * normal).
double sample_stable_1d(double alpha, RngStream& rng);

// Positive beta-stable draw with Laplace transform exp(-u^beta), beta in (0,1)
// (Kanter's representation).
double sample_positive_stable(double beta, RngStream& rng);

// One noise increment over a region of the given Lebesgue measure: the
// returned vector has characteristic function exp(-area * Psi(xi)).
Eigen::VectorXd sample_increment(const LevyExponent& exp, double area, RngStream& rng);

// A Borel cell in R_+^N: an axis-aligned box, optionally halved along its
// main anti-diagonal (only meaningful for N = 2; used to tile light cones).
struct Region {
  enum class Kind { Box, TriangleLower, TriangleUpper };

  Eigen::VectorXd lo, hi;
  Kind kind = Kind::Box;

  double volume() const;
  // Deterministic identity used to key the noise substream, so that two
  // simple functions naming the same region see the same increment.
  std::uint64_t key() const;
};

struct SimpleFunction {
  std::vector<std::pair<Region, double>> terms;  // (region, coefficient)

  // Throws when two regions overlap (complementary triangle halves of the
  // same box are allowed).
  void validate() const;
};

// Wiener-type integral of a simple function: sum_j c_j * increment(A_j),
// with per-region increments keyed off the region geometry so a shared
// RngStream realizes one consistent noise across different integrands.
Eigen::VectorXd integrate_simple(const LevyExponent& exp, const SimpleFunction& phi,
                                 const RngStream& noise);

}  // namespace levywave
