#pragma once

#include <array>
#include <optional>
#include <vector>

#include "levywave/fields.hpp"
#include "levywave/gauge.hpp"
#include "levywave/linreg.hpp"

namespace levywave {

struct Window {
  double t_lo = 0.0, t_hi = 0.0, x_lo = 0.0, x_hi = 0.0;
};

struct ZeroSetSample {
  double epsilon = 0.0;
  double lattice_h = 0.0;                       // rotated cell side
  std::vector<std::array<double, 2>> points;    // (t, x) with ||u|| <= epsilon
};

// Apexes with ||u(t, x)|| <= epsilon (Euclidean norm). Only strictly
// positive times are scanned; u vanishes identically on t = 0.
ZeroSetSample detect_zeros(const SolutionField& field, double epsilon,
                           std::optional<Window> window = std::nullopt);

struct SmallBallEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int replicas = 0;
};

// Empirical P{||u(t, x)|| <= epsilon}; u(t, x) is in law half of a single
// noise increment of area t^2, so replicas are sampled directly.
SmallBallEstimate small_ball_probability(const LevyExponent& exp, double t, double x,
                                         double epsilon, int replicas,
                                         const RngStream& base);

struct DimensionEstimate {
  double slope = 0.0;
  double std_error = 0.0;
  double r_squared = 0.0;
  double delta_min = 0.0, delta_max = 0.0;
  std::vector<std::pair<double, long>> counts;  // (delta, N(delta)) actually used
};

// Log-log box-count slope over the given scales; scales with fewer than 10
// occupied boxes are dropped, and at least 4 scales must survive.
DimensionEstimate box_counting_dimension(const ZeroSetSample& sample,
                                         const std::vector<double>& scales,
                                         const Window& window);

// Dyadic scales from 4h up to (window side)/8.
std::vector<double> default_box_scales(double lattice_h, const Window& window);

struct DichotomyCase {
  LevyExponent exponent;
  double t_max = 1.0, x_max = 0.5, h = 0.01;
  Window window;
  std::vector<double> epsilon_schedule;  // strictly decreasing
};

struct DichotomyRow {
  std::size_t case_index = 0;
  double epsilon = 0.0;
  double hit_frequency = 0.0;  // median of batch means
  double std_error = 0.0;
};

struct DichotomyCaseReport {
  ZeroCriterion analytic = ZeroCriterion::Inconclusive;
  std::vector<DichotomyRow> rows;
  bool empirical_subcritical = false;  // hit frequencies stable near 1
  bool agrees = false;
};

struct DichotomyReport {
  std::vector<DichotomyCaseReport> cases;
};

// Monte Carlo existence sweep: per case and epsilon, the frequency of
// replicas whose field dips below epsilon somewhere in the window, next to
// the analytic verdict of the integral test.
DichotomyReport dichotomy_sweep(const std::vector<DichotomyCase>& cases, int replicas,
                                std::uint64_t seed, int workers = 1);

struct DimensionRunConfig {
  LevyExponent exponent;
  double t_max = 2.0, x_max = 1.0, h = 0.01;
  Window window;
  // detection threshold = epsilon_factor * (median |u(apex) - u(neighbor)|);
  // the factor is calibrated once on the Gaussian case and held fixed.
  double epsilon_factor = 1.0;
  std::vector<double> scales;  // empty: default_box_scales
  int replicas = 1;
  std::uint64_t seed = 0;
  int workers = 1;
};

struct DimensionRunResult {
  double mean_slope = 0.0;
  double slope_stderr = 0.0;
  std::vector<DimensionEstimate> per_replica;  // usable replicas only
  std::vector<double> epsilons;  // threshold actually used per usable replica
  int skipped = 0;  // replicas whose zero set was too sparse to box count
};

// Simulates `replicas` solution fields, detects the near-zero set at a
// lattice-tied threshold and box-counts its dimension.
DimensionRunResult run_dimension_experiment(const DimensionRunConfig& cfg);

}  // namespace levywave
