#pragma once

#include <Eigen/Dense>
#include <functional>
#include <nlohmann/json.hpp>
#include <vector>

#include "levywave/gauge.hpp"

namespace levywave {

// lambda_N([0, s] symm-diff [0, t]) = prod s_i + prod t_i - 2 prod min(s_i, t_i).
double sym_diff_area(const Eigen::VectorXd& s, const Eigen::VectorXd& t);

// Probability measure with finite support.
struct DiscreteMeasure {
  std::vector<Eigen::VectorXd> support;
  Eigen::VectorXd weights;

  void validate() const;  // weights >= 0, sum to 1 (1e-12), points distinct
  nlohmann::json to_json() const;
};

// Compact target set: a finite union of axis-aligned boxes in (0, inf)^N,
// discretized at `spacing` into cell-center support points.
struct GridSet {
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> boxes;  // (lo, hi)
  double spacing = 0.0;

  static GridSet from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  std::vector<Eigen::VectorXd> points() const;
  GridSet refined(double factor) const;  // same boxes, spacing / factor
};

// Energy with kernel Phi(||s - t||); the diagonal uses the surrogate
// Phi(kappa * h) standing for mass spread over a cell of side h.
double energy(const DiscreteMeasure& mu, const GaugeFunction& g, double h,
              double kappa = 0.5);

// Energy with kernel Phi(r) / r^q, 0 < q < N.
double q_energy(const DiscreteMeasure& mu, const GaugeFunction& g, double q,
                double h, double kappa = 0.5);

Eigen::MatrixXd kernel_matrix(const std::vector<Eigen::VectorXd>& pts,
                              const std::function<double(double)>& kernel,
                              double diag_value);

struct FrankWolfeSettings {
  int max_iterations = 100000;
  double rel_gap_tol = 1e-6;
};

struct CapacityResult {
  double capacity = 0.0;
  double min_energy = 0.0;
  DiscreteMeasure measure;
  int iterations = 0;
  double gap = 0.0;  // linear-minimization gap at the last iterate
  bool converged = false;
};

// Minimize w' K w over the probability simplex (Frank-Wolfe with exact line
// search); capacity = 1 / min energy.
CapacityResult minimize_energy(const Eigen::MatrixXd& K,
                               FrankWolfeSettings settings = {});

CapacityResult capacity(const GridSet& G, const GaugeFunction& g,
                        FrankWolfeSettings settings = {}, double kappa = 0.5);

struct RieszResult {
  bool positive = false;
  bool conclusive = false;
  std::vector<double> energies;  // minimized energies at h, h/2, h/4
};

// Positivity of the beta-dimensional Riesz capacity, decided by stability of
// the minimized ||s-t||^{-beta} energy under grid refinement.
RieszResult riesz_capacity_positive(const GridSet& G, double beta,
                                    FrankWolfeSettings settings = {});

struct DimensionByCapacity {
  double dimension = -1.0;  // negative means the zero set misses G entirely
  bool empty_set = false;
  bool bracketed = true;
  int bisections = 0;
};

// sup{q in (0, N): min q-energy finite}, located by bisection on q using the
// refinement behaviour of the minimized energies.
DimensionByCapacity dimension_by_capacity(const GridSet& G, const GaugeFunction& g,
                                          FrankWolfeSettings settings = {});

}  // namespace levywave
