#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "levywave/rng.hpp"

namespace levywave {

enum class NoiseFamily { IsotropicStable, StableComponents, QuadraticForm };

// Symmetric Levy exponent Psi. Three families are supported:
//   IsotropicStable:  Psi(xi) = chi * ||xi||^alpha
//   StableComponents: Psi(xi) = chi * sum_j |xi_j|^{alpha_j}
//   QuadraticForm:    Psi(xi) = xi' Q xi, Q symmetric positive definite
// Instances are immutable and validated at construction.
class LevyExponent {
 public:
  // standard white noise in one dimension: Psi(xi) = xi^2
  LevyExponent() = default;

  static LevyExponent isotropic_stable(int d, double alpha, double chi);
  static LevyExponent stable_components(std::vector<double> alpha, double chi);
  static LevyExponent quadratic_form(const Eigen::MatrixXd& Q);

  static LevyExponent from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  NoiseFamily family() const { return family_; }
  int dim() const { return d_; }
  double chi() const { return chi_; }
  double alpha() const { return alphas_[0]; }
  const std::vector<double>& alphas() const { return alphas_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  const Eigen::MatrixXd& Q_cholesky() const { return chol_; }
  const Eigen::VectorXd& Q_eigenvalues() const { return Q_eig_; }

  double psi(const Eigen::VectorXd& xi) const;

 private:
  NoiseFamily family_ = NoiseFamily::IsotropicStable;
  int d_ = 1;
  double chi_ = 1.0;
  std::vector<double> alphas_ = {2.0};  // size 1 (isotropic) or d (components)
  Eigen::MatrixXd Q_;           // QuadraticForm only
  Eigen::MatrixXd chol_;        // lower Cholesky factor of Q
  Eigen::VectorXd Q_eig_;       // eigenvalues of Q
};

// Witness for the scaling condition Psi(a xi) >= A_a Psi(xi).
struct ScalingWitness {
  double a = 1.0;
  double lower_bound = 1.0;        // exact A_a for the homogeneous families
  double empirical_min_ratio = 1.0;  // min over sampled xi of Psi(a xi)/Psi(xi)
};

// Exact A_a plus an empirical spot check over `samples` random directions.
ScalingWitness scaling_witness(const LevyExponent& exp, double a,
                               int samples = 256,
                               std::uint64_t check_seed = 0x5ca11ab1e0ddba11ULL);

}  // namespace levywave
