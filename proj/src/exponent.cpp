#include "levywave/exponent.hpp"

#include <cmath>
#include <stdexcept>

namespace levywave {

namespace {

void check_alpha(double a) {
  if (!(a > 0.0) || a > 2.0)
    throw std::invalid_argument("stability index must lie in (0, 2]");
}

}  // namespace

LevyExponent LevyExponent::isotropic_stable(int d, double alpha, double chi) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  check_alpha(alpha);
  if (!(chi > 0.0)) throw std::invalid_argument("scale chi must be positive");
  LevyExponent e;
  e.family_ = NoiseFamily::IsotropicStable;
  e.d_ = d;
  e.chi_ = chi;
  e.alphas_ = {alpha};
  return e;
}

LevyExponent LevyExponent::stable_components(std::vector<double> alpha, double chi) {
  if (alpha.empty()) throw std::invalid_argument("need at least one component index");
  for (double a : alpha) check_alpha(a);
  if (!(chi > 0.0)) throw std::invalid_argument("scale chi must be positive");
  LevyExponent e;
  e.family_ = NoiseFamily::StableComponents;
  e.d_ = static_cast<int>(alpha.size());
  e.chi_ = chi;
  e.alphas_ = std::move(alpha);
  return e;
}

LevyExponent LevyExponent::quadratic_form(const Eigen::MatrixXd& Q) {
  if (Q.rows() < 1 || Q.rows() != Q.cols())
    throw std::invalid_argument("Q must be a square matrix");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + Q.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("Q must be positive definite");
  Eigen::LLT<Eigen::MatrixXd> llt(Q);
  LevyExponent e;
  e.family_ = NoiseFamily::QuadraticForm;
  e.d_ = static_cast<int>(Q.rows());
  e.chi_ = 1.0;
  e.alphas_ = {2.0};
  e.Q_ = Q;
  e.chol_ = llt.matrixL();
  e.Q_eig_ = es.eigenvalues();
  return e;
}

double LevyExponent::psi(const Eigen::VectorXd& xi) const {
  if (xi.size() != d_) throw std::invalid_argument("psi: dimension mismatch");
  switch (family_) {
    case NoiseFamily::IsotropicStable:
      return chi_ * std::pow(xi.norm(), alphas_[0]);
    case NoiseFamily::StableComponents: {
      double s = 0.0;
      for (int j = 0; j < d_; ++j) s += std::pow(std::abs(xi[j]), alphas_[j]);
      return chi_ * s;
    }
    case NoiseFamily::QuadraticForm:
      return xi.dot(Q_ * xi);
  }
  return 0.0;
}

LevyExponent LevyExponent::from_json(const nlohmann::json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "isotropic_stable") {
    return isotropic_stable(j.at("d").get<int>(), j.at("alpha").get<double>(),
                            j.value("chi", 1.0));
  }
  if (family == "stable_components") {
    std::vector<double> alpha;
    if (j.at("alpha").is_array())
      alpha = j.at("alpha").get<std::vector<double>>();
    else
      alpha.assign(j.at("d").get<int>(), j.at("alpha").get<double>());
    return stable_components(std::move(alpha), j.value("chi", 1.0));
  }
  if (family == "quadratic_form") {
    const int d = j.at("d").get<int>();
    const auto flat = j.at("Q").get<std::vector<double>>();
    if (static_cast<int>(flat.size()) != d * d)
      throw std::invalid_argument("Q must have d*d entries (row-major)");
    Eigen::MatrixXd Q(d, d);
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k) Q(i, k) = flat[i * d + k];
    return quadratic_form(Q);
  }
  throw std::invalid_argument("unknown exponent family: " + family);
}

nlohmann::json LevyExponent::to_json() const {
  nlohmann::json j;
  j["d"] = d_;
  switch (family_) {
    case NoiseFamily::IsotropicStable:
      j["family"] = "isotropic_stable";
      j["alpha"] = alphas_[0];
      j["chi"] = chi_;
      break;
    case NoiseFamily::StableComponents:
      j["family"] = "stable_components";
      j["alpha"] = alphas_;
      j["chi"] = chi_;
      break;
    case NoiseFamily::QuadraticForm: {
      j["family"] = "quadratic_form";
      std::vector<double> flat(d_ * d_);
      for (int i = 0; i < d_; ++i)
        for (int k = 0; k < d_; ++k) flat[i * d_ + k] = Q_(i, k);
      j["Q"] = flat;
      break;
    }
  }
  return j;
}

ScalingWitness scaling_witness(const LevyExponent& exp, double a, int samples,
                               std::uint64_t check_seed) {
  if (!(a > 0.0)) throw std::invalid_argument("scaling factor must be positive");
  ScalingWitness w;
  w.a = a;
  switch (exp.family()) {
    case NoiseFamily::IsotropicStable:
      w.lower_bound = std::pow(a, exp.alpha());
      break;
    case NoiseFamily::StableComponents: {
      double m = std::pow(a, exp.alphas()[0]);
      for (double al : exp.alphas()) m = std::min(m, std::pow(a, al));
      w.lower_bound = m;
      break;
    }
    case NoiseFamily::QuadraticForm:
      w.lower_bound = a * a;
      break;
  }
  RngStream rng(check_seed, 0);
  double min_ratio = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd xi(exp.dim());
    for (int i = 0; i < exp.dim(); ++i) xi[i] = rng.normal() * std::exp(rng.uniform(-3.0, 3.0));
    const double denom = exp.psi(xi);
    if (denom <= 0.0) continue;
    min_ratio = std::min(min_ratio, exp.psi(a * xi) / denom);
  }
  w.empirical_min_ratio = min_ratio;
  if (min_ratio < w.lower_bound - 1e-12)
    throw std::logic_error("scaling witness violated: empirical ratio below exact bound");
  return w;
}

}  // namespace levywave
