#include "levywave/sampling.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace levywave {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double sample_stable_1d(double alpha, RngStream& rng) {
  if (!(alpha > 0.0) || alpha > 2.0)
    throw std::invalid_argument("sample_stable_1d: alpha must lie in (0, 2]");
  if (alpha == 2.0) return std::sqrt(2.0) * rng.normal();
  const double u = rng.uniform(-0.5 * kPi, 0.5 * kPi);
  const double w = rng.exponential();
  // CMS for the symmetric case; continuous through alpha = 1 (tan u).
  const double t = std::sin(alpha * u) / std::pow(std::cos(u), 1.0 / alpha);
  const double s = std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
  return t * s;
}

double sample_positive_stable(double beta, RngStream& rng) {
  if (!(beta > 0.0) || !(beta < 1.0))
    throw std::invalid_argument("sample_positive_stable: beta must lie in (0, 1)");
  const double u = rng.uniform(0.0, kPi);
  const double w = rng.exponential();
  const double a = std::sin((1.0 - beta) * u) *
                   std::pow(std::sin(beta * u), beta / (1.0 - beta)) /
                   std::pow(std::sin(u), 1.0 / (1.0 - beta));
  return std::pow(a / w, (1.0 - beta) / beta);
}

Eigen::VectorXd sample_increment(const LevyExponent& exp, double area, RngStream& rng) {
  if (!(area > 0.0)) throw std::invalid_argument("sample_increment: area must be positive");
  const int d = exp.dim();
  Eigen::VectorXd x(d);
  switch (exp.family()) {
    case NoiseFamily::IsotropicStable: {
      const double alpha = exp.alpha();
      const double scale = std::pow(area * exp.chi(), 1.0 / alpha);
      if (alpha == 2.0) {
        // cf exp(-area chi ||xi||^2): Gaussian, variance 2 area chi per component
        for (int i = 0; i < d; ++i) x[i] = scale * std::sqrt(2.0) * rng.normal();
      } else {
        // subordinated Gaussian: sqrt(2 S) Z with S positive (alpha/2)-stable
        const double s = sample_positive_stable(0.5 * alpha, rng);
        const double r = std::sqrt(2.0 * s) * scale;
        for (int i = 0; i < d; ++i) x[i] = r * rng.normal();
      }
      return x;
    }
    case NoiseFamily::StableComponents: {
      for (int j = 0; j < d; ++j) {
        const double aj = exp.alphas()[j];
        x[j] = std::pow(area * exp.chi(), 1.0 / aj) * sample_stable_1d(aj, rng);
      }
      return x;
    }
    case NoiseFamily::QuadraticForm: {
      // cf exp(-area xi' Q xi): Gaussian with covariance 2 area Q
      Eigen::VectorXd z(d);
      for (int i = 0; i < d; ++i) z[i] = rng.normal();
      return std::sqrt(2.0 * area) * (exp.Q_cholesky() * z);
    }
  }
  return x;
}

double Region::volume() const {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw std::invalid_argument("region: mismatched bounds");
  double v = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(hi[i] > lo[i])) throw std::invalid_argument("region: empty side");
    v *= hi[i] - lo[i];
  }
  if (kind != Kind::Box) {
    if (lo.size() != 2) throw std::invalid_argument("triangle regions require N = 2");
    v *= 0.5;
  }
  return v;
}

std::uint64_t Region::key() const {
  std::uint64_t h = 0x9ae16a3b2f90404fULL + static_cast<std::uint64_t>(kind);
  auto mix = [&h](double x) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    h = splitmix64(h ^ bits);
  };
  for (Eigen::Index i = 0; i < lo.size(); ++i) { mix(lo[i]); mix(hi[i]); }
  return h;
}

void SimpleFunction::validate() const {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const Region& a = terms[i].first;
    a.volume();  // validates bounds
    if (!std::isfinite(terms[i].second))
      throw std::invalid_argument("simple function: non-finite coefficient");
    for (std::size_t j = i + 1; j < terms.size(); ++j) {
      const Region& b = terms[j].first;
      if (a.lo.size() != b.lo.size())
        throw std::invalid_argument("simple function: mixed dimensions");
      bool boxes_overlap = true;
      for (Eigen::Index k = 0; k < a.lo.size(); ++k)
        if (a.hi[k] <= b.lo[k] || b.hi[k] <= a.lo[k]) { boxes_overlap = false; break; }
      if (!boxes_overlap) continue;
      const bool same_box = (a.lo - b.lo).cwiseAbs().maxCoeff() == 0.0 &&
                            (a.hi - b.hi).cwiseAbs().maxCoeff() == 0.0;
      const bool complementary =
          same_box &&
          ((a.kind == Region::Kind::TriangleLower && b.kind == Region::Kind::TriangleUpper) ||
           (a.kind == Region::Kind::TriangleUpper && b.kind == Region::Kind::TriangleLower));
      if (!complementary)
        throw std::invalid_argument("simple function: overlapping regions");
    }
  }
}

Eigen::VectorXd integrate_simple(const LevyExponent& exp, const SimpleFunction& phi,
                                 const RngStream& noise) {
  phi.validate();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(exp.dim());
  for (const auto& [region, coeff] : phi.terms) {
    if (coeff == 0.0) continue;  // Psi(0) = 0: contributes exactly nothing
    RngStream sub = noise.substream(region.key());
    acc += coeff * sample_increment(exp, region.volume(), sub);
  }
  return acc;
}

}  // namespace levywave
