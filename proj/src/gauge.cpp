#include "levywave/gauge.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "levywave/linreg.hpp"

namespace levywave {

const char* to_string(ZeroCriterion c) {
  switch (c) {
    case ZeroCriterion::ZerosExist: return "zeros_exist";
    case ZeroCriterion::NoZeros: return "no_zeros";
    case ZeroCriterion::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr double kPi = 3.14159265358979323846;

double simpson(const std::function<double(double)>& f, double a, double b,
               double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth, int max_depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(f, a, m, fa, flm, fm);
  const double right = simpson(f, m, b, fm, frm, fb);
  const double delta = left + right - whole;
  if (depth >= max_depth)
    throw std::runtime_error("gauge quadrature did not converge (max depth)");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth);
}

double integrate_panel(const std::function<double(double)>& f, double a, double b,
                       double rel_tol, int max_depth) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, b, fa, fm, fb);
  const double tol = std::max(rel_tol * std::abs(whole), 1e-300);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 0, max_depth);
}

// int_0^infty exp(-c r^alpha) r^m dr, c > 0. Panels grow geometrically so
// slowly decaying integrands (tiny c) are covered without a huge fixed cutoff.
double radial_integral(double c, double alpha, int m, const QuadratureSettings& s) {
  if (!(c > 0.0)) throw std::invalid_argument("radial_integral: need c > 0");
  auto f = [&](double r) {
    const double e = c * std::pow(r, alpha);
    if (e > 700.0) return 0.0;
    return std::exp(-e) * (m == 0 ? 1.0 : std::pow(r, m));
  };
  double acc = 0.0;
  double lo = 0.0, hi = 1.0;
  int quiet = 0;
  for (int panel = 0; panel < 4000; ++panel) {
    const double part = integrate_panel(f, lo, hi, s.rel_tol, s.max_depth);
    acc += part;
    if (acc > 0.0 && std::abs(part) < s.tail_tol * acc && c * std::pow(hi, alpha) > 5.0) {
      if (++quiet >= 2) return acc;
    } else {
      quiet = 0;
    }
    lo = hi;
    hi *= 2.0;
  }
  throw std::runtime_error("gauge quadrature did not converge (cutoff too small)");
}

}  // namespace

GaugeFunction::GaugeFunction(LevyExponent exp, GaugeMode mode, QuadratureSettings settings)
    : exp_(std::move(exp)), mode_(mode), settings_(settings) {
  const int d = exp_.dim();
  switch (exp_.family()) {
    case NoiseFamily::IsotropicStable: {
      const double a = exp_.alpha();
      const double surf = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
      prefactor_ = surf * std::pow(2.0 * kPi, -d) * std::tgamma(d / a) / a;
      closed_index_ = d / a;
      break;
    }
    case NoiseFamily::StableComponents: {
      double pre = 1.0, idx = 0.0;
      for (double a : exp_.alphas()) {
        pre *= std::tgamma(1.0 / a) / (kPi * a);
        idx += 1.0 / a;
      }
      prefactor_ = pre;
      closed_index_ = idx;
      break;
    }
    case NoiseFamily::QuadraticForm: {
      const double det = exp_.Q_eigenvalues().prod();
      prefactor_ = std::pow(4.0 * kPi, -d / 2.0) / std::sqrt(det);
      closed_index_ = d / 2.0;
      break;
    }
  }
}

double GaugeFunction::eval_closed(double lambda) const {
  switch (exp_.family()) {
    case NoiseFamily::IsotropicStable:
      return prefactor_ * std::pow(lambda * exp_.chi(), -closed_index_);
    case NoiseFamily::StableComponents:
      return prefactor_ * std::pow(lambda * exp_.chi(), -closed_index_);
    case NoiseFamily::QuadraticForm:
      return prefactor_ * std::pow(lambda, -closed_index_);
  }
  return 0.0;
}

double GaugeFunction::eval_quadrature(double lambda) const {
  const int d = exp_.dim();
  switch (exp_.family()) {
    case NoiseFamily::IsotropicStable: {
      const double surf = 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
      return surf * std::pow(2.0 * kPi, -d) *
             radial_integral(lambda * exp_.chi(), exp_.alpha(), d - 1, settings_);
    }
    case NoiseFamily::StableComponents: {
      double prod = 1.0;
      for (double a : exp_.alphas())
        prod *= radial_integral(lambda * exp_.chi(), a, 0, settings_) / kPi;
      return prod;
    }
    case NoiseFamily::QuadraticForm: {
      double prod = 1.0;
      for (int i = 0; i < d; ++i)
        prod *= radial_integral(lambda * exp_.Q_eigenvalues()[i], 2.0, 0, settings_) / kPi;
      return prod;
    }
  }
  return 0.0;
}

double GaugeFunction::operator()(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("gauge: lambda must be positive");
  return mode_ == GaugeMode::ClosedForm ? eval_closed(lambda) : eval_quadrature(lambda);
}

double GaugeFunction::upper_index() const {
  if (mode_ == GaugeMode::ClosedForm) return closed_index_;
  const int n = 25;
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    const double lambda = 1e-6 * std::pow(1e4, i / double(n - 1));
    lx[i] = std::log(lambda);
    ly[i] = std::log((*this)(lambda));
  }
  const LinearFit fit = linear_fit(lx, ly);
  if (fit.r_squared < 0.999)
    throw std::runtime_error("upper index unresolved: log-log fit R^2 below 0.999");
  return -fit.slope;
}

ZeroCriterion GaugeFunction::zero_criterion() const {
  if (mode_ == GaugeMode::ClosedForm) {
    // Phi(lambda) ~ c lambda^{-ind}: lambda Phi integrable at 0 iff ind < 2;
    // ind = 2 gives a logarithmic divergence, so the boundary is NoZeros.
    return closed_index_ < 2.0 ? ZeroCriterion::ZerosExist : ZeroCriterion::NoZeros;
  }
  const double ind = upper_index();
  const double s = 1.0 - ind;  // exponent of lambda * Phi(lambda) near 0
  if (std::abs(s + 1.0) < 0.05) return ZeroCriterion::Inconclusive;
  return s > -1.0 ? ZeroCriterion::ZerosExist : ZeroCriterion::NoZeros;
}

double GaugeFunction::dimension_formula(int N) const {
  if (N < 1) throw std::invalid_argument("dimension_formula: N must be >= 1");
  return N - upper_index();
}

}  // namespace levywave
