#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levywave/gauge.hpp"

using namespace levywave;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

}  // namespace

TEST_CASE("psi closed forms") {
  const auto iso = LevyExponent::isotropic_stable(1, 2.0, 0.5);
  CHECK(iso.psi(vec({2.0})) == doctest::Approx(2.0));
  CHECK(iso.psi(vec({0.0})) == 0.0);

  const auto comp = LevyExponent::stable_components({1.0, 2.0}, 1.0);
  CHECK(comp.psi(vec({3.0, 2.0})) == doctest::Approx(7.0));
  CHECK(comp.psi(vec({0.0, 0.0})) == 0.0);

  Eigen::MatrixXd Q(2, 2);
  Q << 2.0, 0.5, 0.5, 1.0;
  const auto qf = LevyExponent::quadratic_form(Q);
  CHECK(qf.psi(vec({1.0, 1.0})) == doctest::Approx(4.0));
  CHECK(qf.psi(vec({0.0, 0.0})) == 0.0);
}

TEST_CASE("psi symmetry and nonnegativity") {
  RngStream rng(7, 0);
  const auto comp = LevyExponent::stable_components({0.7, 1.3, 2.0}, 0.9);
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd xi(3);
    for (int k = 0; k < 3; ++k) xi[k] = rng.normal() * 3.0;
    CHECK(comp.psi(xi) >= 0.0);
    CHECK(comp.psi(-xi) == doctest::Approx(comp.psi(xi)));
  }
}

TEST_CASE("psi homogeneity for isotropic stable") {
  const auto exp = LevyExponent::isotropic_stable(2, 1.5, 2.0);
  RngStream rng(11, 0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd xi(2);
    xi << rng.normal(), rng.normal();
    const double a = std::exp(rng.uniform(-2.0, 2.0));
    CHECK(exp.psi(a * xi) ==
          doctest::Approx(std::pow(a, 1.5) * exp.psi(xi)).epsilon(1e-12));
  }
}

TEST_CASE("construction validation") {
  CHECK_THROWS(LevyExponent::isotropic_stable(1, 2.5, 1.0));
  CHECK_THROWS(LevyExponent::isotropic_stable(1, 0.0, 1.0));
  CHECK_THROWS(LevyExponent::isotropic_stable(1, 2.0, -1.0));
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1, 3
  CHECK_THROWS(LevyExponent::quadratic_form(bad));
  const auto iso = LevyExponent::isotropic_stable(2, 2.0, 1.0);
  CHECK_THROWS(iso.psi(vec({1.0})));  // dimension mismatch
}

TEST_CASE("json round trip") {
  const auto j = nlohmann::json::parse(
      R"({"family":"stable_components","d":2,"alpha":[1.0,2.0],"chi":0.5})");
  const auto exp = LevyExponent::from_json(j);
  CHECK(exp.family() == NoiseFamily::StableComponents);
  CHECK(exp.dim() == 2);
  const auto back = LevyExponent::from_json(exp.to_json());
  CHECK(back.psi(vec({3.0, 2.0})) == doctest::Approx(exp.psi(vec({3.0, 2.0}))));
  CHECK_THROWS(LevyExponent::from_json(nlohmann::json::parse(R"({"family":"nope"})")));
}

TEST_CASE("gauge closed-form values") {
  const GaugeFunction g1(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  CHECK(g1(1.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-10));
  CHECK(g1(4.0) == doctest::Approx(g1(1.0) / 2.0).epsilon(1e-10));

  const GaugeFunction g2(LevyExponent::stable_components({2.0, 2.0}, 0.5));
  CHECK(g2(1.0) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-10));

  CHECK_THROWS(g1(0.0));
  CHECK_THROWS(g1(-1.0));
}

TEST_CASE("gauge quadratic form equals Gaussian closed form") {
  // Q = I in d dimensions matches isotropic alpha = 2, chi = 1
  const GaugeFunction gq(LevyExponent::quadratic_form(Eigen::MatrixXd::Identity(3, 3)));
  const GaugeFunction gi(LevyExponent::isotropic_stable(3, 2.0, 1.0));
  for (double lambda : {0.1, 1.0, 10.0})
    CHECK(gq(lambda) == doctest::Approx(gi(lambda)).epsilon(1e-10));
}

TEST_CASE("gauge monotone non-increasing") {
  const GaugeFunction g(LevyExponent::isotropic_stable(2, 1.3, 0.8));
  double prev = g(1e-3);
  for (double lambda = 2e-3; lambda < 1e2; lambda *= 1.7) {
    const double cur = g(lambda);
    CHECK(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("closed form vs quadrature") {
  const std::vector<LevyExponent> exps = {
      LevyExponent::isotropic_stable(1, 2.0, 0.5),
      LevyExponent::isotropic_stable(2, 1.5, 1.0),
      LevyExponent::isotropic_stable(3, 0.8, 2.0),
      LevyExponent::stable_components({1.0, 2.0}, 0.5),
      LevyExponent::quadratic_form((Eigen::MatrixXd(2, 2) << 2, 0.3, 0.3, 1).finished()),
  };
  for (const auto& e : exps) {
    const GaugeFunction closed(e, GaugeMode::ClosedForm);
    const GaugeFunction quad(e, GaugeMode::Quadrature);
    for (double lambda : {0.01, 0.1, 1.0, 10.0}) {
      CHECK(quad(lambda) ==
            doctest::Approx(closed(lambda)).epsilon(1e-4));
    }
  }
}

TEST_CASE("upper index") {
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(1, 2.0, 1.0)).upper_index() ==
        doctest::Approx(0.5));
  CHECK(GaugeFunction(LevyExponent::stable_components({1.0, 2.0}, 1.0)).upper_index() ==
        doctest::Approx(1.5));
  CHECK(GaugeFunction(LevyExponent::quadratic_form(Eigen::MatrixXd::Identity(3, 3)))
            .upper_index() == doctest::Approx(1.5));

  // quadrature path recovers the same exponent from the log-log slope
  const GaugeFunction quad(LevyExponent::isotropic_stable(2, 1.5, 0.7),
                           GaugeMode::Quadrature);
  CHECK(quad.upper_index() == doctest::Approx(2.0 / 1.5).epsilon(1e-4));
}

TEST_CASE("zero criterion matches the analytic inequality") {
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(3, 2.0, 1.0)).zero_criterion() ==
        ZeroCriterion::ZerosExist);
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(4, 2.0, 1.0)).zero_criterion() ==
        ZeroCriterion::NoZeros);
  CHECK(GaugeFunction(LevyExponent::stable_components({1.0, 1.0}, 1.0)).zero_criterion() ==
        ZeroCriterion::NoZeros);

  for (int d = 1; d <= 5; ++d) {
    for (double alpha : {0.5, 1.0, 1.5, 2.0}) {
      if (d == static_cast<int>(2.0 * alpha) && 2.0 * alpha == std::floor(2.0 * alpha))
        continue;  // boundary pairs handled above
      const auto verdict =
          GaugeFunction(LevyExponent::isotropic_stable(d, alpha, 1.0)).zero_criterion();
      CHECK(verdict == (d < 2.0 * alpha ? ZeroCriterion::ZerosExist
                                        : ZeroCriterion::NoZeros));
    }
  }
}

TEST_CASE("zero criterion quadrature path") {
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(1, 2.0, 0.5), GaugeMode::Quadrature)
            .zero_criterion() == ZeroCriterion::ZerosExist);
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(5, 2.0, 0.5), GaugeMode::Quadrature)
            .zero_criterion() == ZeroCriterion::NoZeros);
  // boundary: ind = 2 exactly, the numeric path refuses to decide
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(4, 2.0, 0.5), GaugeMode::Quadrature)
            .zero_criterion() == ZeroCriterion::Inconclusive);
}

TEST_CASE("dimension formula") {
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 2.0, 1.0));
  CHECK(g.dimension_formula(2) == doctest::Approx(1.5));
  CHECK(GaugeFunction(LevyExponent::stable_components({1.0, 2.0}, 1.0))
            .dimension_formula(2) == doctest::Approx(0.5));
  CHECK(GaugeFunction(LevyExponent::isotropic_stable(4, 2.0, 1.0)).dimension_formula(2) ==
        doctest::Approx(0.0));
  // complement identity holds exactly
  for (double alpha : {0.5, 1.0, 1.7, 2.0}) {
    const GaugeFunction gg(LevyExponent::isotropic_stable(2, alpha, 1.0));
    CHECK(gg.dimension_formula(2) + gg.upper_index() == doctest::Approx(2.0).epsilon(1e-15));
  }
}

TEST_CASE("scaling witness") {
  const auto w1 = scaling_witness(LevyExponent::isotropic_stable(1, 1.5, 1.0), 2.0);
  CHECK(w1.lower_bound == doctest::Approx(std::pow(2.0, 1.5)));
  CHECK(w1.empirical_min_ratio >= w1.lower_bound - 1e-12);

  const auto w2 = scaling_witness(LevyExponent::stable_components({1.0, 2.0}, 1.0), 0.5);
  CHECK(w2.lower_bound == doctest::Approx(0.25));

  const auto w3 = scaling_witness(LevyExponent::quadratic_form(Eigen::MatrixXd::Identity(2, 2)), 3.0);
  CHECK(w3.lower_bound == doctest::Approx(9.0));

  const auto w4 = scaling_witness(LevyExponent::isotropic_stable(2, 0.7, 1.0), 1.0);
  CHECK(w4.lower_bound == doctest::Approx(1.0));
}
