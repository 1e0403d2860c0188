#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "levywave/potential.hpp"
#include "levywave/rng.hpp"

using namespace levywave;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

GridSet square(double lo, double hi, double spacing) {
  GridSet g;
  g.boxes.push_back({vec({lo, lo}), vec({hi, hi})});
  g.spacing = spacing;
  return g;
}

// Brute-force minimum of w'Kw over the weight grid {0, res, 2 res, ..., 1}.
double exhaustive_min_energy(const Eigen::MatrixXd& K, int steps) {
  const int n = static_cast<int>(K.rows());
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> w(n, 0);
  // recursion over compositions of `steps` into n parts, with running
  // quadratic form: acc = sum_{i,j<k} w_i w_j K_ij, v_j = sum_{i<k} w_i K_ij
  std::vector<Eigen::VectorXd> vstack(n, Eigen::VectorXd::Zero(n));
  const double res = 1.0 / steps;
  std::function<void(int, int, double, const Eigen::VectorXd&)> rec =
      [&](int k, int left, double acc, const Eigen::VectorXd& v) {
        if (k == n - 1) {
          const double wl = left * res;
          const double e = acc + 2.0 * wl * v[k] + wl * wl * K(k, k);
          if (e < best) best = e;
          return;
        }
        for (int c = 0; c <= left; ++c) {
          const double wk = c * res;
          rec(k + 1, left - c, acc + 2.0 * wk * v[k] + wk * wk * K(k, k),
              v + wk * K.col(k));
        }
      };
  rec(0, steps, 0.0, Eigen::VectorXd::Zero(n));
  return best;
}

}  // namespace

TEST_CASE("symmetric difference area closed form") {
  // N = 1: plain |s - t|
  CHECK(sym_diff_area(vec({2.0}), vec({0.5})) == doctest::Approx(1.5));
  CHECK(sym_diff_area(vec({1.0}), vec({1.0})) == 0.0);

  // N = 2 hand value: s=(1,2), t=(2,1): 2 + 2 - 2*1 = 2
  CHECK(sym_diff_area(vec({1.0, 2.0}), vec({2.0, 1.0})) == doctest::Approx(2.0));

  CHECK_THROWS(sym_diff_area(vec({-1.0}), vec({1.0})));
}

TEST_CASE("symmetric difference area vs monte carlo") {
  RngStream rng(50, 0);
  const Eigen::VectorXd s = vec({1.3, 0.7}), t = vec({0.9, 1.8});
  const double hi0 = std::max(s[0], t[0]), hi1 = std::max(s[1], t[1]);
  const int n = 1000000;
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.uniform(0.0, hi0), y = rng.uniform(0.0, hi1);
    const bool in_s = x <= s[0] && y <= s[1];
    const bool in_t = x <= t[0] && y <= t[1];
    if (in_s != in_t) ++hits;
  }
  const double mc = hi0 * hi1 * hits / double(n);
  CHECK(mc == doctest::Approx(sym_diff_area(s, t)).epsilon(0.01));
}

TEST_CASE("discrete measure validation") {
  DiscreteMeasure mu;
  mu.support = {vec({1.0, 1.0}), vec({2.0, 2.0})};
  mu.weights = vec({0.5, 0.5});
  CHECK_NOTHROW(mu.validate());
  mu.weights = vec({0.7, 0.7});
  CHECK_THROWS(mu.validate());  // does not sum to 1
  mu.weights = vec({1.5, -0.5});
  CHECK_THROWS(mu.validate());  // negative weight
  mu.support[1] = mu.support[0];
  mu.weights = vec({0.5, 0.5});
  CHECK_THROWS(mu.validate());  // duplicate point
}

TEST_CASE("grid set points and refinement") {
  const GridSet g = square(1.0, 2.0, 0.25);
  const auto pts = g.points();
  CHECK(pts.size() == 16);  // 4x4 cell centers
  for (const auto& p : pts) {
    CHECK(p[0] > 1.0);
    CHECK(p[0] < 2.0);
  }
  CHECK(g.refined(2.0).points().size() == 64);

  // zero-width axis: a segment in the plane has one center on that axis
  GridSet seg;
  seg.boxes.push_back({vec({1.0, 1.0}), vec({2.0, 1.0})});
  seg.spacing = 0.25;
  const auto spts = seg.points();
  CHECK(spts.size() == 4);
  for (const auto& p : spts) CHECK(p[1] == 1.0);

  const GridSet back = GridSet::from_json(g.to_json());
  CHECK(back.points().size() == pts.size());
  CHECK(back.spacing == g.spacing);
}

TEST_CASE("two point fixture: energy 3/2, capacity 2/3") {
  Eigen::MatrixXd K(2, 2);
  K << 2.0, 1.0, 1.0, 2.0;
  const CapacityResult r = minimize_energy(K);
  CHECK(r.converged);
  CHECK(r.min_energy == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(r.capacity == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(r.measure.weights[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.gap >= 0.0);
}

TEST_CASE("frank-wolfe matches exhaustive search on small kernels") {
  RngStream rng(51, 0);
  for (int f = 0; f < 5; ++f) {
    const int n = 2 + static_cast<int>(rng.uniform() * 3.0);  // 2..4 points
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    Eigen::MatrixXd K = A * A.transpose();
    K.diagonal().array() += 0.5;  // strictly positive definite
    const CapacityResult r = minimize_energy(K);
    REQUIRE(r.converged);
    const double brute = exhaustive_min_energy(K, 100);
    CHECK(r.min_energy <= brute + 1e-12);
    CHECK(std::abs(r.min_energy - brute) / brute < 1e-3);
  }
}

TEST_CASE("energy translation invariance") {
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  DiscreteMeasure mu;
  mu.support = {vec({1.0, 1.0}), vec({1.5, 1.2}), vec({2.0, 1.7})};
  mu.weights = vec({0.3, 0.3, 0.4});
  const double e0 = energy(mu, g, 0.25);
  DiscreteMeasure shifted = mu;
  for (auto& p : shifted.support) p += vec({3.0, -2.0});
  CHECK(energy(shifted, g, 0.25) == e0);
}

TEST_CASE("q energy recovers energy as q -> 0") {
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  DiscreteMeasure mu;
  mu.support = {vec({1.0, 1.0}), vec({1.5, 1.2}), vec({2.0, 1.7})};
  mu.weights = vec({0.3, 0.3, 0.4});
  const double e = energy(mu, g, 0.25);
  const double eq = q_energy(mu, g, 1e-12, 0.25);
  CHECK(std::abs(eq - e) / e < 1e-9);
}

namespace {

double uniform_q_energy(const GridSet& G, const GaugeFunction& g, double q) {
  const auto pts = G.points();
  DiscreteMeasure mu;
  mu.support = pts;
  mu.weights = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(pts.size()),
                                         1.0 / pts.size());
  return q_energy(mu, g, q, G.spacing);
}

}  // namespace

TEST_CASE("q energy refinement behaviour") {
  // stable gauge with d/alpha = 0.5
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  const GridSet g64 = square(1.0, 2.0, 1.0 / 8.0);
  const GridSet g256 = square(1.0, 2.0, 1.0 / 16.0);
  const GridSet g1024 = square(1.0, 2.0, 1.0 / 32.0);

  const double a = uniform_q_energy(g64, g, 1.0);
  const double b = uniform_q_energy(g256, g, 1.0);
  CHECK(std::isfinite(a));
  // integrable: stable under refinement (the diagonal surrogate contributes
  // an O(sqrt(h)) term, so the drift is small but not below 10%)
  CHECK(std::abs(b - a) / a < 0.12);

  const double c = uniform_q_energy(g64, g, 1.8);
  const double d = uniform_q_energy(g256, g, 1.8);
  const double e = uniform_q_energy(g1024, g, 1.8);
  CHECK(d / c >= 1.2);  // non-integrable: grows without bound
  CHECK(e / d >= 1.2);
}

TEST_CASE("capacity monotone in the set") {
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  const CapacityResult small = capacity(square(1.0, 1.5, 1.0 / 16.0), g);
  const CapacityResult big = capacity(square(1.0, 2.0, 1.0 / 16.0), g);
  REQUIRE(small.converged);
  REQUIRE(big.converged);
  CHECK(small.capacity <= big.capacity + 1e-9);
  CHECK(big.capacity > 0.0);
}

TEST_CASE("gauge kernel matrix is numerically psd") {
  const GaugeFunction g(LevyExponent::isotropic_stable(1, 1.5, 1.0));
  for (double spacing : {0.25, 0.1, 0.0625}) {
    const auto pts = square(1.0, 2.0, spacing).points();
    REQUIRE(pts.size() <= 400);
    const Eigen::MatrixXd K = kernel_matrix(
        pts, [&](double r) { return g(r); }, g(0.5 * spacing));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("symmetric difference metric comparable to euclidean away from axes") {
  RngStream rng(52, 0);
  double amin = std::numeric_limits<double>::infinity();
  double bmax = 0.0;
  for (int i = 0; i < 100000; ++i) {
    Eigen::VectorXd s(2), t(2);
    for (int k = 0; k < 2; ++k) {
      s[k] = rng.uniform(1.0, 2.0);
      t[k] = rng.uniform(1.0, 2.0);
    }
    const double r = (s - t).norm();
    if (r < 1e-12) continue;
    const double ratio = sym_diff_area(s, t) / r;
    amin = std::min(amin, ratio);
    bmax = std::max(bmax, ratio);
  }
  CHECK(amin > 0.0);
  CHECK(bmax < std::numeric_limits<double>::infinity());
  CHECK(amin >= 0.5);   // on [1,2]^2 each coordinate contributes at least 1
  CHECK(bmax <= 8.01);
}

TEST_CASE("riesz capacity positivity") {
  const GridSet G = square(1.0, 2.0, 1.0 / 8.0);
  const RieszResult pos = riesz_capacity_positive(G, 1.5);
  CHECK(pos.conclusive);
  CHECK(pos.positive);
  const RieszResult neg = riesz_capacity_positive(G, 2.5);
  CHECK(neg.conclusive);
  CHECK(!neg.positive);
}

TEST_CASE("riesz positivity agrees with gauge capacity") {
  // stable gauge d/alpha = 1.5 on a 2-D square: both capacities positive
  const GaugeFunction g(LevyExponent::isotropic_stable(3, 2.0, 0.5));
  const GridSet G = square(1.0, 2.0, 1.0 / 8.0);
  const CapacityResult c = capacity(G, g);
  REQUIRE(c.converged);
  CHECK(c.capacity > 0.0);
  CHECK(riesz_capacity_positive(G, 1.5).positive);
}

TEST_CASE("dimension by capacity") {
  const GridSet G = square(1.0, 2.0, 1.0 / 8.0);
  const GaugeFunction g05(LevyExponent::isotropic_stable(1, 2.0, 0.5));
  const DimensionByCapacity r = dimension_by_capacity(G, g05);
  CHECK(!r.empty_set);
  CHECK(r.dimension == doctest::Approx(1.5).epsilon(0.08));

  GridSet seg;
  seg.boxes.push_back({vec({1.0, 1.0}), vec({2.0, 1.0})});
  seg.spacing = 1.0 / 16.0;
  const DimensionByCapacity rs = dimension_by_capacity(seg, g05);
  CHECK(!rs.empty_set);
  CHECK(rs.dimension == doctest::Approx(0.5).epsilon(0.25));

  // d/alpha >= 2: no finite q-energy at all, empty-set sentinel
  const GaugeFunction g2(LevyExponent::isotropic_stable(4, 2.0, 0.5));
  const DimensionByCapacity re = dimension_by_capacity(G, g2);
  CHECK(re.empty_set);
  CHECK(re.dimension < 0.0);
}
