#include "levywave/levelset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_set>

#include "levywave/sampling.hpp"

namespace levywave {

ZeroSetSample detect_zeros(const SolutionField& field, double epsilon,
                           std::optional<Window> window) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("detect_zeros: epsilon must be positive");
  const RotatedLattice& lat = field.lattice();
  Window w;
  if (window) {
    w = *window;
  } else {
    w.t_lo = 0.0;
    w.t_hi = 0.5 * lat.h * (lat.i1 + lat.j1);
    w.x_lo = 0.5 * lat.h * (lat.j0 - lat.i1);
    w.x_hi = 0.5 * lat.h * (lat.j1 - lat.i0);
  }
  ZeroSetSample sample;
  sample.epsilon = epsilon;
  sample.lattice_h = lat.h;
  const int d = field.dim();
  field.for_each_apex(w.t_lo, w.t_hi, w.x_lo, w.x_hi,
                      [&](int, int, double t, double x, const double* raw) {
                        if (t <= 0.0) return;  // u(0, x) = 0 identically
                        double n2 = 0.0;
                        for (int k = 0; k < d; ++k) n2 += raw[k] * raw[k];
                        if (0.5 * std::sqrt(n2) <= epsilon)
                          sample.points.push_back({t, x});
                      });
  return sample;
}

SmallBallEstimate small_ball_probability(const LevyExponent& exp, double t, double x,
                                         double epsilon, int replicas,
                                         const RngStream& base) {
  (void)x;  // the law of u(t, x) does not depend on x
  if (!(t > 0.0)) throw std::invalid_argument("small_ball: t must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("small_ball: epsilon must be positive");
  if (replicas < 100)
    throw std::invalid_argument("small_ball: need at least 100 replicas");
  long hits = 0;
  const double area = t * t;
  for (int r = 0; r < replicas; ++r) {
    RngStream rng = base.substream(static_cast<std::uint64_t>(r));
    // u(t, x) = (1/2) * noise(C(t, x)); the cone is a single region of area t^2
    const Eigen::VectorXd u = 0.5 * sample_increment(exp, area, rng);
    if (u.norm() <= epsilon) ++hits;
  }
  SmallBallEstimate est;
  est.replicas = replicas;
  est.estimate = static_cast<double>(hits) / replicas;
  est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) / replicas);
  return est;
}

std::vector<double> default_box_scales(double lattice_h, const Window& window) {
  const double side = std::min(window.t_hi - window.t_lo, window.x_hi - window.x_lo);
  std::vector<double> scales;
  for (double delta = 4.0 * lattice_h; delta <= side / 8.0; delta *= 2.0)
    scales.push_back(delta);
  return scales;
}

DimensionEstimate box_counting_dimension(const ZeroSetSample& sample,
                                         const std::vector<double>& scales,
                                         const Window& window) {
  if (sample.points.empty())
    throw std::runtime_error("box counting: no zero set at this resolution");
  if (scales.size() < 4)
    throw std::invalid_argument("box counting: need at least 4 scales");
  for (double delta : scales)
    if (delta < 2.0 * sample.lattice_h)
      throw std::invalid_argument("box counting: scale below 2x lattice spacing");

  DimensionEstimate est;
  std::vector<double> lx, ly;
  for (double delta : scales) {
    // points on the closed upper window boundary are clamped into the last
    // box so the grid tiles the window exactly
    const long long nbi = std::max<long long>(
        1, static_cast<long long>(std::ceil((window.t_hi - window.t_lo) / delta - 1e-9)));
    const long long nbj = std::max<long long>(
        1, static_cast<long long>(std::ceil((window.x_hi - window.x_lo) / delta - 1e-9)));
    std::unordered_set<long long> occupied;
    for (const auto& p : sample.points) {
      long long bi = static_cast<long long>(std::floor((p[0] - window.t_lo) / delta));
      long long bj = static_cast<long long>(std::floor((p[1] - window.x_lo) / delta));
      bi = std::min(bi, nbi - 1);
      bj = std::min(bj, nbj - 1);
      occupied.insert(bi * 2000003LL + bj);
    }
    const long n = static_cast<long>(occupied.size());
    if (n < 10) continue;  // saturated or empty scale, not informative
    est.counts.emplace_back(delta, n);
    lx.push_back(std::log(1.0 / delta));
    ly.push_back(std::log(static_cast<double>(n)));
  }
  if (est.counts.size() < 4)
    throw std::runtime_error("box counting: degenerate scale range (fewer than 4 usable scales)");
  const LinearFit fit = linear_fit(lx, ly);
  est.slope = fit.slope;
  est.std_error = fit.slope_stderr;
  est.r_squared = fit.r_squared;
  est.delta_min = est.counts.front().first;
  est.delta_max = est.counts.back().first;
  return est;
}

DichotomyReport dichotomy_sweep(const std::vector<DichotomyCase>& cases, int replicas,
                                std::uint64_t seed, int workers) {
  if (replicas < 1) throw std::invalid_argument("dichotomy: need at least one replica");
  DichotomyReport report;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const DichotomyCase& c = cases[ci];
    for (std::size_t k = 1; k < c.epsilon_schedule.size(); ++k)
      if (!(c.epsilon_schedule[k] < c.epsilon_schedule[k - 1]))
        throw std::invalid_argument("dichotomy: epsilon schedule must strictly decrease");

    DichotomyCaseReport cr;
    cr.analytic = GaugeFunction(c.exponent).zero_criterion();

    const RotatedLattice lat = RotatedLattice::cover(c.t_max, c.x_max, c.h);
    std::vector<double> min_norm(static_cast<std::size_t>(replicas), 0.0);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= replicas) return;
        RngStream rng(seed, (static_cast<std::uint64_t>(ci) << 32) + r);
        const NoiseField noise(c.exponent, lat, std::move(rng));
        const SolutionField field(noise);
        double best = std::numeric_limits<double>::infinity();
        const int d = field.dim();
        field.for_each_apex(c.window.t_lo, c.window.t_hi, c.window.x_lo, c.window.x_hi,
                            [&](int, int, double t, double, const double* raw) {
                              if (t <= 0.0) return;
                              double n2 = 0.0;
                              for (int k = 0; k < d; ++k) n2 += raw[k] * raw[k];
                              best = std::min(best, 0.5 * std::sqrt(n2));
                            });
        min_norm[static_cast<std::size_t>(r)] = best;
      }
    };
    std::vector<std::thread> pool;
    const int nw = std::max(1, workers);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (double eps : c.epsilon_schedule) {
      // median-of-means over 8 replica batches: stable excursions of the
      // heavy-tailed fields cannot drag the reported frequency
      const int n_batches = std::min(8, replicas);
      std::vector<double> batch_means;
      long hits_total = 0;
      for (int b = 0; b < n_batches; ++b) {
        const int lo = b * replicas / n_batches;
        const int hi = (b + 1) * replicas / n_batches;
        long hits = 0;
        for (int r = lo; r < hi; ++r)
          if (min_norm[static_cast<std::size_t>(r)] <= eps) ++hits;
        hits_total += hits;
        batch_means.push_back(static_cast<double>(hits) / std::max(1, hi - lo));
      }
      std::sort(batch_means.begin(), batch_means.end());
      const double median =
          n_batches % 2 == 1
              ? batch_means[n_batches / 2]
              : 0.5 * (batch_means[n_batches / 2 - 1] + batch_means[n_batches / 2]);
      const double p = static_cast<double>(hits_total) / replicas;
      DichotomyRow row;
      row.case_index = ci;
      row.epsilon = eps;
      row.hit_frequency = median;
      row.std_error = std::sqrt(p * (1.0 - p) / replicas);
      cr.rows.push_back(row);
    }

    bool all_high = true, decaying = true;
    for (std::size_t k = 0; k < cr.rows.size(); ++k) {
      if (cr.rows[k].hit_frequency < 0.95) all_high = false;
      if (k > 0) {
        const double prev = cr.rows[k - 1].hit_frequency;
        const double cur = cr.rows[k].hit_frequency;
        if (cur > prev / 1.5 + 2.0 / replicas) decaying = false;
      }
    }
    cr.empirical_subcritical = all_high;
    const bool supercritical_profile =
        !cr.rows.empty() && cr.rows.back().hit_frequency < 0.1 && decaying;
    cr.agrees = (cr.analytic == ZeroCriterion::ZerosExist && all_high) ||
                (cr.analytic == ZeroCriterion::NoZeros && supercritical_profile);
    report.cases.push_back(std::move(cr));
  }
  return report;
}

namespace {

// Median over apexes in the window of |u(I,J) - u(I,J+1)|, the natural
// amplitude of the field at lattice resolution. Medians keep stable
// excursions from inflating the threshold.
double median_neighbor_increment(const SolutionField& field, const Window& w) {
  const RotatedLattice& lat = field.lattice();
  const int d = field.dim();
  std::vector<double> diffs;
  for (int I = lat.i0; I <= lat.i1; ++I) {
    for (int J = std::max(lat.j0, -I + 1); J < lat.j1; ++J) {
      const double t = field.t_of(I, J), x = field.x_of(I, J);
      if (t <= w.t_lo || t > w.t_hi || x < w.x_lo || x > w.x_hi) continue;
      const double* a = field.u_raw(I, J);
      const double* b = field.u_raw(I, J + 1);
      double n2 = 0.0;
      for (int k = 0; k < d; ++k) n2 += (a[k] - b[k]) * (a[k] - b[k]);
      diffs.push_back(0.5 * std::sqrt(n2));
    }
  }
  if (diffs.empty()) throw std::invalid_argument("dimension run: empty analysis window");
  std::nth_element(diffs.begin(), diffs.begin() + diffs.size() / 2, diffs.end());
  return diffs[diffs.size() / 2];
}

}  // namespace

DimensionRunResult run_dimension_experiment(const DimensionRunConfig& cfg) {
  if (cfg.replicas < 1) throw std::invalid_argument("dimension run: replicas >= 1");
  const RotatedLattice lat = RotatedLattice::cover(cfg.t_max, cfg.x_max, cfg.h);
  const std::vector<double> scales =
      cfg.scales.empty() ? default_box_scales(cfg.h, cfg.window) : cfg.scales;

  DimensionRunResult res;
  std::vector<DimensionEstimate> estimates(static_cast<std::size_t>(cfg.replicas));
  std::vector<double> epsilons(static_cast<std::size_t>(cfg.replicas), 0.0);
  std::vector<char> usable(static_cast<std::size_t>(cfg.replicas), 0);
  std::atomic<int> next{0};
  std::vector<std::string> errors(static_cast<std::size_t>(cfg.replicas));
  auto worker = [&] {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= cfg.replicas) return;
      try {
        RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
        const NoiseField noise(cfg.exponent, lat, std::move(rng));
        const SolutionField field(noise);
        const double eps =
            cfg.epsilon_factor * median_neighbor_increment(field, cfg.window);
        const ZeroSetSample sample = detect_zeros(field, eps, cfg.window);
        estimates[static_cast<std::size_t>(r)] =
            box_counting_dimension(sample, scales, cfg.window);
        epsilons[static_cast<std::size_t>(r)] = eps;
        usable[static_cast<std::size_t>(r)] = 1;
      } catch (const std::runtime_error&) {
        // a realization can stay away from zero over the whole window (heavy
        // tails); the dimension statement is conditional on non-emptiness,
        // so such replicas are skipped rather than failed
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, cfg.workers); ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw std::invalid_argument("dimension run replica failed: " + e);

  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < cfg.replicas; ++r) {
    if (!usable[static_cast<std::size_t>(r)]) {
      ++res.skipped;
      continue;
    }
    const DimensionEstimate& est = estimates[static_cast<std::size_t>(r)];
    sum += est.slope;
    sum2 += est.slope * est.slope;
    res.per_replica.push_back(est);
    res.epsilons.push_back(epsilons[static_cast<std::size_t>(r)]);
  }
  const int n = static_cast<int>(res.per_replica.size());
  if (n == 0)
    throw std::runtime_error(
        "dimension run: no replica produced a countable zero set in the window");
  res.mean_slope = sum / n;
  if (n > 1) {
    const double var = std::max(0.0, (sum2 - n * res.mean_slope * res.mean_slope) / (n - 1));
    res.slope_stderr = std::sqrt(var / n);
  } else {
    res.slope_stderr = res.per_replica.front().std_error;
  }
  return res;
}

}  // namespace levywave
