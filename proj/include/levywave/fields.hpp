#pragma once

#include <Eigen/Dense>
#include <functional>
#include <iosfwd>
#include <nlohmann/json.hpp>
#include <utility>
#include <vector>

#include "levywave/exponent.hpp"
#include "levywave/rng.hpp"

namespace levywave {

// Rotation (t, x) -> (a, b) = (t - x, t + x). Light cones become
// axis-aligned quadrants intersected with {a + b >= 0} in (a, b).
std::pair<double, double> rotate(double t, double x);
std::pair<double, double> rotate_inv(double a, double b);

// Backward light cone C(t, x) = {(s, y): 0 <= s <= t, |y - x| <= t - s}.
bool light_cone_contains(double t, double x, double s, double y);
double cone_area(double t);

// S(x0): the apexes whose cone contains the point (x0, 0), i.e. t >= |x - x0|.
bool region_S_contains(double x0, double t, double x);

// Lattice of side-h cells in rotated coordinates. Cell (i, j) covers
// [i h, (i+1) h] x [j h, (j+1) h] in (a, b). Cells with i + j >= 0 are full
// (original area h^2/2, since the rotation doubles areas); cells with
// i + j = -1 are halved by the diagonal a + b = 0 and carry the upper
// triangle only (original area h^2/4); cells below contribute nothing.
struct RotatedLattice {
  double h = 0.0;
  int i0 = 0, i1 = 0, j0 = 0, j1 = 0;  // cells i in [i0, i1), nodes i in [i0, i1]

  static RotatedLattice cover(double t_max, double x_max, double h);

  int ni() const { return i1 - i0; }
  int nj() const { return j1 - j0; }
  bool cell_valid(int i, int j) const { return i + j >= -1; }
  bool cell_half(int i, int j) const { return i + j == -1; }
  double cell_area(int i, int j) const;  // original-coordinate area

  // Total original-coordinate area of valid cells strictly below node (I, J);
  // equals t^2 for the apex at that node.
  double quadrant_area(int I, int J) const;
};

// One realization of the noise: an independent increment per valid cell.
class NoiseField {
 public:
  NoiseField(const LevyExponent& exp, const RotatedLattice& lat, RngStream rng);

  const RotatedLattice& lattice() const { return lat_; }
  const LevyExponent& exponent() const { return exp_; }
  int dim() const { return d_; }

  // d components; zero for cells below the diagonal row.
  const double* cell(int i, int j) const;

 private:
  LevyExponent exp_;
  RotatedLattice lat_;
  int d_;
  std::vector<double> data_;
};

inline NoiseField simulate_noise(const LevyExponent& exp, const RotatedLattice& lat,
                                 RngStream rng) {
  return NoiseField(exp, lat, std::move(rng));
}

// Mild solution u(t, x) = 1/2 * (sum of noise increments inside C(t, x)),
// evaluated at every lattice-aligned apex via two-dimensional prefix sums.
class SolutionField {
 public:
  explicit SolutionField(const NoiseField& noise);

  const RotatedLattice& lattice() const { return lat_; }
  int dim() const { return d_; }
  double h() const { return lat_.h; }

  bool node_valid(int I, int J) const;  // apex exists (t >= 0)
  double t_of(int I, int J) const { return 0.5 * lat_.h * (I + J); }
  double x_of(int I, int J) const { return 0.5 * lat_.h * (J - I); }

  Eigen::VectorXd u(int I, int J) const;
  const double* u_raw(int I, int J) const;  // d * (prefix sum); u = 0.5 * this

  // Apex at the given original coordinates; throws if off-lattice or
  // outside coverage.
  Eigen::VectorXd u_at(double t, double x) const;

  // Visits every apex with t in [t_lo, t_hi], x in [x_lo, x_hi].
  void for_each_apex(double t_lo, double t_hi, double x_lo, double x_hi,
                     const std::function<void(int, int, double, double,
                                              const double*)>& fn) const;

 private:
  RotatedLattice lat_;
  int d_;
  std::vector<double> node_;  // (ni+1) * (nj+1) * d raw prefix sums
};

inline SolutionField solve_wave(const NoiseField& noise) { return SolutionField(noise); }

void dump_solution(const SolutionField& field, const nlohmann::json& header_extra,
                   std::ostream& out);

// N-parameter Levy sheet L(t) = noise([0, t]) on a rectangular grid.
class SheetField {
 public:
  SheetField(const LevyExponent& exp, std::vector<double> spacing,
             std::vector<int> cells, RngStream rng);

  int order() const { return static_cast<int>(spacing_.size()); }
  int dim() const { return d_; }
  const std::vector<double>& spacing() const { return spacing_; }
  const std::vector<int>& cells() const { return cells_; }

  Eigen::VectorXd eval(const std::vector<int>& node) const;
  Eigen::VectorXd eval_at(const std::vector<double>& t) const;

 private:
  std::vector<double> spacing_;
  std::vector<int> cells_;
  std::vector<std::size_t> stride_;
  int d_;
  std::vector<double> node_;
};

// Additive Levy process X(t) = X_1(t_1) + ... + X_N(t_N); each path carries
// increment exponent nu * dt * Psi.
class AdditiveField {
 public:
  AdditiveField(const LevyExponent& exp, std::vector<double> spacing,
                std::vector<int> cells, double nu, RngStream rng);

  int order() const { return static_cast<int>(spacing_.size()); }
  int dim() const { return d_; }
  double nu() const { return nu_; }

  Eigen::VectorXd eval(const std::vector<int>& node) const;
  Eigen::VectorXd eval_at(const std::vector<double>& t) const;

 private:
  std::vector<double> spacing_;
  std::vector<int> cells_;
  double nu_;
  int d_;
  std::vector<std::vector<double>> path_;  // per axis: (cells+1) * d cumulative
};

// F(t) = L(t) + X(t) with independent inputs.
class PerturbedField {
 public:
  PerturbedField(SheetField sheet, AdditiveField additive);

  Eigen::VectorXd eval(const std::vector<int>& node) const;
  Eigen::VectorXd eval_at(const std::vector<double>& t) const;

 private:
  SheetField sheet_;
  AdditiveField additive_;
};

}  // namespace levywave
