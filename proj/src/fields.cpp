#include "levywave/fields.hpp"

#include <cmath>
#include <cstring>
#include <ostream>
#include <stdexcept>

#include "levywave/sampling.hpp"

namespace levywave {

std::pair<double, double> rotate(double t, double x) { return {t - x, t + x}; }

std::pair<double, double> rotate_inv(double a, double b) {
  return {0.5 * (b + a), 0.5 * (b - a)};
}

bool light_cone_contains(double t, double x, double s, double y) {
  return s >= 0.0 && s <= t && std::abs(y - x) <= t - s;
}

double cone_area(double t) {
  if (t < 0.0) throw std::invalid_argument("cone_area: t must be nonnegative");
  return t * t;
}

bool region_S_contains(double x0, double t, double x) {
  return t >= std::abs(x - x0);
}

RotatedLattice RotatedLattice::cover(double t_max, double x_max, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("lattice: h must be positive");
  if (!(t_max > 0.0) || x_max < 0.0)
    throw std::invalid_argument("lattice: bad domain bounds");
  // Apexes (t, x), t in [0, t_max], |x| <= x_max map to a, b in
  // [-x_max, t_max + x_max], but their cones reach down to
  // a = -(t + x) >= -(t_max + x_max) (and likewise in b), so the lattice
  // spans the symmetric range. Index ranges are multiples of h so the
  // diagonal a + b = 0 passes through lattice nodes.
  RotatedLattice lat;
  lat.h = h;
  lat.i1 = static_cast<int>(std::ceil((t_max + x_max) / h - 1e-9));
  lat.i0 = -lat.i1;
  lat.j0 = lat.i0;
  lat.j1 = lat.i1;
  return lat;
}

double RotatedLattice::cell_area(int i, int j) const {
  if (i + j < -1) return 0.0;
  return i + j == -1 ? 0.25 * h * h : 0.5 * h * h;
}

double RotatedLattice::quadrant_area(int I, int J) const {
  double area = 0.0;
  for (int i = i0; i < I; ++i)
    for (int j = j0; j < J; ++j) area += cell_area(i, j);
  return area;
}

NoiseField::NoiseField(const LevyExponent& exp, const RotatedLattice& lat, RngStream rng)
    : exp_(exp), lat_(lat), d_(exp.dim()) {
  data_.assign(static_cast<std::size_t>(lat_.ni()) * lat_.nj() * d_, 0.0);
  const double full = 0.5 * lat_.h * lat_.h;
  const double half = 0.25 * lat_.h * lat_.h;
  std::size_t idx = 0;
  for (int i = lat_.i0; i < lat_.i1; ++i) {
    for (int j = lat_.j0; j < lat_.j1; ++j, idx += d_) {
      if (i + j < -1) continue;
      const Eigen::VectorXd inc =
          sample_increment(exp_, i + j == -1 ? half : full, rng);
      for (int k = 0; k < d_; ++k) data_[idx + k] = inc[k];
    }
  }
}

const double* NoiseField::cell(int i, int j) const {
  if (i < lat_.i0 || i >= lat_.i1 || j < lat_.j0 || j >= lat_.j1)
    throw std::out_of_range("noise cell index outside lattice");
  const std::size_t idx =
      (static_cast<std::size_t>(i - lat_.i0) * lat_.nj() + (j - lat_.j0)) * d_;
  return data_.data() + idx;
}

SolutionField::SolutionField(const NoiseField& noise)
    : lat_(noise.lattice()), d_(noise.dim()) {
  const int ni = lat_.ni(), nj = lat_.nj();
  const std::size_t row = static_cast<std::size_t>(nj + 1) * d_;
  node_.assign(static_cast<std::size_t>(ni + 1) * row, 0.0);
  // node(I, J) = node(I-1, J) + running row sum; summation order is fixed
  // (rows ascending, columns ascending) and matched by the brute-force
  // evaluator in the tests.
  std::vector<double> run(static_cast<std::size_t>(d_));
  for (int i = 1; i <= ni; ++i) {
    std::fill(run.begin(), run.end(), 0.0);
    const double* prev = node_.data() + static_cast<std::size_t>(i - 1) * row;
    double* cur = node_.data() + static_cast<std::size_t>(i) * row;
    for (int j = 1; j <= nj; ++j) {
      const double* c = noise.cell(lat_.i0 + i - 1, lat_.j0 + j - 1);
      for (int k = 0; k < d_; ++k) {
        run[k] += c[k];
        cur[static_cast<std::size_t>(j) * d_ + k] =
            prev[static_cast<std::size_t>(j) * d_ + k] + run[k];
      }
    }
  }
}

bool SolutionField::node_valid(int I, int J) const {
  return I >= lat_.i0 && I <= lat_.i1 && J >= lat_.j0 && J <= lat_.j1 && I + J >= 0;
}

const double* SolutionField::u_raw(int I, int J) const {
  if (!node_valid(I, J)) throw std::out_of_range("apex outside lattice coverage");
  const std::size_t row = static_cast<std::size_t>(lat_.nj() + 1) * d_;
  return node_.data() + static_cast<std::size_t>(I - lat_.i0) * row +
         static_cast<std::size_t>(J - lat_.j0) * d_;
}

Eigen::VectorXd SolutionField::u(int I, int J) const {
  const double* p = u_raw(I, J);
  Eigen::VectorXd v(d_);
  for (int k = 0; k < d_; ++k) v[k] = 0.5 * p[k];
  return v;
}

Eigen::VectorXd SolutionField::u_at(double t, double x) const {
  const auto [a, b] = rotate(t, x);
  const double fi = a / lat_.h, fj = b / lat_.h;
  const int I = static_cast<int>(std::lround(fi));
  const int J = static_cast<int>(std::lround(fj));
  if (std::abs(fi - I) > 1e-9 || std::abs(fj - J) > 1e-9)
    throw std::invalid_argument("apex is not lattice aligned");
  return u(I, J);
}

void SolutionField::for_each_apex(
    double t_lo, double t_hi, double x_lo, double x_hi,
    const std::function<void(int, int, double, double, const double*)>& fn) const {
  for (int I = lat_.i0; I <= lat_.i1; ++I) {
    for (int J = std::max(lat_.j0, -I); J <= lat_.j1; ++J) {
      const double t = t_of(I, J), x = x_of(I, J);
      if (t < t_lo || t > t_hi || x < x_lo || x > x_hi) continue;
      fn(I, J, t, x, u_raw(I, J));
    }
  }
}

void dump_solution(const SolutionField& field, const nlohmann::json& header_extra,
                   std::ostream& out) {
  nlohmann::json header = header_extra;
  const RotatedLattice& lat = field.lattice();
  header["h"] = lat.h;
  header["i0"] = lat.i0;
  header["i1"] = lat.i1;
  header["j0"] = lat.j0;
  header["j1"] = lat.j1;
  header["d"] = field.dim();
  const std::string hs = header.dump();
  const char magic[4] = {'L', 'W', 'A', 'V'};
  const std::uint32_t version = 1;
  const std::uint64_t hlen = hs.size();
  out.write(magic, 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&hlen), sizeof hlen);
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  // Row-major u values (0.5 * prefix); invalid apexes written as zero.
  for (int I = lat.i0; I <= lat.i1; ++I) {
    for (int J = lat.j0; J <= lat.j1; ++J) {
      for (int k = 0; k < field.dim(); ++k) {
        const double v = I + J >= 0 ? 0.5 * field.u_raw(I, J)[k] : 0.0;
        out.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
    }
  }
  if (!out) throw std::runtime_error("failed to write solution dump");
}

SheetField::SheetField(const LevyExponent& exp, std::vector<double> spacing,
                       std::vector<int> cells, RngStream rng)
    : spacing_(std::move(spacing)), cells_(std::move(cells)), d_(exp.dim()) {
  const int N = static_cast<int>(spacing_.size());
  if (N == 0 || cells_.size() != spacing_.size())
    throw std::invalid_argument("sheet: spacing/cells mismatch");
  double cell_vol = 1.0;
  for (int k = 0; k < N; ++k) {
    if (!(spacing_[k] > 0.0) || cells_[k] < 1)
      throw std::invalid_argument("sheet: bad grid axis");
    cell_vol *= spacing_[k];
  }
  stride_.assign(N, 0);
  std::size_t total = d_;
  for (int k = N - 1; k >= 0; --k) {
    stride_[k] = total;
    total *= static_cast<std::size_t>(cells_[k] + 1);
  }
  node_.assign(total, 0.0);
  // Place each cell increment at the node just above the cell, then prefix
  // along every axis; L(node) becomes the sum over [0, node].
  std::vector<int> idx(N, 1);
  const std::size_t n_cells_total = [&] {
    std::size_t p = 1;
    for (int k = 0; k < N; ++k) p *= static_cast<std::size_t>(cells_[k]);
    return p;
  }();
  for (std::size_t c = 0; c < n_cells_total; ++c) {
    std::size_t off = 0;
    for (int k = 0; k < N; ++k) off += static_cast<std::size_t>(idx[k]) * stride_[k];
    const Eigen::VectorXd inc = sample_increment(exp, cell_vol, rng);
    for (int k = 0; k < d_; ++k) node_[off + k] = inc[k];
    for (int k = N - 1; k >= 0; --k) {
      if (++idx[k] <= cells_[k]) break;
      idx[k] = 1;
    }
  }
  for (int axis = 0; axis < N; ++axis) {
    const std::size_t s = stride_[axis];
    const std::size_t span = static_cast<std::size_t>(cells_[axis] + 1) * s;
    for (std::size_t base = 0; base < node_.size(); base += span)
      for (std::size_t p = base + s; p < base + span; ++p) node_[p] += node_[p - s];
  }
}

Eigen::VectorXd SheetField::eval(const std::vector<int>& node) const {
  if (static_cast<int>(node.size()) != order())
    throw std::invalid_argument("sheet eval: wrong order");
  std::size_t off = 0;
  for (int k = 0; k < order(); ++k) {
    if (node[k] < 0 || node[k] > cells_[k])
      throw std::out_of_range("sheet eval: node outside grid");
    off += static_cast<std::size_t>(node[k]) * stride_[k];
  }
  Eigen::VectorXd v(d_);
  for (int k = 0; k < d_; ++k) v[k] = node_[off + k];
  return v;
}

Eigen::VectorXd SheetField::eval_at(const std::vector<double>& t) const {
  std::vector<int> node(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double f = t[k] / spacing_[k];
    node[k] = static_cast<int>(std::lround(f));
    if (std::abs(f - node[k]) > 1e-9)
      throw std::invalid_argument("sheet eval: off-grid coordinate");
  }
  return eval(node);
}

AdditiveField::AdditiveField(const LevyExponent& exp, std::vector<double> spacing,
                             std::vector<int> cells, double nu, RngStream rng)
    : spacing_(std::move(spacing)), cells_(std::move(cells)), nu_(nu), d_(exp.dim()) {
  const int N = static_cast<int>(spacing_.size());
  if (N == 0 || cells_.size() != spacing_.size())
    throw std::invalid_argument("additive: spacing/cells mismatch");
  if (!(nu_ > 0.0)) throw std::invalid_argument("additive: nu must be positive");
  path_.resize(N);
  for (int axis = 0; axis < N; ++axis) {
    if (!(spacing_[axis] > 0.0) || cells_[axis] < 1)
      throw std::invalid_argument("additive: bad grid axis");
    auto& p = path_[axis];
    p.assign(static_cast<std::size_t>(cells_[axis] + 1) * d_, 0.0);
    for (int i = 1; i <= cells_[axis]; ++i) {
      const Eigen::VectorXd inc = sample_increment(exp, nu_ * spacing_[axis], rng);
      for (int k = 0; k < d_; ++k)
        p[static_cast<std::size_t>(i) * d_ + k] =
            p[static_cast<std::size_t>(i - 1) * d_ + k] + inc[k];
    }
  }
}

Eigen::VectorXd AdditiveField::eval(const std::vector<int>& node) const {
  if (static_cast<int>(node.size()) != order())
    throw std::invalid_argument("additive eval: wrong order");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d_);
  for (int axis = 0; axis < order(); ++axis) {
    if (node[axis] < 0 || node[axis] > cells_[axis])
      throw std::out_of_range("additive eval: node outside grid");
    const double* p = path_[axis].data() + static_cast<std::size_t>(node[axis]) * d_;
    for (int k = 0; k < d_; ++k) v[k] += p[k];
  }
  return v;
}

Eigen::VectorXd AdditiveField::eval_at(const std::vector<double>& t) const {
  std::vector<int> node(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double f = t[k] / spacing_[k];
    node[k] = static_cast<int>(std::lround(f));
    if (std::abs(f - node[k]) > 1e-9)
      throw std::invalid_argument("additive eval: off-grid coordinate");
  }
  return eval(node);
}

PerturbedField::PerturbedField(SheetField sheet, AdditiveField additive)
    : sheet_(std::move(sheet)), additive_(std::move(additive)) {
  if (sheet_.order() != additive_.order() || sheet_.dim() != additive_.dim())
    throw std::invalid_argument("perturbed field: mismatched inputs");
}

Eigen::VectorXd PerturbedField::eval(const std::vector<int>& node) const {
  return sheet_.eval(node) + additive_.eval(node);
}

Eigen::VectorXd PerturbedField::eval_at(const std::vector<double>& t) const {
  return sheet_.eval_at(t) + additive_.eval_at(t);
}

}  // namespace levywave
