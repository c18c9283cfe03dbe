#include "magpath/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "magpath/errors.hpp"

namespace magpath {

namespace {

std::string format_point(std::span<const double> x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}

bool all_finite(std::span<const cplx> v) {
  return std::all_of(v.begin(), v.end(), [](cplx z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

void require_same_grid(const WaveFunction& a, const WaveFunction& b, const char* what) {
  if (!(a.grid() == b.grid())) throw GridMismatchError(std::string(what) + ": grids differ");
}

}  // namespace

Grid::Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw std::invalid_argument("Grid: dimension must be positive");
  strides_.assign(axes_.size(), 1);
  size_ = 1;
  cell_volume_ = 1.0;
  for (std::size_t b = axes_.size(); b-- > 0;) {
    const Axis& ax = axes_[b];
    if (!(ax.hi > ax.lo) || !std::isfinite(ax.lo) || !std::isfinite(ax.hi))
      throw std::invalid_argument("Grid: axis " + std::to_string(b) + " needs finite hi > lo");
    if (ax.points < 2)
      throw std::invalid_argument("Grid: axis " + std::to_string(b) + " needs at least 2 points");
    strides_[b] = size_;
    if (size_ > std::numeric_limits<std::size_t>::max() / ax.points)
      throw std::overflow_error("Grid: total point count overflows");
    size_ *= ax.points;
    cell_volume_ *= ax.spacing();
  }
}

Grid Grid::cube(std::size_t dim, double lo, double hi, std::size_t points) {
  return Grid(std::vector<Axis>(dim, Axis{lo, hi, points}));
}

void Grid::node(std::size_t flat, std::span<double> out) const {
  for (std::size_t b = 0; b < axes_.size(); ++b) out[b] = axes_[b].node(axis_index(flat, b));
}

Point Grid::node(std::size_t flat) const {
  Point x(axes_.size());
  node(flat, x);
  return x;
}

bool Grid::contains(std::span<const double> x) const {
  for (std::size_t b = 0; b < axes_.size(); ++b)
    if (x[b] < axes_[b].lo || x[b] > axes_[b].hi) return false;
  return true;
}

WaveFunction::WaveFunction(Grid grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw GridMismatchError("WaveFunction: " + std::to_string(values_.size()) +
                            " values for a grid of " + std::to_string(grid_.size()) + " nodes");
  if (!all_finite(values_)) throw NonFiniteError("WaveFunction: non-finite sample");
}

WaveFunction WaveFunction::zeros(const Grid& grid) {
  return WaveFunction(grid, std::vector<cplx>(grid.size()));
}

WaveFunction WaveFunction::sample(const Grid& grid, const ComplexField& f) {
  std::vector<cplx> v(grid.size());
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    v[i] = f(x);
  }
  return WaveFunction(grid, std::move(v));
}

WaveFunction WaveFunction::scaled(cplx c) const {
  std::vector<cplx> v(values_);
  for (auto& z : v) z *= c;
  return WaveFunction(grid_, std::move(v));
}

WaveFunction operator-(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b, "operator-");
  std::vector<cplx> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] - b[i];
  return WaveFunction(a.grid(), std::move(v));
}

WaveFunction operator+(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b, "operator+");
  std::vector<cplx> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a[i] + b[i];
  return WaveFunction(a.grid(), std::move(v));
}

ScalarPotentialSpec ScalarPotentialSpec::zero(std::size_t dim) {
  ScalarPotentialSpec v;
  v.dim = dim;
  v.evaluator = [](std::span<const double>) { return 0.0; };
  v.declared_class = "zero";
  v.identically_zero = true;
  return v;
}

VectorPotentialSpec VectorPotentialSpec::zero(std::size_t dim) {
  VectorPotentialSpec a;
  a.components.assign(dim, [](std::span<const double>) { return 0.0; });
  a.declared_class = "zero";
  a.identically_zero = true;
  return a;
}

std::size_t SingularPoint::role_count() const noexcept {
  std::size_t c = 0;
  for (unsigned r = roles; r; r &= r - 1) ++c;
  return c;
}

void SingularPointSet::add(std::span<const double> w, FieldRole role, double tolerance) {
  if (w.size() != dim_)
    throw std::invalid_argument("SingularPointSet: point " + format_point(w) +
                                " has wrong dimension");
  for (auto& p : points_) {
    double d2 = 0.0;
    for (std::size_t b = 0; b < dim_; ++b) d2 += (p.location[b] - w[b]) * (p.location[b] - w[b]);
    if (std::sqrt(d2) <= tolerance) {
      p.roles |= static_cast<unsigned>(role);
      return;
    }
  }
  points_.push_back(SingularPoint{Point(w.begin(), w.end()), static_cast<unsigned>(role)});
}

bool SingularPointSet::inside(std::size_t i, const Grid& grid) const {
  return grid.contains(points_.at(i).location);
}

double SingularPointSet::distance(std::span<const double> x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : points_) {
    double d2 = 0.0;
    for (std::size_t b = 0; b < dim_; ++b) d2 += (p.location[b] - x[b]) * (p.location[b] - x[b]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

SingularPointSet collect_singularities(const StateSpec& phi, const StateSpec& psi,
                                       const ScalarPotentialSpec& v,
                                       const VectorPotentialSpec& a) {
  SingularPointSet set(v.dim);
  for (const auto& w : phi.singular_points) set.add(w, FieldRole::final_state);
  for (const auto& w : psi.singular_points) set.add(w, FieldRole::initial_state);
  for (const auto& w : v.singular_points) set.add(w, FieldRole::scalar_potential);
  for (const auto& w : a.singular_points) set.add(w, FieldRole::vector_potential);
  return set;
}

double distance_to_nearest(std::span<const Point> points, std::span<const double> x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& w : points) {
    double d2 = 0.0;
    for (std::size_t b = 0; b < x.size(); ++b) d2 += (w[b] - x[b]) * (w[b] - x[b]);
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

double evaluate_checked(const ScalarPotentialSpec& v, std::span<const double> x) {
  if (v.identically_zero) return 0.0;
  if (distance_to_nearest(v.singular_points, x) <= kCoincidenceTolerance)
    throw SingularNodeError("scalar potential: node " + format_point(x) +
                            " coincides with a singular point");
  const double value = v.evaluator(x);
  if (!std::isfinite(value))
    throw NonFiniteError("scalar potential: non-finite value at " + format_point(x));
  return value;
}

double evaluate_checked(const VectorPotentialSpec& a, std::size_t j, std::span<const double> x) {
  if (a.identically_zero) return 0.0;
  if (distance_to_nearest(a.singular_points, x) <= kCoincidenceTolerance)
    throw SingularNodeError("vector potential: node " + format_point(x) +
                            " coincides with a singular point");
  const double value = a.components.at(j)(x);
  if (!std::isfinite(value))
    throw NonFiniteError("vector potential component " + std::to_string(j) +
                         ": non-finite value at " + format_point(x));
  return value;
}

std::vector<double> sample_field(const ScalarPotentialSpec& v, const Grid& grid) {
  if (v.dim != grid.dim()) throw GridMismatchError("sample_field: potential dimension mismatch");
  std::vector<double> out(grid.size());
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    out[i] = evaluate_checked(v, x);
  }
  return out;
}

std::vector<double> sample_field(const VectorPotentialSpec& a, std::size_t component,
                                 const Grid& grid) {
  if (a.dim() != grid.dim())
    throw GridMismatchError("sample_field: vector potential dimension mismatch");
  std::vector<double> out(grid.size());
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    out[i] = evaluate_checked(a, component, x);
  }
  return out;
}

cplx pair_bilinear(const WaveFunction& phi, const WaveFunction& psi) {
  require_same_grid(phi, psi, "pair_bilinear");
  cplx sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += phi[i] * psi[i];
  return sum * phi.grid().cell_volume();
}

cplx inner_product(const WaveFunction& phi, const WaveFunction& psi) {
  require_same_grid(phi, psi, "inner_product");
  cplx sum = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) sum += std::conj(phi[i]) * psi[i];
  return sum * phi.grid().cell_volume();
}

double l2_norm(const WaveFunction& psi) {
  double sum = 0.0;
  for (cplx z : psi.values()) sum += std::norm(z);
  return std::sqrt(sum * psi.grid().cell_volume());
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  require_same_grid(a, b, "l2_distance");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum * a.grid().cell_volume());
}

double boundary_mass(const WaveFunction& psi) {
  const Grid& g = psi.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t b = 0; b < g.dim(); ++b) {
      const std::size_t k = g.axis_index(i, b);
      if (k == 0 || k + 1 == g.axis(b).points) {
        sum += std::norm(psi[i]);
        break;
      }
    }
  }
  return sum * g.cell_volume();
}

}  // namespace magpath
