#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace magpath {

using cplx = std::complex<double>;
using Point = std::vector<double>;

/// Real field on R^n. The argument always has the dimension of the owning spec.
using ScalarField = std::function<double(std::span<const double>)>;
/// Complex field on R^n (wave-function evaluators).
using ComplexField = std::function<cplx(std::span<const double>)>;

/// Distance below which a node is considered to sit on a singular point.
inline constexpr double kCoincidenceTolerance = 1e-12;

/// One periodic axis of a cell-centred grid: nodes at lo + (i + 1/2) h, h = (hi - lo) / points.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 2;

  double length() const noexcept { return hi - lo; }
  double spacing() const noexcept { return (hi - lo) / static_cast<double>(points); }
  double node(std::size_t i) const noexcept {
    return lo + (static_cast<double>(i) + 0.5) * spacing();
  }

  friend bool operator==(const Axis&, const Axis&) = default;
};

/// Uniform tensor-product grid on a box in R^n. Flat indices are row-major:
/// axis 0 varies slowest, axis n-1 is contiguous.
class Grid {
 public:
  explicit Grid(std::vector<Axis> axes);

  /// Same bounds and point count on every axis.
  static Grid cube(std::size_t dim, double lo, double hi, std::size_t points);

  std::size_t dim() const noexcept { return axes_.size(); }
  std::size_t size() const noexcept { return size_; }
  const Axis& axis(std::size_t b) const { return axes_.at(b); }
  std::span<const Axis> axes() const noexcept { return axes_; }
  std::size_t stride(std::size_t b) const { return strides_.at(b); }
  double spacing(std::size_t b) const { return axes_.at(b).spacing(); }
  double cell_volume() const noexcept { return cell_volume_; }

  std::size_t axis_index(std::size_t flat, std::size_t b) const {
    return (flat / strides_[b]) % axes_[b].points;
  }
  void node(std::size_t flat, std::span<double> out) const;
  Point node(std::size_t flat) const;
  bool contains(std::span<const double> x) const;

  friend bool operator==(const Grid& a, const Grid& b) { return a.axes_ == b.axes_; }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
};

/// Complex samples of a wave function on a grid. Entries are finite.
class WaveFunction {
 public:
  WaveFunction(Grid grid, std::vector<cplx> values);

  static WaveFunction zeros(const Grid& grid);
  static WaveFunction sample(const Grid& grid, const ComplexField& f);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const cplx> values() const noexcept { return values_; }
  cplx operator[](std::size_t i) const { return values_[i]; }

  WaveFunction scaled(cplx c) const;

 private:
  Grid grid_;
  std::vector<cplx> values_;
};

WaveFunction operator-(const WaveFunction& a, const WaveFunction& b);
WaveFunction operator+(const WaveFunction& a, const WaveFunction& b);

/// Scalar potential V. `declared_class` is recorded, never verified.
struct ScalarPotentialSpec {
  std::size_t dim = 1;
  ScalarField evaluator;
  std::vector<Point> singular_points;
  std::string declared_class;
  bool identically_zero = false;

  static ScalarPotentialSpec zero(std::size_t dim);
};

/// Vector potential a = (a_1, ..., a_n); one evaluator per axis.
struct VectorPotentialSpec {
  std::vector<ScalarField> components;
  std::vector<Point> singular_points;
  std::string declared_class;
  bool identically_zero = false;

  std::size_t dim() const noexcept { return components.size(); }
  static VectorPotentialSpec zero(std::size_t dim);
};

/// Continuum wave function (phi or psi of the amplitude) with its singular points.
struct StateSpec {
  std::size_t dim = 1;
  ComplexField evaluator;
  std::vector<Point> singular_points;
};

enum class FieldRole : unsigned {
  final_state = 1u << 0,      // phi
  initial_state = 1u << 1,    // psi
  scalar_potential = 1u << 2,
  vector_potential = 1u << 3,
};

struct SingularPoint {
  Point location;
  unsigned roles = 0;

  bool has(FieldRole r) const noexcept { return (roles & static_cast<unsigned>(r)) != 0; }
  std::size_t role_count() const noexcept;
};

/// Deduplicated union of the singular/discontinuous points of phi, psi, V and a.
class SingularPointSet {
 public:
  explicit SingularPointSet(std::size_t dim) : dim_(dim) {}

  void add(std::span<const double> w, FieldRole role, double tolerance = kCoincidenceTolerance);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::span<const SingularPoint> points() const noexcept { return points_; }
  const SingularPoint& operator[](std::size_t i) const { return points_[i]; }

  bool inside(std::size_t i, const Grid& grid) const;
  /// Euclidean distance from x to the closest registered point (+inf when empty).
  double distance(std::span<const double> x) const;

 private:
  std::size_t dim_;
  std::vector<SingularPoint> points_;
};

SingularPointSet collect_singularities(const StateSpec& phi, const StateSpec& psi,
                                       const ScalarPotentialSpec& v,
                                       const VectorPotentialSpec& a);

/// Euclidean distance from x to the nearest point of `points` (+inf when empty).
double distance_to_nearest(std::span<const Point> points, std::span<const double> x);

/// Evaluates V at x after checking the singular registry and finiteness.
double evaluate_checked(const ScalarPotentialSpec& v, std::span<const double> x);
/// Same for component `j` of a.
double evaluate_checked(const VectorPotentialSpec& a, std::size_t j, std::span<const double> x);

std::vector<double> sample_field(const ScalarPotentialSpec& v, const Grid& grid);
std::vector<double> sample_field(const VectorPotentialSpec& a, std::size_t component,
                                 const Grid& grid);

/// Riemann sum of phi * psi over the grid, without conjugation.
cplx pair_bilinear(const WaveFunction& phi, const WaveFunction& psi);
/// Conjugate-linear in the first argument; used for norms and projections.
cplx inner_product(const WaveFunction& phi, const WaveFunction& psi);
double l2_norm(const WaveFunction& psi);
double l2_distance(const WaveFunction& a, const WaveFunction& b);

/// |psi|^2 mass carried by cells on the boundary layer of the box.
double boundary_mass(const WaveFunction& psi);

}  // namespace magpath
