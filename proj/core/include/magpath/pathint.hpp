#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "magpath/fields.hpp"
#include "magpath/gauge.hpp"

namespace magpath {

/// Exponent of the (4 i pi eps)^{-1/2} factor carried by the k-slice amplitude.
enum class PrefactorConvention {
  /// n k / 2: one (4 i pi eps)^{-n/2} per slice kernel.
  composed,
  /// n (k - 1) / 2, the exponent printed in the closed-form amplitude display.
  displayed,
};

/// How slice gauge increments freeze the coordinates they do not integrate.
enum class GaugeConvention {
  /// Every non-integrated coordinate taken from the earlier point x0.
  frozen,
  /// Coordinates threaded through the axes in operator application order.
  threaded,
};

struct Interval {
  double lo;
  double hi;
  double length() const noexcept { return hi - lo; }
};

/// One time-slice factor of the excised domain: per axis, the outer interval
/// (lo, hi) minus the gaps (w - below, w + above) around every singular point.
class ExcisionRegion {
 public:
  ExcisionRegion(std::span<const Interval> outer, const SingularPointSet& singular,
                 double gap_below, double gap_above);

  std::size_t dim() const noexcept { return intervals_.size(); }
  /// Disjoint, increasing intervals that remain on `axis`.
  std::span<const Interval> intervals(std::size_t axis) const { return intervals_.at(axis); }
  bool contains(std::span<const double> x) const;

 private:
  std::vector<std::vector<Interval>> intervals_;
};

/// Midpoint-rule tensor mesh: each remaining interval of each axis is cut
/// into ceil(length / h) equal cells.
class SliceMesh {
 public:
  SliceMesh(const ExcisionRegion& region, double h);
  /// Cell-centred nodes of a grid, weight = spacing.
  explicit SliceMesh(const Grid& grid);

  std::size_t dim() const noexcept { return nodes_.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t axis_size(std::size_t b) const { return nodes_.at(b).size(); }
  std::span<const double> axis_nodes(std::size_t b) const { return nodes_.at(b); }
  std::span<const double> axis_weights(std::size_t b) const { return weights_.at(b); }

  std::size_t axis_index(std::size_t flat, std::size_t b) const {
    return (flat / strides_[b]) % nodes_[b].size();
  }
  void node(std::size_t flat, std::span<double> out) const;
  double weight(std::size_t flat) const;

 private:
  void finish();

  std::vector<std::vector<double>> nodes_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
};

struct KernelOptions {
  GaugeConvention convention = GaugeConvention::frozen;
  /// Application order used by the threaded convention (first acts first).
  /// Empty means n-1, ..., 0.
  std::vector<std::size_t> axis_order;
  GaugeOptions gauge;
  std::size_t threads = 1;
};

/// out[I] = sum_J w_J K_eps(y_I, x_J) u[J] with the one-slice kernel
/// K_eps(y, x) = (4 i pi eps)^{-n/2} exp(i |y - x|^2 / (4 eps) + i lambda_bar(y, x)).
/// Pairs whose gauge path meets a singular point of `a` are left out.
std::vector<cplx> apply_slice_kernel(const SliceMesh& in, std::span<const cplx> u,
                                     const SliceMesh& out, double eps,
                                     const VectorPotentialSpec& a,
                                     const KernelOptions& opts = {});

/// Exponent i eps sum_j [ |x_{j+1} - x_j|^2 / (4 eps^2) - V(x_{j+1}) + lambda_bar(x_{j+1}, x_j) / eps ].
cplx discrete_action(std::span<const Point> path, double eps, const ScalarPotentialSpec& v,
                     const VectorPotentialSpec& a, const GaugeOptions& opts = {});

/// (4 i pi eps)^{-n/2} exp(i |x1 - x0|^2 / (4 eps) + i lambda_bar(x1, x0)), sqrt(i) = e^{i pi/4}.
cplx slice_kernel(std::span<const double> x1, std::span<const double> x0, double eps,
                  const VectorPotentialSpec& a, const GaugeOptions& opts = {});

/// (4 i pi eps)^{-power}.
cplx kernel_prefactor(double eps, double power);

struct ScheduleStep {
  /// Outer half-width of the box per time-slice index 0..k (or one value for all).
  std::vector<double> outer_radius;
  /// Gap half-width around singular points per time-slice index (or one value for all).
  std::vector<double> gap_radius;
  /// Quadrature cell size; 0 selects the largest size meeting the phase bound.
  double mesh = 0.0;
};

/// Sequence of boxes growing to R^{n(k+1)} and gaps shrinking to points.
struct BoxSchedule {
  std::vector<ScheduleStep> steps;

  /// One step per radius, a single gap radius, automatic mesh.
  static BoxSchedule radii(std::span<const double> outer, double gap);
};

/// Largest phase change per unit length of the kinetic exponent over the boxes of `step`.
double max_phase_rate(const ScheduleStep& step, std::size_t slices, double eps);

struct AmplitudeProblem {
  StateSpec final_state;    // phi, paired at x_k
  StateSpec initial_state;  // psi, at x_0
  ScalarPotentialSpec potential;
  VectorPotentialSpec vector_potential;
  double time = 1.0;
  std::size_t slices = 1;
  /// Centre of every box; empty means the origin.
  Point box_center;
  PrefactorConvention prefactor = PrefactorConvention::composed;
};

struct AmplitudeOptions {
  /// Final value = mean of the last `tail_count` raw estimates.
  std::size_t tail_count = 8;
  /// Relative tail-oscillation threshold for the converged flag.
  double convergence_threshold = 1e-3;
  /// Cap on kernel evaluations (sum over slices of |mesh_j| |mesh_{j+1}|) per step.
  double max_work = 1e8;
  /// Fraction of the phase-resolution bound used for automatic meshes.
  double mesh_safety = 0.9;
  KernelOptions kernel;
};

struct StepEstimate {
  std::size_t step = 0;
  double max_radius = 0.0;
  double min_gap = 0.0;
  double mesh = 0.0;
  double work = 0.0;
  cplx value;
};

struct AmplitudeEstimate {
  std::vector<StepEstimate> steps;
  cplx value;
  double tail_oscillation = 0.0;
  std::size_t tail_count = 0;
  double mesh = 0.0;
  bool converged = false;
};

/// Validates the schedule (monotone radii and gaps, phase bound) for k slices
/// of length eps and returns the mesh used by each step.
std::vector<double> validate_schedule(const BoxSchedule& schedule, std::size_t slices, double eps,
                                      double mesh_safety = 0.9);

/// Nested midpoint Riemann sum of the k-slice integrand over D_k for one step.
StepEstimate excised_riemann_sum(const AmplitudeProblem& problem, const ScheduleStep& step,
                                 double mesh, const AmplitudeOptions& opts = {});

/// Runs every schedule step and tail-averages the raw estimates.
AmplitudeEstimate amplitude_quadrature(const AmplitudeProblem& problem,
                                       const BoxSchedule& schedule,
                                       const AmplitudeOptions& opts = {});

struct AmplitudeErrorReport {
  double abs_error = 0.0;
  double rel_error = 0.0;
  double tail_oscillation = 0.0;
  bool converged = false;
};

AmplitudeErrorReport amplitude_error_report(const AmplitudeEstimate& estimate, cplx reference,
                                            double threshold = 1e-3);

/// L2 distance between one split-step slice (V = 0) and the one-slice kernel
/// integrated against psi on psi's own grid.
double operator_vs_kernel_consistency(const WaveFunction& psi, const VectorPotentialSpec& a,
                                      double eps, const KernelOptions& opts = {});

}  // namespace magpath
