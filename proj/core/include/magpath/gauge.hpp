#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magpath/fields.hpp"

namespace magpath {

struct GaugeOptions {
  /// Absolute tolerance of every line integral.
  double tolerance = 1e-10;
  /// Paths passing closer than this to a registered singular point are not integrated.
  double singular_clearance = 1e-9;
  std::size_t max_intervals = 4000;
};

struct LineIntegralResult {
  double value = 0.0;
  double estimated_error = 0.0;
  bool crossed_singularity = false;
};

/// Integral of a_axis along the axis-parallel segment from `from` to `to`,
/// with every other coordinate frozen at `base`. Throws
/// QuadratureDivergenceError when the path is regular but the adaptive rule
/// misses the tolerance; a path that meets a singular point returns
/// crossed_singularity with a NaN value instead.
LineIntegralResult axis_segment_integral(const VectorPotentialSpec& a, std::size_t axis,
                                         std::span<const double> base, double from, double to,
                                         const GaugeOptions& opts = {});

/// Gauge phase lambda_j(x) = int_0^{x_j} a_j(x_1, .., y, .., x_n) dy. Axes are 0-based.
LineIntegralResult lambda_j(const VectorPotentialSpec& a, std::size_t axis,
                            std::span<const double> x, const GaugeOptions& opts = {});

/// Slice increment for one axis: int_{x0_l}^{x1_l} a_l dy with all other
/// coordinates frozen at x0.
LineIntegralResult lambda_bar_l(const VectorPotentialSpec& a, std::size_t l,
                                std::span<const double> x1, std::span<const double> x0,
                                const GaugeOptions& opts = {});

/// Sum of lambda_bar_l over all axes (frozen-coordinate convention).
LineIntegralResult lambda_bar(const VectorPotentialSpec& a, std::span<const double> x1,
                              std::span<const double> x0, const GaugeOptions& opts = {});

/// Same sum, but with coordinates threaded through the axes in `application_order`
/// (first entry applied first), the way the operator product moves a point:
/// each axis segment starts from the coordinates already updated by the
/// previously applied axes.
LineIntegralResult lambda_bar_threaded(const VectorPotentialSpec& a, std::span<const double> x1,
                                       std::span<const double> x0,
                                       std::span<const std::size_t> application_order,
                                       const GaugeOptions& opts = {});

/// (x1 - x0) . a((x1 + x0) / 2), the midpoint form of the gauge term.
double midpoint_term(const VectorPotentialSpec& a, std::span<const double> x1,
                     std::span<const double> x0);

/// |lambda_bar(x1, x0) - midpoint_term(x1, x0)|. SingularNodeError when the
/// midpoint is a registered singular point.
double midpoint_discrepancy(const VectorPotentialSpec& a, std::span<const double> x1,
                            std::span<const double> x0, const GaugeOptions& opts = {});

/// lambda_j sampled on every node of a grid. Immutable once built.
class GaugePhase {
 public:
  GaugePhase(const VectorPotentialSpec& a, std::size_t axis, const Grid& grid,
             const GaugeOptions& opts = {});

  std::size_t axis() const noexcept { return axis_; }
  std::span<const double> values() const noexcept { return values_; }
  double max_error() const noexcept { return max_error_; }

 private:
  std::size_t axis_;
  std::vector<double> values_;
  double max_error_ = 0.0;
};

/// L2 norm of e^{i lambda_j} (-i d_j)(e^{-i lambda_j} psi) - (-i d_j - a_j) psi,
/// with spectral differentiation on psi's grid.
double gauge_conjugation_residual(const VectorPotentialSpec& a, std::size_t axis,
                                  const WaveFunction& psi, const GaugeOptions& opts = {});

}  // namespace magpath
