#include "magpath/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "magpath/errors.hpp"
#include "magpath/quadrature.hpp"
#include "magpath/spectral.hpp"

namespace magpath {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

// Distance from w to the axis-parallel segment {base with x_axis in [lo, hi]}.
double distance_to_segment(std::span<const double> w, std::span<const double> base,
                           std::size_t axis, double lo, double hi) {
  double d2 = 0.0;
  for (std::size_t b = 0; b < base.size(); ++b) {
    const double c = b == axis ? std::clamp(w[b], lo, hi) : base[b];
    d2 += (w[b] - c) * (w[b] - c);
  }
  return std::sqrt(d2);
}

void check_dims(const VectorPotentialSpec& a, std::size_t n, const char* what) {
  if (a.dim() != n)
    throw std::invalid_argument(std::string(what) + ": vector potential has " +
                                std::to_string(a.dim()) + " components for dimension " +
                                std::to_string(n));
}

}  // namespace

LineIntegralResult axis_segment_integral(const VectorPotentialSpec& a, std::size_t axis,
                                         std::span<const double> base, double from, double to,
                                         const GaugeOptions& opts) {
  check_dims(a, base.size(), "axis_segment_integral");
  if (axis >= base.size()) throw std::out_of_range("axis_segment_integral: axis out of range");
  if (a.identically_zero || from == to) return {0.0, 0.0, false};

  const double lo = std::min(from, to);
  const double hi = std::max(from, to);
  for (const auto& w : a.singular_points)
    if (distance_to_segment(w, base, axis, lo, hi) <= opts.singular_clearance)
      return {kNaN, kInf, true};

  Point x(base.begin(), base.end());
  const auto& component = a.components[axis];
  auto integrand = [&](double y) {
    x[axis] = y;
    return component(x);
  };
  const QuadratureResult q =
      integrate_adaptive(integrand, from, to, opts.tolerance, opts.max_intervals);
  if (!q.converged)
    throw QuadratureDivergenceError("line integral of a_" + std::to_string(axis + 1) + " over [" +
                                    std::to_string(from) + ", " + std::to_string(to) +
                                    "] stalled at error " + std::to_string(q.error));
  return {q.value, q.error, false};
}

LineIntegralResult lambda_j(const VectorPotentialSpec& a, std::size_t axis,
                            std::span<const double> x, const GaugeOptions& opts) {
  return axis_segment_integral(a, axis, x, 0.0, x[axis], opts);
}

LineIntegralResult lambda_bar_l(const VectorPotentialSpec& a, std::size_t l,
                                std::span<const double> x1, std::span<const double> x0,
                                const GaugeOptions& opts) {
  if (x1.size() != x0.size()) throw std::invalid_argument("lambda_bar_l: dimension mismatch");
  return axis_segment_integral(a, l, x0, x0[l], x1[l], opts);
}

LineIntegralResult lambda_bar(const VectorPotentialSpec& a, std::span<const double> x1,
                              std::span<const double> x0, const GaugeOptions& opts) {
  LineIntegralResult total;
  for (std::size_t l = 0; l < x0.size(); ++l) {
    const auto part = lambda_bar_l(a, l, x1, x0, opts);
    if (part.crossed_singularity) return {kNaN, kInf, true};
    total.value += part.value;
    total.estimated_error += part.estimated_error;
  }
  return total;
}

LineIntegralResult lambda_bar_threaded(const VectorPotentialSpec& a, std::span<const double> x1,
                                       std::span<const double> x0,
                                       std::span<const std::size_t> application_order,
                                       const GaugeOptions& opts) {
  if (x1.size() != x0.size() || application_order.size() != x0.size())
    throw std::invalid_argument("lambda_bar_threaded: dimension mismatch");
  Point current(x0.begin(), x0.end());
  LineIntegralResult total;
  for (std::size_t l : application_order) {
    const auto part = axis_segment_integral(a, l, current, current[l], x1[l], opts);
    if (part.crossed_singularity) return {kNaN, kInf, true};
    total.value += part.value;
    total.estimated_error += part.estimated_error;
    current[l] = x1[l];
  }
  return total;
}

double midpoint_term(const VectorPotentialSpec& a, std::span<const double> x1,
                     std::span<const double> x0) {
  check_dims(a, x0.size(), "midpoint_term");
  if (a.identically_zero) return 0.0;
  Point mid(x0.size());
  for (std::size_t b = 0; b < mid.size(); ++b) mid[b] = 0.5 * (x1[b] + x0[b]);
  if (distance_to_nearest(a.singular_points, mid) <= kCoincidenceTolerance)
    throw SingularNodeError("midpoint_term: midpoint is a singular point of a");
  double sum = 0.0;
  for (std::size_t b = 0; b < mid.size(); ++b)
    sum += (x1[b] - x0[b]) * evaluate_checked(a, b, mid);
  return sum;
}

double midpoint_discrepancy(const VectorPotentialSpec& a, std::span<const double> x1,
                            std::span<const double> x0, const GaugeOptions& opts) {
  const double mid = midpoint_term(a, x1, x0);
  const auto bar = lambda_bar(a, x1, x0, opts);
  if (bar.crossed_singularity)
    throw SingularNodeError("midpoint_discrepancy: gauge path meets a singular point");
  return std::abs(bar.value - mid);
}

GaugePhase::GaugePhase(const VectorPotentialSpec& a, std::size_t axis, const Grid& grid,
                       const GaugeOptions& opts)
    : axis_(axis), values_(grid.size(), 0.0) {
  check_dims(a, grid.dim(), "GaugePhase");
  if (axis >= grid.dim()) throw std::out_of_range("GaugePhase: axis out of range");
  if (a.identically_zero) return;
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid.node(i, x);
    const auto r = lambda_j(a, axis, x, opts);
    if (r.crossed_singularity)
      throw SingularNodeError("GaugePhase: path from the origin to node " + std::to_string(i) +
                              " meets a singular point of a");
    values_[i] = r.value;
    max_error_ = std::max(max_error_, r.estimated_error);
  }
}

double gauge_conjugation_residual(const VectorPotentialSpec& a, std::size_t axis,
                                  const WaveFunction& psi, const GaugeOptions& opts) {
  const Grid& g = psi.grid();
  const GaugePhase lambda(a, axis, g, opts);
  const auto a_axis = sample_field(a, axis, g);
  const auto phase = lambda.values();

  std::vector<cplx> u(g.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::polar(1.0, -phase[i]) * psi[i];
  const WaveFunction du = spectral_derivative(WaveFunction(g, std::move(u)), axis);
  const WaveFunction dpsi = spectral_derivative(psi, axis);

  const cplx minus_i{0.0, -1.0};
  std::vector<cplx> diff(g.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    const cplx lhs = std::polar(1.0, phase[i]) * (minus_i * du[i]);
    const cplx rhs = minus_i * dpsi[i] - a_axis[i] * psi[i];
    diff[i] = lhs - rhs;
  }
  return l2_norm(WaveFunction(g, std::move(diff)));
}

}  // namespace magpath
