#include "magpath/splitstep.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "magpath/errors.hpp"

namespace magpath {

namespace {

std::vector<cplx> kinetic_table(const Axis& axis, double eps) {
  const auto xi = angular_frequencies(axis);
  std::vector<cplx> m(xi.size());
  for (std::size_t q = 0; q < xi.size(); ++q) m[q] = std::polar(1.0, -eps * xi[q] * xi[q]);
  return m;
}

// Multiplies by factor[m] / N along `axis`, folding in the inverse-FFT normalisation.
void multiply_along_axis(std::vector<cplx>& v, const Grid& g, std::size_t axis,
                         std::span<const cplx> factor) {
  const double inv_n = 1.0 / static_cast<double>(g.axis(axis).points);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= factor[g.axis_index(i, axis)] * inv_n;
}

}  // namespace

TimeSlicing::TimeSlicing(double total_time, std::size_t slices)
    : total_(total_time), slices_(slices), step_(0.0) {
  if (!(total_time > 0.0) || !std::isfinite(total_time))
    throw std::invalid_argument("TimeSlicing: total time must be positive and finite");
  if (slices == 0) throw std::invalid_argument("TimeSlicing: slice count must be positive");
  step_ = total_ / static_cast<double>(slices_);
}

std::vector<std::size_t> default_axis_order(std::size_t dim) {
  std::vector<std::size_t> order(dim);
  std::iota(order.rbegin(), order.rend(), std::size_t{0});
  return order;
}

WaveFunction free_propagate_axis(const WaveFunction& psi, std::size_t axis, double eps) {
  if (eps < 0.0) throw std::invalid_argument("free_propagate_axis: eps must be non-negative");
  if (eps == 0.0) return psi;
  const Grid& g = psi.grid();
  const AxisFft fft(g, axis);
  const auto mult = kinetic_table(g.axis(axis), eps);
  std::vector<cplx> v(psi.values().begin(), psi.values().end());
  fft.forward(v);
  multiply_along_axis(v, g, axis, mult);
  fft.backward(v);
  return WaveFunction(g, std::move(v));
}

SliceOperator::SliceOperator(const Grid& grid, const ScalarPotentialSpec& v,
                             const VectorPotentialSpec& a, const TimeSlicing& slicing,
                             const SliceOptions& opts)
    : grid_(grid), slicing_(slicing) {
  const std::size_t n = grid.dim();
  if (v.dim != n || a.dim() != n)
    throw GridMismatchError("SliceOperator: field dimension does not match grid");

  order_ = opts.axis_order.empty() ? default_axis_order(n) : opts.axis_order;
  {
    auto sorted = order_;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> identity(n);
    std::iota(identity.begin(), identity.end(), std::size_t{0});
    if (sorted != identity)
      throw std::invalid_argument("SliceOperator: axis order must be a permutation of the axes");
  }

  const double eps = slicing.step();
  has_potential_ = !v.identically_zero;
  if (has_potential_) {
    const auto vs = sample_field(v, grid);
    potential_phase_.resize(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) potential_phase_[i] = std::polar(1.0, -eps * vs[i]);
  } else {
    potential_phase_.assign(grid.size(), cplx{1.0, 0.0});
  }

  has_gauge_ = !a.identically_zero;
  gauge_phase_.resize(n);
  kinetic_.resize(n);
  fft_.reserve(n);
  for (std::size_t l = 0; l < n; ++l) {
    if (has_gauge_) {
      const GaugePhase lambda(a, l, grid, opts.gauge);
      const auto values = lambda.values();
      gauge_phase_[l].resize(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) gauge_phase_[l][i] = std::polar(1.0, values[i]);
    } else {
      gauge_phase_[l].assign(grid.size(), cplx{1.0, 0.0});
    }
    kinetic_[l] = kinetic_table(grid.axis(l), eps);
    fft_.emplace_back(grid, l);
  }
}

void SliceOperator::apply_in_place(std::vector<cplx>& v) const {
  for (std::size_t l : order_) {
    const auto& phase = gauge_phase_[l];
    if (has_gauge_)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::conj(phase[i]);
    fft_[l].forward(v);
    multiply_along_axis(v, grid_, l, kinetic_[l]);
    fft_[l].backward(v);
    if (has_gauge_)
      for (std::size_t i = 0; i < v.size(); ++i) v[i] *= phase[i];
  }
  if (has_potential_)
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= potential_phase_[i];
}

WaveFunction SliceOperator::apply(const WaveFunction& psi) const { return evolve(psi, 1); }

WaveFunction SliceOperator::evolve(const WaveFunction& psi) const {
  return evolve(psi, slicing_.slices());
}

WaveFunction SliceOperator::evolve(const WaveFunction& psi, std::size_t count) const {
  if (!(psi.grid() == grid_)) throw GridMismatchError("SliceOperator: state lives on another grid");
  std::vector<cplx> v(psi.values().begin(), psi.values().end());
  for (std::size_t s = 0; s < count; ++s) apply_in_place(v);
  return WaveFunction(grid_, std::move(v));
}

double chernoff_derivative_residual(const WaveFunction& psi, const SliceOperator& op,
                                    const DiscretizedHamiltonian& h) {
  const double eps = op.slicing().step();
  const WaveFunction fpsi = op.apply(psi);
  const WaveFunction hpsi = h.apply(psi);
  std::vector<cplx> r(psi.size());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] = (fpsi[i] - psi[i]) / eps + cplx{0.0, 1.0} * hpsi[i];
  return l2_norm(WaveFunction(psi.grid(), std::move(r)));
}

}  // namespace magpath
