#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "magpath/fields.hpp"
#include "magpath/gauge.hpp"
#include "magpath/reference.hpp"
#include "magpath/spectral.hpp"

namespace magpath {

/// Total time t split into k equal slices of length t / k.
class TimeSlicing {
 public:
  TimeSlicing(double total_time, std::size_t slices);

  double total_time() const noexcept { return total_; }
  std::size_t slices() const noexcept { return slices_; }
  double step() const noexcept { return step_; }

 private:
  double total_;
  std::size_t slices_;
  double step_;
};

struct SliceOptions {
  /// Axes in application order (first entry acts first on the state). Empty
  /// means the default n-1, ..., 0: the last axis acts first, axis 0 last.
  std::vector<std::size_t> axis_order;
  GaugeOptions gauge;
};

/// Default application order n-1, ..., 0.
std::vector<std::size_t> default_axis_order(std::size_t dim);

/// exp(-i eps H_0^l) along one axis, H_0^l = -d_l^2, applied spectrally.
WaveFunction free_propagate_axis(const WaveFunction& psi, std::size_t axis, double eps);

/// One gauge-split time slice
///   F(eps) = e^{-i eps V} prod_l e^{i lambda_l} e^{-i eps H_0^l} e^{-i lambda_l}
/// with all phase tables precomputed on the grid.
class SliceOperator {
 public:
  SliceOperator(const Grid& grid, const ScalarPotentialSpec& v, const VectorPotentialSpec& a,
                const TimeSlicing& slicing, const SliceOptions& opts = {});

  const Grid& grid() const noexcept { return grid_; }
  const TimeSlicing& slicing() const noexcept { return slicing_; }
  std::span<const std::size_t> axis_order() const noexcept { return order_; }

  std::span<const cplx> potential_phase() const noexcept { return potential_phase_; }
  /// e^{i lambda_l} on every node.
  std::span<const cplx> gauge_phase(std::size_t axis) const { return gauge_phase_.at(axis); }
  /// e^{-i eps xi^2} in FFT order along `axis`.
  std::span<const cplx> kinetic_multiplier(std::size_t axis) const {
    return kinetic_.at(axis);
  }

  /// One application of F(eps).
  WaveFunction apply(const WaveFunction& psi) const;
  /// F(eps)^k psi.
  WaveFunction evolve(const WaveFunction& psi) const;
  /// F(eps)^count psi for an arbitrary repetition count.
  WaveFunction evolve(const WaveFunction& psi, std::size_t count) const;

 private:
  void apply_in_place(std::vector<cplx>& v) const;

  Grid grid_;
  TimeSlicing slicing_;
  std::vector<std::size_t> order_;
  std::vector<cplx> potential_phase_;
  std::vector<std::vector<cplx>> gauge_phase_;
  std::vector<std::vector<cplx>> kinetic_;
  std::vector<AxisFft> fft_;
  bool has_potential_ = false;
  bool has_gauge_ = false;
};

/// || (F(eps) psi - psi) / eps + i H psi ||_2 for the operator's eps and the
/// dense Hamiltonian h.
double chernoff_derivative_residual(const WaveFunction& psi, const SliceOperator& op,
                                    const DiscretizedHamiltonian& h);

}  // namespace magpath
