#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "magpath/fields.hpp"

namespace magpath {

/// In-place discrete Fourier transform along one axis of a grid (all
/// orthogonal lines at once). The backward transform is unnormalised:
/// backward(forward(x)) == N_axis * x.
class AxisFft {
 public:
  AxisFft(const Grid& grid, std::size_t axis);
  ~AxisFft();
  AxisFft(AxisFft&&) noexcept;
  AxisFft& operator=(AxisFft&&) noexcept;
  AxisFft(const AxisFft&) = delete;
  AxisFft& operator=(const AxisFft&) = delete;

  std::size_t axis() const noexcept { return axis_; }
  std::size_t size() const noexcept { return size_; }

  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  struct Plans;
  std::unique_ptr<Plans> plans_;
  std::size_t axis_ = 0;
  std::size_t size_ = 0;
};

/// Angular frequencies in FFT order: 2 pi m / L for m = 0..N/2-1, -N/2..-1.
std::vector<double> angular_frequencies(const Axis& axis);

/// Spectral first derivative along `axis` (Nyquist mode dropped).
WaveFunction spectral_derivative(const WaveFunction& psi, std::size_t axis);

}  // namespace magpath
