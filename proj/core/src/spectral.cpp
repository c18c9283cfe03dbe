#include "magpath/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace magpath {

namespace {

// FFTW's planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct AxisFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

AxisFft::AxisFft(const Grid& grid, std::size_t axis)
    : plans_(std::make_unique<Plans>()), axis_(axis), size_(grid.size()) {
  if (axis >= grid.dim()) throw std::out_of_range("AxisFft: axis out of range");
  const int n = static_cast<int>(grid.axis(axis).points);
  const int stride = static_cast<int>(grid.stride(axis));
  const int outer = static_cast<int>(grid.size() / (grid.stride(axis) * grid.axis(axis).points));

  fftw_iodim dims{n, stride, stride};
  fftw_iodim howmany[2] = {{outer, n * stride, n * stride}, {stride, 1, 1}};

  std::lock_guard lock(planner_mutex());
  auto* scratch = fftw_alloc_complex(grid.size());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_guru_dft(1, &dims, 2, howmany, scratch, scratch, FFTW_FORWARD, flags);
  plans_->backward =
      fftw_plan_guru_dft(1, &dims, 2, howmany, scratch, scratch, FFTW_BACKWARD, flags);
  fftw_free(scratch);
  if (!plans_->forward || !plans_->backward)
    throw std::runtime_error("AxisFft: FFTW planning failed");
}

AxisFft::~AxisFft() = default;
AxisFft::AxisFft(AxisFft&&) noexcept = default;
AxisFft& AxisFft::operator=(AxisFft&&) noexcept = default;

void AxisFft::forward(std::span<cplx> data) const {
  if (data.size() != size_) throw std::invalid_argument("AxisFft: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->forward, p, p);
}

void AxisFft::backward(std::span<cplx> data) const {
  if (data.size() != size_) throw std::invalid_argument("AxisFft: size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plans_->backward, p, p);
}

std::vector<double> angular_frequencies(const Axis& axis) {
  const std::size_t n = axis.points;
  const double base = 2.0 * std::numbers::pi / axis.length();
  std::vector<double> xi(n);
  for (std::size_t m = 0; m < n; ++m) {
    const auto signed_m =
        m < (n + 1) / 2 ? static_cast<double>(m) : static_cast<double>(m) - static_cast<double>(n);
    xi[m] = base * signed_m;
  }
  return xi;
}

WaveFunction spectral_derivative(const WaveFunction& psi, std::size_t axis) {
  const Grid& g = psi.grid();
  AxisFft fft(g, axis);
  std::vector<cplx> v(psi.values().begin(), psi.values().end());
  fft.forward(v);
  const auto xi = angular_frequencies(g.axis(axis));
  const std::size_t n = g.axis(axis).points;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t m = g.axis_index(i, axis);
    const bool nyquist = n % 2 == 0 && m == n / 2;
    v[i] *= nyquist ? cplx{} : cplx{0.0, xi[m] * inv_n};
  }
  fft.backward(v);
  return WaveFunction(g, std::move(v));
}

}  // namespace magpath
