#pragma once

#include <cstddef>
#include <span>

#include "magpath/fields.hpp"

namespace magpath {

/// Separable Gaussian packet
///   prod_b (pi sigma^2)^{-1/4} exp(-(x_b - c_b)^2 / (2 sigma^2) + i p_b x_b),
/// unit L2 norm on R^n.
struct GaussianPacket {
  Point center;
  double width = 1.0;
  Point momentum;

  std::size_t dim() const noexcept { return center.size(); }
  cplx operator()(std::span<const double> x) const;
  WaveFunction sample(const Grid& grid) const;
  StateSpec state() const;
};

// Scalar potential families.
ScalarPotentialSpec free_potential(std::size_t dim);
/// V = strength * |x - center|^2.
ScalarPotentialSpec harmonic_potential(std::size_t dim, double strength, const Point& center);
/// 1D step: V = height for x > position, 0 otherwise. The jump is registered as singular.
ScalarPotentialSpec step_potential(double height, double position);
/// V = -charge / sqrt(|x - center|^2 + softening^2); smooth for softening > 0.
ScalarPotentialSpec regularized_coulomb_potential(std::size_t dim, double charge,
                                                  double softening, const Point& center);
/// V = strength * |x - center|^{-power}, singular at center.
ScalarPotentialSpec inverse_power_potential(std::size_t dim, double strength, double power,
                                            const Point& center);

// Vector potential families.
VectorPotentialSpec constant_vector_potential(const Point& value);
/// a_j = amplitude * sin(wavenumber * x_j) on every axis.
VectorPotentialSpec sinusoidal_vector_potential(std::size_t dim, double amplitude,
                                                double wavenumber);
/// Uniform field B in the plane, symmetric gauge a = (B/2)(-x_2, x_1).
VectorPotentialSpec symmetric_gauge_potential(double field);
/// Uniform field B in the plane, Landau gauge a = (0, B x_1).
VectorPotentialSpec landau_gauge_potential(double field);
/// Uniform field B in the plane, Landau gauge a = (-B x_2, 0).
VectorPotentialSpec landau_gauge_potential_x(double field);

}  // namespace magpath
