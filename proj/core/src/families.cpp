#include "magpath/families.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace magpath {

namespace {

double squared_distance(std::span<const double> x, const Point& c) {
  double r2 = 0.0;
  for (std::size_t b = 0; b < x.size(); ++b) r2 += (x[b] - c[b]) * (x[b] - c[b]);
  return r2;
}

void require_center(std::size_t dim, const Point& center, const char* what) {
  if (center.size() != dim) throw std::invalid_argument(std::string(what) + ": center dimension");
}

}  // namespace

cplx GaussianPacket::operator()(std::span<const double> x) const {
  const double norm = std::pow(std::numbers::pi * width * width, -0.25 * double(dim()));
  double re = 0.0;
  double im = 0.0;
  for (std::size_t b = 0; b < dim(); ++b) {
    const double d = x[b] - center[b];
    re -= d * d / (2.0 * width * width);
    im += momentum[b] * x[b];
  }
  return norm * std::exp(cplx{re, im});
}

WaveFunction GaussianPacket::sample(const Grid& grid) const {
  if (grid.dim() != dim()) throw std::invalid_argument("GaussianPacket: grid dimension");
  return WaveFunction::sample(grid, [this](std::span<const double> x) { return (*this)(x); });
}

StateSpec GaussianPacket::state() const {
  if (momentum.size() != center.size() || !(width > 0.0))
    throw std::invalid_argument("GaussianPacket: inconsistent parameters");
  StateSpec s;
  s.dim = dim();
  s.evaluator = [packet = *this](std::span<const double> x) { return packet(x); };
  return s;
}

ScalarPotentialSpec free_potential(std::size_t dim) { return ScalarPotentialSpec::zero(dim); }

ScalarPotentialSpec harmonic_potential(std::size_t dim, double strength, const Point& center) {
  require_center(dim, center, "harmonic_potential");
  ScalarPotentialSpec v;
  v.dim = dim;
  v.evaluator = [strength, center](std::span<const double> x) {
    return strength * squared_distance(x, center);
  };
  v.declared_class = "L2_loc + polynomial growth (smooth)";
  return v;
}

ScalarPotentialSpec step_potential(double height, double position) {
  ScalarPotentialSpec v;
  v.dim = 1;
  v.evaluator = [height, position](std::span<const double> x) {
    return x[0] > position ? height : 0.0;
  };
  v.singular_points = {Point{position}};
  v.declared_class = "L^inf";
  return v;
}

ScalarPotentialSpec regularized_coulomb_potential(std::size_t dim, double charge,
                                                  double softening, const Point& center) {
  require_center(dim, center, "regularized_coulomb_potential");
  if (!(softening > 0.0))
    throw std::invalid_argument("regularized_coulomb_potential: softening must be positive");
  ScalarPotentialSpec v;
  v.dim = dim;
  v.evaluator = [charge, softening, center](std::span<const double> x) {
    return -charge / std::sqrt(squared_distance(x, center) + softening * softening);
  };
  v.declared_class = "L^inf";
  return v;
}

ScalarPotentialSpec inverse_power_potential(std::size_t dim, double strength, double power,
                                            const Point& center) {
  require_center(dim, center, "inverse_power_potential");
  ScalarPotentialSpec v;
  v.dim = dim;
  v.evaluator = [strength, power, center](std::span<const double> x) {
    return strength * std::pow(squared_distance(x, center), -0.5 * power);
  };
  v.singular_points = {center};
  v.declared_class = "L2 + L^inf";
  return v;
}

VectorPotentialSpec constant_vector_potential(const Point& value) {
  VectorPotentialSpec a;
  bool zero = true;
  for (double c : value) {
    a.components.push_back([c](std::span<const double>) { return c; });
    zero = zero && c == 0.0;
  }
  a.declared_class = "L^inf";
  a.identically_zero = zero;
  return a;
}

VectorPotentialSpec sinusoidal_vector_potential(std::size_t dim, double amplitude,
                                                double wavenumber) {
  VectorPotentialSpec a;
  for (std::size_t j = 0; j < dim; ++j)
    a.components.push_back([amplitude, wavenumber, j](std::span<const double> x) {
      return amplitude * std::sin(wavenumber * x[j]);
    });
  a.declared_class = "L^inf (smooth)";
  a.identically_zero = amplitude == 0.0;
  return a;
}

VectorPotentialSpec symmetric_gauge_potential(double field) {
  VectorPotentialSpec a;
  a.components = {[field](std::span<const double> x) { return -0.5 * field * x[1]; },
                  [field](std::span<const double> x) { return 0.5 * field * x[0]; }};
  a.declared_class = "L4 + L^inf (locally), linear growth";
  a.identically_zero = field == 0.0;
  return a;
}

VectorPotentialSpec landau_gauge_potential(double field) {
  VectorPotentialSpec a;
  a.components = {[](std::span<const double>) { return 0.0; },
                  [field](std::span<const double> x) { return field * x[0]; }};
  a.declared_class = "L4 + L^inf (locally), linear growth";
  a.identically_zero = field == 0.0;
  return a;
}

VectorPotentialSpec landau_gauge_potential_x(double field) {
  VectorPotentialSpec a;
  a.components = {[field](std::span<const double> x) { return -field * x[1]; },
                  [](std::span<const double>) { return 0.0; }};
  a.declared_class = "L4 + L^inf (locally), linear growth";
  a.identically_zero = field == 0.0;
  return a;
}

}  // namespace magpath
