#include "magpath/convergence.hpp"

#include <cmath>
#include <limits>

namespace magpath {

double fit_loglog_slope(std::span<const double> x, std::span<const double> y) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() != y.size() || x.size() < 2) return nan;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return nan;
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(x.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return nan;
  return (n * sxy - sx * sy) / denom;
}

double fitted_order(std::span<const double> k, std::span<const double> error) {
  return -fit_loglog_slope(k, error);
}

}  // namespace magpath
