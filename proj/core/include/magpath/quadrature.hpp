#pragma once

#include <cstddef>
#include <functional>

namespace magpath {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error, >= 0
  std::size_t evaluations = 0;
  bool converged = true;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b] with an
/// absolute error target. The interval with the largest error estimate is
/// bisected until the summed estimate drops below `abs_tol` or
/// `max_intervals` is reached. b < a integrates with the orientation sign.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double abs_tol = 1e-10, std::size_t max_intervals = 4000);

}  // namespace magpath
