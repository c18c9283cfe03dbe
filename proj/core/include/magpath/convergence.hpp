#pragma once

#include <span>

namespace magpath {

/// Least-squares slope of log(y) against log(x). Needs at least two points
/// with positive coordinates; returns NaN otherwise.
double fit_loglog_slope(std::span<const double> x, std::span<const double> y);

/// Empirical convergence order -d log(error) / d log(k) fitted over a k sweep.
double fitted_order(std::span<const double> k, std::span<const double> error);

}  // namespace magpath
