#pragma once

#include <cstddef>

#include "magpath/scenario.hpp"

namespace magpath {

struct StudyOptions {
  /// Dense-solver matrix dimension cap.
  std::size_t max_dense = 4096;
  std::size_t threads = 1;
};

/// |psi|^2 boundary-layer mass above which a report warns about wrap-around.
inline constexpr double kBoundaryMassWarning = 1e-6;

/// ||F^k psi - e^{-itH} psi||_2 over the scenario's k list, unitarity of every
/// evolution and the fitted convergence order.
Report run_trotter_study(const Scenario& scenario, const StudyOptions& opts = {});

/// Excised path-integral amplitude per k, compared with the closed form
/// (free scenarios), pair_bilinear(phi, F^k psi) and the dense reference.
Report run_amplitude_study(const Scenario& scenario, const StudyOptions& opts = {});

/// Gauge-conjugation residual per axis and the midpoint-discrepancy slope fit.
Report run_gauge_check(const Scenario& scenario, const StudyOptions& opts = {});

}  // namespace magpath
