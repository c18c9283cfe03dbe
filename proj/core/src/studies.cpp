#include "magpath/studies.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "magpath/convergence.hpp"
#include "magpath/errors.hpp"
#include "magpath/gauge.hpp"
#include "magpath/pathint.hpp"
#include "magpath/reference.hpp"
#include "magpath/splitstep.hpp"

namespace magpath {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ReportRow row(const Scenario& s, std::string quantity, std::string k, double value,
              double reference, std::string oracle) {
  const double abs_err = std::abs(value - reference);
  const double rel_err = reference != 0.0 ? abs_err / std::abs(reference) : kNaN;
  return {s.name, std::move(quantity), std::move(k), value, reference, abs_err, rel_err,
          std::move(oracle)};
}

// Real and imaginary rows for a complex value; errors are those of the complex number.
void complex_rows(Report& r, const Scenario& s, const std::string& quantity, const std::string& k,
                  cplx value, cplx reference, const std::string& oracle) {
  const double abs_err = std::abs(value - reference);
  const double rel_err = std::abs(reference) > 0.0 ? abs_err / std::abs(reference) : kNaN;
  r.rows.push_back({s.name, quantity + "_re", k, value.real(), reference.real(), abs_err, rel_err, oracle});
  r.rows.push_back({s.name, quantity + "_im", k, value.imag(), reference.imag(), abs_err, rel_err, oracle});
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void warn_boundary(Report& r, const WaveFunction& psi, const std::string& what) {
  const double mass = boundary_mass(psi);
  if (mass > kBoundaryMassWarning)
    r.warnings.push_back(what + ": boundary-cell mass " + std::to_string(mass) +
                         " exceeds 1e-6; periodic wrap-around may pollute results");
}

std::string k_label(std::size_t k) { return std::to_string(k); }

}  // namespace

Report run_trotter_study(const Scenario& scenario, const StudyOptions& opts) {
  const Stopwatch clock;
  Report r;
  r.scenario = scenario.name;
  const Grid grid = scenario.grid.make();
  const auto v = scenario.make_potential();
  const auto a = scenario.make_vector_potential();
  const WaveFunction psi = scenario.initial_state.sample(grid);
  warn_boundary(r, psi, "initial state");
  const double norm0 = l2_norm(psi);

  const auto h = assemble_hamiltonian(grid, a, v, {scenario.stencil, opts.max_dense});
  const HamiltonianEigensystem eig(h);
  const WaveFunction exact = expm_evolve(eig, psi, scenario.time);
  warn_boundary(r, exact, "reference state at t");
  r.diagnostics["trotter.stencil"] = to_string(scenario.stencil);
  r.diagnostics["trotter.hermiticity_defect"] = num(h.hermiticity_defect());

  std::vector<double> ks, errs;
  double unitarity = 0.0;
  for (std::size_t k : scenario.slices) {
    try {
      const SliceOperator op(grid, v, a, TimeSlicing(scenario.time, k));
      const WaveFunction out = op.evolve(psi);
      const double err = l2_distance(out, exact);
      r.rows.push_back(row(scenario, "trotter_error", k_label(k), err, 0.0, "dense"));
      r.rows.back().rel_error = err / l2_norm(exact);
      const double norm = l2_norm(out);
      r.rows.push_back(row(scenario, "norm", k_label(k), norm, norm0, "symbolic"));
      unitarity = std::max(unitarity, std::abs(norm - norm0) / (double(k) * 1e-12));
      ks.push_back(double(k));
      errs.push_back(err);
    } catch (const Error& e) {
      r.warnings.push_back("k = " + k_label(k) + ": " + e.what());
    }
  }

  bool monotone = errs.size() >= 2;
  double min_ratio = kNaN, max_ratio = kNaN;
  for (std::size_t i = 1; i < errs.size(); ++i) {
    monotone = monotone && errs[i] < errs[i - 1];
    const double ratio = errs[i - 1] / errs[i];
    min_ratio = i == 1 ? ratio : std::min(min_ratio, ratio);
    max_ratio = i == 1 ? ratio : std::max(max_ratio, ratio);
  }
  const double order = errs.size() >= 2 ? fitted_order(ks, errs) : kNaN;
  r.rows.push_back({scenario.name, "fitted_order", "all", order, kNaN, kNaN, kNaN, "dense"});
  r.metrics["trotter.fitted_order"] = order;
  r.metrics["trotter.monotone"] = monotone ? 1.0 : 0.0;
  r.metrics["trotter.min_ratio"] = min_ratio;
  r.metrics["trotter.max_ratio"] = max_ratio;
  r.metrics["trotter.max_error"] = errs.empty() ? kNaN : *std::max_element(errs.begin(), errs.end());
  r.metrics["trotter.unitarity_ratio"] = unitarity;
  r.timings["trotter"] = clock.seconds();
  return r;
}

Report run_amplitude_study(const Scenario& scenario, const StudyOptions& opts) {
  const Stopwatch clock;
  Report r;
  r.scenario = scenario.name;
  if (!scenario.amplitude) {
    r.warnings.push_back("scenario has no amplitude section");
    r.timings["amplitude"] = clock.seconds();
    return r;
  }
  const AmplitudeConfig& cfg = *scenario.amplitude;
  const Grid grid = scenario.grid.make();
  const auto v = scenario.make_potential();
  const auto a = scenario.make_vector_potential();
  const WaveFunction psi = scenario.initial_state.sample(grid);
  const WaveFunction phi = scenario.final_state.sample(grid);
  warn_boundary(r, psi, "initial state");
  warn_boundary(r, phi, "final state");

  const bool free_case = v.identically_zero && a.identically_zero;
  std::optional<cplx> dense_amplitude;
  if (grid.size() <= opts.max_dense) {
    const auto h = assemble_hamiltonian(grid, a, v, {scenario.stencil, opts.max_dense});
    dense_amplitude = pair_bilinear(phi, expm_evolve(h, psi, scenario.time));
  } else {
    r.warnings.push_back("grid exceeds the dense cap; dense amplitude reference skipped");
  }
  const cplx closed =
      free_case ? free_gaussian_amplitude(scenario.final_state, scenario.initial_state, scenario.time)
                : cplx{kNaN, kNaN};

  BoxSchedule schedule;
  for (std::size_t s = 0; s < cfg.radii.size(); ++s)
    schedule.steps.push_back(
        {{cfg.radii[s]}, {cfg.gap_radii.size() == 1 ? cfg.gap_radii[0] : cfg.gap_radii[s]}, cfg.mesh});

  AmplitudeOptions aopts;
  aopts.tail_count = cfg.tail_count;
  aopts.convergence_threshold = cfg.threshold;
  aopts.max_work = cfg.max_work;
  aopts.kernel.threads = opts.threads;

  double worst_closed = 0.0, worst_split = 0.0, worst_dense = 0.0, worst_tail = 0.0;
  bool all_converged = true;
  std::size_t completed = 0, capped = 0;
  for (std::size_t k : cfg.slices) {
    AmplitudeProblem problem{scenario.final_state.state(), scenario.initial_state.state(), v, a,
                             scenario.time, k, cfg.box_center, PrefactorConvention::composed};
    AmplitudeEstimate est;
    try {
      est = amplitude_quadrature(problem, schedule, aopts);
    } catch (const CapExceededError& e) {
      ++capped;
      all_converged = false;
      r.warnings.push_back("k = " + k_label(k) + ": " + e.what());
      r.diagnostics["amplitude.k" + k_label(k) + ".suggested_slices"] =
          std::to_string(e.suggested_slices());
      continue;
    }
    ++completed;
    const std::string kl = k_label(k);
    const cplx split = pair_bilinear(phi, SliceOperator(grid, v, a, TimeSlicing(scenario.time, k)).evolve(psi));
    complex_rows(r, scenario, "amplitude", kl, est.value, split, "split-step");
    worst_split = std::max(worst_split, std::abs(est.value - split) / std::abs(split));
    if (free_case) {
      complex_rows(r, scenario, "amplitude", kl, est.value, closed, "closed-form");
      worst_closed = std::max(worst_closed, std::abs(est.value - closed) / std::abs(closed));
    }
    if (dense_amplitude) {
      complex_rows(r, scenario, "amplitude", kl, est.value, *dense_amplitude, "dense");
      worst_dense = std::max(worst_dense, std::abs(est.value - *dense_amplitude) / std::abs(*dense_amplitude));
    }
    for (const auto& step : est.steps)
      complex_rows(r, scenario, "raw_estimate", kl + "/" + std::to_string(step.step), step.value,
                   est.value, "split-step");
    const double tail_rel = est.tail_oscillation / std::abs(est.value);
    worst_tail = std::max(worst_tail, tail_rel);
    all_converged = all_converged && est.converged;
    const std::string key = "amplitude.k" + kl;
    r.diagnostics[key + ".tail_oscillation"] = num(est.tail_oscillation);
    r.diagnostics[key + ".mesh"] = num(est.mesh);
    r.diagnostics[key + ".converged"] = est.converged ? "true" : "false";
    r.diagnostics[key + ".work_per_step"] = num(est.steps.back().work);
  }
  r.metrics["amplitude.completed"] = double(completed);
  r.metrics["amplitude.cap_exceeded"] = double(capped);
  r.metrics["amplitude.max_rel_error_split_step"] = completed ? worst_split : kNaN;
  if (free_case) r.metrics["amplitude.max_rel_error_closed_form"] = completed ? worst_closed : kNaN;
  if (dense_amplitude) r.metrics["amplitude.max_rel_error_dense"] = completed ? worst_dense : kNaN;
  r.metrics["amplitude.max_tail_oscillation_rel"] = completed ? worst_tail : kNaN;
  r.metrics["amplitude.converged"] = all_converged && completed ? 1.0 : 0.0;
  r.timings["amplitude"] = clock.seconds();
  return r;
}

Report run_gauge_check(const Scenario& scenario, const StudyOptions& opts) {
  const Stopwatch clock;
  Report r;
  r.scenario = scenario.name;
  const Grid grid = scenario.grid.make();
  const auto a = scenario.make_vector_potential();
  const WaveFunction psi = scenario.initial_state.sample(grid);

  double worst_residual = 0.0;
  for (std::size_t axis = 0; axis < scenario.dim; ++axis) {
    try {
      const double res = gauge_conjugation_residual(a, axis, psi);
      r.rows.push_back(row(scenario, "conjugation_residual", "axis" + std::to_string(axis), res, 0.0, "symbolic"));
      worst_residual = std::max(worst_residual, res);
    } catch (const Error& e) {
      worst_residual = kNaN;
      r.warnings.push_back("conjugation check on axis " + std::to_string(axis) + ": " + e.what());
    }
  }
  r.metrics["gauge.max_conjugation_residual"] = worst_residual;

  const GaugeCheckConfig cfg = scenario.gauge.value_or(
      GaugeCheckConfig{Point(scenario.dim, 0.1), Point(scenario.dim, 1.0), 0.2, 4});
  std::vector<double> steps, discrepancies;
  double worst = 0.0;
  for (std::size_t m = 0; m <= cfg.halvings; ++m) {
    const double s = cfg.step / std::pow(2.0, double(m));
    Point x1 = cfg.point;
    double len = 0.0;
    for (std::size_t b = 0; b < x1.size(); ++b) {
      x1[b] += s * cfg.direction[b];
      len += s * cfg.direction[b] * s * cfg.direction[b];
    }
    len = std::sqrt(len);
    try {
      const double d = midpoint_discrepancy(a, x1, cfg.point);
      r.rows.push_back(row(scenario, "midpoint_discrepancy", std::to_string(m), d, 0.0, "symbolic"));
      worst = std::max(worst, d);
      if (d > 0.0) {
        steps.push_back(len);
        discrepancies.push_back(d);
      }
    } catch (const Error& e) {
      r.warnings.push_back("midpoint check at halving " + std::to_string(m) + ": " + e.what());
    }
  }
  const double slope = steps.size() >= 2 ? fit_loglog_slope(steps, discrepancies) : kNaN;
  r.rows.push_back({scenario.name, "midpoint_slope", "all", slope, kNaN, kNaN, kNaN, "symbolic"});
  r.metrics["gauge.midpoint_slope"] = slope;
  r.metrics["gauge.max_midpoint_discrepancy"] = worst;

  // Frozen-coordinate kernel against the operator slice; reported, not asserted.
  if (grid.size() <= opts.max_dense && !scenario.slices.empty()) {
    // The grid kernel sum aliases copies of psi displaced by 4 pi eps / h; keep them off the box.
    double alias_eps = 0.0;
    for (std::size_t b = 0; b < grid.dim(); ++b)
      alias_eps = std::max(alias_eps, 1.25 * grid.axis(b).length() * grid.spacing(b) / (4.0 * std::numbers::pi));
    const double eps = std::max(
        scenario.time / double(*std::max_element(scenario.slices.begin(), scenario.slices.end())), alias_eps);
    r.diagnostics["gauge.kernel_eps"] = num(eps);
    try {
      KernelOptions ko;
      ko.threads = opts.threads;
      const double frozen = operator_vs_kernel_consistency(psi, a, eps, ko);
      ko.convention = GaugeConvention::threaded;
      const double threaded = operator_vs_kernel_consistency(psi, a, eps, ko);
      r.rows.push_back({scenario.name, "kernel_gap_frozen", num(eps), frozen, 0.0, frozen, kNaN, "split-step"});
      r.rows.push_back({scenario.name, "kernel_gap_threaded", num(eps), threaded, 0.0, threaded, kNaN, "split-step"});
      r.metrics["gauge.kernel_gap_frozen"] = frozen;
      r.metrics["gauge.kernel_gap_threaded"] = threaded;
    } catch (const Error& e) {
      r.warnings.push_back(std::string("kernel consistency: ") + e.what());
    }
  }
  r.timings["gauge"] = clock.seconds();
  return r;
}

}  // namespace magpath
