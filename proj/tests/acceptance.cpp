// Acceptance suite. Prints one PASS/FAIL line per criterion; `acceptance N`
// runs criterion N alone, no argument runs all of them.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "magpath/convergence.hpp"
#include "magpath/errors.hpp"
#include "magpath/families.hpp"
#include "magpath/gauge.hpp"
#include "magpath/pathint.hpp"
#include "magpath/reference.hpp"
#include "magpath/scenario.hpp"
#include "magpath/splitstep.hpp"

using namespace magpath;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::filesystem::path scenario_dir() { return MAGPATH_SCENARIO_DIR; }

Scenario load(const char* name) { return load_scenario(scenario_dir() / name); }

AmplitudeProblem problem_for(const Scenario& s, std::size_t k) {
  AmplitudeProblem p;
  p.final_state = s.final_state.state();
  p.initial_state = s.initial_state.state();
  p.potential = s.make_potential();
  p.vector_potential = s.make_vector_potential();
  p.time = s.time;
  p.slices = k;
  return p;
}

BoxSchedule schedule_for(const AmplitudeConfig& c, double gap) {
  return BoxSchedule::radii(c.radii, gap);
}

AmplitudeOptions options_for(const AmplitudeConfig& c) {
  AmplitudeOptions o;
  o.tail_count = c.tail_count;
  o.convergence_threshold = c.threshold;
  o.max_work = c.max_work;
  return o;
}

cplx split_step_amplitude(const Scenario& s, std::size_t k) {
  const Grid g = s.grid.make();
  const SliceOperator op(g, s.make_potential(), s.make_vector_potential(), TimeSlicing(s.time, k));
  return pair_bilinear(s.final_state.sample(g), op.evolve(s.initial_state.sample(g)));
}

// 1. e^{i lambda}(-i d)(e^{-i lambda} psi) against (-i d - a) psi for a = sin x.
Outcome gauge_conjugation() {
  const Grid g({Axis{0.0, 2 * kPi, 256}});
  const auto a = sinusoidal_vector_potential(1, 1.0, 1.0);
  const auto psi = WaveFunction::sample(g, [](std::span<const double> x) {
    return cplx(std::cos(x[0]) + 0.5 * std::sin(3 * x[0]), 0.25 * std::cos(5 * x[0]) - 0.1);
  });
  const double r = gauge_conjugation_residual(a, 0, psi);
  return {r <= 1e-6, fmt("residual %.3g (bound 1e-6)", r)};
}

// 2. Chernoff derivative residual slope on harmonic + sinusoidal a.
Outcome chernoff_slope() {
  const Grid g({Axis{-10.0, 10.0, 256}});
  const auto v = harmonic_potential(1, 1.0, {0.0});
  const auto a = sinusoidal_vector_potential(1, 0.5, 1.0);
  const auto h = assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096});
  const auto psi = GaussianPacket{{-0.3}, 1.0, {0.8}}.sample(g);
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3}, res;
  for (double e : eps)
    res.push_back(chernoff_derivative_residual(psi, SliceOperator(g, v, a, TimeSlicing(e, 1)), h));
  const double slope = fit_loglog_slope(eps, res);
  return {std::abs(slope - 1.0) <= 0.3,
          fmt("slope %.4f (band 1.0 +- 0.3), residual at eps=1e-2 %.3g", slope, res[0])};
}

// 3. Trotter errors against the dense reference for the harmonic oscillator.
Outcome trotter_convergence() {
  const Grid g({Axis{-10.0, 10.0, 256}});
  const auto v = harmonic_potential(1, 1.0, {0.0});
  const auto a = VectorPotentialSpec::zero(1);
  const double t = 0.5;
  const auto psi = GaussianPacket{{-0.3}, 1.0, {0.8}}.sample(g);
  const auto exact = expm_evolve(assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096}), psi, t);
  std::vector<double> err;
  for (std::size_t k : {4, 8, 16, 32})
    err.push_back(l2_distance(SliceOperator(g, v, a, TimeSlicing(t, k)).evolve(psi), exact));
  bool ok = true;
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 1; i < err.size(); ++i) {
    const double ratio = err[i - 1] / err[i];
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ok = ok && err[i] < err[i - 1] && ratio >= 1.6 && ratio <= 2.4;
  }
  return {ok, fmt("errors %.3g..%.3g, ", err.front(), err.back()) +
                  fmt("ratios in [%.3f, %.3f] (band [1.6, 2.4])", lo, hi)};
}

// 4. Midpoint discrepancy slope for a nonconstant field; constant a is exact.
Outcome midpoint_approximation() {
  const auto landau = landau_gauge_potential_x(1.0);
  const auto symmetric = symmetric_gauge_potential(0.7);
  const auto wavy = sinusoidal_vector_potential(2, 0.8, 1.3);
  const std::vector<double> x0{0.3, -0.2}, dir{0.6, 0.8};
  double worst_slope = INFINITY;
  for (const auto* a : {&landau, &symmetric, &wavy}) {
    std::vector<double> len, disc;
    double s = 0.4;
    for (int i = 0; i <= 4; ++i, s *= 0.5) {
      const std::vector<double> x1{x0[0] + s * dir[0], x0[1] + s * dir[1]};
      len.push_back(s);
      disc.push_back(std::abs(midpoint_discrepancy(*a, x1, x0)));
    }
    worst_slope = std::min(worst_slope, fit_loglog_slope(len, disc));
  }
  const auto c = constant_vector_potential({0.7, -1.3});
  double worst_const = 0.0;
  for (double s : {0.4, 1.0, 3.0}) {
    const std::vector<double> x1{x0[0] + s * dir[0], x0[1] - s * dir[1]};
    worst_const = std::max(worst_const, std::abs(midpoint_discrepancy(c, x1, x0)));
  }
  return {worst_slope >= 1.9 && worst_const <= 1e-12,
          fmt("slope %.4f (min 1.9), constant-field discrepancy %.3g (max 1e-12)", worst_slope,
              worst_const)};
}

// 5. Excised quadrature against the closed form (free, k = 2) and split-step (harmonic, k = 3).
Outcome amplitude_identity() {
  const Scenario free = load("free_1d.json");
  const auto& fc = *free.amplitude;
  const auto free_est =
      amplitude_quadrature(problem_for(free, 2), schedule_for(fc, fc.gap_radii[0]), options_for(fc));
  const auto free_rep = amplitude_error_report(
      free_est, free_gaussian_amplitude(free.final_state, free.initial_state, free.time));

  const Scenario harm = load("harmonic_1d.json");
  const auto& hc = *harm.amplitude;
  const auto harm_est =
      amplitude_quadrature(problem_for(harm, 3), schedule_for(hc, hc.gap_radii[0]), options_for(hc));
  const auto harm_rep = amplitude_error_report(harm_est, split_step_amplitude(harm, 3));
  return {free_rep.rel_error <= 1e-2 && harm_rep.rel_error <= 1e-2,
          fmt("free k=2 rel error %.3g, harmonic k=3 rel error %.3g (bound 1e-2)",
              free_rep.rel_error, harm_rep.rel_error)};
}

// 6. k = 1 amplitude under both prefactor conventions.
Outcome prefactor_forcing() {
  const Scenario s = load("harmonic_1d.json");
  const auto& c = *s.amplitude;
  const cplx ref = split_step_amplitude(s, 1);
  AmplitudeProblem p = problem_for(s, 1);
  const auto composed = amplitude_quadrature(p, schedule_for(c, c.gap_radii[0]), options_for(c));
  p.prefactor = PrefactorConvention::displayed;
  const auto displayed = amplitude_quadrature(p, schedule_for(c, c.gap_radii[0]), options_for(c));
  const double err = std::abs(composed.value - ref) / std::abs(ref);
  const double err_displayed = std::abs(displayed.value - ref) / std::abs(ref);
  const double factor = std::abs(displayed.value) / std::abs(composed.value);
  const double expected = std::sqrt(4 * kPi * s.time);
  const bool ok = err <= 1e-3 && err_displayed > 1e-3 && std::abs(factor / expected - 1) <= 1e-9;
  return {ok, fmt("composed rel error %.3g (bound 1e-3), displayed rel error %.3g, ", err,
                  err_displayed) +
                  fmt("modulus factor %.6f vs (4 pi eps)^(1/2) = %.6f", factor, expected)};
}

// 7. Shrinking the excision gap around the singularity from 1e-2 to 1e-3.
Outcome excision_robustness() {
  const Scenario s = load("singular_1d.json");
  const auto& c = *s.amplitude;
  const auto p = problem_for(s, c.slices.at(0));
  try {
    const cplx wide = amplitude_quadrature(p, schedule_for(c, 1e-2), options_for(c)).value;
    const cplx narrow = amplitude_quadrature(p, schedule_for(c, 1e-3), options_for(c)).value;
    const double change = std::abs(wide - narrow);
    const double rel = change / std::abs(narrow);
    return {rel <= 1e-3, fmt("relative change %.3g (bound 1e-3), |A| = %.4f", rel, std::abs(narrow))};
  } catch (const SingularNodeError& e) {
    return {false, std::string("SingularNodeError: ") + e.what()};
  }
}

// 8. Norm drift after every slice of every split-step run in the shipped scenarios.
Outcome unitarity() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(scenario_dir()))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  double worst = 0.0;
  std::size_t runs = 0;
  for (const auto& f : files) {
    const Scenario s = load_scenario(f);
    const Grid g = s.grid.make();
    std::vector<std::size_t> ks = s.slices;
    if (s.amplitude) ks.insert(ks.end(), s.amplitude->slices.begin(), s.amplitude->slices.end());
    for (std::size_t k : ks) {
      const SliceOperator op(g, s.make_potential(), s.make_vector_potential(), TimeSlicing(s.time, k));
      WaveFunction psi = s.initial_state.sample(g);
      const double n0 = l2_norm(psi);
      for (std::size_t j = 1; j <= k; ++j) {
        psi = op.apply(psi);
        worst = std::max(worst, std::abs(l2_norm(psi) - n0) / (static_cast<double>(j) * 1e-12));
      }
      ++runs;
    }
  }
  return {runs > 0 && worst <= 1.0,
          fmt("%g runs over %g scenarios, worst |drift|/(k 1e-12) = %.3g", static_cast<double>(runs),
              static_cast<double>(files.size()), worst)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {"gauge conjugation", 1.0, gauge_conjugation},
      {"chernoff derivative slope", 10.0, chernoff_slope},
      {"trotter convergence", 30.0, trotter_convergence},
      {"midpoint approximation", 1.0, midpoint_approximation},
      {"amplitude identity", 300.0, amplitude_identity},
      {"prefactor forcing", 300.0, prefactor_forcing},
      {"excision robustness", 300.0, excision_robustness},
      {"unitarity", 300.0, unitarity},
  };
  std::vector<std::size_t> selected;
  if (argc > 1) {
    const long n = std::strtol(argv[1], nullptr, 10);
    if (n < 1 || n > static_cast<long>(all.size())) {
      std::fprintf(stderr, "usage: %s [1-%zu]\n", argv[0], all.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(n - 1));
  } else {
    for (std::size_t i = 0; i < all.size(); ++i) selected.push_back(i);
  }

  int failures = 0;
  for (std::size_t i : selected) {
    const auto& c = all[i];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_seconds) {
      o.passed = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_seconds);
    }
    std::printf("criterion %zu %s: %s (%s; %.2f s)\n", i + 1, c.name, o.passed ? "PASS" : "FAIL",
                o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.passed) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
