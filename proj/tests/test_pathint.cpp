#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magpath/errors.hpp"
#include "magpath/families.hpp"
#include "magpath/pathint.hpp"
#include "magpath/reference.hpp"
#include "magpath/splitstep.hpp"

using namespace magpath;

namespace {

const double kPi = std::numbers::pi;

AmplitudeProblem problem_1d(const ScalarPotentialSpec& v, const VectorPotentialSpec& a, double t, std::size_t k,
                            const GaussianPacket& phi, const GaussianPacket& psi) {
  return {phi.state(), psi.state(), v, a, t, k, {}, PrefactorConvention::composed};
}

const GaussianPacket kPsi{{-0.3}, 1.0, {0.8}};
const GaussianPacket kPhi{{0.3}, 1.0, {-0.8}};

}  // namespace

TEST(Excision, RemovesGapsPerAxis) {
  SingularPointSet s(2);
  s.add(std::vector<double>{0.0, 1.0}, FieldRole::scalar_potential);
  const std::vector<Interval> box{{-2, 2}, {-2, 2}};
  const ExcisionRegion r(box, s, 0.1, 0.2);
  ASSERT_EQ(r.intervals(0).size(), 2u);
  EXPECT_DOUBLE_EQ(r.intervals(0)[0].hi, -0.1);
  EXPECT_DOUBLE_EQ(r.intervals(0)[1].lo, 0.2);
  EXPECT_DOUBLE_EQ(r.intervals(1)[0].hi, 0.9);
  EXPECT_FALSE(r.contains(Point{0.0, 0.5}));
  EXPECT_FALSE(r.contains(Point{1.5, 1.0}));
  EXPECT_TRUE(r.contains(Point{1.5, 0.5}));
}

TEST(Excision, OverlappingAndOutsideGapsMerge) {
  SingularPointSet s(1);
  for (double w : {0.0, 0.15, 5.0}) s.add(std::vector<double>{w}, FieldRole::initial_state);
  const std::vector<Interval> box{{-1, 1}};
  const ExcisionRegion r(box, s, 0.1, 0.1);
  ASSERT_EQ(r.intervals(0).size(), 2u);
  EXPECT_DOUBLE_EQ(r.intervals(0)[1].lo, 0.25);
}

TEST(Mesh, CellsRespectSpacingAndMeasure) {
  SingularPointSet s(1);
  s.add(std::vector<double>{0.3}, FieldRole::scalar_potential);
  const std::vector<Interval> box{{-1, 1}};
  const ExcisionRegion r(box, s, 0.05, 0.05);
  const SliceMesh m(r, 0.07);
  double total = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_LE(m.weight(i), 0.07);
    total += m.weight(i);
    Point x(1);
    m.node(i, x);
    EXPECT_TRUE(r.contains(x));
  }
  EXPECT_NEAR(total, 1.9, 1e-14);
}

TEST(Kernel, PrefactorAndModulus) {
  const double eps = 0.3;
  const auto zero = VectorPotentialSpec::zero(1);
  const cplx k0 = slice_kernel(Point{0.4}, Point{0.4}, eps, zero);
  // (4 i pi eps)^{-1/2} with sqrt(i) = e^{i pi/4}
  EXPECT_NEAR(std::abs(k0 - std::polar(1.0 / std::sqrt(4 * kPi * eps), -kPi / 4)), 0.0, 1e-15);
  const auto a = symmetric_gauge_potential(0.7);
  for (const auto& [x1, x0] : {std::pair{Point{1, 2}, Point{0, 0}}, std::pair{Point{-3, 0.5}, Point{0.2, 0.1}}})
    EXPECT_NEAR(std::abs(slice_kernel(x1, x0, eps, a)), 1.0 / (4 * kPi * eps), 1e-14);
}

TEST(Kernel, ProductModulusIsComposedPrefactor) {
  const double eps = 0.1;
  const auto a = landau_gauge_potential(1.0);
  const std::vector<Point> path{{0, 0}, {0.3, 1.0}, {-0.2, 0.4}, {1.0, 1.0}};
  cplx prod{1.0, 0.0};
  for (std::size_t j = 0; j + 1 < path.size(); ++j) prod *= slice_kernel(path[j + 1], path[j], eps, a);
  EXPECT_NEAR(std::abs(prod), std::pow(4 * kPi * eps, -0.5 * 2 * 3), 1e-12 * std::abs(prod));
}

TEST(Action, SingleKineticTerm) {
  const std::vector<Point> path{{0.0}, {1.0}};
  const cplx s = discrete_action(path, 0.5, free_potential(1), VectorPotentialSpec::zero(1));
  EXPECT_NEAR(std::abs(s - cplx{0.0, 0.5}), 0.0, 1e-15);
}

TEST(Action, ConstantPotentialShifts) {
  const double c = 1.7, eps = 0.2;
  ScalarPotentialSpec v{1, [c](std::span<const double>) { return c; }, {}, "", false};
  const std::vector<Point> path{{0.0}, {0.5}, {-0.1}, {0.3}};
  const auto a = VectorPotentialSpec::zero(1);
  const cplx diff = discrete_action(path, eps, v, a) - discrete_action(path, eps, free_potential(1), a);
  EXPECT_NEAR(std::abs(diff - cplx{0.0, -eps * 3 * c}), 0.0, 1e-14);
}

TEST(Action, ConstantGaugeTelescopes) {
  const auto a = constant_vector_potential({0.6, -0.4});
  const auto zero = VectorPotentialSpec::zero(2);
  const auto v = free_potential(2);
  const std::vector<Point> p1{{0, 0}, {1, 2}, {-1, 0.5}, {2, 1}};
  const std::vector<Point> p2{{0, 0}, {3, -1}, {0.2, 0.2}, {2, 1}};
  const cplx g1 = discrete_action(p1, 0.1, v, a) - discrete_action(p1, 0.1, v, zero);
  const cplx g2 = discrete_action(p2, 0.1, v, a) - discrete_action(p2, 0.1, v, zero);
  EXPECT_NEAR(g1.imag(), 2 * 0.6 + 1 * -0.4, 1e-13);
  EXPECT_NEAR(g2.imag(), g1.imag(), 1e-13);
}

TEST(Action, SingularPointThrows) {
  const std::vector<Point> path{{1.0}, {0.0}};
  EXPECT_THROW(discrete_action(path, 0.1, inverse_power_potential(1, 1, 0.5, {0.0}), VectorPotentialSpec::zero(1)),
               SingularNodeError);
}

TEST(Nested, MatchesBruteForceTupleSum) {
  // nested factorisation against the direct sum over (x0, x1, x2) of the full integrand
  const auto v = harmonic_potential(1, 0.5, {0.0});
  const auto a = sinusoidal_vector_potential(1, 0.4, 1.2);
  const double t = 0.4, eps = 0.2;
  const auto pr = problem_1d(v, a, t, 2, kPhi, kPsi);
  const ScheduleStep step{{2.0}, {0.0}, 0.15};
  const StepEstimate nested = excised_riemann_sum(pr, step, 0.15);

  SingularPointSet none(1);
  const std::vector<Interval> box{{-2, 2}};
  const SliceMesh m(ExcisionRegion(box, none, 0, 0), 0.15);
  cplx brute{0.0, 0.0};
  Point x(1);
  for (std::size_t i0 = 0; i0 < m.size(); ++i0)
    for (std::size_t i1 = 0; i1 < m.size(); ++i1)
      for (std::size_t i2 = 0; i2 < m.size(); ++i2) {
        std::vector<Point> path(3, Point(1));
        m.node(i0, path[0]);
        m.node(i1, path[1]);
        m.node(i2, path[2]);
        const cplx s = discrete_action(path, eps, v, a);
        brute += m.weight(i0) * m.weight(i1) * m.weight(i2) * kPhi(path[2]) * std::exp(s) * kPsi(path[0]);
      }
  brute *= kernel_prefactor(eps, 1.0);
  EXPECT_NEAR(std::abs(nested.value - brute), 0.0, 1e-12);
}

TEST(Nested, ChapmanKolmogorovForFreeKernel) {
  const double eps = 0.05;
  SingularPointSet none(1);
  const std::vector<Interval> inner{{-4, 4}}, outer{{-9, 9}};
  const SliceMesh src(ExcisionRegion(inner, none, 0, 0), 0.01);
  const SliceMesh mid(ExcisionRegion(outer, none, 0, 0), 0.01);
  const SliceMesh dst(ExcisionRegion(std::vector<Interval>{{-1, 1}}, none, 0, 0), 0.1);
  std::vector<cplx> u(src.size());
  Point x(1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    src.node(i, x);
    u[i] = kPsi(x);
  }
  const auto zero = VectorPotentialSpec::zero(1);
  const auto two_steps = apply_slice_kernel(mid, apply_slice_kernel(src, u, mid, eps, zero), dst, eps, zero);
  const auto one_step = apply_slice_kernel(src, u, dst, 2 * eps, zero);
  for (std::size_t i = 0; i < dst.size(); ++i) EXPECT_NEAR(std::abs(two_steps[i] - one_step[i]), 0.0, 1e-6);
}

TEST(Nested, ThreadCountDoesNotChangeBits) {
  const auto pr = problem_1d(harmonic_potential(1, 1.0, {0}), sinusoidal_vector_potential(1, 0.3, 1.0), 0.2, 2,
                             kPhi, kPsi);
  const ScheduleStep step{{3.0}, {0.0}, 0.0};
  AmplitudeOptions one, four;
  four.kernel.threads = 4;
  const double h = validate_schedule(BoxSchedule{{step}}, 2, 0.1)[0];
  EXPECT_EQ(excised_riemann_sum(pr, step, h, one).value, excised_riemann_sum(pr, step, h, four).value);
}

TEST(Nested, ExcludesPairsWhoseGaugePathIsSingular) {
  VectorPotentialSpec a = constant_vector_potential({0.5});
  a.singular_points = {{0.0}};
  const auto pr = problem_1d(free_potential(1), a, 0.1, 1, kPhi, kPsi);
  EXPECT_NO_THROW(excised_riemann_sum(pr, ScheduleStep{{3.0}, {1e-3}, 0.0}, 0.02));
}

TEST(Schedule, MonotonicityAndPhaseBound) {
  BoxSchedule s = BoxSchedule::radii(std::vector<double>{3, 4}, 1e-2);
  EXPECT_NO_THROW(validate_schedule(s, 2, 0.1));
  s.steps[1].gap_radius = {2e-2};
  EXPECT_THROW(validate_schedule(s, 2, 0.1), ScheduleError);
  s = BoxSchedule::radii(std::vector<double>{4, 3}, 1e-2);
  EXPECT_THROW(validate_schedule(s, 2, 0.1), ScheduleError);
  s = BoxSchedule::radii(std::vector<double>{3}, 1e-2);
  s.steps[0].mesh = 0.5;
  EXPECT_THROW(validate_schedule(s, 2, 0.1), ScheduleError);
  s.steps[0].mesh = 0.0;
  const double h = validate_schedule(s, 2, 0.1)[0];
  EXPECT_LE(h * max_phase_rate(s.steps[0], 2, 0.1), kPi / 4);
  s.steps[0].outer_radius = {1, 2};
  EXPECT_THROW(validate_schedule(s, 2, 0.1), ScheduleError);
}

TEST(Schedule, CapExceededSuggestsSmallerK) {
  const auto pr = problem_1d(free_potential(1), VectorPotentialSpec::zero(1), 0.3, 3, kPhi, kPsi);
  AmplitudeOptions o;
  o.max_work = 1e6;
  try {
    amplitude_quadrature(pr, BoxSchedule::radii(std::vector<double>{6}, 1e-3), o);
    FAIL() << "expected CapExceededError";
  } catch (const CapExceededError& e) {
    EXPECT_GE(e.suggested_slices(), 1u);
    EXPECT_LT(e.suggested_slices(), 3u);
  }
}

TEST(Amplitude, ConcentratedKernelReproducesPairing) {
  // tiny eps: F(eps) is close to the identity
  const auto pr = problem_1d(free_potential(1), VectorPotentialSpec::zero(1), 2e-3, 1, kPhi, kPsi);
  const Grid g({Axis{-10, 10, 512}});
  AmplitudeOptions o;
  o.max_work = 1e9;
  o.tail_count = 2;
  const auto est = amplitude_quadrature(pr, BoxSchedule::radii(std::vector<double>{3.0, 3.05}, 0.0), o);
  EXPECT_LE(std::abs(est.value - pair_bilinear(kPhi.sample(g), kPsi.sample(g))), 1e-2);
}

TEST(Amplitude, TinyBoxIsNotConverged) {
  const GaussianPacket p{{0.0}, 1.0, {0.0}};
  const auto pr = problem_1d(free_potential(1), VectorPotentialSpec::zero(1), 0.2, 2, p, p);
  const auto est = amplitude_quadrature(pr, BoxSchedule::radii(std::vector<double>{0.6, 0.7, 0.8, 0.9, 1.0}, 0.0));
  const auto rep = amplitude_error_report(est, free_gaussian_amplitude(p, p, 0.2));
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.rel_error, 1e-2);
}

TEST(Amplitude, ConstantSequenceReportsZeroError) {
  AmplitudeEstimate est;
  for (std::size_t s = 0; s < 8; ++s) est.steps.push_back({s, 1.0, 0.0, 0.1, 0.0, cplx{0.5, -0.25}});
  est.value = cplx{0.5, -0.25};
  est.tail_count = 8;
  const auto rep = amplitude_error_report(est, cplx{0.5, -0.25});
  EXPECT_EQ(rep.abs_error, 0.0);
  EXPECT_TRUE(rep.converged);
}

TEST(Amplitude, ExcisionMonotonicityBoundedByTailMass) {
  // |A(R2) - A(R1)| <= (4 pi eps)^{-1/2} (|phi|_1 tail_psi(R1) + |psi|_1 tail_phi(R1)) for k = 1
  const GaussianPacket p{{0.0}, 1.0, {0.5}}, q{{0.2}, 1.0, {-0.3}};
  const double eps = 0.1;
  const auto pr = problem_1d(free_potential(1), VectorPotentialSpec::zero(1), eps, 1, q, p);
  const ScheduleStep s1{{2.0}, {0.0}, 0.0}, s2{{3.0}, {0.0}, 0.0};
  const auto h = validate_schedule(BoxSchedule{{s1, s2}}, 1, eps);
  const cplx a1 = excised_riemann_sum(pr, s1, h[1]).value;
  const cplx a2 = excised_riemann_sum(pr, s2, h[1]).value;
  // L1 norm and tail of pi^{-1/4} e^{-(x-c)^2/2}
  const double l1 = std::pow(kPi, -0.25) * std::sqrt(2 * kPi);
  auto tail = [&](double c, double r) {
    return std::pow(kPi, -0.25) * std::sqrt(kPi / 2) * (std::erfc((r - c) / std::sqrt(2.0)) + std::erfc((r + c) / std::sqrt(2.0)));
  };
  const double bound = (tail(0.0, 2.0) * l1 + tail(0.2, 2.0) * l1) / std::sqrt(4 * kPi * eps);
  EXPECT_LE(std::abs(a2 - a1), bound);
  EXPECT_GT(std::abs(a2 - a1), 0.0);
}

TEST(Amplitude, IndependenceOfLimits) {
  // grow slice 0 first, or slice 1 first; both converge to the same value
  const auto pr = problem_1d(harmonic_potential(1, 0.5, {0}), VectorPotentialSpec::zero(1), 0.1, 1, kPhi, kPsi);
  BoxSchedule first0, first1;
  for (double r : {4.0, 5.0, 6.0}) first0.steps.push_back({{r, 3.0}, {0.0}, 0.008});
  for (double r : {4.0, 5.0, 6.0}) first0.steps.push_back({{6.0, r}, {0.0}, 0.008});
  for (double r : {4.0, 5.0, 6.0}) first1.steps.push_back({{3.0, r}, {0.0}, 0.008});
  for (double r : {4.0, 5.0, 6.0}) first1.steps.push_back({{r, 6.0}, {0.0}, 0.008});
  AmplitudeOptions o;
  o.tail_count = 2;
  const auto e0 = amplitude_quadrature(pr, first0, o);
  const auto e1 = amplitude_quadrature(pr, first1, o);
  EXPECT_LE(std::abs(e0.value - e1.value), std::max({e0.tail_oscillation, e1.tail_oscillation, 1e-12}));
}

TEST(Amplitude, HarmonicErrorShrinksWithK) {
  const auto v = harmonic_potential(1, 1.0, {0});
  const auto a = VectorPotentialSpec::zero(1);
  const double t = 0.3;
  const Grid g({Axis{-12, 12, 512}});
  const cplx dense = pair_bilinear(kPhi.sample(g), expm_evolve(assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096}),
                                                               kPsi.sample(g), t));
  AmplitudeOptions o;
  o.tail_count = 2;
  double prev = 1e9;
  for (std::size_t k : {1, 2, 3}) {
    const auto est = amplitude_quadrature(problem_1d(v, a, t, k, kPhi, kPsi),
                                          BoxSchedule::radii(std::vector<double>{5.5, 5.75}, 0.0), o);
    const double err = std::abs(est.value - dense);
    EXPECT_LT(err, prev) << "k = " << k;
    prev = err;
  }
}

TEST(Consistency, OneDimensionalConventionsCoincide) {
  const Grid g({Axis{-8, 8, 512}});
  const auto psi = GaussianPacket{{0.0}, 1.0, {0.5}}.sample(g);
  EXPECT_LE(operator_vs_kernel_consistency(psi, sinusoidal_vector_potential(1, 0.7, 1.0), 0.05), 1e-4);
}

TEST(Consistency, TwoDimensionalFrozenCoordinateGap) {
  const Grid g({Axis{-5, 5, 48}, Axis{-5, 5, 48}});
  const auto psi = GaussianPacket{{0.3, -0.2}, 0.8, {0.4, 0.1}}.sample(g);
  const double eps = 0.2;
  EXPECT_LE(operator_vs_kernel_consistency(psi, constant_vector_potential({0.4, -0.3}), eps), 1e-4);
  // a_1 depends on x_2, and axis 1 acts before axis 0: frozen coordinates miss the update
  const auto a = landau_gauge_potential_x(0.5);
  KernelOptions threaded;
  threaded.convention = GaugeConvention::threaded;
  EXPECT_GT(operator_vs_kernel_consistency(psi, a, eps), 1e-3);
  EXPECT_LE(operator_vs_kernel_consistency(psi, a, eps, threaded), 1e-4);
  // a_2 depends on x_1 but axis 1 acts first: no gap in this order, a gap in the other
  const auto b = landau_gauge_potential(0.5);
  EXPECT_LE(operator_vs_kernel_consistency(psi, b, eps), 1e-4);
  KernelOptions swapped;
  swapped.axis_order = {0, 1};
  EXPECT_GT(operator_vs_kernel_consistency(psi, b, eps, swapped), 1e-3);
}
