#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "magpath/convergence.hpp"
#include "magpath/errors.hpp"
#include "magpath/families.hpp"
#include "magpath/reference.hpp"
#include "magpath/splitstep.hpp"

using namespace magpath;

TEST(TimeSlicing, RejectsInvalid) {
  EXPECT_THROW(TimeSlicing(0.0, 4), std::invalid_argument);
  EXPECT_THROW(TimeSlicing(1.0, 0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(TimeSlicing(1.0, 4).step(), 0.25);
}

TEST(FreePropagation, MatchesClosedForm) {
  const Grid g({Axis{-20, 20, 256}});
  const GaussianPacket p{{0.5}, 0.9, {-0.4}};
  EXPECT_LE(l2_distance(free_propagate_axis(p.sample(g), 0, 0.6), exact_free_gaussian(p, g, 0.6)), 1e-10);
  EXPECT_EQ(l2_distance(free_propagate_axis(p.sample(g), 0, 0.0), p.sample(g)), 0.0);
}

TEST(SliceOperator, MultipliersHaveUnitModulus) {
  const Grid g({Axis{-4, 4, 16}, Axis{-4, 4, 12}});
  const SliceOperator op(g, harmonic_potential(2, 1.0, {0, 0}), symmetric_gauge_potential(0.5), TimeSlicing(0.3, 3));
  for (cplx c : op.potential_phase()) EXPECT_NEAR(std::abs(c), 1.0, 1e-15);
  for (std::size_t l = 0; l < 2; ++l) {
    for (cplx c : op.gauge_phase(l)) EXPECT_NEAR(std::abs(c), 1.0, 1e-15);
    for (cplx c : op.kinetic_multiplier(l)) EXPECT_NEAR(std::abs(c), 1.0, 1e-15);
  }
}

TEST(SliceOperator, FreeSplittingIsExact) {
  const Grid g({Axis{-14, 14, 128}, Axis{-14, 14, 128}});
  const GaussianPacket p{{0.5, -0.5}, 1.0, {0.3, 0.2}};
  const auto psi = p.sample(g);
  const SliceOperator op(g, free_potential(2), VectorPotentialSpec::zero(2), TimeSlicing(0.5, 5));
  EXPECT_LE(l2_distance(op.evolve(psi), exact_free_gaussian(p, g, 0.5)), 1e-10);
}

TEST(SliceOperator, ConstantGaugeFieldIsPureGauge) {
  // constant a is removed by the gauge transform e^{i a.x}: F^k psi = e^{i a.x} e^{-itH_0} e^{-i a.x} psi
  const Grid g({Axis{-12, 12, 128}});
  const Point av{0.4};
  const GaussianPacket p{{0.0}, 1.0, {0.0}};
  const SliceOperator op(g, free_potential(1), constant_vector_potential(av), TimeSlicing(0.4, 2));
  const GaussianPacket shifted{{0.0}, 1.0, {-0.4}};
  const auto expected = WaveFunction::sample(g, [&](std::span<const double> x) {
    return std::polar(1.0, 0.4 * x[0]) * exact_free_gaussian(shifted, x, 0.4);
  });
  EXPECT_LE(l2_distance(op.evolve(p.sample(g)), expected), 1e-9);
}

TEST(SliceOperator, NormPreservedPerSlice) {
  const Grid g({Axis{-8, 8, 32}, Axis{-8, 8, 32}});
  const auto psi = GaussianPacket{{0.2, 0.1}, 1.0, {0.5, -0.5}}.sample(g);
  const std::size_t k = 20;
  const SliceOperator op(g, regularized_coulomb_potential(2, 1.0, 0.5, {0, 0}), landau_gauge_potential(0.8),
                         TimeSlicing(1.0, k));
  EXPECT_LE(std::abs(l2_norm(op.evolve(psi)) - l2_norm(psi)), double(k) * 1e-12);
}

TEST(SliceOperator, AxisOrderMustBePermutation) {
  const Grid g({Axis{-1, 1, 8}, Axis{-1, 1, 8}});
  SliceOptions o;
  o.axis_order = {0, 0};
  EXPECT_THROW(SliceOperator(g, free_potential(2), VectorPotentialSpec::zero(2), TimeSlicing(1, 1), o),
               std::invalid_argument);
  EXPECT_EQ(default_axis_order(3), (std::vector<std::size_t>{2, 1, 0}));
}

TEST(SliceOperator, GridMismatchThrows) {
  const Grid g({Axis{-1, 1, 8}}), other({Axis{-1, 1, 16}});
  const SliceOperator op(g, free_potential(1), VectorPotentialSpec::zero(1), TimeSlicing(1, 1));
  EXPECT_THROW(op.apply(WaveFunction::zeros(other)), GridMismatchError);
}

TEST(Chernoff, ResidualVanishesLinearlyInTwoDimensions) {
  const Grid g({Axis{-8, 8, 32}, Axis{-8, 8, 32}});
  const auto v = harmonic_potential(2, 0.25, {0, 0});
  const auto a = symmetric_gauge_potential(0.5);
  const auto h = assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096});
  const auto psi = GaussianPacket{{0.3, -0.2}, 1.0, {0.2, 0.1}}.sample(g);
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3}, res;
  for (double e : eps) res.push_back(chernoff_derivative_residual(psi, SliceOperator(g, v, a, TimeSlicing(e, 1)), h));
  EXPECT_NEAR(fit_loglog_slope(eps, res), 1.0, 0.3);
}

TEST(Trotter, ConstantFieldTwoDimensionsConverges) {
  const Grid g({Axis{-8, 8, 32}, Axis{-8, 8, 32}});
  const auto v = harmonic_potential(2, 0.25, {0, 0});
  const auto a = symmetric_gauge_potential(0.5);
  const auto psi = GaussianPacket{{0.5, 0.0}, 1.0, {0.0, 0.5}}.sample(g);
  const HamiltonianEigensystem eig(assemble_hamiltonian(g, a, v, {Stencil::fourier, 4096}));
  const auto exact = expm_evolve(eig, psi, 0.5);
  std::vector<double> ks{4, 8, 16}, err;
  for (double k : ks) err.push_back(l2_distance(SliceOperator(g, v, a, TimeSlicing(0.5, std::size_t(k))).evolve(psi), exact));
  EXPECT_GT(err[0], err[1]);
  EXPECT_GT(err[1], err[2]);
  EXPECT_NEAR(fitted_order(ks, err), 1.0, 0.2);
}
