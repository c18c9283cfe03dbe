#include "magpath/reference.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "magpath/errors.hpp"

namespace magpath {

namespace {

// Entry t[d] of a circulant stencil row, d = (m' - m) mod N.
Eigen::MatrixXd circulant(std::span<const double> row) {
  const auto n = static_cast<Eigen::Index>(row.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>((c - r + n) % n)];
  return m;
}

}  // namespace

const char* to_string(Stencil s) noexcept {
  switch (s) {
    case Stencil::central2:
      return "central2";
    case Stencil::fourier:
      return "fourier";
  }
  return "unknown";
}

Eigen::MatrixXd second_derivative_matrix(const Axis& axis, Stencil stencil) {
  const std::size_t n = axis.points;
  const double h = axis.spacing();
  std::vector<double> row(n, 0.0);
  if (stencil == Stencil::central2) {
    row[0] -= 2.0 / (h * h);
    row[1 % n] += 1.0 / (h * h);
    row[(n - 1) % n] += 1.0 / (h * h);
    return circulant(row);
  }
  // (1/N) sum_q -xi_q^2 cos(xi_q d h); symmetric in d -> N - d by construction.
  const double base = 2.0 * std::numbers::pi / axis.length();
  for (std::size_t d = 0; d <= n / 2; ++d) {
    double sum = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      const double m = q < (n + 1) / 2 ? double(q) : double(q) - double(n);
      const double xi = base * m;
      sum -= xi * xi * std::cos(2.0 * std::numbers::pi * m * double(d) / double(n));
    }
    row[d] = sum / double(n);
    if (d != 0) row[n - d] = row[d];
  }
  return circulant(row);
}

Eigen::MatrixXd first_derivative_matrix(const Axis& axis, Stencil stencil) {
  const std::size_t n = axis.points;
  const double h = axis.spacing();
  std::vector<double> row(n, 0.0);
  if (stencil == Stencil::central2) {
    row[1 % n] += 0.5 / h;
    row[(n - 1) % n] -= 0.5 / h;
    return circulant(row);
  }
  // Row offset d couples x_r to x_{r+d}: (1/N) sum_q i xi_q e^{-i xi_q d h}, Nyquist
  // mode dropped. Real part only; antisymmetric in d -> N - d by construction.
  const double base = 2.0 * std::numbers::pi / axis.length();
  for (std::size_t d = 1; d < (n + 1) / 2; ++d) {
    double sum = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      if (n % 2 == 0 && q == n / 2) continue;
      const double m = q < (n + 1) / 2 ? double(q) : double(q) - double(n);
      sum += base * m * std::sin(2.0 * std::numbers::pi * m * double(d) / double(n));
    }
    row[d] = sum / double(n);
    row[n - d] = -row[d];
  }
  return circulant(row);
}

DiscretizedHamiltonian::DiscretizedHamiltonian(Grid grid, Eigen::MatrixXcd matrix, Stencil stencil)
    : grid_(std::move(grid)), matrix_(std::move(matrix)), stencil_(stencil) {
  if (static_cast<std::size_t>(matrix_.rows()) != grid_.size() || matrix_.rows() != matrix_.cols())
    throw GridMismatchError("DiscretizedHamiltonian: matrix does not match grid");
}

double DiscretizedHamiltonian::hermiticity_defect() const {
  return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
}

WaveFunction DiscretizedHamiltonian::apply(const WaveFunction& psi) const {
  if (!(psi.grid() == grid_)) throw GridMismatchError("DiscretizedHamiltonian::apply");
  const Eigen::Map<const Eigen::VectorXcd> in(psi.values().data(),
                                              static_cast<Eigen::Index>(psi.size()));
  const Eigen::VectorXcd out = matrix_ * in;
  return WaveFunction(grid_, std::vector<cplx>(out.data(), out.data() + out.size()));
}

DiscretizedHamiltonian assemble_hamiltonian(const Grid& grid, const VectorPotentialSpec& a,
                                            const ScalarPotentialSpec& v,
                                            const AssemblyOptions& opts) {
  const std::size_t m = grid.size();
  if (m > opts.max_dense)
    throw SizeError("assemble_hamiltonian: " + std::to_string(m) +
                    " grid points exceed the dense cap of " + std::to_string(opts.max_dense));
  if (a.dim() != grid.dim() || v.dim != grid.dim())
    throw GridMismatchError("assemble_hamiltonian: field dimension does not match grid");

  const auto size = static_cast<Eigen::Index>(m);
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
  const auto potential = sample_field(v, grid);
  for (std::size_t i = 0; i < m; ++i) h(Eigen::Index(i), Eigen::Index(i)) += potential[i];

  for (std::size_t j = 0; j < grid.dim(); ++j) {
    const Axis& ax = grid.axis(j);
    const Eigen::MatrixXd lap = second_derivative_matrix(ax, opts.stencil);
    const Eigen::MatrixXd der = first_derivative_matrix(ax, opts.stencil);
    const auto aj = sample_field(a, j, grid);
    const std::size_t stride = grid.stride(j);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t mi = grid.axis_index(i, j);
      const std::size_t line = i - mi * stride;
      h(Eigen::Index(i), Eigen::Index(i)) += aj[i] * aj[i];
      for (std::size_t mk = 0; mk < ax.points; ++mk) {
        const std::size_t k = line + mk * stride;
        const double l = lap(Eigen::Index(mi), Eigen::Index(mk));
        const double d = der(Eigen::Index(mi), Eigen::Index(mk));
        if (l == 0.0 && d == 0.0) continue;
        h(Eigen::Index(i), Eigen::Index(k)) += cplx{-l, d * (aj[i] + aj[k])};
      }
    }
  }
  return DiscretizedHamiltonian(grid, std::move(h), opts.stencil);
}

HamiltonianEigensystem::HamiltonianEigensystem(const DiscretizedHamiltonian& h)
    : grid_(h.grid()), energies_(h.matrix().rows()), vectors_(h.matrix()) {
  const double defect = h.hermiticity_defect();
  if (defect > 1e-10)
    throw EigenFailureError("HamiltonianEigensystem: matrix is not Hermitian (defect " +
                            std::to_string(defect) + ")");
  const auto n = static_cast<lapack_int>(vectors_.rows());
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', n, vectors_.data(), n,
                                         energies_.data());
  if (info != 0)
    throw EigenFailureError("HamiltonianEigensystem: zheevd returned " + std::to_string(info));
}

WaveFunction HamiltonianEigensystem::eigenstate(std::size_t i) const {
  const Eigen::VectorXcd col = vectors_.col(Eigen::Index(i)) / std::sqrt(grid_.cell_volume());
  return WaveFunction(grid_, std::vector<cplx>(col.data(), col.data() + col.size()));
}

WaveFunction expm_evolve(const HamiltonianEigensystem& eig, const WaveFunction& psi, double t) {
  if (!(psi.grid() == eig.grid())) throw GridMismatchError("expm_evolve");
  const Eigen::Map<const Eigen::VectorXcd> in(psi.values().data(),
                                              static_cast<Eigen::Index>(psi.size()));
  Eigen::VectorXcd c = eig.vectors().adjoint() * in;
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) *= std::polar(1.0, -t * eig.energies()(k));
  const Eigen::VectorXcd out = eig.vectors() * c;
  return WaveFunction(psi.grid(), std::vector<cplx>(out.data(), out.data() + out.size()));
}

WaveFunction expm_evolve(const DiscretizedHamiltonian& h, const WaveFunction& psi, double t) {
  if (t == 0.0) return psi;
  return expm_evolve(HamiltonianEigensystem(h), psi, t);
}

cplx exact_free_gaussian(const GaussianPacket& packet, std::span<const double> x, double t) {
  const double s2 = packet.width * packet.width;
  const cplx w{s2, 2.0 * t};  // sigma^2 + 2 i t
  cplx value = std::pow(std::numbers::pi * s2, -0.25 * double(packet.dim()));
  for (std::size_t b = 0; b < packet.dim(); ++b) {
    const double p = packet.momentum[b];
    const double shift = x[b] - packet.center[b] - 2.0 * p * t;
    value *= std::sqrt(s2 / w) * std::exp(-shift * shift / (2.0 * w) + cplx{0.0, p * x[b] - p * p * t});
  }
  return value;
}

WaveFunction exact_free_gaussian(const GaussianPacket& packet, const Grid& grid, double t) {
  return WaveFunction::sample(
      grid, [&](std::span<const double> x) { return exact_free_gaussian(packet, x, t); });
}

cplx free_gaussian_amplitude(const GaussianPacket& phi, const GaussianPacket& psi, double t) {
  if (phi.dim() != psi.dim()) throw std::invalid_argument("free_gaussian_amplitude: dimension");
  const double sf2 = phi.width * phi.width;
  const double s2 = psi.width * psi.width;
  const cplx w{s2, 2.0 * t};
  cplx value = std::pow(std::numbers::pi * sf2, -0.25 * double(phi.dim())) *
               std::pow(std::numbers::pi * s2, -0.25 * double(psi.dim()));
  // Per axis: int exp(-A x^2 + B x + C) dx = sqrt(pi / A) exp(B^2 / (4A) + C).
  for (std::size_t b = 0; b < phi.dim(); ++b) {
    const double cf = phi.center[b];
    const double pf = phi.momentum[b];
    const double p = psi.momentum[b];
    const double mean = psi.center[b] + 2.0 * p * t;
    const cplx A = 1.0 / (2.0 * sf2) + 1.0 / (2.0 * w);
    const cplx B = cf / sf2 + mean / w + cplx{0.0, pf + p};
    const cplx C = -cf * cf / (2.0 * sf2) - mean * mean / (2.0 * w) - cplx{0.0, p * p * t};
    value *= std::sqrt(s2 / w) * std::sqrt(std::numbers::pi / A) * std::exp(B * B / (4.0 * A) + C);
  }
  return value;
}

}  // namespace magpath
