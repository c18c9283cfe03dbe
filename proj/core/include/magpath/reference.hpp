#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

#include "magpath/families.hpp"
#include "magpath/fields.hpp"

namespace magpath {

/// Derivative stencils for the dense Hamiltonian.
enum class Stencil {
  /// 3-point Laplacian and 2-point centred first derivative, periodic wrap.
  central2,
  /// Fourier collocation (periodic sinc) matrices; the Laplacian symbol is
  /// exactly -xi^2, the one used by the split-step propagator.
  fourier,
};

const char* to_string(Stencil s) noexcept;

struct AssemblyOptions {
  Stencil stencil = Stencil::central2;
  std::size_t max_dense = 4096;
};

/// Dense Hermitian matrix of
///   sum_j [ -L_j + i (a_j D_j + D_j a_j) + a_j^2 ] + V
/// on a periodic grid, where L_j and D_j are the second and first derivative
/// stencils along axis j.
class DiscretizedHamiltonian {
 public:
  DiscretizedHamiltonian(Grid grid, Eigen::MatrixXcd matrix, Stencil stencil);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
  Stencil stencil() const noexcept { return stencil_; }
  bool symmetrized() const noexcept { return true; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

  /// max |H - H^dagger| entry.
  double hermiticity_defect() const;
  WaveFunction apply(const WaveFunction& psi) const;

 private:
  Grid grid_;
  Eigen::MatrixXcd matrix_;
  Stencil stencil_;
};

DiscretizedHamiltonian assemble_hamiltonian(const Grid& grid, const VectorPotentialSpec& a,
                                            const ScalarPotentialSpec& v,
                                            const AssemblyOptions& opts = {});

/// Second- and first-derivative matrices along one periodic axis.
Eigen::MatrixXd second_derivative_matrix(const Axis& axis, Stencil stencil);
Eigen::MatrixXd first_derivative_matrix(const Axis& axis, Stencil stencil);

/// Eigenpairs of a discretised Hamiltonian (ascending energies, orthonormal columns).
class HamiltonianEigensystem {
 public:
  explicit HamiltonianEigensystem(const DiscretizedHamiltonian& h);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::VectorXd& energies() const noexcept { return energies_; }
  const Eigen::MatrixXcd& vectors() const noexcept { return vectors_; }

  /// Column `i` as a wave function normalised in the grid L2 norm.
  WaveFunction eigenstate(std::size_t i) const;

 private:
  Grid grid_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXcd vectors_;
};

/// e^{-itH} psi through the eigendecomposition.
WaveFunction expm_evolve(const HamiltonianEigensystem& eig, const WaveFunction& psi, double t);
WaveFunction expm_evolve(const DiscretizedHamiltonian& h, const WaveFunction& psi, double t);

/// Closed-form e^{-itH_0} applied to a Gaussian packet, H_0 = -Laplacian.
cplx exact_free_gaussian(const GaussianPacket& packet, std::span<const double> x, double t);
WaveFunction exact_free_gaussian(const GaussianPacket& packet, const Grid& grid, double t);

/// Closed-form int phi(x) [e^{-itH_0} psi](x) dx over R^n (no conjugation).
cplx free_gaussian_amplitude(const GaussianPacket& phi, const GaussianPacket& psi, double t);

}  // namespace magpath
