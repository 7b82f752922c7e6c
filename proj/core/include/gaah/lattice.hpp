#pragma once

#include <complex>
#include <numbers>
#include <optional>

#include <Eigen/Dense>

namespace gaah {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

namespace lattice {

/// Parameters of the generalized Aubry-Andre-Harper ring.
struct ModelParams {
  int N = 21;
  double lambda = 1.0;  ///< hopping amplitude
  double Delta = 0.0;   ///< quasi-periodic potential strength
  double a = 0.0;       ///< deformation, |a| < 1
  double beta = std::numbers::phi - 1.0;  // (sqrt(5) - 1) / 2
  double phi = std::numbers::pi;

  /// Throws ParameterDomainError if N < 2, |a| >= 1 or a value is not finite.
  void validate() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct Hamiltonian {
  RealMatrix matrix;
  ModelParams params;
};

/// Eigenpairs sorted by ascending energy; column i of `states` belongs to
/// `energies[i]`.
struct EigenDecomposition {
  RealVector energies;
  RealMatrix states;
};

/// Onsite energy of site n (1-based): Delta cos(x) / (1 - a cos(x)) with
/// x = 2 pi beta n + phi.
double onsite_potential(const ModelParams& params, int n);

/// Periodic ring: lambda on the off-diagonals and in the corners.
Hamiltonian build_hamiltonian(const ModelParams& params);

/// Dense symmetric eigensolver. Each eigenvector is phase-fixed so its
/// largest-magnitude component is positive.
EigenDecomposition diagonalize(const Hamiltonian& H);
EigenDecomposition diagonalize(const RealMatrix& H);

/// Mobility edge E_c = sign(lambda) (2|lambda| - |Delta|) / a; absent at a = 0.
std::optional<double> mobility_edge(const ModelParams& params);

/// Inverse participation ratio of the normalized vector.
double state_ipr(const ComplexVector& v);
double state_ipr(const RealVector& v);

/// Eigenvector of the largest eigenvalue (last column after the sort),
/// promoted to complex amplitudes.
ComplexVector highest_excited_state(const EigenDecomposition& d);

}  // namespace lattice
}  // namespace gaah
