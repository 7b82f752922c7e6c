#include "gaah/lattice.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "gaah/errors.hpp"

namespace gaah::lattice {

namespace {
constexpr const char* kModule = "lattice-model";
}

void ModelParams::validate() const {
  if (N < 2) {
    throw ParameterDomainError(kModule, "model.N must be >= 2, got " + std::to_string(N));
  }
  if (!(std::abs(a) < 1.0)) {
    throw ParameterDomainError(kModule, "model.a must satisfy |a| < 1, got " + std::to_string(a));
  }
  for (double v : {lambda, Delta, a, beta, phi}) {
    if (!std::isfinite(v)) {
      throw ParameterDomainError(kModule, "model parameters must be finite");
    }
  }
}

double onsite_potential(const ModelParams& params, int n) {
  if (!(std::abs(params.a) < 1.0)) {
    throw ParameterDomainError(kModule, "onsite_potential: |a| must be < 1");
  }
  if (n < 1 || n > params.N) {
    throw ParameterDomainError(kModule, "onsite_potential: site index " + std::to_string(n) +
                                            " outside 1.." + std::to_string(params.N));
  }
  const double c = std::cos(2.0 * std::numbers::pi * params.beta * n + params.phi);
  return params.Delta * c / (1.0 - params.a * c);
}

Hamiltonian build_hamiltonian(const ModelParams& params) {
  params.validate();
  const int N = params.N;
  RealMatrix h = RealMatrix::Zero(N, N);
  // Accumulate bonds so that N = 2 picks up both (1,2) and (2,1) terms of the ring.
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    h(i, j) += params.lambda;
    h(j, i) += params.lambda;
  }
  for (int n = 1; n <= N; ++n) h(n - 1, n - 1) = onsite_potential(params, n);
  return {std::move(h), params};
}

EigenDecomposition diagonalize(const Hamiltonian& H) { return diagonalize(H.matrix); }

EigenDecomposition diagonalize(const RealMatrix& H) {
  if (H.rows() != H.cols() || H.rows() == 0) {
    throw ParameterDomainError(kModule, "diagonalize: matrix must be square and non-empty");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(H);
  if (solver.info() != Eigen::Success) {
    throw NumericFailure(kModule, "diagonalize: eigensolver did not converge");
  }
  EigenDecomposition d{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index k = 0; k < d.states.cols(); ++k) {
    Eigen::Index imax = 0;
    d.states.col(k).cwiseAbs().maxCoeff(&imax);
    if (d.states(imax, k) < 0.0) d.states.col(k) *= -1.0;
  }
  return d;
}

std::optional<double> mobility_edge(const ModelParams& params) {
  params.validate();
  if (params.a == 0.0) return std::nullopt;
  const double sgn = params.lambda >= 0.0 ? 1.0 : -1.0;
  return sgn * (2.0 * std::abs(params.lambda) - std::abs(params.Delta)) / params.a;
}

double state_ipr(const ComplexVector& v) {
  const double norm2 = v.squaredNorm();
  if (!(norm2 > 0.0)) throw ParameterDomainError(kModule, "state_ipr: zero vector");
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double p = std::norm(v[i]) / norm2;
    s += p * p;
  }
  return s;
}

double state_ipr(const RealVector& v) { return state_ipr(ComplexVector(v.cast<std::complex<double>>())); }

ComplexVector highest_excited_state(const EigenDecomposition& d) {
  const Eigen::Index top = d.states.cols() - 1;
  ComplexVector v = d.states.col(top).cast<std::complex<double>>();
  return v / v.norm();
}

}  // namespace gaah::lattice
