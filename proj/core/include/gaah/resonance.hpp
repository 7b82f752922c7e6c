#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "gaah/bath.hpp"
#include "gaah/lattice.hpp"

namespace gaah::resonance {

/// Determinant stored as phase * exp(log_abs), so products of N pivots never
/// overflow or underflow.
struct ScaledDeterminant {
  std::complex<double> phase{1.0, 0.0};
  double log_abs = 0.0;
  bool zero = false;

  std::complex<double> value() const;
  /// value() * exp(-shift); finite whenever log_abs - shift is moderate.
  std::complex<double> scaled(double shift) const;
};

/// Dense complex LU with partial pivoting (row swaps), in place.
class ComplexLU {
 public:
  explicit ComplexLU(ComplexMatrix A);

  ScaledDeterminant determinant() const;
  bool singular() const noexcept { return singular_; }
  /// Solves A x = b. Exactly-zero pivots are replaced by a tiny multiple of
  /// the matrix scale so inverse iteration can run at a converged root.
  ComplexVector solve(const ComplexVector& b) const;

 private:
  ComplexMatrix lu_;
  std::vector<Eigen::Index> perm_;
  int swaps_ = 0;
  bool singular_ = false;
  double scale_ = 0.0;
};

struct Region {
  double re_min = 0.0;
  double re_max = 0.0;
  double im_min = 0.0;
  double im_max = 0.0;

  void validate() const;
  bool contains(std::complex<double> E, double slack = 0.0) const;
};

/// Number of cells along each axis; nodes are cells + 1.
struct Resolution {
  int re = 64;
  int im = 8;
};

struct Cell {
  int re_index = 0;
  int im_index = 0;
  std::complex<double> center;
};

struct DeterminantGrid {
  Region region;
  Resolution resolution;
  /// Node samples, row-major with the imaginary index outer:
  /// values[j * (resolution.re + 1) + i] at node(i, j).
  std::vector<std::complex<double>> values;
  std::vector<Cell> crossings;

  std::complex<double> node(int i, int j) const;
  std::complex<double> value(int i, int j) const {
    return values[static_cast<std::size_t>(j) * static_cast<std::size_t>(resolution.re + 1) +
                  static_cast<std::size_t>(i)];
  }
};

struct ResonancePole {
  std::complex<double> E;
  double residual = 0.0;        ///< |det M(E)| normalized by the row-norm product
  double null_residual = 0.0;   ///< ||M(E) alpha||
  ComplexVector null_vector;    ///< normalized, largest component real positive
  std::optional<double> overlap;
  int iterations = 0;
};

/// M(E) = H_S + Sigma(E) U - E I, with U the all-ones matrix.
ComplexMatrix characteristic_matrix(const lattice::ModelParams& model,
                                    const bath::BathParams& bath, std::complex<double> E,
                                    const bath::SelfEnergyOptions& opts = {});
ComplexMatrix characteristic_matrix(const lattice::Hamiltonian& H, std::complex<double> sigma,
                                    std::complex<double> E);

ScaledDeterminant char_determinant(const lattice::ModelParams& model,
                                   const bath::BathParams& bath, std::complex<double> E,
                                   const bath::SelfEnergyOptions& opts = {});

/// Samples det M on the node lattice (in parallel) and flags cells where both
/// Re(det) and Im(det) change sign among the four corners.
DeterminantGrid scan_grid(const lattice::ModelParams& model, const bath::BathParams& bath,
                          const Region& region, const Resolution& resolution,
                          const bath::SelfEnergyOptions& opts = {});

/// Newton iteration on det M(E) with a central-difference Jacobian, then
/// inverse iteration for the null vector.
ResonancePole refine_pole(const lattice::ModelParams& model, const bath::BathParams& bath,
                          std::complex<double> seed, const bath::SelfEnergyOptions& opts = {});

struct PoleSearchOptions {
  bath::SelfEnergyOptions self_energy;
  /// Defaults to [E_max - 3, E_max + 3] x [-0.2, 0].
  std::optional<Region> region;
  Resolution resolution{600, 8};
  /// Number of highest poles reported; 0 reports all.
  std::size_t count = 2;
};

/// Seeds from grid crossings and from the self-consistent iteration
/// E <- eig(H_S + Sigma(E) U) started at every closed-system level, refines,
/// merges duplicates within 1e-9 and sorts by descending Re E.
std::vector<ResonancePole> find_poles(const lattice::ModelParams& model,
                                      const bath::BathParams& bath,
                                      const PoleSearchOptions& opts = {});

Region default_region(const lattice::ModelParams& model);

/// |<v|w>|^2.
double state_overlap(const ComplexVector& v, const ComplexVector& w);

/// |Re E1 - Re E2|.
double transition_frequency(const ResonancePole& p1, const ResonancePole& p2);

}  // namespace gaah::resonance
