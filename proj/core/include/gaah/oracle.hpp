#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gaah/bath.hpp"
#include "gaah/dynamics.hpp"
#include "gaah/lattice.hpp"

namespace gaah::oracle {

/// Finite set of bath modes sampled on a midpoint grid.
struct DiscreteBath {
  std::vector<double> omegas;
  std::vector<double> couplings;
  double omega_max = 0.0;

  std::size_t size() const noexcept { return omegas.size(); }
  double spacing() const { return omega_max / static_cast<double>(omegas.size()); }
  /// 2 pi / spacing: the finite bath rephases after this time.
  double recurrence_time() const;
  double coupling_weight() const;  ///< sum_k g_k^2
};

/// Site amplitudes followed by mode amplitudes.
struct FullState {
  ComplexVector sites;
  ComplexVector modes;

  double norm() const { return sites.squaredNorm() + modes.squaredNorm(); }
};

/// omega_k = (k - 1/2) d, d = omega_max / M, g_k = sqrt(J(omega_k) d).
DiscreteBath discretize_bath(const bath::BathParams& bath, std::size_t M, double omega_max);

struct OracleRun {
  dynamics::Trajectory trajectory;
  FullState final_state;
  double max_norm_drift = 0.0;  ///< max |<psi|psi> - 1| at the checkpoints
};

/// Exact evolution of the closed (N + M) single-excitation problem,
///   H = H_S (+) diag(omega) + sum_{n,k} g_k (|n><k| + |k><n|),
/// through one full diagonalization. Observables are computed from the site
/// amplitudes only, like the memory-kernel solver.
OracleRun evolve_full(const lattice::ModelParams& model, const DiscreteBath& db,
                      const FullState& init, const dynamics::TimeGrid& grid,
                      std::size_t norm_checkpoints = 16);

struct ObservableDeviation {
  std::string name;
  double max = 0.0;
  double rms = 0.0;
};

struct DeviationReport {
  std::vector<ObservableDeviation> observables;  ///< SP, IPR, norm, variance
  double tolerance = 0.0;
  bool passed = false;  ///< max deviation of SP and IPR within tolerance

  const ObservableDeviation& get(const std::string& name) const;
};

/// Requires identical grids; refuses comparisons that reach a finite-bath
/// recurrence time carried by either trajectory.
DeviationReport compare_trajectories(const dynamics::Trajectory& a,
                                     const dynamics::Trajectory& b, double tolerance);

struct ValidationSettings {
  std::size_t modes = 2000;
  double omega_max = 80.0;
  double tolerance = 1e-3;
};

struct ValidationResult {
  DeviationReport report;
  dynamics::Trajectory volterra;
  dynamics::Trajectory oracle;
};

/// Runs the memory-kernel solver with the kernel of the band [0, omega_max]
/// and the discrete oracle from the highest excited state, then compares.
ValidationResult validate_against_oracle(const lattice::ModelParams& model,
                                         const bath::BathParams& bath,
                                         const dynamics::TimeGrid& grid,
                                         const ValidationSettings& settings = {});

}  // namespace gaah::oracle
