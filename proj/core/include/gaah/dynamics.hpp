#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaah/bath.hpp"
#include "gaah/lattice.hpp"

namespace gaah::dynamics {

struct TimeGrid {
  double dt = 0.01;
  std::size_t steps = 1;

  void validate() const;
  double t_max() const noexcept { return dt * static_cast<double>(steps); }
  double time(std::size_t i) const noexcept { return dt * static_cast<double>(i); }

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Site amplitudes alpha_n(t) of the single-excitation sector.
struct WaveFunction {
  ComplexVector alpha;

  double norm() const { return alpha.squaredNorm(); }
};

/// Observable time series; every series has grid.steps + 1 entries.
struct Trajectory {
  TimeGrid grid;
  std::vector<double> sp;
  std::vector<double> ipr;
  std::vector<double> norm;
  std::vector<double> variance;
  std::vector<std::complex<double>> collective;  ///< S(t) = sum_n alpha_n(t)
  std::vector<ComplexVector> sites;              ///< only when requested

  lattice::ModelParams model;
  bath::BathParams bath;
  /// Free-form provenance written into file headers (solver, mode, ...).
  std::vector<std::pair<std::string, std::string>> metadata;
  /// Finite-bath recurrence time when the trajectory comes from a discrete bath.
  std::optional<double> recurrence_time;

  std::size_t size() const noexcept { return sp.size(); }
};

struct RecordOptions {
  bool site_amplitudes = false;
};

struct SolverOptions {
  /// Replace alpha(tau) by alpha(t) under the memory integral.
  bool markovian = false;
  /// Truncate the memory sum to this many lags; 0 keeps the whole history.
  std::size_t kernel_window = 0;
  /// Use the kernel of J restricted to [0, band_limit].
  std::optional<double> band_limit;
};

/// |<reference|alpha>|^2. alpha is not renormalized.
double survival_probability(const WaveFunction& alpha, const WaveFunction& reference);

/// sum_n |alpha_n|^4 on the raw amplitudes.
double ipr(const WaveFunction& alpha);

/// Normalized second moment of the site index 1..N.
double position_variance(const WaveFunction& alpha);

/// Product-integration weights for the memory integral on a uniform grid.
///
/// On each cell S is replaced by the quadratic through three neighbouring
/// samples (the first step is linear) and the kernel moments
///   A^k_m = int_0^dt f(m dt + v) (v/dt)^k dv,  k = 0, 1, 2,
/// are computed once. The rule is exact for piecewise-quadratic S, so the
/// only kernel error is the 16-point Gauss-Legendre moment quadrature.
class KernelTable {
 public:
  /// `window` > 0 drops every cell whose lag is at least `window` steps.
  KernelTable(const std::function<std::complex<double>(double)>& kernel, double dt, std::size_t lags,
              std::size_t window = 0);

  std::size_t size() const noexcept { return A0_.size(); }
  std::complex<double> moment(int k, std::size_t m) const;
  /// int_0^{m dt} f(u) du.
  std::complex<double> cumulative(std::size_t m) const { return cumulative_[m]; }

  struct Split {
    std::complex<double> history;      ///< contribution of S_0 .. S_{n-1}
    std::complex<double> coefficient;  ///< weight of S_n
  };
  /// Memory integral at t_n written as history + coefficient * S_n; needs
  /// S_0 .. S_{n-1} (split real/imaginary storage). n >= 1.
  Split split(std::span<const double> s_re, std::span<const double> s_im, std::size_t n) const;
  /// Memory integral at t_n with S_0 .. S_n all known.
  std::complex<double> memory(std::span<const double> s_re, std::span<const double> s_im,
                              std::size_t n) const;

 private:
  std::complex<double> at(const std::vector<std::complex<double>>& v, long m) const {
    return (m >= 0 && static_cast<std::size_t>(m) < v.size()) ? v[static_cast<std::size_t>(m)]
                                                              : std::complex<double>{};
  }

  std::size_t window_;
  std::vector<std::complex<double>> A0_, A1_, A2_;
  // Backward quadratic cell weights of the newest, middle and oldest node.
  std::vector<std::complex<double>> W2_, W1_, W0_;
  // Stationary convolution weights K_l = W2_l + W1_{l-1} + W0_{l-2}.
  std::vector<double> K_re_, K_im_;
  std::vector<std::complex<double>> cumulative_;
};

/// Right-hand side of the integro-differential equation,
///   d alpha_n/dt = -i (H alpha)_n - I(t),
/// with I(t) = int_0^t S(tau) f(t - tau) dtau the single scalar memory term.
class VolterraSystem {
 public:
  explicit VolterraSystem(lattice::Hamiltonian H);

  ComplexVector rhs(const ComplexVector& alpha, std::complex<double> memory) const;
  /// The dissipative contribution alone; every entry equals -memory.
  ComplexVector dissipative_term(std::complex<double> memory) const;

  const lattice::Hamiltonian& hamiltonian() const noexcept { return H_; }

 private:
  lattice::Hamiltonian H_;
};

/// Integrates the memory-kernel equation from `init` (normalized) on `grid`.
///
/// Exponential integrator. The collective level split off below the band is
/// folded into the exactly propagated operator, the remaining memory term is
/// interpolated by the quadratic through its last three samples, and the
/// implicit endpoint is solved in closed form (it is linear in S). Third
/// order in dt after the linear first step.
Trajectory evolve(const lattice::ModelParams& model, const bath::BathParams& bath,
                  const WaveFunction& init, const TimeGrid& grid, const RecordOptions& record = {},
                  const SolverOptions& solver = {});

struct ConvergenceReport {
  double dt = 0.0;
  double max_deviation = 0.0;  ///< max |SP_dt - SP_{dt/2}| on the common grid
  double tolerance = 1e-4;
  bool passed = false;
};

/// Runs `evolve` at grid.dt and grid.dt/2 and compares SP on the coarse grid.
ConvergenceReport convergence_check(const lattice::ModelParams& model,
                                    const bath::BathParams& bath, const WaveFunction& init,
                                    const TimeGrid& grid, const SolverOptions& solver = {});

/// Observables for one state, with `reference` the SP reference.
void record_observables(Trajectory& traj, const ComplexVector& alpha,
                        const ComplexVector& reference);

}  // namespace gaah::dynamics
