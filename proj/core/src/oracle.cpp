#include "gaah/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "gaah/errors.hpp"

namespace gaah::oracle {

namespace {

constexpr const char* kModule = "discrete-bath-oracle";
using cplx = std::complex<double>;

ObservableDeviation deviation(const std::string& name, const std::vector<double>& a,
                              const std::vector<double>& b) {
  ObservableDeviation d{name, 0.0, 0.0};
  double sum2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = std::abs(a[i] - b[i]);
    d.max = std::max(d.max, e);
    sum2 += e * e;
  }
  d.rms = a.empty() ? 0.0 : std::sqrt(sum2 / static_cast<double>(a.size()));
  return d;
}

}  // namespace

double DiscreteBath::recurrence_time() const {
  return 2.0 * std::numbers::pi / spacing();
}

double DiscreteBath::coupling_weight() const {
  double s = 0.0;
  for (double g : couplings) s += g * g;
  return s;
}

DiscreteBath discretize_bath(const bath::BathParams& bath, std::size_t M, double omega_max) {
  bath.validate();
  if (M < 2) throw ParameterDomainError(kModule, "discretize_bath: need at least 2 modes");
  if (!(omega_max > 0.0) || !std::isfinite(omega_max)) {
    throw ParameterDomainError(kModule, "discretize_bath: omega_max must be > 0");
  }
  DiscreteBath db;
  db.omega_max = omega_max;
  db.omegas.resize(M);
  db.couplings.resize(M);
  const double d = omega_max / static_cast<double>(M);
  for (std::size_t k = 0; k < M; ++k) {
    const double w = (static_cast<double>(k) + 0.5) * d;
    db.omegas[k] = w;
    db.couplings[k] = std::sqrt(bath::spectral_density(bath, w) * d);
  }
  return db;
}

OracleRun evolve_full(const lattice::ModelParams& model, const DiscreteBath& db,
                      const FullState& init, const dynamics::TimeGrid& grid,
                      std::size_t norm_checkpoints) {
  model.validate();
  grid.validate();
  const Eigen::Index N = model.N;
  const Eigen::Index M = static_cast<Eigen::Index>(db.size());
  if (init.sites.size() != N || init.modes.size() != M) {
    throw ParameterDomainError(kModule, "evolve_full: initial state does not match N + M");
  }
  if (std::abs(init.norm() - 1.0) > 1e-10) {
    throw ParameterDomainError(kModule, "evolve_full: initial state must be normalized");
  }
  const Eigen::Index D = N + M;
  RealMatrix H = RealMatrix::Zero(D, D);
  H.topLeftCorner(N, N) = lattice::build_hamiltonian(model).matrix;
  for (Eigen::Index k = 0; k < M; ++k) {
    const double g = db.couplings[static_cast<std::size_t>(k)];
    H(N + k, N + k) = db.omegas[static_cast<std::size_t>(k)];
    H.block(0, N + k, N, 1).setConstant(g);
    H.block(N + k, 0, 1, N).setConstant(g);
  }
  const Eigen::SelfAdjointEigenSolver<RealMatrix> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericFailure(kModule, "evolve_full: eigensolver did not converge");
  }
  const RealVector& lambda = es.eigenvalues();
  const RealMatrix& V = es.eigenvectors();

  ComplexVector psi0(D);
  psi0 << init.sites, init.modes;
  const ComplexVector coeff = V.transpose().cast<cplx>() * psi0;
  const ComplexMatrix V_sites = V.topRows(N).cast<cplx>();

  dynamics::Trajectory traj;
  traj.grid = grid;
  traj.model = model;
  traj.recurrence_time = db.recurrence_time();
  traj.metadata = {{"solver", "discrete bath exact diagonalization"},
                   {"modes", std::to_string(M)},
                   {"omega_max", std::to_string(db.omega_max)}};

  OracleRun run;
  const ComplexVector reference = init.sites.normalized();
  const std::size_t checkpoint_every =
      std::max<std::size_t>(1, grid.steps / std::max<std::size_t>(1, norm_checkpoints));
  ComplexVector rotated(D);
  for (std::size_t n = 0; n <= grid.steps; ++n) {
    const double t = grid.time(n);
    for (Eigen::Index k = 0; k < D; ++k) {
      rotated[k] = coeff[k] * std::polar(1.0, -lambda[k] * t);
    }
    const ComplexVector sites = V_sites * rotated;
    dynamics::record_observables(traj, sites, reference);
    if (n % checkpoint_every == 0 || n == grid.steps) {
      const ComplexVector full = V.cast<cplx>() * rotated;
      const double drift = std::abs(full.squaredNorm() - 1.0);
      run.max_norm_drift = std::max(run.max_norm_drift, drift);
      if (drift > 1e-6) {
        throw InstabilityError(kModule, "evolve_full: total norm drifted by " + std::to_string(drift),
                               n);
      }
      if (n == grid.steps) {
        run.final_state.sites = full.head(N);
        run.final_state.modes = full.tail(M);
      }
    }
  }
  run.trajectory = std::move(traj);
  return run;
}

const ObservableDeviation& DeviationReport::get(const std::string& name) const {
  for (const auto& o : observables) {
    if (o.name == name) return o;
  }
  throw ParameterDomainError(kModule, "no observable named " + name);
}

DeviationReport compare_trajectories(const dynamics::Trajectory& a,
                                     const dynamics::Trajectory& b, double tolerance) {
  if (!(a.grid == b.grid) || a.size() != b.size()) {
    throw ParameterDomainError(kModule, "compare_trajectories: time grids differ");
  }
  for (const auto* t : {&a, &b}) {
    if (t->recurrence_time && t->grid.t_max() >= *t->recurrence_time) {
      throw ParameterDomainError(kModule,
                                 "compare_trajectories: t_max " + std::to_string(t->grid.t_max()) +
                                     " reaches the finite-bath recurrence time " +
                                     std::to_string(*t->recurrence_time));
    }
  }
  DeviationReport r;
  r.tolerance = tolerance;
  r.observables = {deviation("SP", a.sp, b.sp), deviation("IPR", a.ipr, b.ipr),
                   deviation("norm", a.norm, b.norm),
                   deviation("variance", a.variance, b.variance)};
  r.passed = r.get("SP").max <= tolerance && r.get("IPR").max <= tolerance;
  return r;
}

ValidationResult validate_against_oracle(const lattice::ModelParams& model,
                                         const bath::BathParams& bath,
                                         const dynamics::TimeGrid& grid,
                                         const ValidationSettings& settings) {
  const auto eig = lattice::diagonalize(lattice::build_hamiltonian(model));
  const ComplexVector es = lattice::highest_excited_state(eig);
  const auto db = discretize_bath(bath, settings.modes, settings.omega_max);
  FullState init{es, ComplexVector::Zero(static_cast<Eigen::Index>(db.size()))};

  ValidationResult out;
  dynamics::SolverOptions solver;
  solver.band_limit = settings.omega_max;
  out.volterra = dynamics::evolve(model, bath, {es}, grid, {}, solver);
  auto run = evolve_full(model, db, init, grid);
  run.trajectory.bath = bath;
  out.oracle = std::move(run.trajectory);
  out.report = compare_trajectories(out.volterra, out.oracle, settings.tolerance);
  return out;
}

}  // namespace gaah::oracle
