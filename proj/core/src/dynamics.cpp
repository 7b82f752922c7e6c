#include "gaah/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "gaah/errors.hpp"

namespace gaah::dynamics {

namespace {

constexpr const char* kModule = "volterra-dynamics";
using cplx = std::complex<double>;

// int_0^1 exp(z (1 - x)) x^k dx = k! phi_{k+1}(z), with
// phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2.
cplx phi1(cplx z) {
  if (std::abs(z) < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
  return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
  if (std::abs(z) < 1e-3) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
  return (std::exp(z) - 1.0 - z) / (z * z);
}

// phi3(z) = (e^z - 1 - z - z^2/2)/z^3
cplx phi3(cplx z) {
  if (std::abs(z) < 1e-2) return 1.0 / 6.0 + z / 24.0 + z * z / 120.0 + z * z * z / 720.0;
  return (std::exp(z) - 1.0 - z - 0.5 * z * z) / (z * z * z);
}

std::string fmt(double v) { return std::to_string(v); }

// Real solution E <= 0 of E = lowest eigenvalue of H + Sigma(E) U, i.e. the
// collective level split off below the band. Clamped to the self-energy
// domain; the result only tunes the splitting, never the solution.
struct Dressing {
  double energy = 0.0;
  double sigma = 0.0;
};

Dressing collective_dressing(const lattice::Hamiltonian& H, const bath::BathParams& bath) {
  if (bath.eta == 0.0) return {};
  const double floor = -10.0 * bath.omega_c;
  auto clamp = [&](double E) { return std::clamp(E, floor, 0.0); };
  double E = clamp(lattice::diagonalize(H).energies[0]);
  for (int it = 0; it < 200; ++it) {
    const double sigma = bath::self_energy(bath, E).real();
    const RealMatrix A = H.matrix.array() + sigma;
    const double next = clamp(lattice::diagonalize(A).energies[0]);
    const bool done = std::abs(next - E) < 1e-12 * (1.0 + std::abs(E));
    E = next;
    if (done) break;
  }
  return {E, bath::self_energy(bath, E).real()};
}

}  // namespace

void TimeGrid::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterDomainError(kModule, "grid.dt must be > 0");
  if (steps < 1) throw ParameterDomainError(kModule, "grid must have at least one step");
}

double survival_probability(const WaveFunction& alpha, const WaveFunction& reference) {
  if (alpha.alpha.size() != reference.alpha.size()) {
    throw ParameterDomainError(kModule, "survival_probability: size mismatch");
  }
  return std::norm(reference.alpha.dot(alpha.alpha));
}

double ipr(const WaveFunction& alpha) {
  double s = 0.0;
  for (const auto& c : alpha.alpha) s += std::norm(c) * std::norm(c);
  return s;
}

double position_variance(const WaveFunction& alpha) {
  const auto& v = alpha.alpha;
  const double total = v.squaredNorm();
  if (!(total > 0.0)) throw ParameterDomainError(kModule, "position_variance: zero vector");
  double mean = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) mean += std::norm(v[i]) * static_cast<double>(i + 1);
  mean /= total;
  double var = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double d = static_cast<double>(i + 1) - mean;
    var += std::norm(v[i]) * d * d;
  }
  return var / total;
}

KernelTable::KernelTable(const std::function<cplx(double)>& kernel, double dt, std::size_t lags,
                         std::size_t window)
    : window_(window),
      A0_(lags),
      A1_(lags),
      A2_(lags),
      W2_(lags),
      W1_(lags),
      W0_(lags),
      K_re_(lags),
      K_im_(lags),
      cumulative_(lags + 1) {
  using boost::math::quadrature::gauss;
  const std::size_t active = window > 0 ? std::min(window, lags) : lags;
  for (std::size_t m = 0; m < active; ++m) {
    const double t0 = dt * static_cast<double>(m);
    // One set of kernel samples serves all three moments.
    const auto& x = gauss<double, 16>::abscissa();
    const auto& w = gauss<double, 16>::weights();
    cplx a0{}, a1{}, a2{};
    auto add = [&](double xi, double wi) {
      const double r = 0.5 * (1.0 + xi);  // v/dt on [0, 1]
      const cplx f = kernel(t0 + r * dt) * (0.5 * dt * wi);
      a0 += f;
      a1 += f * r;
      a2 += f * r * r;
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        add(0.0, w[i]);
      } else {
        add(x[i], w[i]);
        add(-x[i], w[i]);
      }
    }
    A0_[m] = a0;
    A1_[m] = a1;
    A2_[m] = a2;
    // Lagrange weights on nodes x = v/dt in {0, 1, 2} (newest, middle, oldest).
    W2_[m] = 0.5 * (a2 - 3.0 * a1 + 2.0 * a0);
    W1_[m] = 2.0 * a1 - a2;
    W0_[m] = 0.5 * (a2 - a1);
  }
  for (std::size_t l = 0; l < lags; ++l) {
    const long li = static_cast<long>(l);
    const cplx k = at(W2_, li) + at(W1_, li - 1) + at(W0_, li - 2);
    K_re_[l] = k.real();
    K_im_[l] = k.imag();
  }
  cumulative_[0] = 0.0;
  for (std::size_t m = 0; m < lags; ++m) cumulative_[m + 1] = cumulative_[m] + A0_[m];
}

cplx KernelTable::moment(int k, std::size_t m) const {
  switch (k) {
    case 0: return A0_[m];
    case 1: return A1_[m];
    case 2: return A2_[m];
    default: throw ParameterDomainError(kModule, "KernelTable::moment: k must be 0, 1 or 2");
  }
}

KernelTable::Split KernelTable::split(std::span<const double> s_re, std::span<const double> s_im,
                                      std::size_t n) const {
  auto S = [&](std::size_t j) { return cplx{s_re[j], s_im[j]}; };
  if (n == 1) return {S(0) * A1_[0], A0_[0] - A1_[0]};
  const long ni = static_cast<long>(n);

  // Cells 1 .. n-1: backward quadratic, stationary in the lag.
  Split out{{}, cplx{K_re_[0], K_im_[0]}};
  const std::size_t reach = window_ > 0 ? window_ + 2 : n;
  const std::size_t first = n > reach ? std::max<std::size_t>(2, n - reach) : 2;
  double re = 0.0, im = 0.0;
  const double* kr = K_re_.data();
  const double* ki = K_im_.data();
  for (std::size_t j = first; j < n; ++j) {
    const std::size_t l = n - j;
    re += s_re[j] * kr[l] - s_im[j] * ki[l];
    im += s_re[j] * ki[l] + s_im[j] * kr[l];
  }
  out.history = {re, im};
  out.history += S(1) * (at(W1_, ni - 2) + at(W0_, ni - 3)) + S(0) * at(W0_, ni - 2);

  // Cell 0: forward quadratic on S_0, S_1, S_2 at lag n-1.
  const long m = ni - 1;
  const cplx a0 = at(A0_, m), a1 = at(A1_, m), a2 = at(A2_, m);
  out.history += S(1) * (a0 - a2) + S(0) * (0.5 * (a2 + a1));
  const cplx w_s2 = 0.5 * (a2 - a1);
  if (n == 2) {
    out.coefficient += w_s2;
  } else {
    out.history += S(2) * w_s2;
  }
  return out;
}

cplx KernelTable::memory(std::span<const double> s_re, std::span<const double> s_im,
                         std::size_t n) const {
  if (n == 0) return {};
  const auto sp = split(s_re, s_im, n);
  return sp.history + sp.coefficient * cplx{s_re[n], s_im[n]};
}

VolterraSystem::VolterraSystem(lattice::Hamiltonian H) : H_(std::move(H)) {}

ComplexVector VolterraSystem::rhs(const ComplexVector& alpha, cplx memory) const {
  ComplexVector out = cplx{0.0, -1.0} * (H_.matrix.cast<cplx>() * alpha);
  out += dissipative_term(memory);
  return out;
}

ComplexVector VolterraSystem::dissipative_term(cplx memory) const {
  return ComplexVector::Constant(H_.matrix.rows(), -memory);
}

void record_observables(Trajectory& traj, const ComplexVector& alpha,
                        const ComplexVector& reference) {
  const WaveFunction wf{alpha};
  traj.sp.push_back(std::norm(reference.dot(alpha)));
  traj.ipr.push_back(ipr(wf));
  const double n2 = alpha.squaredNorm();
  traj.norm.push_back(n2);
  traj.variance.push_back(n2 > 0.0 ? position_variance(wf) : 0.0);
  traj.collective.push_back(alpha.sum());
}

Trajectory evolve(const lattice::ModelParams& model, const bath::BathParams& bath,
                  const WaveFunction& init, const TimeGrid& grid, const RecordOptions& record,
                  const SolverOptions& solver) {
  model.validate();
  bath.validate();
  grid.validate();
  const Eigen::Index N = model.N;
  if (init.alpha.size() != N) {
    throw ParameterDomainError(kModule, "evolve: initial state has " +
                                            std::to_string(init.alpha.size()) +
                                            " amplitudes, model.N = " + std::to_string(N));
  }
  if (std::abs(init.norm() - 1.0) > 1e-10) {
    throw ParameterDomainError(kModule, "evolve: initial state must be normalized");
  }

  // The memory term is split as I = kappa S + R with kappa = i Sigma(E_b):
  // the collective level E_b then becomes an eigenmode of the exactly
  // propagated operator H + Sigma(E_b) U, and the history sum runs on S
  // demodulated by exp(i E_b t), which is slow for that level.
  const auto H = lattice::build_hamiltonian(model);
  const Dressing dressing = collective_dressing(H, bath);
  const cplx kappa{0.0, dressing.sigma};
  const double carrier = solver.markovian ? 0.0 : dressing.energy;
  const auto eig = lattice::diagonalize(RealMatrix(H.matrix.array() + dressing.sigma));
  const double dt = grid.dt;
  const std::size_t steps = grid.steps;

  // Exact propagator of the dressed lattice and the forcing profiles of the
  // exponential integrator for R, projected on the collective vector 1. The
  // linear profiles serve the first step, the quadratic ones every later step.
  const ComplexMatrix V = eig.states.cast<cplx>();
  const ComplexVector ones_eig = V.adjoint() * ComplexVector::Ones(N);
  ComplexVector phase(N), lin_now(N), lin_next(N), quad_prev(N), quad_now(N), quad_next(N);
  for (Eigen::Index k = 0; k < N; ++k) {
    const cplx z{0.0, -eig.energies[k] * dt};
    phase[k] = std::exp(z);
    const cplx m0 = phi1(z);        // int e^{z(1-x)} dx
    const cplx m1 = phi2(z);        // int e^{z(1-x)} x dx
    const cplx m2 = 2.0 * phi3(z);  // int e^{z(1-x)} x^2 dx
    const cplx o = dt * ones_eig[k];
    lin_now[k] = o * (m0 - m1);
    lin_next[k] = o * m1;
    quad_prev[k] = o * 0.5 * (m2 - m1);
    quad_now[k] = o * (m0 - m2);
    quad_next[k] = o * 0.5 * (m2 + m1);
  }
  const ComplexMatrix U = V * phase.asDiagonal() * V.adjoint();
  const ComplexVector b_lin_now = V * lin_now;
  const ComplexVector b_lin_next = V * lin_next;
  const ComplexVector b_prev = V * quad_prev;
  const ComplexVector b_now = V * quad_now;
  const ComplexVector b_next = V * quad_next;

  const bath::MemoryKernel base_kernel(bath, solver.band_limit);
  const auto kernel = [&](double u) { return base_kernel(u) * std::polar(1.0, carrier * u); };
  const KernelTable table(kernel, dt, steps + 1, solver.kernel_window);
  const bool decoupled = bath.eta == 0.0;

  Trajectory traj;
  traj.grid = grid;
  traj.model = model;
  traj.bath = bath;
  traj.metadata = {
      {"solver", "volterra exponential integrator, quadratic memory"},
      {"collective_level", fmt(dressing.energy)},
      {"potential", "Delta cos(x)/(1 - a cos(x))"},
      {"memory", solver.markovian ? "markovian" : "full history"},
      {"kernel_window", std::to_string(solver.kernel_window)},
      {"band_limit", solver.band_limit ? fmt(*solver.band_limit) : "none"},
  };
  for (auto* series : {&traj.sp, &traj.ipr, &traj.norm, &traj.variance}) series->reserve(steps + 1);
  traj.collective.reserve(steps + 1);

  const ComplexVector reference = init.alpha;
  ComplexVector alpha = init.alpha;
  std::vector<double> s_re(steps + 1), s_im(steps + 1);
  s_re[0] = alpha.sum().real();
  s_im[0] = alpha.sum().imag();
  cplx memory = -kappa * alpha.sum();  // R_0, since I_0 = 0
  cplx previous_memory{};

  record_observables(traj, alpha, reference);
  if (record.site_amplitudes) traj.sites.push_back(alpha);

  for (std::size_t n = 0; n < steps; ++n) {
    ComplexVector pred = U * alpha;
    cplx next_memory{};
    if (!decoupled) {
      const bool first = n == 0;
      const ComplexVector& b_end = first ? b_lin_next : b_next;
      if (first) {
        pred -= memory * b_lin_now;
      } else {
        pred -= memory * b_now + previous_memory * b_prev;
      }
      const cplx sigma = b_end.sum();
      if (solver.markovian) {
        const cplx F = table.cumulative(n + 1);
        next_memory = (F - kappa) * (pred.sum() / (1.0 + (F - kappa) * sigma));
      } else {
        // R_{n+1} = history + c S_{n+1} and S_{n+1} = sum(pred) - R_{n+1} sigma.
        auto sp = table.split(s_re, s_im, n + 1);
        sp.history *= std::polar(1.0, -carrier * grid.time(n + 1));
        const cplx c = sp.coefficient - kappa;
        const cplx S = (pred.sum() - sp.history * sigma) / (1.0 + c * sigma);
        next_memory = sp.history + c * S;
      }
      pred -= next_memory * b_end;
    }
    alpha = std::move(pred);
    previous_memory = memory;
    memory = next_memory;

    const cplx S = alpha.sum() * std::polar(1.0, carrier * grid.time(n + 1));
    s_re[n + 1] = S.real();
    s_im[n + 1] = S.imag();
    const double n2 = alpha.squaredNorm();
    if (!std::isfinite(n2)) {
      throw NumericFailure(kModule, "evolve: non-finite amplitude at step " + std::to_string(n + 1));
    }
    if (n2 > 1.0 + 1e-4) {
      throw InstabilityError(kModule,
                             "evolve: norm " + fmt(n2) + " exceeds bound at step " +
                                 std::to_string(n + 1),
                             n + 1);
    }
    record_observables(traj, alpha, reference);
    if (record.site_amplitudes) traj.sites.push_back(alpha);
  }
  return traj;
}

ConvergenceReport convergence_check(const lattice::ModelParams& model,
                                    const bath::BathParams& bath, const WaveFunction& init,
                                    const TimeGrid& grid, const SolverOptions& solver) {
  const TimeGrid fine{grid.dt / 2.0, grid.steps * 2};
  const auto coarse_traj = evolve(model, bath, init, grid, {}, solver);
  const auto fine_traj = evolve(model, bath, init, fine, {}, solver);
  ConvergenceReport report;
  report.dt = grid.dt;
  for (std::size_t i = 0; i < coarse_traj.size(); ++i) {
    report.max_deviation =
        std::max(report.max_deviation, std::abs(coarse_traj.sp[i] - fine_traj.sp[2 * i]));
  }
  report.passed = report.max_deviation < report.tolerance;
  return report;
}

}  // namespace gaah::dynamics
