#include "gaah/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <tbb/parallel_for.h>

#include "gaah/errors.hpp"

namespace gaah::resonance {

namespace {

constexpr const char* kModule = "resonance-spectrum";
using cplx = std::complex<double>;

constexpr int kMaxIterations = 100;
constexpr double kStepTolerance = 1e-12;
constexpr double kUpperHalfTolerance = 1e-12;
constexpr double kNullResidualTolerance = 1e-8;
constexpr double kMergeDistance = 1e-9;

struct Evaluator {
  lattice::Hamiltonian H;
  bath::BathParams bath;
  bath::SelfEnergyOptions opts;

  ComplexMatrix matrix(cplx E) const {
    return characteristic_matrix(H, bath::self_energy(bath, E, opts), E);
  }
  ScaledDeterminant det(cplx E) const { return ComplexLU(matrix(E)).determinant(); }
};

bool straddles(double a, double b, double c, double d) {
  const double lo = std::min({a, b, c, d});
  const double hi = std::max({a, b, c, d});
  return lo <= 0.0 && hi >= 0.0;
}

// Normalizes and fixes the global phase so the largest component is real positive.
void fix_phase(ComplexVector& v) {
  v.normalize();
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  v *= std::conj(v[k]) / std::abs(v[k]);
}

}  // namespace

cplx ScaledDeterminant::value() const { return scaled(0.0); }

cplx ScaledDeterminant::scaled(double shift) const {
  if (zero) return {};
  return phase * std::exp(log_abs - shift);
}

ComplexLU::ComplexLU(ComplexMatrix A) : lu_(std::move(A)) {
  const Eigen::Index n = lu_.rows();
  if (n != lu_.cols()) throw ParameterDomainError(kModule, "ComplexLU: matrix must be square");
  perm_.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) perm_[static_cast<std::size_t>(i)] = i;
  scale_ = lu_.cwiseAbs().maxCoeff();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    double best = std::abs(lu_(k, k));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double v = std::abs(lu_(i, k));
      if (v > best) {
        best = v;
        p = i;
      }
    }
    if (p != k) {
      lu_.row(k).swap(lu_.row(p));
      std::swap(perm_[static_cast<std::size_t>(k)], perm_[static_cast<std::size_t>(p)]);
      ++swaps_;
    }
    if (best == 0.0) {
      singular_ = true;
      continue;
    }
    const cplx pivot = lu_(k, k);
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const cplx factor = lu_(i, k) / pivot;
      lu_(i, k) = factor;
      if (factor != cplx{}) {
        lu_.row(i).tail(n - k - 1) -= factor * lu_.row(k).tail(n - k - 1);
      }
    }
  }
}

ScaledDeterminant ComplexLU::determinant() const {
  ScaledDeterminant d;
  if (singular_) {
    d.zero = true;
    d.phase = 0.0;
    d.log_abs = -std::numeric_limits<double>::infinity();
    return d;
  }
  d.phase = (swaps_ % 2 == 0) ? 1.0 : -1.0;
  for (Eigen::Index k = 0; k < lu_.rows(); ++k) {
    const cplx p = lu_(k, k);
    const double m = std::abs(p);
    d.log_abs += std::log(m);
    d.phase *= p / m;
  }
  d.phase /= std::abs(d.phase);
  return d;
}

ComplexVector ComplexLU::solve(const ComplexVector& b) const {
  const Eigen::Index n = lu_.rows();
  if (b.size() != n) throw ParameterDomainError(kModule, "ComplexLU::solve: size mismatch");
  const double floor = std::max(scale_, 1.0) * std::numeric_limits<double>::epsilon();
  ComplexVector x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = b[perm_[static_cast<std::size_t>(i)]];
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) x[i] -= lu_(i, j) * x[j];
  }
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    for (Eigen::Index j = i + 1; j < n; ++j) x[i] -= lu_(i, j) * x[j];
    cplx pivot = lu_(i, i);
    if (std::abs(pivot) < floor) pivot = floor;
    x[i] /= pivot;
  }
  return x;
}

void Region::validate() const {
  if (!(re_max > re_min) || !(im_max > im_min)) {
    throw ParameterDomainError(kModule, "region must have positive area");
  }
}

bool Region::contains(cplx E, double slack) const {
  return E.real() >= re_min - slack && E.real() <= re_max + slack &&
         E.imag() >= im_min - slack && E.imag() <= im_max + slack;
}

cplx DeterminantGrid::node(int i, int j) const {
  const double x = region.re_min + (region.re_max - region.re_min) * i / resolution.re;
  const double y = region.im_min + (region.im_max - region.im_min) * j / resolution.im;
  return {x, y};
}

ComplexMatrix characteristic_matrix(const lattice::Hamiltonian& H, cplx sigma, cplx E) {
  ComplexMatrix M = H.matrix.cast<cplx>();
  M.array() += sigma;
  M.diagonal().array() -= E;
  return M;
}

ComplexMatrix characteristic_matrix(const lattice::ModelParams& model,
                                    const bath::BathParams& bath, cplx E,
                                    const bath::SelfEnergyOptions& opts) {
  return characteristic_matrix(lattice::build_hamiltonian(model), bath::self_energy(bath, E, opts),
                               E);
}

ScaledDeterminant char_determinant(const lattice::ModelParams& model,
                                   const bath::BathParams& bath, cplx E,
                                   const bath::SelfEnergyOptions& opts) {
  return ComplexLU(characteristic_matrix(model, bath, E, opts)).determinant();
}

DeterminantGrid scan_grid(const lattice::ModelParams& model, const bath::BathParams& bath,
                          const Region& region, const Resolution& resolution,
                          const bath::SelfEnergyOptions& opts) {
  region.validate();
  if (resolution.re < 8 || resolution.im < 8) {
    throw ParameterDomainError(kModule, "scan_grid: resolution must be at least 8 per axis");
  }
  const Evaluator ev{lattice::build_hamiltonian(model), bath, opts};
  DeterminantGrid grid;
  grid.region = region;
  grid.resolution = resolution;
  const int nx = resolution.re + 1;
  const int ny = resolution.im + 1;
  grid.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  tbb::parallel_for(0, nx * ny, [&](int k) {
    const int i = k % nx;
    const int j = k / nx;
    grid.values[static_cast<std::size_t>(k)] = ev.det(grid.node(i, j)).value();
  });
  for (const auto& v : grid.values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericFailure(kModule, "scan_grid: non-finite determinant sample");
    }
  }
  for (int j = 0; j < resolution.im; ++j) {
    for (int i = 0; i < resolution.re; ++i) {
      const cplx a = grid.value(i, j), b = grid.value(i + 1, j);
      const cplx c = grid.value(i, j + 1), d = grid.value(i + 1, j + 1);
      if (straddles(a.real(), b.real(), c.real(), d.real()) &&
          straddles(a.imag(), b.imag(), c.imag(), d.imag())) {
        grid.crossings.push_back({i, j, 0.25 * (grid.node(i, j) + grid.node(i + 1, j) +
                                                grid.node(i, j + 1) + grid.node(i + 1, j + 1))});
      }
    }
  }
  return grid;
}

ResonancePole refine_pole(const lattice::ModelParams& model, const bath::BathParams& bath,
                          cplx seed, const bath::SelfEnergyOptions& opts) {
  const Evaluator ev{lattice::build_hamiltonian(model), bath, opts};
  const ScaledDeterminant d0 = ev.det(seed);
  const double shift = d0.zero ? 0.0 : d0.log_abs;
  auto f = [&](cplx E) { return ev.det(E).scaled(shift); };

  cplx E = seed;
  cplx fE = f(E);
  bool converged = fE == cplx{};
  int it = 0;
  double last_step = std::numeric_limits<double>::infinity();
  for (; it < kMaxIterations && !converged; ++it) {
    const double h = 1e-7 * (1.0 + std::abs(E));
    const cplx fx = (f(E + h) - f(E - h)) / (2.0 * h);
    const cplx fy = (f(E + cplx{0.0, h}) - f(E - cplx{0.0, h})) / (2.0 * h);
    // Real 2x2 Jacobian of (Re f, Im f) with respect to (Re E, Im E).
    const double j11 = fx.real(), j12 = fy.real(), j21 = fx.imag(), j22 = fy.imag();
    const double detJ = j11 * j22 - j12 * j21;
    cplx step;
    if (detJ != 0.0 && std::isfinite(detJ)) {
      const double dx = -(j22 * fE.real() - j12 * fE.imag()) / detJ;
      const double dy = -(-j21 * fE.real() + j11 * fE.imag()) / detJ;
      step = {dx, dy};
    } else {
      // Degenerate difference quotient: secant step from the seed.
      const cplx fs = f(seed);
      if (E == seed || fE == fs) {
        throw NumericFailure(kModule, "refine_pole: derivative vanished", std::abs(fE));
      }
      step = -fE * (E - seed) / (fE - fs);
    }

    // Backtrack while the step increases |f|, unless it is already tiny.
    cplx trial = E + step;
    cplx f_trial = f(trial);
    for (int k = 0; k < 30 && std::abs(f_trial) > std::abs(fE) && std::abs(step) > 1e-10; ++k) {
      step *= 0.5;
      trial = E + step;
      f_trial = f(trial);
    }
    E = trial;
    fE = f_trial;
    last_step = std::abs(step);
    if (!std::isfinite(E.real()) || !std::isfinite(E.imag())) {
      throw NumericFailure(kModule, "refine_pole: iterate diverged");
    }
    if (last_step < kStepTolerance || fE == cplx{}) converged = true;
  }
  if (!converged) {
    throw NumericFailure(kModule,
                         "refine_pole: no convergence in 100 iterations, best iterate " +
                             std::to_string(E.real()) + " " + std::to_string(E.imag()),
                         last_step);
  }
  if (E.imag() > kUpperHalfTolerance) {
    throw PrescriptionViolation(
        kModule, "refine_pole: converged pole has positive imaginary part " + std::to_string(E.imag()),
        E.imag());
  }

  ResonancePole pole;
  pole.E = E;
  pole.iterations = it;
  const ComplexMatrix M = ev.matrix(E);
  const ComplexLU lu(M);
  const auto det = lu.determinant();
  double log_rows = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i) log_rows += std::log(M.row(i).norm());
  pole.residual = det.zero ? 0.0 : std::exp(det.log_abs - log_rows);

  ComplexVector x = ComplexVector::Ones(M.rows()).normalized();
  for (int k = 0; k < 4; ++k) {
    x = lu.solve(x);
    x.normalize();
  }
  fix_phase(x);
  pole.null_vector = x;
  pole.null_residual = (M * x).norm();
  if (!(pole.null_residual <= kNullResidualTolerance)) {
    throw NumericFailure(kModule, "refine_pole: null vector residual above 1e-8",
                         pole.null_residual);
  }
  return pole;
}

Region default_region(const lattice::ModelParams& model) {
  const auto eig = lattice::diagonalize(lattice::build_hamiltonian(model));
  const double top = eig.energies[eig.energies.size() - 1];
  return {top - 3.0, top + 3.0, -0.2, 0.0};
}

std::vector<ResonancePole> find_poles(const lattice::ModelParams& model,
                                      const bath::BathParams& bath,
                                      const PoleSearchOptions& opts) {
  model.validate();
  bath.validate();
  const Region region = opts.region.value_or(default_region(model));
  const auto H = lattice::build_hamiltonian(model);
  const auto eig = lattice::diagonalize(H);

  std::vector<cplx> seeds;
  const auto grid = scan_grid(model, bath, region, opts.resolution, opts.self_energy);
  for (const auto& c : grid.crossings) seeds.push_back(c.center);

  // Self-consistent seeds: E is an eigenvalue of the dressed matrix at its own energy.
  const std::size_t levels = static_cast<std::size_t>(eig.energies.size());
  std::vector<cplx> fixed(levels);
  tbb::parallel_for(std::size_t{0}, levels, [&](std::size_t k) {
    cplx lambda = eig.energies[static_cast<Eigen::Index>(k)];
    const cplx start = lambda;
    try {
      for (int it = 0; it < 60; ++it) {
        ComplexMatrix A = H.matrix.cast<cplx>();
        A.array() += bath::self_energy(bath, lambda, opts.self_energy);
        const Eigen::ComplexEigenSolver<ComplexMatrix> ces(A, false);
        const auto& ev = ces.eigenvalues();
        Eigen::Index best = 0;
        (ev.array() - lambda).abs().minCoeff(&best);
        const cplx next = ev[best];
        const bool done = std::abs(next - lambda) < 1e-10;
        lambda = next;
        if (done) break;
      }
    } catch (const Error&) {
      lambda = start;
    }
    fixed[k] = lambda;
  });
  for (const auto& s : fixed) {
    if (region.contains(s, 0.05)) seeds.push_back(s);
  }

  std::vector<std::optional<ResonancePole>> refined(seeds.size());
  tbb::parallel_for(std::size_t{0}, seeds.size(), [&](std::size_t k) {
    try {
      refined[k] = refine_pole(model, bath, seeds[k], opts.self_energy);
    } catch (const NumericFailure&) {
      // Seeds that fail to converge or land in the upper half plane are dropped.
    }
  });

  std::vector<ResonancePole> poles;
  for (auto& p : refined) {
    if (p && region.contains(p->E, 1e-9)) poles.push_back(std::move(*p));
  }
  std::sort(poles.begin(), poles.end(), [](const ResonancePole& a, const ResonancePole& b) {
    if (a.E.real() != b.E.real()) return a.E.real() > b.E.real();
    return a.E.imag() > b.E.imag();
  });
  std::vector<ResonancePole> merged;
  for (auto& p : poles) {
    auto dup = std::find_if(merged.begin(), merged.end(), [&](const ResonancePole& q) {
      return std::abs(q.E - p.E) <= kMergeDistance;
    });
    if (dup == merged.end()) {
      merged.push_back(std::move(p));
    } else if (p.residual < dup->residual) {
      *dup = std::move(p);
    }
  }
  if (opts.count > 0 && merged.size() > opts.count) merged.resize(opts.count);
  return merged;
}

double state_overlap(const ComplexVector& v, const ComplexVector& w) {
  if (v.size() != w.size()) throw ParameterDomainError(kModule, "state_overlap: size mismatch");
  return std::norm(v.dot(w));
}

double transition_frequency(const ResonancePole& p1, const ResonancePole& p2) {
  return std::abs(p1.E.real() - p2.E.real());
}

}  // namespace gaah::resonance
