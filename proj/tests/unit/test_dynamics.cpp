#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include <gaah/bath.hpp>
#include <gaah/dynamics.hpp>
#include <gaah/errors.hpp>

#include "support.hpp"

using namespace gaah;
using gaah::testing::model;
using gaah::testing::top_state;
using cd = std::complex<double>;

namespace {

bath::BathParams ohmic(double eta = 0.1) {
  bath::BathParams b;
  b.eta = eta;
  return b;
}

// Closed-form integral of the s = 1 kernel: int_0^T eta / (i u + 1/wc)^2 du.
cd kernel_integral(double eta, double wc, double T) {
  return eta / cd(0.0, 1.0) * (wc - 1.0 / cd(1.0 / wc, T));
}

double max_sp_gap(const dynamics::Trajectory& coarse, const dynamics::Trajectory& fine) {
  double d = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) d = std::max(d, std::abs(coarse.sp[i] - fine.sp[2 * i]));
  return d;
}

}  // namespace

TEST(Observables, SurvivalProbability) {
  const ComplexVector v = top_state(model(0.0, 2.5));
  EXPECT_NEAR(dynamics::survival_probability({v}, {v}), 1.0, 1e-14);
  ComplexVector e1 = ComplexVector::Zero(4), e2 = ComplexVector::Zero(4);
  e1(0) = 1.0;
  e2(1) = cd(0.0, 1.0);
  EXPECT_EQ(dynamics::survival_probability({e1}, {e2}), 0.0);
}

TEST(Observables, IprHomogeneity) {
  ComplexVector site = ComplexVector::Zero(21);
  site(3) = 1.0;
  EXPECT_DOUBLE_EQ(dynamics::ipr({site}), 1.0);
  const ComplexVector uniform = ComplexVector::Constant(21, 1.0 / std::sqrt(21.0));
  EXPECT_NEAR(dynamics::ipr({uniform}), 1.0 / 21.0, 1e-15);
  const ComplexVector v = top_state(model(0.0, 2.5));
  EXPECT_NEAR(dynamics::ipr({0.7 * v}), std::pow(0.7, 4) * dynamics::ipr({v}), 1e-15);
}

TEST(Observables, PositionVariance) {
  ComplexVector site = ComplexVector::Zero(21);
  site(10) = 1.0;
  EXPECT_EQ(dynamics::position_variance({site}), 0.0);
  const ComplexVector uniform = ComplexVector::Constant(21, 1.0 / std::sqrt(21.0));
  EXPECT_NEAR(dynamics::position_variance({uniform}), (21.0 * 21.0 - 1.0) / 12.0, 1e-12);
  // Normalized: scaling the amplitudes leaves it unchanged.
  EXPECT_NEAR(dynamics::position_variance({0.3 * uniform}), (21.0 * 21.0 - 1.0) / 12.0, 1e-12);
}

TEST(TimeGrid, Validation) {
  EXPECT_THROW((dynamics::TimeGrid{0.0, 10}).validate(), ParameterDomainError);
  EXPECT_THROW((dynamics::TimeGrid{0.1, 0}).validate(), ParameterDomainError);
  EXPECT_NEAR((dynamics::TimeGrid{0.02, 20000}).t_max(), 400.0, 1e-12);
}

TEST(KernelTable, CumulativeMatchesClosedForm) {
  const bath::MemoryKernel f(ohmic());
  const dynamics::KernelTable table(f, 0.02, 200);
  for (std::size_t m : {1u, 5u, 50u, 199u}) {
    EXPECT_NEAR(std::abs(table.cumulative(m) - kernel_integral(0.1, 10.0, 0.02 * m)), 0.0, 1e-12) << m;
  }
}

TEST(KernelTable, ExactForConstantAndQuadraticHistory) {
  const bath::MemoryKernel f(ohmic());
  const double dt = 0.05;
  const std::size_t n = 40;
  const dynamics::KernelTable table(f, dt, n + 1);

  std::vector<double> one(n + 1, 1.0), zero(n + 1, 0.0);
  EXPECT_NEAR(std::abs(table.memory(one, zero, n) - table.cumulative(n)), 0.0, 1e-12);

  // S(tau) = tau^2: int_0^t tau^2 f(t - tau) d tau by fine Simpson as reference.
  std::vector<double> sq(n + 1);
  for (std::size_t i = 0; i <= n; ++i) sq[i] = std::pow(dt * i, 2);
  const double t = dt * n;
  const int panels = 200000;
  const double h = t / panels;
  cd ref = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double tau = k * h;
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    ref += w * tau * tau * bath::memory_kernel(ohmic(), t - tau);
  }
  ref *= h / 3.0;
  EXPECT_NEAR(std::abs(table.memory(sq, zero, n) - ref), 0.0, 1e-9);

  // history + coefficient * S_n reproduces the full sum.
  const auto split = table.split(sq, zero, n);
  EXPECT_NEAR(std::abs(split.history + split.coefficient * sq[n] - table.memory(sq, zero, n)), 0.0, 1e-13);
}

TEST(KernelTable, WindowDropsOldCells) {
  const bath::MemoryKernel f(ohmic());
  const dynamics::KernelTable full(f, 0.1, 50);
  const dynamics::KernelTable cut(f, 0.1, 50, 10);
  std::vector<double> one(50, 1.0), zero(50, 0.0);
  EXPECT_EQ(full.memory(one, zero, 5), cut.memory(one, zero, 5));
  EXPECT_LT(std::abs(cut.memory(one, zero, 40) - full.cumulative(10)), 1e-12);
}

TEST(VolterraSystem, DissipativeTermIsSiteIndependent) {
  const dynamics::VolterraSystem sys(lattice::build_hamiltonian(model(0.0, 2.5)));
  const cd I(0.3, -0.7);
  const ComplexVector d = sys.dissipative_term(I);
  ASSERT_EQ(d.size(), 21);
  for (Eigen::Index n = 0; n < d.size(); ++n) EXPECT_EQ(d(n), -I);

  const ComplexVector v = top_state(model(0.0, 2.5));
  const ComplexVector closed = cd(0.0, -1.0) * (sys.hamiltonian().matrix.cast<cd>() * v);
  EXPECT_NEAR((sys.rhs(v, I) - closed - d).norm(), 0.0, 1e-14);
}

TEST(Evolve, DecoupledEigenstateIsStationary) {
  const auto m = model(0.0, 2.5);
  const auto tr = dynamics::evolve(m, ohmic(0.0), {top_state(m)}, {0.01, 10000});
  ASSERT_EQ(tr.size(), 10001u);
  for (double sp : tr.sp) ASSERT_NEAR(sp, 1.0, 1e-8);
  for (double nm : tr.norm) ASSERT_NEAR(nm, 1.0, 1e-8);
}

TEST(Evolve, DecoupledSiteStateKeepsNorm) {
  const auto m = model(0.5, 1.0);
  ComplexVector site = ComplexVector::Zero(21);
  site(7) = 1.0;
  const auto tr = dynamics::evolve(m, ohmic(0.0), {site}, {0.02, 2000});
  for (double nm : tr.norm) ASSERT_NEAR(nm, 1.0, 1e-10);
}

TEST(Evolve, NormNeverExceedsOne) {
  for (double a : {0.0, 0.5}) {
    for (double D : {1.0, 2.5, 6.0}) {
      for (double eta : {0.1, 0.5}) {
        const auto m = model(a, D);
        const auto tr = dynamics::evolve(m, ohmic(eta), {top_state(m)}, {0.02, 5000});
        for (double nm : tr.norm) ASSERT_LE(nm, 1.0 + 1e-6) << a << " " << D << " " << eta;
        EXPECT_LT(tr.norm.back(), 1.0);
      }
    }
  }
}

TEST(Evolve, RecordsSeriesAndMetadata) {
  const auto m = model(0.0, 2.5);
  const auto tr = dynamics::evolve(m, ohmic(), {top_state(m)}, {0.05, 100}, {.site_amplitudes = true});
  EXPECT_EQ(tr.sp.size(), 101u);
  EXPECT_EQ(tr.ipr.size(), 101u);
  EXPECT_EQ(tr.variance.size(), 101u);
  EXPECT_EQ(tr.collective.size(), 101u);
  ASSERT_EQ(tr.sites.size(), 101u);
  EXPECT_NEAR(std::abs(tr.sites[50].sum() - tr.collective[50]), 0.0, 1e-14);
  EXPECT_FALSE(tr.metadata.empty());
  EXPECT_FALSE(tr.recurrence_time.has_value());
}

TEST(Evolve, RejectsUnnormalizedStart) {
  const auto m = model(0.0, 2.5);
  EXPECT_THROW(dynamics::evolve(m, ohmic(), {2.0 * top_state(m)}, {0.01, 10}), ParameterDomainError);
  EXPECT_THROW(dynamics::evolve(m, ohmic(), {ComplexVector::Zero(5)}, {0.01, 10}), ParameterDomainError);
}

TEST(Evolve, AtLeastSecondOrderUnderHalving) {
  const auto m = model(0.0, 2.5);
  const auto b = ohmic();
  const ComplexVector v = top_state(m);
  const auto t1 = dynamics::evolve(m, b, {v}, {0.04, 500});
  const auto t2 = dynamics::evolve(m, b, {v}, {0.02, 1000});
  const auto t3 = dynamics::evolve(m, b, {v}, {0.01, 2000});
  const double e1 = max_sp_gap(t1, t2), e2 = max_sp_gap(t2, t3);
  EXPECT_GT(e1 / e2, 3.5) << e1 << " " << e2;
}

TEST(Evolve, MarkovianVariantDecaysMonotonically) {
  const auto m = model(0.0, 2.5);
  const auto tr = dynamics::evolve(m, ohmic(), {top_state(m)}, {0.02, 2000}, {}, {.markovian = true, .kernel_window = 0, .band_limit = std::nullopt});
  for (std::size_t i = 1; i < tr.size(); ++i) ASSERT_LE(tr.norm[i], tr.norm[i - 1] + 1e-12);
  EXPECT_LT(tr.norm.back(), 1.0);
}

TEST(Evolve, KernelWindowConvergesToFullHistory) {
  const auto m = model(0.0, 2.5);
  const ComplexVector v = top_state(m);
  const auto full = dynamics::evolve(m, ohmic(), {v}, {0.02, 2000});
  const auto windowed = dynamics::evolve(m, ohmic(), {v}, {0.02, 2000}, {}, {.markovian = false, .kernel_window = 1500, .band_limit = std::nullopt});
  double d = 0.0;
  for (std::size_t i = 0; i < full.size(); ++i) d = std::max(d, std::abs(full.sp[i] - windowed.sp[i]));
  EXPECT_LT(d, 1e-3);
}

TEST(ConvergenceCheck, DecoupledPasses) {
  const auto m = model(0.0, 2.5);
  const auto r = dynamics::convergence_check(m, ohmic(0.0), {top_state(m)}, {0.01, 2000});
  EXPECT_LT(r.max_deviation, 1e-6);
  EXPECT_TRUE(r.passed);
}

TEST(ConvergenceCheck, CoarseStepFails) {
  const auto m = model(0.0, 2.5);
  bool rejected = false;
  try {
    rejected = !dynamics::convergence_check(m, ohmic(), {top_state(m)}, {1.0, 50}).passed;
  } catch (const NumericFailure&) {
    rejected = true;
  }
  EXPECT_TRUE(rejected);
}
