#include <cmath>

#include <gtest/gtest.h>

#include <gaah/errors.hpp>
#include <gaah/lattice.hpp>

#include "support.hpp"

using namespace gaah;
using gaah::testing::model;

namespace {
// Golden-ratio conjugate and the n = 1 cosine, evaluated in long double.
const long double kBeta = (std::sqrt(5.0L) - 1.0L) / 2.0L;
const double kCos1 = static_cast<double>(std::cos(2.0L * 3.14159265358979323846264338327950288L * kBeta +
                                                   3.14159265358979323846264338327950288L));
}  // namespace

TEST(Onsite, ZeroStrengthVanishes) {
  const auto m = model(0.3, 0.0);
  for (int n = 1; n <= m.N; ++n) EXPECT_EQ(lattice::onsite_potential(m, n), 0.0);
}

TEST(Onsite, UndeformedFirstSite) {
  EXPECT_NEAR(lattice::onsite_potential(model(0.0, 1.0), 1), kCos1, 1e-14);
  EXPECT_NEAR(kCos1, 0.737369, 1e-6);
}

TEST(Onsite, DeformedDenominator) {
  EXPECT_NEAR(lattice::onsite_potential(model(0.5, 1.0), 1), kCos1 / (1.0 - 0.5 * kCos1), 1e-13);
}

TEST(Onsite, RejectsBadIndexAndDeformation) {
  EXPECT_THROW(lattice::onsite_potential(model(0.0, 1.0), 0), ParameterDomainError);
  EXPECT_THROW(lattice::onsite_potential(model(0.0, 1.0), 22), ParameterDomainError);
  EXPECT_THROW(lattice::onsite_potential(model(1.0, 1.0), 1), ParameterDomainError);
}

TEST(Hamiltonian, ThreeSiteRing) {
  const auto H = lattice::build_hamiltonian(model(0.0, 0.0, 3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) EXPECT_EQ(H.matrix(i, j), i == j ? 0.0 : 1.0);
}

TEST(Hamiltonian, SymmetricWithPeriodicCorners) {
  const auto m = model(0.0, 2.0);
  const auto H = lattice::build_hamiltonian(m);
  EXPECT_EQ((H.matrix - H.matrix.transpose()).norm(), 0.0);
  EXPECT_EQ(H.matrix(0, 20), 1.0);
  EXPECT_EQ(H.matrix(20, 0), 1.0);
  double trace = 0.0;
  for (int n = 1; n <= m.N; ++n) trace += lattice::onsite_potential(m, n);
  EXPECT_NEAR(H.matrix.trace(), trace, 1e-13);
}

TEST(Hamiltonian, RejectsInvalidParameters) {
  EXPECT_THROW(lattice::build_hamiltonian(model(1.2, 1.0)), ParameterDomainError);
  EXPECT_THROW(lattice::build_hamiltonian(model(0.0, 1.0, 1)), ParameterDomainError);
}

TEST(Diagonalize, RingSpectrumMatchesCosineBand) {
  const auto d = lattice::diagonalize(lattice::build_hamiltonian(model(0.0, 0.0, 3)));
  // 2 cos(2 pi m / 3), m = 0, 1, 2
  EXPECT_NEAR(d.energies(0), 2.0 * std::cos(2.0 * M_PI / 3.0), 1e-13);
  EXPECT_NEAR(d.energies(1), 2.0 * std::cos(4.0 * M_PI / 3.0), 1e-13);
  EXPECT_NEAR(d.energies(2), 2.0, 1e-13);
}

TEST(Diagonalize, ScaledIdentity) {
  const auto d = lattice::diagonalize(RealMatrix(2.5 * RealMatrix::Identity(5, 5)));
  for (int k = 0; k < 5; ++k) EXPECT_NEAR(d.energies(k), 2.5, 1e-14);
}

TEST(Diagonalize, ResidualsAndOrthonormality) {
  for (double a : {0.0, 0.5}) {
    const auto H = lattice::build_hamiltonian(model(a, 2.5));
    const auto d = lattice::diagonalize(H);
    for (Eigen::Index k = 0; k < d.energies.size(); ++k) {
      EXPECT_LE((H.matrix * d.states.col(k) - d.energies(k) * d.states.col(k)).norm(), 1e-10);
    }
    EXPECT_LE((d.states.transpose() * d.states - RealMatrix::Identity(21, 21)).norm(), 1e-12);
  }
}

TEST(MobilityEdge, Values) {
  EXPECT_FALSE(lattice::mobility_edge(model(0.0, 3.0)).has_value());
  EXPECT_NEAR(*lattice::mobility_edge(model(0.5, 1.0)), 2.0, 1e-15);
  EXPECT_NEAR(*lattice::mobility_edge(model(0.5, 2.0)), 0.0, 1e-15);
}

TEST(Ipr, Limits) {
  ComplexVector site = ComplexVector::Zero(21);
  site(4) = 1.0;
  EXPECT_DOUBLE_EQ(lattice::state_ipr(site), 1.0);
  const ComplexVector uniform = ComplexVector::Constant(21, 1.0 / std::sqrt(21.0));
  EXPECT_NEAR(lattice::state_ipr(uniform), 1.0 / 21.0, 1e-15);
}

TEST(Ipr, TopStateLocalizesWithStrength) {
  double prev = 0.0;
  for (double D : {1.0, 2.0, 4.0}) {
    const double v = lattice::state_ipr(gaah::testing::top_state(model(0.0, D)));
    EXPECT_GT(v, prev) << "Delta = " << D;
    prev = v;
  }
}

TEST(TopState, UniformOnBareRing) {
  const auto v = gaah::testing::top_state(model(0.0, 0.0, 3));
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(std::abs(v(i)), 1.0 / std::sqrt(3.0), 1e-12);
}

TEST(TopState, LiesOnLocalizedSideOfEdge) {
  const auto m = model(0.5, 1.0);
  const auto H = lattice::build_hamiltonian(m);
  const auto d = lattice::diagonalize(H);
  const auto v = lattice::highest_excited_state(d);
  EXPECT_NEAR(v.norm(), 1.0, 1e-14);
  const double E = (v.adjoint() * H.matrix.cast<std::complex<double>>() * v)(0).real();
  EXPECT_NEAR(E, d.energies(20), 1e-12);
  EXPECT_GT(E, *lattice::mobility_edge(m));
}
