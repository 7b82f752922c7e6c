#pragma once

#include <gaah/lattice.hpp>

namespace gaah::testing {

inline lattice::ModelParams model(double a, double Delta, int N = 21) {
  lattice::ModelParams m;
  m.a = a;
  m.Delta = Delta;
  m.N = N;
  return m;
}

inline ComplexVector top_state(const lattice::ModelParams& m) {
  return lattice::highest_excited_state(lattice::diagonalize(lattice::build_hamiltonian(m)));
}

}  // namespace gaah::testing
