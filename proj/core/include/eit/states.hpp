#pragma once

#include "eit/dressed.hpp"
#include "eit/numerics.hpp"
#include "eit/space.hpp"

namespace eit {

/// Pure state on a CompositeSpace (electronic-major amplitudes).
struct StateVector {
  CompositeSpace space;
  ComplexVector amps;

  double norm() const { return amps.norm(); }

  /// Checks dimension, finiteness and normalization (tolerance on |norm - 1|).
  static StateVector validated(const CompositeSpace& space, ComplexVector v,
                               double norm_tol = 1e-9);
};

/// Density matrix on a CompositeSpace. `validated` enforces Hermiticity to
/// 1e-10, unit trace to 1e-8 and minimum eigenvalue > -1e-8.
struct DensityMatrix {
  CompositeSpace space;
  ComplexMatrix rho;

  static DensityMatrix validated(const CompositeSpace& space, ComplexMatrix m);
  static DensityMatrix from_pure(const StateVector& psi);
};

/// |phi_i> tensor |n> with the dressed state taken at eta = 0 for the given
/// parameters. electronic: 0,1,2 = phi1, phi2 (dark), phi3.
StateVector dressed_product_state(const CompositeSpace& space, const DressedBasis& basis,
                                  int electronic, int n);

/// Bare basis state |e> tensor |n>.
StateVector bare_product_state(const CompositeSpace& space, int e, int n);

}  // namespace eit
