#pragma once

#include <vector>

#include "eit/states.hpp"

namespace eit {

/// Transpose over the electronic factor: under electronic-major ordering a
/// 3x3 block transpose. A pure permutation of entries, so applying it twice
/// reproduces the input bit-exactly. Hermiticity and trace are preserved.
ComplexMatrix partial_transpose(const ComplexMatrix& rho, const CompositeSpace& space);

/// Negativity N = (sum_i |lambda_i| - 1)/2 over the eigenvalues of the partial
/// transpose. Eigenvalues in [-1e-10, 0) are clipped to zero (symmetrization
/// noise); genuine negative eigenvalues below that count in full.
double negativity(const ComplexMatrix& rho, const CompositeSpace& space);
double negativity(const DensityMatrix& rho);

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, non-negative, sum of squares = 1
  ComplexMatrix left_states;         // electronic factors (3 x r, columns)
  ComplexMatrix right_states;        // vibrational factors (n_fock x r, columns)
};

/// Schmidt decomposition of a normalized pure state: singular values of the
/// 3 x n_fock coefficient matrix.
SchmidtDecomposition schmidt(const StateVector& psi);

/// Pure-state negativity ((sum alpha_i)^2 - 1)/2; equals the partial-transpose
/// route on |psi><psi| (for the rank-2 case this is alpha1*alpha2).
double negativity_pure(const StateVector& psi);

}  // namespace eit
