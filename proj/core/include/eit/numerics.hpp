#pragma once

#include <Eigen/Dense>
#include <complex>

#include "eit/errors.hpp"

namespace eit {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Eigendecomposition result. For the Hermitian path eigenvalues are real,
/// sorted ascending, and eigenvector columns are orthonormal; for the general
/// path eigenpairs are sorted by real part (then imaginary part) and each pair
/// satisfies the residual bound checked in general_eig.
struct EigenDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;  // columns
  bool is_hermitian_path = false;

  RealVector real_eigenvalues() const { return eigenvalues.real(); }
};

bool is_finite(const ComplexMatrix& m);
double hermiticity_defect(const ComplexMatrix& m);  // max |m - m^dag| entry

/// Hermitian eigendecomposition. Input must be square and Hermitian to 1e-10
/// (max-entry defect); eigenvalues come out real ascending.
EigenDecomposition hermitian_eig(const ComplexMatrix& m);

/// General (non-Hermitian) eigendecomposition with a per-pair residual check
/// ||m v - lambda v|| < 1e-9 ||m||_F.
EigenDecomposition general_eig(const ComplexMatrix& m);

/// Matrix exponential. Hermitian and anti-Hermitian inputs go through the
/// eigendecomposition (the anti-Hermitian case yields an exactly unitary
/// result); everything else through Pade-13 scaling and squaring.
ComplexMatrix matrix_exp(const ComplexMatrix& m);

struct NullSpaceResult {
  ComplexMatrix kernel;        // kernel vector reshaped to a square matrix (column-major)
  double sigma_min = 0.0;
  double sigma_next = 0.0;     // second-smallest singular value
  double residual = 0.0;       // ||superop * vec(kernel)||
};

/// Kernel of a singular superoperator via SVD. The smallest singular value
/// must be below 1e-10 * sigma_max and separated from the next by a factor
/// >= 1e3, otherwise this throws (no-kernel / ambiguous-kernel).
NullSpaceResult null_space_solve(const ComplexMatrix& superop);

}  // namespace eit
