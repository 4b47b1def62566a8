#include "eit/entanglement.hpp"

#include <cmath>

namespace eit {

StateVector StateVector::validated(const CompositeSpace& space, ComplexVector v,
                                   double norm_tol) {
  if (v.size() != space.total_dim())
    throw NumericalError("dimension-mismatch", "StateVector: amplitude count != 3*n_fock");
  if (!v.allFinite()) throw NumericalError("non-finite", "StateVector: NaN/Inf amplitudes");
  if (std::abs(v.norm() - 1.0) > norm_tol)
    throw NumericalError("not-normalized", "StateVector: norm deviates from 1 beyond tolerance");
  return StateVector{space, std::move(v)};
}

DensityMatrix DensityMatrix::validated(const CompositeSpace& space, ComplexMatrix m) {
  if (m.rows() != space.total_dim() || m.cols() != space.total_dim())
    throw NumericalError("dimension-mismatch", "DensityMatrix: dimension != 3*n_fock");
  if (!m.allFinite()) throw NumericalError("non-finite", "DensityMatrix: NaN/Inf entries");
  if (hermiticity_defect(m) > 1e-10)
    throw NumericalError("not-hermitian", "DensityMatrix: Hermiticity defect above 1e-10");
  if (std::abs(m.trace().real() - 1.0) > 1e-8 || std::abs(m.trace().imag()) > 1e-8)
    throw NumericalError("bad-trace", "DensityMatrix: trace deviates from 1 beyond 1e-8");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-8)
    throw NumericalError("not-positive", "DensityMatrix: minimum eigenvalue below -1e-8");
  return DensityMatrix{space, std::move(m)};
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix{psi.space, psi.amps * psi.amps.adjoint()};
}

StateVector dressed_product_state(const CompositeSpace& space, const DressedBasis& basis,
                                  int electronic, int n) {
  if (n < 0 || n >= space.n_fock)
    throw NumericalError("bad-state", "dressed_product_state: n outside the truncation");
  ComplexVector v = ComplexVector::Zero(space.total_dim());
  for (int e = 0; e < 3; ++e) v(space.index(e, n)) = basis.phi(electronic)(e);
  return StateVector{space, std::move(v)};
}

StateVector bare_product_state(const CompositeSpace& space, int e, int n) {
  if (e < 0 || e > 2 || n < 0 || n >= space.n_fock)
    throw NumericalError("bad-state", "bare_product_state: index outside the space");
  ComplexVector v = ComplexVector::Zero(space.total_dim());
  v(space.index(e, n)) = 1.0;
  return StateVector{space, std::move(v)};
}

ComplexMatrix partial_transpose(const ComplexMatrix& rho, const CompositeSpace& space) {
  const int N = space.n_fock;
  if (rho.rows() != 3 * N || rho.cols() != 3 * N)
    throw NumericalError("dimension-mismatch", "partial_transpose: dimension not 3*n_fock");
  ComplexMatrix out(3 * N, 3 * N);
  for (int e = 0; e < 3; ++e)
    for (int f = 0; f < 3; ++f)
      out.block(e * N, f * N, N, N) = rho.block(f * N, e * N, N, N);
  return out;
}

double negativity(const ComplexMatrix& rho, const CompositeSpace& space) {
  const ComplexMatrix pt = partial_transpose(rho, space);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(pt, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("eig-no-convergence", "negativity: eigenvalue solve failed");
  double sum_abs = 0.0;
  for (Eigen::Index k = 0; k < pt.rows(); ++k) {
    double lam = es.eigenvalues()(k);
    if (lam < 0.0 && lam >= -1e-10) lam = 0.0;
    sum_abs += std::abs(lam);
  }
  return 0.5 * (sum_abs - 1.0);
}

double negativity(const DensityMatrix& rho) { return negativity(rho.rho, rho.space); }

SchmidtDecomposition schmidt(const StateVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-6)
    throw NumericalError("not-normalized", "schmidt: state norm deviates from 1 beyond 1e-6");
  const int N = psi.space.n_fock;
  // electronic-major amplitudes reshape to the 3 x N coefficient matrix
  Eigen::Map<const ComplexMatrix> coeff(psi.amps.data(), N, 3);
  Eigen::JacobiSVD<ComplexMatrix> svd(coeff.transpose(), Eigen::ComputeThinU | Eigen::ComputeThinV);

  SchmidtDecomposition out;
  const auto& s = svd.singularValues();
  out.coefficients.assign(s.data(), s.data() + s.size());
  out.left_states = svd.matrixU();
  out.right_states = svd.matrixV().conjugate();
  return out;
}

double negativity_pure(const StateVector& psi) {
  const SchmidtDecomposition sd = schmidt(psi);
  double sum = 0.0;
  for (double a : sd.coefficients) sum += a;
  return 0.5 * (sum * sum - 1.0);
}

}  // namespace eit
