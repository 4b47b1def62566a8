#include "eit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace eit {

bool is_finite(const ComplexMatrix& m) { return m.allFinite(); }

double hermiticity_defect(const ComplexMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

namespace {

void require_square(const ComplexMatrix& m, const char* op) {
  if (m.rows() == 0 || m.cols() == 0)
    throw NumericalError("empty-matrix", std::string(op) + ": matrix is empty");
  if (m.rows() != m.cols())
    throw NumericalError("non-square", std::string(op) + ": matrix is not square (" +
                                           std::to_string(m.rows()) + "x" +
                                           std::to_string(m.cols()) + ")");
  if (!m.allFinite())
    throw NumericalError("non-finite", std::string(op) + ": matrix has NaN/Inf entries");
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
  require_square(m, "hermitian_eig");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (hermiticity_defect(m) > 1e-10 * scale)
    throw NumericalError("not-hermitian", "hermitian_eig: Hermiticity defect above tolerance");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eig-no-convergence", "hermitian_eig: solver did not converge");

  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues().cast<Complex>();
  out.eigenvectors = solver.eigenvectors();
  out.is_hermitian_path = true;
  return out;
}

EigenDecomposition general_eig(const ComplexMatrix& m) {
  require_square(m, "general_eig");

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eig-no-convergence", "general_eig: solver did not converge");

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  const auto& vals = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (vals(a).real() != vals(b).real()) return vals(a).real() < vals(b).real();
    return vals(a).imag() < vals(b).imag();
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = vals(order[static_cast<size_t>(k)]);
    out.eigenvectors.col(k) = solver.eigenvectors().col(order[static_cast<size_t>(k)]);
  }

  const double mnorm = m.norm();
  for (Eigen::Index k = 0; k < n; ++k) {
    const double res = (m * out.eigenvectors.col(k) - out.eigenvalues(k) * out.eigenvectors.col(k)).norm();
    if (res > 1e-9 * std::max(mnorm, 1e-300))
      throw NumericalError("eig-residual",
                           "general_eig: eigenpair " + std::to_string(k) +
                               " residual " + std::to_string(res) + " exceeds 1e-9*||m||");
  }
  return out;
}

namespace {

// Pade-13 scaling and squaring (Higham 2005).
ComplexMatrix expm_pade13(const ComplexMatrix& a) {
  static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                             1187353796428800.0,  129060195264000.0,   10559470521600.0,
                             670442572800.0,      33522128640.0,       1323241920.0,
                             40840800.0,          960960.0,            16380.0,
                             182.0,               1.0};
  const double theta13 = 5.371920351148152;
  const Eigen::Index n = a.rows();

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > theta13)
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
  const ComplexMatrix as = a / std::pow(2.0, squarings);

  const ComplexMatrix I = ComplexMatrix::Identity(n, n);
  const ComplexMatrix a2 = as * as;
  const ComplexMatrix a4 = a2 * a2;
  const ComplexMatrix a6 = a4 * a2;

  ComplexMatrix u = as * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                          b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * I);
  ComplexMatrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                    b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * I;

  ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = (r * r).eval();
  return r;
}

}  // namespace

ComplexMatrix matrix_exp(const ComplexMatrix& m) {
  require_square(m, "matrix_exp");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());

  if (hermiticity_defect(m) <= 1e-13 * scale) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    return es.eigenvectors() *
           es.eigenvalues().array().exp().matrix().asDiagonal().toDenseMatrix().cast<Complex>() *
           es.eigenvectors().adjoint();
  }
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    // m = i*B with B Hermitian; exp(m) = V exp(i*lambda) V^dag is exactly unitary
    const ComplexMatrix b = m / Complex(0.0, 1.0);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(b);
    ComplexVector phases(m.rows());
    for (Eigen::Index k = 0; k < m.rows(); ++k)
      phases(k) = std::polar(1.0, es.eigenvalues()(k));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
  }
  return expm_pade13(m);
}

NullSpaceResult null_space_solve(const ComplexMatrix& superop) {
  require_square(superop, "null_space_solve");
  const Eigen::Index n = superop.rows();
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  if (d * d != n)
    throw NumericalError("non-square-kernel",
                         "null_space_solve: dimension is not a perfect square");

  Eigen::BDCSVD<ComplexMatrix> svd(superop, Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(n - 1);
  const double snext = s(n - 2);

  if (smax == 0.0)
    throw NumericalError("ambiguous-kernel", "null_space_solve: zero matrix, kernel is everything");
  if (smin > 1e-10 * smax)
    throw NumericalError("no-kernel",
                         "null_space_solve: smallest singular value " + std::to_string(smin) +
                             " not below 1e-10 * " + std::to_string(smax));
  if (!(snext >= 1e3 * std::max(smin, smax * 1e-18)))
    throw NumericalError("ambiguous-kernel",
                         "null_space_solve: singular values " + std::to_string(smin) + ", " +
                             std::to_string(snext) + " not separated by 1e3");

  NullSpaceResult out;
  const ComplexVector v = svd.matrixV().col(n - 1);
  out.kernel = Eigen::Map<const ComplexMatrix>(v.data(), d, d);
  out.sigma_min = smin;
  out.sigma_next = snext;
  out.residual = (superop * v).norm();
  return out;
}

}  // namespace eit
