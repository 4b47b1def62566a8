#include "eit/operators.hpp"

namespace eit {

namespace {

ComplexMatrix kron(const ComplexMatrix& el, const ComplexMatrix& vib) {
  const Eigen::Index p = el.rows(), q = el.cols(), r = vib.rows(), s = vib.cols();
  ComplexMatrix out(p * r, q * s);
  for (Eigen::Index i = 0; i < p; ++i)
    for (Eigen::Index j = 0; j < q; ++j)
      out.block(i * r, j * s, r, s) = el(i, j) * vib;
  return out;
}

ComplexMatrix unit(int i, int j) {
  ComplexMatrix e = ComplexMatrix::Zero(3, 3);
  e(i, j) = 1.0;
  return e;
}

}  // namespace

OperatorSet build_operators(const CompositeSpace& space, const SystemParams& p) {
  p.validate();
  const int N = space.n_fock;

  OperatorSet ops;
  ops.space = space;
  ops.params = p;

  ops.a = ComplexMatrix::Zero(N, N);
  for (int n = 1; n < N; ++n) ops.a(n - 1, n) = std::sqrt(double(n));
  ops.a_dag = ops.a.adjoint();

  // e^{ikx} with kx = eta (a^dag + a); exact exponential on the truncated space
  ops.exp_plus = matrix_exp(Complex(0.0, 1.0) * p.eta * (ops.a + ops.a_dag));
  ops.exp_minus = ops.exp_plus.adjoint();

  const ComplexMatrix In = ComplexMatrix::Identity(N, N);
  for (int e = 0; e < 3; ++e) ops.proj[e] = kron(unit(e, e), In);

  const double omega_a = to_angular(p.omega);
  const double delta_a = to_angular(p.delta);
  ops.h_cm = omega_a * kron(ComplexMatrix::Identity(3, 3), ops.a_dag * ops.a);
  ops.h_el = delta_a * (ops.proj[0] + ops.proj[1]);

  ComplexMatrix leg1 = to_angular(p.g1) / 2.0 * kron(unit(2, 0), ops.exp_plus);
  ComplexMatrix leg2 = to_angular(p.g2) / 2.0 * kron(unit(2, 1), ops.exp_minus);
  ops.h_int_g1 = leg1 + leg1.adjoint();
  ops.h_int_g2 = leg2 + leg2.adjoint();
  ops.h_int = ops.h_int_g1 + ops.h_int_g2;

  ops.h_total = ops.h_cm + ops.h_el + ops.h_int;
  ops.h_eff = ops.h_total - Complex(0.0, 0.5 * to_angular(p.gamma)) * ops.proj[2];

  ops.lindblad_ops[0] = kron(unit(0, 2), ops.exp_plus);   // sigma_{1+}
  ops.lindblad_ops[1] = kron(unit(0, 2), ops.exp_minus);  // sigma_{1-}
  ops.lindblad_ops[2] = kron(unit(1, 2), ops.exp_plus);   // sigma_{2+}
  ops.lindblad_ops[3] = kron(unit(1, 2), ops.exp_minus);  // sigma_{2-}
  ops.lindblad_rate = to_angular(p.gamma) / 4.0;

  return ops;
}

ComplexMatrix build_hamiltonian(const CompositeSpace& space, const SystemParams& p) {
  return build_operators(space, p).h_total;
}

ComplexMatrix build_effective_hamiltonian(const CompositeSpace& space, const SystemParams& p) {
  return build_operators(space, p).h_eff;
}

ComplexMatrix apply_dissipator(const OperatorSet& ops, const ComplexMatrix& rho) {
  if (rho.rows() != ops.h_total.rows() || rho.cols() != ops.h_total.cols())
    throw NumericalError("dimension-mismatch", "apply_dissipator: rho does not match the space");
  ComplexMatrix out = ComplexMatrix::Zero(rho.rows(), rho.cols());
  if (ops.lindblad_rate == 0.0) return out;
  for (const auto& s : ops.lindblad_ops) {
    const ComplexMatrix sds = s.adjoint() * s;
    out.noalias() += ops.lindblad_rate * (s * rho * s.adjoint());
    out.noalias() -= 0.5 * ops.lindblad_rate * (sds * rho + rho * sds);
  }
  return out;
}

}  // namespace eit
