#pragma once

#include <array>

#include "eit/numerics.hpp"
#include "eit/params.hpp"
#include "eit/space.hpp"

namespace eit {

/// All matrices of the model on a truncated composite space.
/// Vibrational-factor operators (a, a_dag, exp_plus, exp_minus) are
/// n_fock x n_fock; everything else lives on the full composite space and is
/// in angular units (rad/us). exp_minus == exp_plus.adjoint() exactly, and
/// exp_plus is exactly unitary (exponential of the truncated anti-Hermitian
/// generator). Immutable after construction; safe to share across threads.
struct OperatorSet {
  CompositeSpace space;
  SystemParams params;

  ComplexMatrix a, a_dag;            // ladder operators (vibrational factor)
  ComplexMatrix exp_plus, exp_minus; // e^{+ikx}, e^{-ikx} (vibrational factor)

  std::array<ComplexMatrix, 3> proj; // electronic projectors lifted to the composite space

  ComplexMatrix h_cm, h_el;          // omega a^dag a ; delta (P1+P2)
  ComplexMatrix h_int;               // both laser legs + h.c.
  ComplexMatrix h_int_g1, h_int_g2;  // the two legs separately (+ h.c.), for schedules
  ComplexMatrix h_total;             // h_cm + h_el + h_int
  ComplexMatrix h_eff;               // h_total - i(gamma/2) P3

  std::array<ComplexMatrix, 4> lindblad_ops;  // sigma_{1+}, sigma_{1-}, sigma_{2+}, sigma_{2-}
  double lindblad_rate = 0.0;                 // gamma_angular / 4, rate of each operator

  /// h_total with the interaction legs rescaled (piecewise-constant schedules).
  ComplexMatrix scaled_hamiltonian(double g1_factor, double g2_factor) const {
    return h_cm + h_el + g1_factor * h_int_g1 + g2_factor * h_int_g2;
  }
};

OperatorSet build_operators(const CompositeSpace& space, const SystemParams& p);

/// H^eta = omega a^dag a + delta (P1+P2) + (g1/2) e^{ikx}|3><1| + (g2/2) e^{-ikx}|3><2| + h.c.
ComplexMatrix build_hamiltonian(const CompositeSpace& space, const SystemParams& p);

/// H_eff = H^eta - i (gamma/2) |3><3|
ComplexMatrix build_effective_hamiltonian(const CompositeSpace& space, const SystemParams& p);

/// Dissipator of the model: sum over the four sigma_{jq}, each with rate gamma/4.
/// Returns L rho (angular units). Trace-annihilating, Hermiticity-preserving.
ComplexMatrix apply_dissipator(const OperatorSet& ops, const ComplexMatrix& rho);

}  // namespace eit
