#pragma once

#include "eit/errors.hpp"

namespace eit {

/// Truncated composite Hilbert space: 3 electronic levels |1>,|2>,|3>
/// (indices e = 0,1,2) tensor a Fock space cut at n_fock levels.
/// Basis ordering is electronic-major and immutable: index = e*n_fock + n.
/// This makes the partial transpose over the electronic factor a 3x3 block
/// transpose.
struct CompositeSpace {
  enum class Ordering { electronic_major };

  int n_fock = 0;
  static constexpr int electronic_dim = 3;
  static constexpr Ordering ordering = Ordering::electronic_major;

  int total_dim() const { return electronic_dim * n_fock; }
  int index(int e, int n) const { return e * n_fock + n; }
};

inline CompositeSpace build_space(int n_fock) {
  if (n_fock < 2)
    throw NumericalError("bad-space", "build_space: n_fock must be >= 2");
  return CompositeSpace{n_fock};
}

}  // namespace eit
