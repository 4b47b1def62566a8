#pragma once

#include <Eigen/Dense>

#include "eit/numerics.hpp"
#include "eit/params.hpp"

namespace eit {

/// Dressed electronic states at eta = 0: eigenstates of H_el + H_int^0 on the
/// bare 3-level space. Indexing follows the eigenvalue structure
///   eps1 = delta + eps_ac  (upper state),
///   eps2 = delta           (dark state, decoupled from the lasers),
///   eps3 = -eps_ac         (lower state, mostly |3>),
/// which for g1 > g2 coincides with the dominant-weight rule "phi_i has its
/// main weight on |i>". Phases: the largest-magnitude component of each state
/// is real and positive. Energies in 2*pi MHz.
struct DressedBasis {
  Eigen::Vector3cd phi1, phi2, phi3;
  double eps1 = 0, eps2 = 0, eps3 = 0;
  double eps_ac = 0;

  const Eigen::Vector3cd& phi(int i) const {
    return i == 0 ? phi1 : (i == 1 ? phi2 : phi3);
  }
  double eps(int i) const { return i == 0 ? eps1 : (i == 1 ? eps2 : eps3); }
};

/// Throws "labeling-ambiguity" when the dominant-weight labeling check ties
/// (e.g. g1 == g2), and "degenerate-labeling" when g1 = g2 = 0 with delta = 0.
DressedBasis dressed_states(const SystemParams& p);

/// eps_ac = (sqrt(delta^2 + g1^2 + g2^2) - delta)/2, in 2*pi MHz.
double ac_stark(const SystemParams& p);

struct ResonanceRatio {
  double eps_ac = 0;     // 2*pi MHz
  double ratio = 0;      // eps_ac / omega
  bool near_resonant = false;  // |ratio - 1| < 0.05
};

ResonanceRatio resonance_ratio(const SystemParams& p);

}  // namespace eit
