#include "eit/dressed.hpp"

#include <cmath>

namespace eit {

double ac_stark(const SystemParams& p) {
  return 0.5 * (std::sqrt(p.delta * p.delta + p.g1 * p.g1 + p.g2 * p.g2) - p.delta);
}

ResonanceRatio resonance_ratio(const SystemParams& p) {
  if (!(p.omega > 0)) throw NumericalError("bad-params", "resonance_ratio: omega must be > 0");
  ResonanceRatio r;
  r.eps_ac = ac_stark(p);
  r.ratio = r.eps_ac / p.omega;
  r.near_resonant = std::abs(r.ratio - 1.0) < 0.05;
  return r;
}

namespace {

Eigen::Vector3cd fix_phase(Eigen::Vector3cd v) {
  int m = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(v(i)) > std::abs(v(m))) m = i;
  const Complex c = v(m);
  if (std::abs(c) > 0) v *= std::conj(c) / std::abs(c);
  return v;
}

}  // namespace

DressedBasis dressed_states(const SystemParams& p) {
  p.validate();
  if (p.g1 == 0.0 && p.g2 == 0.0) {
    if (p.delta == 0.0)
      throw NumericalError("degenerate-labeling",
                           "dressed_states: g1 = g2 = 0 with delta = 0 leaves no labeling");
    DressedBasis b;
    b.phi1 = Eigen::Vector3cd::Unit(0);
    b.phi2 = Eigen::Vector3cd::Unit(1);
    b.phi3 = Eigen::Vector3cd::Unit(2);
    b.eps1 = p.delta;
    b.eps2 = p.delta;
    b.eps3 = 0.0;
    b.eps_ac = 0.0;
    return b;
  }

  Eigen::Matrix3cd m;
  m << p.delta, 0.0, p.g1 / 2.0,
       0.0, p.delta, p.g2 / 2.0,
       p.g1 / 2.0, p.g2 / 2.0, 0.0;
  const EigenDecomposition ed = hermitian_eig(m);

  // descending energies: eps1 = delta + eps_ac >= eps2 = delta >= eps3 = -eps_ac
  DressedBasis b;
  b.eps_ac = ac_stark(p);
  b.eps1 = ed.eigenvalues(2).real();
  b.eps2 = ed.eigenvalues(1).real();
  b.eps3 = ed.eigenvalues(0).real();
  b.phi1 = fix_phase(ed.eigenvectors.col(2));
  b.phi2 = fix_phase(ed.eigenvectors.col(1));
  b.phi3 = fix_phase(ed.eigenvectors.col(0));

  // dominant-weight labeling check ("phi_i has its main weight on |i>"); a tie
  // between the top two weights means the labels cannot be assigned honestly.
  for (int i = 0; i < 3; ++i) {
    Eigen::Vector3d w = b.phi(i).cwiseAbs2();
    int hi = 0;
    for (int k = 1; k < 3; ++k)
      if (w(k) > w(hi)) hi = k;
    double second = -1.0;
    for (int k = 0; k < 3; ++k)
      if (k != hi) second = std::max(second, w(k));
    if (w(hi) - second < 1e-9)
      throw NumericalError("labeling-ambiguity",
                           "dressed_states: dominant-weight labeling ties (e.g. g1 == g2)");
  }
  return b;
}

}  // namespace eit
