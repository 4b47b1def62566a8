#pragma once

#include <optional>
#include <vector>

#include "eit/operators.hpp"
#include "eit/states.hpp"

namespace eit {

/// Parameters with (g1, g2) jointly rescaled at fixed g1/g2 so that the
/// ac-Stark shift equals `scale * omega`. This is the control axis of all
/// level scans (the experimental knob is the laser intensity).
SystemParams scaled_params(const SystemParams& p, double scale);

/// Level scan over the normalized ac-Stark shift.
struct SpectrumScan {
  std::vector<double> control;            // eps_ac / omega per point
  std::vector<RealVector> levels;         // sorted eigenvalues per point [2*pi MHz]
  std::vector<std::vector<int>> tracks;   // tracks[t][k] = eigenvalue index of track t at point k
  double min_track_overlap = 1.0;         // smallest adjacent-point eigenvector overlap
};

/// pre: either n_points == 1 with lo == hi, or n_points >= 3 and lo <= 1 <= hi.
/// Tracks are assembled by maximal-overlap matching of adjacent eigenvectors;
/// an overlap below 0.9 is a tracking failure and throws with the offending
/// point index.
SpectrumScan spectrum_scan(const SystemParams& p, double lo, double hi, int n_points,
                           int n_fock);

struct AvoidedCrossing {
  int n = 0;            // vibrational quantum number of the |phi2,n>/|phi1,n-1> pair
  double gap = 0.0;     // Delta E_n [2*pi MHz]
  double center = 0.0;  // control value (eps_ac/omega) at minimum gap
  double e_plus = 0.0, e_minus = 0.0;  // the pair eigenvalues at the center [2*pi MHz]
  double identification = 1.0;  // smallest pair-subspace projection seen at the center
};

/// Locates the avoided crossing of |phi2,n> and |phi1,n-1| by a coarse scan
/// bracketing the resonance plus golden-section refinement (relative tolerance
/// 1e-6 on the control). The pair is identified per point by dominant
/// projection onto the two target product states; a projection sum below 0.5
/// throws pair-identification-failure.
AvoidedCrossing find_avoided_crossing(const SystemParams& p, int n, int n_fock);

struct LZPair {
  StateVector chi_plus, chi_minus;  // eigenstates at the crossing center
  double e_plus = 0.0, e_minus = 0.0;          // [2*pi MHz]
  double overlap_quality_plus = 0.0;           // fidelity against (|phi2,n> + |phi1,n-1>)/sqrt2
  double overlap_quality_minus = 0.0;          // fidelity against the odd combination
  bool degenerate = false;                     // gap below resolution; any orthonormal pair valid
};

/// Eigenstate pair at the crossing center. The relative phase of the target
/// combination is fixed by making the numerically evaluated coupling element
/// real positive, so chi_plus is the higher-energy (even) combination.
LZPair lz_pair(const SystemParams& p, const AvoidedCrossing& crossing, int n_fock);

/// N(t) = |sin(gap * t)|/2. gap in rad/us, t in us.
double predict_negativity_pure(double gap_ang, double t_us);

/// N(t) = (gap/2) |sin(nu t)/nu + gamma1 (1 - cos(nu t))/(2 nu^2)| e^{-gamma1 t/2}
/// with nu^2 = gap^2 - gamma1^2/4. Stable across the underdamped, critically
/// damped and overdamped regimes (series evaluation near nu = 0, hyperbolic
/// form without overflow for nu^2 < 0). Arguments in rad/us, t in us.
double predict_negativity_damped(double gap_ang, double gamma1_ang, double t_us);

// Closed forms, all in 2*pi MHz:
double gamma1(const SystemParams& p);                 // Gamma (g1^2+g2^2)/(4 delta^2)
double gamma1_approx(const SystemParams& p);          // Gamma g1^2/(4 delta^2)
double gap_approx(const SystemParams& p, int n);      // eta sqrt(n) g1 g2 / delta
double damping_threshold(const SystemParams& p, int n);  // 8 eta sqrt(n) delta g2/g1
double steady_negativity_limit(const SystemParams& p);   // eta g2/g1
double lz_coupling_element_analytic(const SystemParams& p);  // eta g1 g2/(4 delta)

/// |<phi2,0| H_int^eta |phi1,1>| evaluated on the composite space with the
/// eta = 0 dressed product states [2*pi MHz]. Note: both counter-propagating
/// legs contribute equally, so this comes out at eta g1 g2/(2 delta); the
/// single-leg value is lz_coupling_element_analytic.
double lz_coupling_element_numeric(const SystemParams& p, int n_fock);

struct EffectiveParams {
  double gamma1 = 0.0;                     // [2*pi MHz]
  Complex eps1, eps2, eps3;                // closed-form eigenvalues of H_eff^0 [2*pi MHz]
  Complex eps1_num, eps2_num, eps3_num;    // exact eigenvalues of the 3x3 H_eff^0
  double max_discrepancy = 0.0;            // max |closed - exact|
  std::optional<Complex> nu;               // sqrt(gap^2 - gamma1^2/4), if a gap was given
  std::optional<double> gap_used;          // [2*pi MHz]
};

/// Closed-form effective eigenvalues next to the exact ones from general_eig
/// of the 3x3 non-Hermitian matrix. If gap_mhz is given, nu and gap_used are
/// filled for the two-state formulas.
EffectiveParams effective_eigs(const SystemParams& p, std::optional<double> gap_mhz = {});

}  // namespace eit
