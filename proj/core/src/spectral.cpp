#include "eit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eit {

SystemParams scaled_params(const SystemParams& p, double scale) {
  if (!(p.omega > 0) || !(p.delta > 0))
    throw NumericalError("bad-params", "scaled_params: needs omega > 0 and delta > 0");
  if (!(scale >= 0)) throw NumericalError("bad-params", "scaled_params: scale must be >= 0");
  if (p.g1 <= 0 && p.g2 <= 0 && scale > 0)
    throw NumericalError("bad-params", "scaled_params: both couplings vanish, no ratio to keep");
  // eps_ac(G) = s*omega  =>  G^2 = 4 s omega (delta + s omega)
  const double gsq = 4.0 * scale * p.omega * (p.delta + scale * p.omega);
  SystemParams q = p;
  if (p.g2 == 0.0) {
    q.g1 = std::sqrt(gsq);
  } else {
    const double r = p.g1 / p.g2;
    q.g2 = std::sqrt(gsq / (1.0 + r * r));
    q.g1 = r * q.g2;
  }
  return q;
}

namespace {

struct PairAtControl {
  double e_low = 0, e_high = 0;   // [2*pi MHz]
  double gap = 0;                 // e_high - e_low
  double min_projection = 0;      // smaller of the two pair-subspace projections
  ComplexVector v_low, v_high;
};

PairAtControl locate_pair(const SystemParams& p, double scale, int n, int n_fock) {
  const SystemParams q = scaled_params(p, scale);
  const CompositeSpace space = build_space(n_fock);
  const ComplexMatrix h = build_hamiltonian(space, q);
  const EigenDecomposition ed = hermitian_eig(h);
  const DressedBasis basis = dressed_states(q);

  const ComplexVector t2 = dressed_product_state(space, basis, 1, n).amps;
  const ComplexVector t1 = dressed_product_state(space, basis, 0, n - 1).amps;

  const int dim = space.total_dim();
  const ComplexVector o2 = ed.eigenvectors.adjoint() * t2;
  const ComplexVector o1 = ed.eigenvectors.adjoint() * t1;

  int best = 0, second = 1;
  double pb = -1.0, ps = -1.0;
  for (int k = 0; k < dim; ++k) {
    const double proj = std::norm(o2(k)) + std::norm(o1(k));
    if (proj > pb) {
      second = best; ps = pb;
      best = k; pb = proj;
    } else if (proj > ps) {
      second = k; ps = proj;
    }
  }
  if (ps < 0.5)
    throw NumericalError("pair-identification-failure",
                         "find_avoided_crossing: pair projection " + std::to_string(ps) +
                             " below 0.5; two-state picture invalid at these parameters");

  PairAtControl out;
  const int lo = ed.eigenvalues(best).real() < ed.eigenvalues(second).real() ? best : second;
  const int hi = lo == best ? second : best;
  out.e_low = from_angular(ed.eigenvalues(lo).real());
  out.e_high = from_angular(ed.eigenvalues(hi).real());
  out.gap = out.e_high - out.e_low;
  out.min_projection = ps;
  out.v_low = ed.eigenvectors.col(lo);
  out.v_high = ed.eigenvectors.col(hi);
  return out;
}

}  // namespace

AvoidedCrossing find_avoided_crossing(const SystemParams& p, int n, int n_fock) {
  if (n < 1) throw NumericalError("bad-params", "find_avoided_crossing: n must be >= 1");
  if (n_fock < n + 2)
    throw NumericalError("bad-space", "find_avoided_crossing: n_fock too small for the pair");

  auto gap_at = [&](double s) { return locate_pair(p, s, n, n_fock).gap; };

  // coarse bracket around the resonance
  const int coarse = 25;
  double best_s = 1.0, best_gap = std::numeric_limits<double>::infinity();
  int best_k = 0;
  std::vector<double> ss(coarse), gs(coarse);
  for (int k = 0; k < coarse; ++k) {
    const double s = 0.96 + 0.08 * k / (coarse - 1);
    ss[k] = s;
    gs[k] = gap_at(s);
    if (gs[k] < best_gap) { best_gap = gs[k]; best_s = s; best_k = k; }
  }
  double a = ss[std::max(0, best_k - 1)];
  double b = ss[std::min(coarse - 1, best_k + 1)];
  if (best_k == 0 || best_k == coarse - 1)
    throw NumericalError("bracketing-failure",
                         "find_avoided_crossing: minimum gap not bracketed near resonance");

  // golden-section to relative tolerance 1e-6 on the control
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = gap_at(c), fd = gap_at(d);
  while (b - a > 1e-6) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a);
      fc = gap_at(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a);
      fd = gap_at(d);
    }
  }
  best_s = 0.5 * (a + b);

  const PairAtControl pr = locate_pair(p, best_s, n, n_fock);
  AvoidedCrossing out;
  out.n = n;
  out.gap = pr.gap;
  out.center = best_s;
  out.e_plus = pr.e_high;
  out.e_minus = pr.e_low;
  out.identification = pr.min_projection;
  return out;
}

SpectrumScan spectrum_scan(const SystemParams& p, double lo, double hi, int n_points,
                           int n_fock) {
  if (n_points == 1) {
    if (lo != hi)
      throw NumericalError("bad-scan", "spectrum_scan: single-point scan needs lo == hi");
  } else {
    if (n_points < 3) throw NumericalError("bad-scan", "spectrum_scan: n_points must be >= 3");
    if (!(lo < hi) || !(lo <= 1.0 && 1.0 <= hi))
      throw NumericalError("bad-scan", "spectrum_scan: range must bracket 1.0");
  }

  const CompositeSpace space = build_space(n_fock);
  const int dim = space.total_dim();

  SpectrumScan out;
  out.control.resize(n_points);
  out.levels.resize(n_points);

  ComplexMatrix prev_vectors;
  std::vector<std::vector<int>> tracks;  // tracks[t] accumulates eigenvalue indices
  std::vector<int> prev_index(dim);      // eigenvalue index of track t at previous point

  for (int k = 0; k < n_points; ++k) {
    const double s = n_points == 1 ? lo : lo + (hi - lo) * k / (n_points - 1);
    out.control[k] = s;
    const SystemParams q = scaled_params(p, s);
    const EigenDecomposition ed = hermitian_eig(build_hamiltonian(space, q));
    out.levels[k] = ed.real_eigenvalues() / two_pi;

    if (n_points > 1) {
      if (k == 0) {
        tracks.assign(dim, {});
        for (int t = 0; t < dim; ++t) {
          tracks[t].push_back(t);
          prev_index[t] = t;
        }
      } else {
        // greedy maximal-overlap assignment between adjacent points
        const ComplexMatrix overlap = prev_vectors.adjoint() * ed.eigenvectors;
        std::vector<std::tuple<double, int, int>> cand;
        cand.reserve(size_t(dim) * 8);
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) {
            const double o = std::abs(overlap(i, j));
            if (o > 0.2) cand.emplace_back(o, i, j);
          }
        std::sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) {
          return std::get<0>(x) > std::get<0>(y);
        });
        std::vector<int> match_of_prev(dim, -1);
        std::vector<char> used(dim, 0);
        int assigned = 0;
        std::vector<double> match_overlap(dim, 0.0);
        for (const auto& [o, i, j] : cand) {
          if (match_of_prev[i] >= 0 || used[j]) continue;
          match_of_prev[i] = j;
          match_overlap[i] = o;
          used[j] = 1;
          if (++assigned == dim) break;
        }
        for (int i = 0; i < dim; ++i)
          if (match_of_prev[i] < 0)
            throw NumericalError("track-discontinuity",
                                 "spectrum_scan: no overlap match at point " + std::to_string(k));
        const double worst = *std::min_element(match_overlap.begin(), match_overlap.end());
        out.min_track_overlap = std::min(out.min_track_overlap, worst);
        if (worst < 0.9)
          throw NumericalError("track-discontinuity",
                               "spectrum_scan: eigenvector overlap " + std::to_string(worst) +
                                   " below 0.9 at point " + std::to_string(k) +
                                   "; refine the scan grid");
        for (int t = 0; t < dim; ++t) {
          const int j = match_of_prev[prev_index[t]];
          tracks[t].push_back(j);
          prev_index[t] = j;
        }
      }
      prev_vectors = ed.eigenvectors;
    }
  }
  if (n_points > 1) out.tracks = std::move(tracks);
  return out;
}

LZPair lz_pair(const SystemParams& p, const AvoidedCrossing& crossing, int n_fock) {
  const SystemParams q = scaled_params(p, crossing.center);
  const CompositeSpace space = build_space(n_fock);
  const PairAtControl pr = locate_pair(p, crossing.center, crossing.n, n_fock);
  const DressedBasis basis = dressed_states(q);

  ComplexVector t2 = dressed_product_state(space, basis, 1, crossing.n).amps;
  ComplexVector t1 = dressed_product_state(space, basis, 0, crossing.n - 1).amps;

  // fix the relative phase so the numerically evaluated coupling element is
  // real positive; the even combination is then the higher-energy eigenstate
  const ComplexMatrix h = build_hamiltonian(space, q);
  const Complex v = t2.dot(h * t1);  // <t2|H|t1>
  if (std::abs(v) > 0) t1 *= std::conj(v) / std::abs(v);

  const ComplexVector even = (t2 + t1) / std::sqrt(2.0);
  const ComplexVector odd = (t2 - t1) / std::sqrt(2.0);

  LZPair out;
  out.e_plus = pr.e_high;
  out.e_minus = pr.e_low;
  out.chi_plus = StateVector{space, pr.v_high};
  out.chi_minus = StateVector{space, pr.v_low};
  out.overlap_quality_plus = std::norm(even.dot(pr.v_high));
  out.overlap_quality_minus = std::norm(odd.dot(pr.v_low));
  out.degenerate = crossing.gap < 1e-9 * std::max(1.0, std::abs(crossing.e_plus));
  return out;
}

namespace {

// sin(nu t)/nu and (1 - cos(nu t))/nu^2 as entire functions of x = nu^2 t^2,
// valid for either sign of nu^2.
void damped_kernels(double nu2, double t, double& sin_term, double& cos_term) {
  const double x = nu2 * t * t;
  if (std::abs(x) < 1e-6) {
    // t * (1 - x/6 + x^2/120), t^2/2 * (1 - x/12 + x^2/360)
    sin_term = t * (1.0 - x / 6.0 + x * x / 120.0);
    cos_term = 0.5 * t * t * (1.0 - x / 12.0 + x * x / 360.0);
  } else if (nu2 > 0) {
    const double nu = std::sqrt(nu2);
    sin_term = std::sin(nu * t) / nu;
    cos_term = (1.0 - std::cos(nu * t)) / nu2;
  } else {
    const double mu = std::sqrt(-nu2);
    sin_term = std::sinh(mu * t) / mu;
    cos_term = (std::cosh(mu * t) - 1.0) / (-nu2);
  }
}

}  // namespace

double predict_negativity_pure(double gap_ang, double t_us) {
  if (!(gap_ang > 0)) throw NumericalError("bad-params", "predict_negativity_pure: gap must be > 0");
  if (t_us < 0) throw NumericalError("bad-params", "predict_negativity_pure: t must be >= 0");
  return 0.5 * std::abs(std::sin(gap_ang * t_us));
}

double predict_negativity_damped(double gap_ang, double gamma1_ang, double t_us) {
  if (!(gap_ang > 0)) throw NumericalError("bad-params", "predict_negativity_damped: gap must be > 0");
  if (gamma1_ang < 0) throw NumericalError("bad-params", "predict_negativity_damped: gamma1 must be >= 0");
  if (t_us < 0) throw NumericalError("bad-params", "predict_negativity_damped: t must be >= 0");

  const double nu2 = gap_ang * gap_ang - 0.25 * gamma1_ang * gamma1_ang;
  if (nu2 < 0) {
    // overdamped: evaluate with the growth folded into decaying exponentials,
    // sinh/cosh would overflow for large gamma1 t
    const double mu = std::sqrt(-nu2);
    const double g2 = 0.5 * gamma1_ang;
    // e^{-g2 t} sinh(mu t) = (e^{(mu-g2)t} - e^{-(mu+g2)t})/2, mu < g2
    const double ep = std::exp((mu - g2) * t_us), em = std::exp(-(mu + g2) * t_us);
    const double sin_term = (ep - em) / (2.0 * mu);
    const double cos_term = ((ep + em) / 2.0 - std::exp(-g2 * t_us)) / (-nu2);
    return 0.5 * gap_ang * std::abs(sin_term + 0.5 * gamma1_ang * cos_term);
  }
  double sin_term, cos_term;
  damped_kernels(nu2, t_us, sin_term, cos_term);
  return 0.5 * gap_ang * std::abs(sin_term + 0.5 * gamma1_ang * cos_term) *
         std::exp(-0.5 * gamma1_ang * t_us);
}

double gamma1(const SystemParams& p) {
  if (!(p.delta > 0)) throw NumericalError("bad-params", "gamma1: delta must be > 0");
  return p.gamma * (p.g1 * p.g1 + p.g2 * p.g2) / (4.0 * p.delta * p.delta);
}

double gamma1_approx(const SystemParams& p) {
  if (!(p.delta > 0)) throw NumericalError("bad-params", "gamma1_approx: delta must be > 0");
  return p.gamma * p.g1 * p.g1 / (4.0 * p.delta * p.delta);
}

double gap_approx(const SystemParams& p, int n) {
  if (!(p.delta > 0)) throw NumericalError("bad-params", "gap_approx: delta must be > 0");
  if (n < 1) throw NumericalError("bad-params", "gap_approx: n must be >= 1");
  return p.eta * std::sqrt(double(n)) * p.g1 * p.g2 / p.delta;
}

double damping_threshold(const SystemParams& p, int n) {
  if (!(p.delta > 0) || p.g1 <= 0)
    throw NumericalError("bad-params", "damping_threshold: needs delta > 0 and g1 > 0");
  if (n < 1) throw NumericalError("bad-params", "damping_threshold: n must be >= 1");
  return 8.0 * p.eta * std::sqrt(double(n)) * p.delta * p.g2 / p.g1;
}

double steady_negativity_limit(const SystemParams& p) {
  if (p.g1 <= 0) throw NumericalError("bad-params", "steady_negativity_limit: g1 must be > 0");
  return p.eta * p.g2 / p.g1;
}

double lz_coupling_element_analytic(const SystemParams& p) {
  if (!(p.delta > 0)) throw NumericalError("bad-params", "lz_coupling_element_analytic: delta must be > 0");
  return p.eta * p.g1 * p.g2 / (4.0 * p.delta);
}

double lz_coupling_element_numeric(const SystemParams& p, int n_fock) {
  if (n_fock < 3)
    throw NumericalError("bad-space", "lz_coupling_element_numeric: n_fock must be >= 3");
  const CompositeSpace space = build_space(n_fock);
  const OperatorSet ops = build_operators(space, p);
  const DressedBasis basis = dressed_states(p);
  const ComplexVector t20 = dressed_product_state(space, basis, 1, 0).amps;
  const ComplexVector t11 = dressed_product_state(space, basis, 0, 1).amps;
  return std::abs(t20.dot(ops.h_int * t11)) / two_pi;
}

EffectiveParams effective_eigs(const SystemParams& p, std::optional<double> gap_mhz) {
  if (!(p.delta > 0)) throw NumericalError("bad-params", "effective_eigs: delta must be > 0");
  EffectiveParams out;
  out.gamma1 = gamma1(p);
  const double gsq = p.g1 * p.g1 + p.g2 * p.g2;
  out.eps1 = Complex(p.delta + gsq / (4.0 * p.delta), -0.5 * out.gamma1);
  out.eps2 = Complex(p.delta, 0.0);
  out.eps3 = Complex(-gsq / (4.0 * p.delta), -0.5 * (p.gamma - out.gamma1));

  ComplexMatrix m(3, 3);
  m << Complex(p.delta, 0), Complex(0, 0), Complex(p.g1 / 2, 0),
       Complex(0, 0), Complex(p.delta, 0), Complex(p.g2 / 2, 0),
       Complex(p.g1 / 2, 0), Complex(p.g2 / 2, 0), Complex(0, -0.5 * p.gamma);
  const EigenDecomposition ed = general_eig(m);

  // match each closed-form eigenvalue to the nearest exact one
  std::array<Complex, 3> closed{out.eps1, out.eps2, out.eps3};
  std::array<Complex*, 3> slots{&out.eps1_num, &out.eps2_num, &out.eps3_num};
  std::array<bool, 3> taken{false, false, false};
  for (int i = 0; i < 3; ++i) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k) {
      if (taken[k]) continue;
      const double dd = std::abs(ed.eigenvalues(k) - closed[i]);
      if (dd < bd) { bd = dd; best = k; }
    }
    taken[best] = true;
    *slots[i] = ed.eigenvalues(best);
    out.max_discrepancy = std::max(out.max_discrepancy, bd);
  }

  if (gap_mhz) {
    out.gap_used = *gap_mhz;
    const Complex nu2(*gap_mhz * *gap_mhz - 0.25 * out.gamma1 * out.gamma1, 0.0);
    out.nu = std::sqrt(nu2);
  }
  return out;
}

}  // namespace eit
