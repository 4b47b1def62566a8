#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "eit/entanglement.hpp"
#include "eit/operators.hpp"

namespace eit {

enum class Method {
  automatic,  // spectral for pure-state solvers, krylov for the master equation
  spectral,   // exact eigendecomposition propagation (time-independent segments)
  rk4,        // classical fixed-step 4th-order on the matrix map
  krylov      // Arnoldi exp(L t) * vec(rho), adaptive substeps, exact generator
};

/// Piecewise-constant laser amplitude factors. Segments must be contiguous,
/// non-overlapping and cover [0, t_final].
struct LaserSchedule {
  struct Segment {
    double t_start = 0, t_end = 0;
    double g1_factor = 1, g2_factor = 1;
  };
  std::vector<Segment> segments;

  static LaserSchedule always_on(double t_final);
  void validate(double t_final) const;
  const Segment& at(double t) const;
};

struct TrajectoryPoint {
  double t = 0;                // us
  double negativity = 0;       // effective solver: rescaled by the squared surviving norm
  double negativity_raw = 0;   // effective solver: value on the normalized state; else == negativity
  double mean_n = 0;
  double pop1 = 0, pop2 = 0, pop3 = 0;
  double purity = 0;
  double trace_error = 0;      // |tr rho - 1|, or |norm^2 - 1| for pure solvers
  double tail_population = 0;  // population of the top 3 Fock levels
  double min_eigenvalue = 0;   // positivity monitor (lindblad runs; 0 otherwise)
};

struct Trajectory {
  CompositeSpace space;
  std::vector<TrajectoryPoint> points;
  ComplexVector final_psi;  // pure-state solvers
  ComplexMatrix final_rho;  // lindblad

  std::vector<double> times() const;
  std::vector<double> negativities() const;
  std::vector<double> mean_ns() const;
  double max_trace_error() const;
};

struct EvolveOptions {
  double t_final = 0;                  // us
  std::optional<double> dt;            // rk4 step / record spacing; default per method
  std::optional<int> record_every;     // record every k-th step
  Method method = Method::automatic;
  std::optional<LaserSchedule> schedule;

  double krylov_tol = 1e-12;           // relative local error per substep
  int krylov_dim = 30;
  double tail_threshold = 1e-6;        // abort when the top 3 Fock levels exceed this
  double positivity_floor = -1e-6;     // abort when min eig of rho falls below this

  // called at every record point with whichever representation is evolving
  std::function<void(double t, const ComplexVector* psi, const ComplexMatrix* rho)> observer;
};

/// dpsi/dt = -i H psi. Default method: spectral (exact per segment); the
/// fixed-step rule for rk4 is h <= 0.05 / max(||H||, gamma) in angular units.
Trajectory evolve_schrodinger(const OperatorSet& ops, const StateVector& psi0,
                              const EvolveOptions& opt);

/// dpsi/dt = -i H_eff psi; the norm decays. Negativity is computed on the
/// normalized state and additionally rescaled by the squared surviving norm
/// (the Trajectory's `negativity`), matching the two-state damped formula's
/// construction from unnormalized amplitudes.
Trajectory evolve_effective(const OperatorSet& ops, const StateVector& psi0,
                            const EvolveOptions& opt);

/// drho/dt = -i[H, rho] + L rho, gain terms included. Default method: krylov.
/// rho is symmetrized each step; positivity is monitored, not enforced.
Trajectory evolve_lindblad(const OperatorSet& ops, const DensityMatrix& rho0,
                           const EvolveOptions& opt);

struct ObservableRecord {
  double mean_n = 0;
  double pop1 = 0, pop2 = 0, pop3 = 0;
  double purity = 0;
  double trace = 0;
  double tail_population = 0;
};

ObservableRecord observables(const StateVector& psi, const OperatorSet& ops);
ObservableRecord observables(const DensityMatrix& rho, const OperatorSet& ops);

/// Full Liouvillian as a dense (3N)^2 x (3N)^2 matrix acting on column-major
/// vec(rho). Only for the kernel steady-state path and for tests; time
/// stepping never materializes this.
ComplexMatrix liouvillian_superoperator(const OperatorSet& ops);

/// One application of the master-equation right-hand side (angular units).
ComplexMatrix lindblad_rhs(const OperatorSet& ops, const ComplexMatrix& rho);

enum class SteadyMethod { liouvillian_kernel, long_time };

struct SteadyState {
  DensityMatrix rho_stat;
  double residual = 0;          // ||L rho_stat||_F (angular)
  double liouvillian_norm = 0;  // power-iteration estimate of ||L||
  double negativity_inf = 0;
  SteadyMethod method = SteadyMethod::liouvillian_kernel;
};

struct SteadyOptions {
  std::optional<StateVector> initial;  // long-time start; default |phi2, 0>
  double max_time = 200000.0;          // us, long-time integration limit
  double krylov_tol = 1e-12;
  int krylov_dim = 30;
};

/// Stationary state of the master equation. The kernel method builds the full
/// superoperator (gated to n_fock <= 20) and extracts its null space; the
/// long-time method integrates until ||L rho||_F <= max(1e-12, 1e-10 ||L||).
/// Requires gamma > 0 (no unique stationary state otherwise).
SteadyState steady_state(const OperatorSet& ops, SteadyMethod method,
                         const SteadyOptions& opt = {});

/// Power-iteration estimate of the spectral norm of the Liouvillian map.
double liouvillian_norm_estimate(const OperatorSet& ops);

/// Step-size rule for the fixed-step integrator: 0.05 / max(||H||_2 est, gamma)
/// in angular units.
double rk4_step_rule(const OperatorSet& ops);

}  // namespace eit
