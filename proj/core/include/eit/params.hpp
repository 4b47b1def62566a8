#pragma once

#include <string>
#include <vector>

#include "eit/errors.hpp"
#include "eit/units.hpp"

namespace eit {

/// Physical parameters. All frequencies are in units of 2*pi MHz (the
/// convention of every number in configs and reports); eta is dimensionless.
/// Defaults are the standard operating point of this model
/// (eta=0.1, omega=0.03, delta=15, g1=1.34, g1/g2=10, gamma=0).
struct SystemParams {
  double eta = 0.1;      // Lamb-Dicke parameter
  double omega = 0.03;   // trap frequency
  double delta = 15.0;   // detuning
  double g1 = 1.34;      // Rabi coupling, leg 1 (the +k leg)
  double g2 = 0.134;     // Rabi coupling, leg 2 (the -k leg)
  double gamma = 0.0;    // spontaneous emission rate of |3>

  void validate() const {
    if (eta < 0) throw NumericalError("bad-params", "eta must be >= 0");
    if (!(omega > 0)) throw NumericalError("bad-params", "omega must be > 0");
    if (g1 < 0 || g2 < 0) throw NumericalError("bad-params", "g1, g2 must be >= 0");
    if (gamma < 0) throw NumericalError("bad-params", "gamma must be >= 0");
  }

  // The closed-form expressions assume g1,g2 << delta and gamma << delta.
  // These are advisory only; numerics does not require them.
  std::vector<std::string> regime_warnings() const {
    std::vector<std::string> w;
    if (delta <= 0 || g1 > 0.2 * delta || g2 > 0.2 * delta)
      w.push_back("couplings not small against delta; closed-form expressions are unreliable");
    if (delta > 0 && gamma > 0.2 * delta)
      w.push_back("gamma not small against delta; closed-form expressions are unreliable");
    return w;
  }
};

}  // namespace eit
