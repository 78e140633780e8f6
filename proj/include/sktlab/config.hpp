#pragma once

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace sktlab {

/// Global tolerance bundle. Two tiers: `exact_zero` gates algebraic
/// identities on exactly representable constants, `derived` gates
/// quantities that went through nontrivial floating-point work.
struct Tolerances {
  double exact_zero = 1e-10;  ///< zero test for algebraic identities
  double derived = 1e-8;      ///< gate for derived floating computations
  double rank_rel = 1e-9;     ///< relative singular-value cutoff for subspace ranks
  double frame = 1e-12;       ///< orthonormality / involution checks

  /// Reads SKTLAB_TOL (a double) to override the zero-test tolerance.
  static Tolerances from_env() {
    Tolerances t;
    if (const char* s = std::getenv("SKTLAB_TOL")) {
      char* end = nullptr;
      const double v = std::strtod(s, &end);
      if (end != s && v > 0.0) t.exact_zero = v;
    }
    return t;
  }
};

inline const Tolerances& tols() {
  static const Tolerances t = Tolerances::from_env();
  return t;
}

/// Thrown when two routes that must agree by theorem disagree numerically
/// (e.g. the torsion-based center vs the bracket kernel).
class InconsistencyError : public std::runtime_error {
 public:
  explicit InconsistencyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sktlab
