#ifndef QGCC_SYNTHESIS_HPP
#define QGCC_SYNTHESIS_HPP

#include <string>

#include "qgcc/certification.hpp"
#include "qgcc/qmodel.hpp"

namespace qgcc {

/// Outcome of coherent guaranteed-cost controller synthesis.
struct SynthesisResult {
  CertStatus status = CertStatus::NumericalFailure;
  bool feasible = false;
  DoubledMatrix K;  // controller Hamiltonian matrix, K = Y/q
  DoubledMatrix Y;
  double q = 0.0;
  double s = 0.0;  // τ²
  double tau = 0.0;
  double xi = 0.0;     // minimized epigraph value of the certified bound
  double bound = 0.0;  // recomputed bound; includes |μ|²/4 + δ2 in the scalar case
  double closed_loop_abscissa = 0.0;
  /// λmax of the (unshifted, ρ-scaled) synthesis LMI at the solution.
  double margin = 0.0;
  Complex mu{0.0, 0.0};  // non-quadratic case only
  bool k_near_singular = false;
  int iterations = 0;
  std::string message;
};

/// Minimizes the guaranteed bound ξ ≥ B/q + δ/τ² over the controller
/// Hamiltonian K = Y/q (Q = q·I), subject to the quadratic-class synthesis
/// LMI. Throws PostCheckError if a returned K fails structure validation or
/// the nominal closed loop is not Hurwitz (solver defect, never silent).
SynthesisResult synthesize_quadratic(const PlantModel& plant, const CertOptions& options = {});

/// Scalar-channel variant; μ = −q⁻¹·ẼΣẼᵀ is evaluated after the solve and
/// reported through bound = ξ + |μ|²/4 + δ2 (ξ alone stays the SDP objective,
/// which is conservative but keeps the problem affine).
SynthesisResult synthesize_nonquadratic(const PlantModel& plant, const CertOptions& options = {});

/// Re-evaluates the (unshifted) synthesis LMI at a certificate (Y, q, s):
/// λmax of the √ρ-scaled form when raw_form is false, of the raw
/// (Y, −I/ρ) form otherwise. Both are negative definite for valid
/// certificates.
double synthesis_margin(const PlantModel& plant, const DoubledMatrix& Y, double q, double s,
                        bool raw_form = false);

}  // namespace qgcc

#endif  // QGCC_SYNTHESIS_HPP
