#ifndef QGCC_ANALYSIS_HPP
#define QGCC_ANALYSIS_HPP

#include <string>

#include "qgcc/certification.hpp"
#include "qgcc/qmodel.hpp"

namespace qgcc {

/// Outcome of a robustness analysis (no controller).
///
/// `Infeasible` means no certificate was found — it is not a proof of
/// instability; `NotNominallyStable` means the nominal drift itself is not
/// Hurwitz, in which case the LMI is never attempted.
struct AnalysisResult {
  CertStatus status = CertStatus::NumericalFailure;
  bool feasible = false;
  DoubledMatrix P;
  double u = 0.0;    // 1/τ²
  double tau = 0.0;
  double lambda_tilde = 0.0;
  double bound = 0.0;
  /// λmax of the (unshifted) theorem LMI at (P, u); ≤ −eps_margin when feasible.
  double margin = 0.0;
  Complex mu{0.0, 0.0};  // non-quadratic case only
  int iterations = 0;
  std::string message;
};

/// Certifies stability against every quadratic perturbation ‖Δ‖ ≤ 2/γ and
/// minimizes the certifiable cost bound λ̃ + δ/τ² over structured P ≻ 0 and
/// u = 1/τ² > 0.
AnalysisResult analyze_quadratic(const PlantModel& plant, const CertOptions& options = {});

/// Non-quadratic (scalar-channel) variant; the bound picks up the constant
/// μμ*/4 + δ2 terms, with the μμ*/4 part minimized through an exact Schur
/// epigraph variable so the whole objective stays a single SDP.
AnalysisResult analyze_nonquadratic(const PlantModel& plant, const CertOptions& options = {});

/// Re-evaluates the (unshifted) analysis LMI at a given certificate (P, u):
/// returns its λmax. Used to re-verify stored/deserialized certificates.
double analysis_margin(const PlantModel& plant, const DoubledMatrix& P, double u);

}  // namespace qgcc

#endif  // QGCC_ANALYSIS_HPP
