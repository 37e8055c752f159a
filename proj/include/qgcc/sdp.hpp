#ifndef QGCC_SDP_HPP
#define QGCC_SDP_HPP

#include <string>
#include <vector>

#include "qgcc/lmi.hpp"
#include "qgcc/types.hpp"

namespace qgcc {

/// Box bounds on one decision variable; infinite sides are inactive.
struct VarBound {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

/// minimize objectiveᵀx  s.t.  every constraint expression ⪯ 0 and bounds.
/// Strictness margins are the caller's responsibility: shift the constant
/// by +ε·I before adding a constraint that must hold strictly.
struct SdpProblem {
  RealVector objective;
  std::vector<RealAffineExpr> constraints;
  std::vector<VarBound> bounds;  // empty, or one entry per parameter
};

enum class SdpStatus { Optimal, Infeasible, Unbounded, NumericalFailure };

struct SdpOptions {
  int max_iterations = 200;      // Newton steps, total across both phases
  double barrier_shrink = 10.0;  // μ ← μ/barrier_shrink per outer round
  double gap_tol = 1e-9;         // stop when m·μ ≤ gap_tol·(1 + |objective|)
  double newton_tol = 1e-11;     // inner stop on λ²/2
  double infeasibility_margin = 1e-8;
  double unbounded_threshold = -1e12;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  RealVector x;
  double objective_value = 0.0;
  /// max over constraints of λmax(A_j(x)); ≤ 0 when status == Optimal.
  double worst_margin = 0.0;
  int iterations = 0;
  std::string message;
};

const char* to_string(SdpStatus status);

/// Phase-I/phase-II logarithmic-barrier interior-point method.
/// Deterministic: identical inputs produce identical outputs.
SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

struct CertificateReport {
  bool pass = false;
  double max_margin = 0.0;
  double objective = 0.0;
  std::vector<double> constraint_margins;
  std::vector<std::string> bound_violations;
};

/// Independent re-check of an optimal solution: every constraint margin is
/// recomputed through herm_eig; pass iff max margin ≤ 1e-8 and all bounds
/// hold.
CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                    double margin_tol = 1e-8);

}  // namespace qgcc

#endif  // QGCC_SDP_HPP
