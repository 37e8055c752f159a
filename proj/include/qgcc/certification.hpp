#ifndef QGCC_CERTIFICATION_HPP
#define QGCC_CERTIFICATION_HPP

#include "qgcc/sdp.hpp"

namespace qgcc {

enum class CertStatus { Optimal, Infeasible, NotNominallyStable, NumericalFailure };

const char* to_string(CertStatus status);

/// Options shared by the analysis and synthesis front ends.
struct CertOptions {
  /// Strict "< 0" inequalities are implemented as "⪯ −eps_margin·I".
  double eps_margin = 1e-6;
  /// Lower bound for scalar-positive variables (q, u, s).
  double eps_q = 1e-6;
  SdpOptions sdp;
};

}  // namespace qgcc

#endif  // QGCC_CERTIFICATION_HPP
