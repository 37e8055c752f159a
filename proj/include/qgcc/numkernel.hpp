#ifndef QGCC_NUMKERNEL_HPP
#define QGCC_NUMKERNEL_HPP

#include "qgcc/types.hpp"

namespace qgcc {

/// Result of a Hermitian eigendecomposition: A = V diag(w) V†,
/// eigenvalues ascending, V unitary.
struct EigResult {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Eigendecomposition of a Hermitian matrix.
///
/// Throws NotHermitianError if ‖A − A†‖ > sym_tol·‖A‖ and ConvergenceError
/// if the underlying iteration fails. The reconstruction residual
/// ‖A − VΛV†‖ is guaranteed ≤ 1e-10·‖A‖.
EigResult herm_eig(const Eigen::Ref<const ComplexMatrix>& A,
                   double sym_tol = tol::kHermitianCheck);

/// max_i Re λ_i(A) for a general square complex matrix.
/// A is Hurwitz iff the result is negative.
double spectral_abscissa(const Eigen::Ref<const ComplexMatrix>& A);

/// Largest singular value, computed via herm_eig of A†A.
double spectral_norm(const Eigen::Ref<const ComplexMatrix>& A);

/// Solves A·X + X·A† + D = 0 for Hermitian D and Hurwitz A.
///
/// Uses the Kronecker-sum vectorization (I⊗A + conj(A)⊗I) with partial
/// pivoting; intended for the small dense systems this library works with.
/// The returned X is Hermitian with residual ≤ res_tol·(‖A‖‖X‖ + ‖D‖).
ComplexMatrix solve_lyapunov(const Eigen::Ref<const ComplexMatrix>& A,
                             const Eigen::Ref<const ComplexMatrix>& D,
                             double res_tol = tol::kLyapunovResidual);

/// Hermitian PSD square root: S = S† ⪰ 0 with S·S = A.
/// Eigenvalues in [−1e-12·‖A‖, 0) are clipped to zero; anything below
/// −1e-8·‖A‖ raises NotPsdError.
ComplexMatrix psd_sqrt(const Eigen::Ref<const ComplexMatrix>& A);

/// [[Re H, −Im H],[Im H, Re H]] for Hermitian H. The embedding is real
/// symmetric with the spectrum of H doubled in multiplicity, so it
/// preserves definiteness.
RealMatrix real_embed(const Eigen::Ref<const ComplexMatrix>& H,
                      double sym_tol = tol::kHermitianCheck);

}  // namespace qgcc

#endif  // QGCC_NUMKERNEL_HPP
