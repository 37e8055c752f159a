#include "qgcc/numkernel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

namespace qgcc {

namespace {

void require_square(const Eigen::Ref<const ComplexMatrix>& A, const char* who) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw DimensionError(std::string(who) + ": expected a non-empty square matrix, got " +
                         std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
  }
  if (!A.allFinite()) {
    throw NumericalError(std::string(who) + ": matrix has non-finite entries");
  }
}

void require_hermitian(const Eigen::Ref<const ComplexMatrix>& A, double sym_tol,
                       const char* who) {
  const double scale = std::max(A.norm(), 1e-300);
  const double dev = (A - A.adjoint()).norm();
  if (dev > sym_tol * scale) {
    throw NotHermitianError(std::string(who) + ": ‖A − A†‖ = " + std::to_string(dev) +
                            " exceeds " + std::to_string(sym_tol) + "·‖A‖");
  }
}

}  // namespace

EigResult herm_eig(const Eigen::Ref<const ComplexMatrix>& A, double sym_tol) {
  require_square(A, "herm_eig");
  require_hermitian(A, sym_tol, "herm_eig");

  // Householder tridiagonalization + implicit-shift QL, via Eigen.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(A);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("herm_eig: eigensolver did not converge");
  }
  EigResult result{solver.eigenvalues(), solver.eigenvectors()};

  const double scale = std::max(A.norm(), 1e-300);
  const ComplexMatrix recon = result.eigenvectors *
                              result.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
                              result.eigenvectors.adjoint();
  if ((recon - A).norm() > tol::kEigResidual * scale) {
    throw ConvergenceError("herm_eig: reconstruction residual above tolerance");
  }
  return result;
}

double spectral_abscissa(const Eigen::Ref<const ComplexMatrix>& A) {
  require_square(A, "spectral_abscissa");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(A, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("spectral_abscissa: eigensolver did not converge");
  }
  return solver.eigenvalues().real().maxCoeff();
}

double spectral_norm(const Eigen::Ref<const ComplexMatrix>& A) {
  if (A.size() == 0) return 0.0;
  if (!A.allFinite()) throw NumericalError("spectral_norm: non-finite entries");
  if (A.norm() == 0.0) return 0.0;
  const ComplexMatrix gram = A.adjoint() * A;
  const EigResult eig = herm_eig(gram, 1e-10);
  return std::sqrt(std::max(eig.eigenvalues.maxCoeff(), 0.0));
}

ComplexMatrix solve_lyapunov(const Eigen::Ref<const ComplexMatrix>& A,
                             const Eigen::Ref<const ComplexMatrix>& D, double res_tol) {
  require_square(A, "solve_lyapunov");
  require_square(D, "solve_lyapunov");
  if (A.rows() != D.rows()) {
    throw DimensionError("solve_lyapunov: A and D sizes differ");
  }
  require_hermitian(D, 1e-10, "solve_lyapunov(D)");
  if (spectral_abscissa(A) >= 0.0) {
    throw NotHurwitzError("solve_lyapunov: A is not Hurwitz");
  }

  const Index n = A.rows();
  // vec(AX + XA†) = (I⊗A + conj(A)⊗I) vec(X), column-major vec.
  ComplexMatrix kron = ComplexMatrix::Zero(n * n, n * n);
  for (Index j = 0; j < n; ++j) {
    kron.block(j * n, j * n, n, n) += A;
    for (Index i = 0; i < n; ++i) {
      kron.block(j * n, i * n, n, n) +=
          std::conj(A(j, i)) * ComplexMatrix::Identity(n, n);
    }
  }
  ComplexVector rhs(n * n);
  for (Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -D.col(j);

  Eigen::PartialPivLU<ComplexMatrix> lu(kron);
  ComplexVector xvec = lu.solve(rhs);
  if (!xvec.allFinite()) {
    throw SingularSystemError("solve_lyapunov: Kronecker-sum system is singular");
  }

  ComplexMatrix X(n, n);
  for (Index j = 0; j < n; ++j) X.col(j) = xvec.segment(j * n, n);
  X = 0.5 * (X + X.adjoint()).eval();

  const double scale = A.norm() * X.norm() + D.norm();
  const double residual = (A * X + X * A.adjoint() + D).norm();
  if (residual > res_tol * std::max(scale, 1e-300)) {
    throw SingularSystemError("solve_lyapunov: residual " + std::to_string(residual) +
                              " exceeds tolerance");
  }
  return X;
}

ComplexMatrix psd_sqrt(const Eigen::Ref<const ComplexMatrix>& A) {
  require_square(A, "psd_sqrt");
  const double scale = std::max(A.norm(), 1e-300);
  const EigResult eig = herm_eig(A);
  RealVector w = eig.eigenvalues;
  for (Index i = 0; i < w.size(); ++i) {
    if (w[i] < -tol::kPsdReject * scale) {
      throw NotPsdError("psd_sqrt: eigenvalue " + std::to_string(w[i]) +
                        " below −1e-8·‖A‖");
    }
    w[i] = std::sqrt(std::max(w[i], 0.0));
  }
  ComplexMatrix S = eig.eigenvectors * w.asDiagonal().toDenseMatrix().cast<Complex>() *
                    eig.eigenvectors.adjoint();
  return 0.5 * (S + S.adjoint()).eval();
}

RealMatrix real_embed(const Eigen::Ref<const ComplexMatrix>& H, double sym_tol) {
  require_square(H, "real_embed");
  require_hermitian(H, sym_tol, "real_embed");
  const Index n = H.rows();
  RealMatrix Y(2 * n, 2 * n);
  Y.topLeftCorner(n, n) = H.real();
  Y.topRightCorner(n, n) = -H.imag();
  Y.bottomLeftCorner(n, n) = H.imag();
  Y.bottomRightCorner(n, n) = H.real();
  return 0.5 * (Y + Y.transpose()).eval();
}

}  // namespace qgcc
