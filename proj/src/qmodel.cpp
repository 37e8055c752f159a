#include "qgcc/qmodel.hpp"

#include <algorithm>
#include <cmath>

#include "qgcc/numkernel.hpp"

namespace qgcc {

namespace {

void require_same_square(const ComplexMatrix& a, const ComplexMatrix& b, const char* who) {
  if (a.rows() != a.cols() || a.rows() != b.rows() || b.rows() != b.cols()) {
    throw DimensionError(std::string(who) + ": blocks must be square and equally sized");
  }
}

}  // namespace

DoubledMatrix::DoubledMatrix(ComplexMatrix x1, ComplexMatrix x2)
    : X1(std::move(x1)), X2(std::move(x2)) {
  require_same_square(X1, X2, "DoubledMatrix");
}

DoubledMatrix DoubledMatrix::Zero(Index n) {
  return {ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n)};
}

DoubledMatrix DoubledMatrix::Identity(Index n) {
  return {ComplexMatrix::Identity(n, n), ComplexMatrix::Zero(n, n)};
}

DoubledMatrix DoubledMatrix::FromAssembled(const Eigen::Ref<const ComplexMatrix>& X) {
  if (X.rows() != X.cols() || X.rows() % 2 != 0 || X.rows() == 0) {
    throw DimensionError("DoubledMatrix::FromAssembled: need a non-empty even square matrix");
  }
  const Index n = X.rows() / 2;
  return {X.topLeftCorner(n, n), X.topRightCorner(n, n)};
}

ComplexMatrix DoubledMatrix::assembled() const {
  const Index n = modes();
  ComplexMatrix X(2 * n, 2 * n);
  X.topLeftCorner(n, n) = X1;
  X.topRightCorner(n, n) = X2;
  X.bottomLeftCorner(n, n) = X2.conjugate();
  X.bottomRightCorner(n, n) = X1.conjugate();
  return X;
}

CouplingMatrix::CouplingMatrix(ComplexMatrix n1, ComplexMatrix n2)
    : N1(std::move(n1)), N2(std::move(n2)) {
  if (N1.rows() != N2.rows() || N1.cols() != N2.cols()) {
    throw DimensionError("CouplingMatrix: N1 and N2 must have equal shape");
  }
}

CouplingMatrix CouplingMatrix::Zero(Index m, Index n) {
  return {ComplexMatrix::Zero(m, n), ComplexMatrix::Zero(m, n)};
}

ComplexMatrix CouplingMatrix::assembled() const {
  const Index m = outputs();
  const Index n = modes();
  ComplexMatrix N(2 * m, 2 * n);
  N.topLeftCorner(m, n) = N1;
  N.topRightCorner(m, n) = N2;
  N.bottomLeftCorner(m, n) = N2.conjugate();
  N.bottomRightCorner(m, n) = N1.conjugate();
  return N;
}

ComplexMatrix QuadraticUncertainty::assembled() const {
  if (E1.rows() != E2.rows() || E1.cols() != E2.cols()) {
    throw DimensionError("QuadraticUncertainty: E1 and E2 must have equal shape");
  }
  const Index p = channels();
  const Index n = modes();
  ComplexMatrix E(2 * p, 2 * n);
  E.topLeftCorner(p, n) = E1;
  E.topRightCorner(p, n) = E2;
  E.bottomLeftCorner(p, n) = E2.conjugate();
  E.bottomRightCorner(p, n) = E1.conjugate();
  return E;
}

Eigen::RowVectorXcd NonQuadraticUncertainty::etilde() const {
  if (E1.cols() != E2.cols()) {
    throw DimensionError("NonQuadraticUncertainty: E1 and E2 must have equal length");
  }
  Eigen::RowVectorXcd row(2 * E1.cols());
  row << E1, E2;
  return row;
}

const QuadraticUncertainty& PlantModel::quadratic() const {
  if (const auto* u = std::get_if<QuadraticUncertainty>(&uncertainty)) return *u;
  throw Error("plant has a non-quadratic uncertainty attached");
}

const NonQuadraticUncertainty& PlantModel::nonquadratic() const {
  if (const auto* u = std::get_if<NonQuadraticUncertainty>(&uncertainty)) return *u;
  throw Error("plant has a quadratic uncertainty attached");
}

void PlantModel::validate() const {
  const Index n = modes();
  if (n == 0) throw DimensionError("PlantModel: zero modes");
  if (N.modes() != n) throw DimensionError("PlantModel: N mode count differs from M");
  auto check_structured = [&](const DoubledMatrix& X, const char* name) {
    const auto violations = validate_structure(X.assembled(), StructureKind::Hamiltonian);
    if (!violations.empty()) {
      throw StructureError(std::string("PlantModel: ") + name + ": " + violations.front());
    }
  };
  check_structured(M, "M");
  check_structured(weights.R, "R");
  if (weights.R.modes() != n) throw DimensionError("PlantModel: R size differs from M");
  if (weights.rho <= 0) throw Error("PlantModel: rho must be positive");
  if (has_quadratic_uncertainty()) {
    const auto& u = quadratic();
    if (u.modes() != n) throw DimensionError("PlantModel: E mode count differs from M");
    if (u.gamma <= 0) throw Error("PlantModel: gamma must be positive");
    if (u.delta < 0) throw Error("PlantModel: delta must be non-negative");
  } else {
    const auto& u = nonquadratic();
    if (u.modes() != n) throw DimensionError("PlantModel: Etilde length differs from M");
    if (u.gamma <= 0) throw Error("PlantModel: gamma must be positive");
    if (u.delta1 < 0 || u.delta2 < 0) throw Error("PlantModel: delta1/delta2 must be non-negative");
  }
}

ComplexMatrix fundamental_j(Index n) {
  ComplexMatrix J = ComplexMatrix::Identity(2 * n, 2 * n);
  J.bottomRightCorner(n, n) *= -1.0;
  return J;
}

ComplexMatrix swap_sigma(Index n) {
  ComplexMatrix S = ComplexMatrix::Zero(2 * n, 2 * n);
  S.topRightCorner(n, n) = ComplexMatrix::Identity(n, n);
  S.bottomLeftCorner(n, n) = ComplexMatrix::Identity(n, n);
  return S;
}

std::vector<std::string> validate_structure(const Eigen::Ref<const ComplexMatrix>& X,
                                            StructureKind kind, double rel_tol) {
  std::vector<std::string> violations;
  if (X.rows() != X.cols() || X.rows() % 2 != 0 || X.rows() == 0) {
    violations.push_back("matrix is not square with even dimension");
    return violations;
  }
  const Index n = X.rows() / 2;
  const double scale = std::max(X.norm(), 1e-300);
  const auto X1 = X.topLeftCorner(n, n);
  const auto X2 = X.topRightCorner(n, n);

  if ((X.bottomLeftCorner(n, n) - X2.conjugate()).norm() > rel_tol * scale) {
    violations.push_back("X2# block mismatch: lower-left is not conj(X2)");
  }
  if ((X.bottomRightCorner(n, n) - X1.conjugate()).norm() > rel_tol * scale) {
    violations.push_back("X1# block mismatch: lower-right is not conj(X1)");
  }
  if (kind == StructureKind::Hamiltonian || kind == StructureKind::Covariance) {
    if ((X1 - X1.adjoint()).norm() > rel_tol * scale) {
      violations.push_back("X1 is not Hermitian");
    }
    if ((X2 - X2.transpose()).norm() > rel_tol * scale) {
      violations.push_back("X2 is not symmetric");
    }
  }
  return violations;
}

ComplexMatrix drift(const PlantModel& plant) {
  const Index n = plant.modes();
  if (plant.N.modes() != n) throw DimensionError("drift: N mode count differs from M");
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix Na = plant.N.assembled();
  const Complex i(0.0, 1.0);
  return -i * J * plant.M.assembled() - 0.5 * J * Na.adjoint() * J * Na;
}

ComplexMatrix closed_loop_drift(const PlantModel& plant, const DoubledMatrix& K,
                                const std::optional<DoubledMatrix>& Delta) {
  const Index n = plant.modes();
  if (K.modes() != n) throw DimensionError("closed_loop_drift: K size differs from plant");
  ComplexMatrix H = plant.M.assembled() + K.assembled();
  if (Delta.has_value()) {
    const auto& u = plant.quadratic();
    const ComplexMatrix Da = Delta->assembled();
    if (Da.rows() != 2 * u.channels()) {
      throw DimensionError("closed_loop_drift: Delta size differs from uncertainty channels");
    }
    const double norm = spectral_norm(Da);
    if (norm > u.admissible_radius() + 1e-12) {
      throw InadmissibleDeltaError("closed_loop_drift: ‖Δ‖ = " + std::to_string(norm) +
                                   " exceeds 2/γ = " + std::to_string(u.admissible_radius()));
    }
    const ComplexMatrix E = u.assembled();
    H += E.adjoint() * Da * E;
  }
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix Na = plant.N.assembled();
  const Complex i(0.0, 1.0);
  return -i * J * H - 0.5 * J * Na.adjoint() * J * Na;
}

ComplexMatrix diffusion(const CouplingMatrix& N) {
  const Index n = N.modes();
  const Index m = N.outputs();
  const ComplexMatrix J = fundamental_j(n);
  ComplexMatrix head = ComplexMatrix::Zero(2 * m, 2 * m);
  head.topLeftCorner(m, m) = ComplexMatrix::Identity(m, m);
  const ComplexMatrix Na = N.assembled();
  ComplexMatrix D = J * Na.adjoint() * head * Na * J;
  return 0.5 * (D + D.adjoint()).eval();
}

double lambda_tilde(const DoubledMatrix& P, const CouplingMatrix& N) {
  if (P.modes() != N.modes()) throw DimensionError("lambda_tilde: P and N sizes differ");
  const ComplexMatrix Pa = P.assembled();
  const EigResult eig = herm_eig(Pa, 1e-9);
  if (eig.eigenvalues.minCoeff() <= 0.0) {
    throw NotPositiveDefiniteError("lambda_tilde: P is not positive definite");
  }
  const Complex trace = (Pa * diffusion(N)).trace();
  if (std::abs(trace.imag()) > tol::kImagTrace * std::max(1.0, std::abs(trace.real()))) {
    throw NumericalError("lambda_tilde: trace has imaginary residue " +
                         std::to_string(trace.imag()));
  }
  return trace.real();
}

Complex mu_constant(const DoubledMatrix& P,
                    const Eigen::Ref<const Eigen::RowVectorXcd>& etilde) {
  const Index n = P.modes();
  if (etilde.cols() != 2 * n) {
    throw DimensionError("mu_constant: Etilde length differs from 2n");
  }
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix S = swap_sigma(n);
  return -(etilde * S * J * P.assembled() * J * etilde.transpose())(0, 0);
}

}  // namespace qgcc
