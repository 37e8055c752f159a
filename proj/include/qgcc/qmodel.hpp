#ifndef QGCC_QMODEL_HPP
#define QGCC_QMODEL_HPP

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qgcc/types.hpp"

namespace qgcc {

/// 2n×2n block matrix [[X1, X2],[X2#, X1#]] stored by its upper blocks.
///
/// Hamiltonian-type instances additionally satisfy X1 = X1† and X2 = X2ᵀ,
/// which makes the assembled matrix Hermitian; that invariant is checked
/// by validate_structure, not by this container.
struct DoubledMatrix {
  ComplexMatrix X1;
  ComplexMatrix X2;

  DoubledMatrix() = default;
  DoubledMatrix(ComplexMatrix x1, ComplexMatrix x2);

  static DoubledMatrix Zero(Index n);
  static DoubledMatrix Identity(Index n);
  /// Splits an assembled 2n×2n matrix into its upper blocks.
  static DoubledMatrix FromAssembled(const Eigen::Ref<const ComplexMatrix>& X);

  Index modes() const { return X1.rows(); }
  ComplexMatrix assembled() const;
  DoubledMatrix scaled(double factor) const { return {factor * X1, factor * X2}; }
};

/// Coupling data N1, N2 (m×n); assembled form [[N1,N2],[N2#,N1#]] (2m×2n).
struct CouplingMatrix {
  ComplexMatrix N1;
  ComplexMatrix N2;

  CouplingMatrix() = default;
  CouplingMatrix(ComplexMatrix n1, ComplexMatrix n2);

  static CouplingMatrix Zero(Index m, Index n);

  Index modes() const { return N1.cols(); }
  Index outputs() const { return N1.rows(); }
  ComplexMatrix assembled() const;
  CouplingMatrix scaled(double factor) const { return {factor * N1, factor * N2}; }
};

/// Quadratic Hamiltonian perturbation channel: z = E [a; a#] with
/// E = [[E1,E2],[E2#,E1#]], perturbation matrix ‖Δ‖ ≤ 2/γ, sector offset δ.
struct QuadraticUncertainty {
  ComplexMatrix E1;
  ComplexMatrix E2;
  double gamma = 1.0;
  double delta = 0.0;

  Index modes() const { return E1.cols(); }
  Index channels() const { return E1.rows(); }
  ComplexMatrix assembled() const;
  double admissible_radius() const { return 2.0 / gamma; }
};

/// Scalar (non-quadratic) perturbation channel: z = ζ = Ẽ [a; a#] with the
/// 1×2n row Ẽ = [E1, E2]; sector parameters γ, δ1, δ2.
struct NonQuadraticUncertainty {
  Eigen::RowVectorXcd E1;
  Eigen::RowVectorXcd E2;
  double gamma = 1.0;
  double delta1 = 0.0;
  double delta2 = 0.0;

  Index modes() const { return E1.cols(); }
  Eigen::RowVectorXcd etilde() const;
};

using Uncertainty = std::variant<QuadraticUncertainty, NonQuadraticUncertainty>;

/// Cost weight R ≻ 0 (doubled-Hermitian) and controller penalty ρ > 0.
struct CostWeights {
  DoubledMatrix R;
  double rho = 0.01;
};

/// The single input record for analysis and synthesis.
struct PlantModel {
  DoubledMatrix M;
  CouplingMatrix N;
  Uncertainty uncertainty;
  CostWeights weights;

  Index modes() const { return M.modes(); }
  bool has_quadratic_uncertainty() const {
    return std::holds_alternative<QuadraticUncertainty>(uncertainty);
  }
  const QuadraticUncertainty& quadratic() const;
  const NonQuadraticUncertainty& nonquadratic() const;

  /// Throws StructureError/DimensionError if blocks are inconsistent.
  void validate() const;
};

/// Commutation signature diag(I_n, −I_n).
ComplexMatrix fundamental_j(Index n);
/// Block swap [[0, I_n],[I_n, 0]].
ComplexMatrix swap_sigma(Index n);

enum class StructureKind { Hamiltonian, Coupling, Covariance };

/// Checks the doubled block structure of an assembled matrix; for
/// Hamiltonian/Covariance kinds also X1 = X1† and X2 = X2ᵀ. Returns a list
/// of human-readable violations (empty = valid); never throws on content.
std::vector<std::string> validate_structure(const Eigen::Ref<const ComplexMatrix>& X,
                                            StructureKind kind,
                                            double rel_tol = tol::kStructure);

/// Nominal drift F = −iJM − ½JN†JN.
ComplexMatrix drift(const PlantModel& plant);

/// Drift with controller Hamiltonian K and (optionally) a concrete
/// quadratic perturbation Δ: −iJ(M + K + E†ΔE) − ½JN†JN.
/// Throws InadmissibleDeltaError if ‖Δ‖ > 2/γ + 1e-12.
ComplexMatrix closed_loop_drift(const PlantModel& plant, const DoubledMatrix& K,
                                const std::optional<DoubledMatrix>& Delta = std::nullopt);

/// Vacuum-noise diffusion D = J N† diag(I_m, 0) N J, Hermitian PSD.
///
/// D is fixed by requiring the first-moment generator identity
/// d⟨V⟩/dt = Tr(P(FΣ + ΣF†)) + Tr(P·D) to hold for every structured P,
/// which matches the constant term Tr(PJN†diag(I,0)NJ) produced by the
/// coupling channel; the same constant is the λ̃ term of the cost bounds.
ComplexMatrix diffusion(const CouplingMatrix& N);

/// λ̃ = Tr(P·D) for structured P ≻ 0; the trace is provably real and
/// non-negative, an imaginary residue above 1e-12 signals an assembly bug.
double lambda_tilde(const DoubledMatrix& P, const CouplingMatrix& N);

/// μ = −Ẽ Σ J P J Ẽᵀ (a complex scalar, linear in P).
Complex mu_constant(const DoubledMatrix& P, const Eigen::Ref<const Eigen::RowVectorXcd>& etilde);

}  // namespace qgcc

#endif  // QGCC_QMODEL_HPP
