#ifndef QGCC_LMI_HPP
#define QGCC_LMI_HPP

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qgcc/numkernel.hpp"
#include "qgcc/qmodel.hpp"
#include "qgcc/types.hpp"

namespace qgcc {

/// Matrix-valued affine function of a real decision vector:
///   evaluate(x) = constant + Σ x[term.param] · term.coeff.
///
/// For Scalar = Complex the constant and every coefficient are Hermitian,
/// so the value is Hermitian for every real x; for Scalar = double they are
/// symmetric. Expressions are immutable once built and cheap to evaluate.
template <typename Scalar>
struct AffineExpr {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Term {
    int param = 0;
    Mat coeff;
  };

  int num_params = 0;
  Mat constant;
  std::vector<Term> terms;

  AffineExpr() = default;
  AffineExpr(int params, Mat c) : num_params(params), constant(std::move(c)) {}

  Index dim() const { return constant.rows(); }

  /// Adds x[param]·coeff; merges with an existing term on the same parameter.
  void add_term(int param, Mat coeff);

  Mat evaluate(const Eigen::Ref<const RealVector>& x) const;
};

using AffineMatrixExpr = AffineExpr<Complex>;
using RealAffineExpr = AffineExpr<double>;

enum class VarKind { ScalarFree, ScalarPositive, DoubledHermitian };

/// One named decision variable. DoubledHermitian(n) covers a doubled-up
/// Hermitian matrix with X1 = X1†, X2 = X2ᵀ: n² real parameters for X1 and
/// n(n+1) for X2, 2n² + n in total. Scalar kinds carry box bounds used by
/// the SDP core (ScalarPositive defaults to [ε_q, 1e6]).
struct VariableSpec {
  std::string name;
  VarKind kind = VarKind::ScalarFree;
  Index modes = 0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();

  static VariableSpec ScalarFreeVar(std::string name);
  static VariableSpec ScalarPositiveVar(std::string name, double eps = 1e-6,
                                        double cap = 1e6);
  static VariableSpec DoubledHermitianVar(std::string name, Index n);

  int param_count() const;
};

/// Ordered collection of variables backing one real decision vector.
class VariableSpace {
 public:
  int add(VariableSpec spec);

  int params() const { return total_; }
  int count() const { return static_cast<int>(specs_.size()); }
  const VariableSpec& spec(int var) const { return specs_.at(var); }
  int offset(int var) const { return offsets_.at(var); }
  int size(int var) const { return specs_.at(var).param_count(); }

  /// Assembled 2n×2n Hermitian basis direction of the k-th parameter of a
  /// DoubledHermitian variable.
  ComplexMatrix basis(int var, int k) const;

  /// Structured-matrix <-> coordinate round trip.
  RealVector pack(int var, const DoubledMatrix& X) const;
  DoubledMatrix unpack(int var, const Eigen::Ref<const RealVector>& x) const;

  double scalar(int var, const Eigen::Ref<const RealVector>& x) const;

 private:
  std::vector<VariableSpec> specs_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Builds an expression over `space` whose coefficient on every parameter of
/// `var` is `dir(basis direction)`; blocks may be rectangular (rows×cols).
AffineMatrixExpr map_doubled_variable(
    const VariableSpace& space, int var, Index rows, Index cols,
    const std::function<ComplexMatrix(const ComplexMatrix&)>& dir);

/// Expression `x[scalar var]·coeff`.
AffineMatrixExpr scalar_term(const VariableSpace& space, int var, ComplexMatrix coeff);

/// Constant expression over `space`'s parameters.
AffineMatrixExpr constant_expr(const VariableSpace& space, ComplexMatrix c);
AffineMatrixExpr zero_expr(const VariableSpace& space, Index rows, Index cols);

/// Blockwise adjoint: evaluate(x)† for every x.
AffineMatrixExpr adjoint_expr(const AffineMatrixExpr& expr);

/// Concatenates a 2D grid of expressions into one block expression.
/// The grid must be Hermitian as an expression: grid[i][j] == grid[j][i]†
/// for the constant and every coefficient (NotHermitianGridError otherwise).
AffineMatrixExpr assemble_blocks(const std::vector<std::vector<AffineMatrixExpr>>& grid);

/// Sum of expressions over the same parameter space.
AffineMatrixExpr add_exprs(const AffineMatrixExpr& a, const AffineMatrixExpr& b);

/// Applies real_embed to the constant and every coefficient; the result is a
/// real symmetric expression with the same feasibility margins.
RealAffineExpr realify(const AffineMatrixExpr& expr);

/// max eigenvalue of evaluate(x); ≤ −ε certifies strict feasibility.
double feasibility_margin(const AffineMatrixExpr& expr, const Eigen::Ref<const RealVector>& x);
double feasibility_margin(const RealAffineExpr& expr, const Eigen::Ref<const RealVector>& x);

}  // namespace qgcc

#endif  // QGCC_LMI_HPP
