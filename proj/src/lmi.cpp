#include "qgcc/lmi.hpp"

#include <algorithm>
#include <cmath>

namespace qgcc {

template <typename Scalar>
void AffineExpr<Scalar>::add_term(int param, Mat coeff) {
  if (param < 0 || param >= num_params) {
    throw DimensionError("AffineExpr::add_term: parameter index out of range");
  }
  if (coeff.rows() != constant.rows() || coeff.cols() != constant.cols()) {
    throw DimensionError("AffineExpr::add_term: coefficient size differs from constant");
  }
  for (auto& t : terms) {
    if (t.param == param) {
      t.coeff += coeff;
      return;
    }
  }
  terms.push_back(Term{param, std::move(coeff)});
}

template <typename Scalar>
typename AffineExpr<Scalar>::Mat AffineExpr<Scalar>::evaluate(
    const Eigen::Ref<const RealVector>& x) const {
  if (x.size() != num_params) {
    throw DimensionError("AffineExpr::evaluate: expected " + std::to_string(num_params) +
                         " parameters, got " + std::to_string(x.size()));
  }
  Mat value = constant;
  for (const auto& t : terms) value += x[t.param] * t.coeff;
  return value;
}

template struct AffineExpr<Complex>;
template struct AffineExpr<double>;

VariableSpec VariableSpec::ScalarFreeVar(std::string name) {
  VariableSpec s;
  s.name = std::move(name);
  s.kind = VarKind::ScalarFree;
  return s;
}

VariableSpec VariableSpec::ScalarPositiveVar(std::string name, double eps, double cap) {
  VariableSpec s;
  s.name = std::move(name);
  s.kind = VarKind::ScalarPositive;
  s.lower = eps;
  s.upper = cap;
  return s;
}

VariableSpec VariableSpec::DoubledHermitianVar(std::string name, Index n) {
  VariableSpec s;
  s.name = std::move(name);
  s.kind = VarKind::DoubledHermitian;
  s.modes = n;
  return s;
}

int VariableSpec::param_count() const {
  if (kind == VarKind::DoubledHermitian) {
    return static_cast<int>(2 * modes * modes + modes);
  }
  return 1;
}

int VariableSpace::add(VariableSpec spec) {
  if (spec.kind == VarKind::DoubledHermitian && spec.modes <= 0) {
    throw DimensionError("VariableSpace: DoubledHermitian variable needs modes >= 1");
  }
  offsets_.push_back(total_);
  total_ += spec.param_count();
  specs_.push_back(std::move(spec));
  return count() - 1;
}

namespace {

// Parameter layout of DoubledHermitian(n), in order:
//   X1 diagonal (n, real), X1 off-diagonal i<j (re, im) pairs,
//   X2 upper triangle i<=j (re, im) pairs.
struct DoubledParam {
  bool in_x1;
  Index i, j;
  bool imag_part;
};

DoubledParam doubled_param(Index n, int k) {
  const int x1_count = static_cast<int>(n * n);
  if (k < n) return {true, k, k, false};
  if (k < x1_count) {
    int t = (k - static_cast<int>(n)) / 2;
    const bool im = ((k - n) % 2) != 0;
    for (Index i = 0; i < n; ++i) {
      const Index row_pairs = n - 1 - i;
      if (t < row_pairs) return {true, i, i + 1 + t, im};
      t -= static_cast<int>(row_pairs);
    }
  } else {
    int t = (k - x1_count) / 2;
    const bool im = ((k - x1_count) % 2) != 0;
    for (Index i = 0; i < n; ++i) {
      const Index row_entries = n - i;
      if (t < row_entries) return {false, i, i + t, im};
      t -= static_cast<int>(row_entries);
    }
  }
  throw DimensionError("doubled_param: parameter index out of range");
}

}  // namespace

ComplexMatrix VariableSpace::basis(int var, int k) const {
  const VariableSpec& s = spec(var);
  if (s.kind != VarKind::DoubledHermitian) {
    throw DimensionError("VariableSpace::basis: variable is not DoubledHermitian");
  }
  const Index n = s.modes;
  if (k < 0 || k >= s.param_count()) {
    throw DimensionError("VariableSpace::basis: parameter index out of range");
  }
  const DoubledParam p = doubled_param(n, k);
  const Complex i1(0.0, 1.0);
  ComplexMatrix B1 = ComplexMatrix::Zero(n, n);
  ComplexMatrix B2 = ComplexMatrix::Zero(n, n);
  if (p.in_x1) {
    if (p.i == p.j) {
      B1(p.i, p.i) = 1.0;
    } else if (!p.imag_part) {
      B1(p.i, p.j) = 1.0;
      B1(p.j, p.i) = 1.0;
    } else {
      B1(p.i, p.j) = i1;
      B1(p.j, p.i) = -i1;
    }
  } else {
    const Complex v = p.imag_part ? i1 : Complex(1.0, 0.0);
    B2(p.i, p.j) = v;
    B2(p.j, p.i) = v;  // i == j writes once
  }
  return DoubledMatrix{B1, B2}.assembled();
}

RealVector VariableSpace::pack(int var, const DoubledMatrix& X) const {
  const VariableSpec& s = spec(var);
  if (s.kind != VarKind::DoubledHermitian || X.modes() != s.modes) {
    throw DimensionError("VariableSpace::pack: variable/matrix mismatch");
  }
  const Index n = s.modes;
  RealVector out(s.param_count());
  for (int k = 0; k < s.param_count(); ++k) {
    const DoubledParam p = doubled_param(n, k);
    const Complex entry = p.in_x1 ? X.X1(p.i, p.j) : X.X2(p.i, p.j);
    out[k] = p.imag_part ? entry.imag() : entry.real();
  }
  return out;
}

DoubledMatrix VariableSpace::unpack(int var, const Eigen::Ref<const RealVector>& x) const {
  const VariableSpec& s = spec(var);
  if (s.kind != VarKind::DoubledHermitian) {
    throw DimensionError("VariableSpace::unpack: variable is not DoubledHermitian");
  }
  if (x.size() != params()) {
    throw DimensionError("VariableSpace::unpack: decision vector size mismatch");
  }
  const Index n = s.modes;
  DoubledMatrix X = DoubledMatrix::Zero(n);
  const int base = offset(var);
  for (int k = 0; k < s.param_count(); ++k) {
    const DoubledParam p = doubled_param(n, k);
    const double v = x[base + k];
    const Complex inc = p.imag_part ? Complex(0.0, v) : Complex(v, 0.0);
    if (p.in_x1) {
      X.X1(p.i, p.j) += inc;
      if (p.i != p.j) X.X1(p.j, p.i) += std::conj(inc);
    } else {
      X.X2(p.i, p.j) += inc;
      if (p.i != p.j) X.X2(p.j, p.i) += inc;
    }
  }
  return X;
}

double VariableSpace::scalar(int var, const Eigen::Ref<const RealVector>& x) const {
  const VariableSpec& s = spec(var);
  if (s.kind == VarKind::DoubledHermitian) {
    throw DimensionError("VariableSpace::scalar: variable is a matrix");
  }
  return x[offset(var)];
}

AffineMatrixExpr map_doubled_variable(
    const VariableSpace& space, int var, Index rows, Index cols,
    const std::function<ComplexMatrix(const ComplexMatrix&)>& dir) {
  AffineMatrixExpr expr(space.params(), ComplexMatrix::Zero(rows, cols));
  const int base = space.offset(var);
  for (int k = 0; k < space.size(var); ++k) {
    ComplexMatrix coeff = dir(space.basis(var, k));
    if (coeff.rows() != rows || coeff.cols() != cols) {
      throw DimensionError("map_doubled_variable: direction image has wrong size");
    }
    expr.add_term(base + k, std::move(coeff));
  }
  return expr;
}

AffineMatrixExpr scalar_term(const VariableSpace& space, int var, ComplexMatrix coeff) {
  AffineMatrixExpr expr(space.params(), ComplexMatrix::Zero(coeff.rows(), coeff.cols()));
  expr.add_term(space.offset(var), std::move(coeff));
  return expr;
}

AffineMatrixExpr constant_expr(const VariableSpace& space, ComplexMatrix c) {
  return AffineMatrixExpr(space.params(), std::move(c));
}

AffineMatrixExpr zero_expr(const VariableSpace& space, Index rows, Index cols) {
  return AffineMatrixExpr(space.params(), ComplexMatrix::Zero(rows, cols));
}

AffineMatrixExpr adjoint_expr(const AffineMatrixExpr& expr) {
  AffineMatrixExpr out(expr.num_params, expr.constant.adjoint());
  for (const auto& t : expr.terms) out.add_term(t.param, t.coeff.adjoint());
  return out;
}

namespace {

ComplexMatrix coeff_of(const AffineMatrixExpr& e, int param) {
  for (const auto& t : e.terms) {
    if (t.param == param) return t.coeff;
  }
  return ComplexMatrix::Zero(e.constant.rows(), e.constant.cols());
}

}  // namespace

AffineMatrixExpr assemble_blocks(const std::vector<std::vector<AffineMatrixExpr>>& grid) {
  if (grid.empty() || grid.front().empty()) {
    throw DimensionError("assemble_blocks: empty grid");
  }
  const std::size_t rows = grid.size();
  for (const auto& row : grid) {
    if (row.size() != rows) {
      throw DimensionError("assemble_blocks: grid must be square (blockwise)");
    }
  }
  const int num_params = grid[0][0].num_params;

  std::vector<Index> sizes(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    sizes[i] = grid[i][i].dim();
  }
  Index total = 0;
  std::vector<Index> starts(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    starts[i] = total;
    total += sizes[i];
  }

  const double kGridTol = 1e-12;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      const auto& e = grid[i][j];
      if (e.num_params != num_params) {
        throw DimensionError("assemble_blocks: blocks use different parameter spaces");
      }
      if (e.constant.rows() != sizes[i] || e.constant.cols() != sizes[j]) {
        throw DimensionError("assemble_blocks: block (" + std::to_string(i) + "," +
                             std::to_string(j) + ") has inconsistent size");
      }
      if (j < i) continue;
      const auto& mirror = grid[j][i];
      auto adjoint_mismatch = [&](const ComplexMatrix& a, const ComplexMatrix& b) {
        const double scale = std::max({a.norm(), b.norm(), 1.0});
        return (a - b.adjoint()).norm() > kGridTol * scale;
      };
      if (adjoint_mismatch(e.constant, mirror.constant)) {
        throw NotHermitianGridError("assemble_blocks: constant of block (" +
                                    std::to_string(i) + "," + std::to_string(j) +
                                    ") is not the adjoint of its mirror");
      }
      for (int p = 0; p < num_params; ++p) {
        if (adjoint_mismatch(coeff_of(e, p), coeff_of(mirror, p))) {
          throw NotHermitianGridError("assemble_blocks: coefficient " + std::to_string(p) +
                                      " of block (" + std::to_string(i) + "," +
                                      std::to_string(j) + ") breaks grid Hermitian symmetry");
        }
      }
    }
  }

  AffineMatrixExpr out(num_params, ComplexMatrix::Zero(total, total));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < rows; ++j) {
      const auto& e = grid[i][j];
      out.constant.block(starts[i], starts[j], sizes[i], sizes[j]) = e.constant;
    }
  }
  for (int p = 0; p < num_params; ++p) {
    ComplexMatrix coeff = ComplexMatrix::Zero(total, total);
    bool nonzero = false;
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < rows; ++j) {
        const ComplexMatrix c = coeff_of(grid[i][j], p);
        if (c.norm() > 0) {
          coeff.block(starts[i], starts[j], sizes[i], sizes[j]) = c;
          nonzero = true;
        }
      }
    }
    if (nonzero) out.add_term(p, std::move(coeff));
  }
  return out;
}

AffineMatrixExpr add_exprs(const AffineMatrixExpr& a, const AffineMatrixExpr& b) {
  if (a.num_params != b.num_params || a.dim() != b.dim()) {
    throw DimensionError("add_exprs: incompatible expressions");
  }
  AffineMatrixExpr out = a;
  out.constant += b.constant;
  for (const auto& t : b.terms) out.add_term(t.param, t.coeff);
  return out;
}

RealAffineExpr realify(const AffineMatrixExpr& expr) {
  RealAffineExpr out(expr.num_params, real_embed(expr.constant, 1e-9));
  for (const auto& t : expr.terms) {
    out.add_term(t.param, real_embed(t.coeff, 1e-9));
  }
  return out;
}

double feasibility_margin(const AffineMatrixExpr& expr,
                          const Eigen::Ref<const RealVector>& x) {
  const ComplexMatrix value = expr.evaluate(x);
  return herm_eig(value, 1e-9).eigenvalues.maxCoeff();
}

double feasibility_margin(const RealAffineExpr& expr,
                          const Eigen::Ref<const RealVector>& x) {
  const RealMatrix value = expr.evaluate(x);
  return herm_eig(value.cast<Complex>(), 1e-9).eigenvalues.maxCoeff();
}

}  // namespace qgcc
