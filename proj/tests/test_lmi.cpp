#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qgcc/lmi.hpp"
#include "qgcc/numkernel.hpp"
#include "test_support.hpp"

using namespace qgcc;
using qgcc::testing::Rng;
using qgcc::testing::cavity_plant;

namespace {

// Theorem-1-style expression for the cavity plant, built over (P, u).
struct AnalysisExpr {
  VariableSpace vs;
  int vP, vu;
  AffineMatrixExpr lmi;
};

AnalysisExpr cavity_analysis_expr(double kappa) {
  const PlantModel plant = cavity_plant(kappa);
  const ComplexMatrix F = drift(plant);
  const ComplexMatrix E = plant.quadratic().assembled();
  const ComplexMatrix J = fundamental_j(1);
  const ComplexMatrix R = plant.weights.R.assembled();

  AnalysisExpr out;
  out.vP = out.vs.add(VariableSpec::DoubledHermitianVar("P", 1));
  out.vu = out.vs.add(VariableSpec::ScalarPositiveVar("u"));

  AffineMatrixExpr tl = map_doubled_variable(
      out.vs, out.vP, 2, 2,
      [&](const ComplexMatrix& H) { return (F.adjoint() * H + H * F).eval(); });
  tl = add_exprs(tl, scalar_term(out.vs, out.vu, (E.adjoint() * E).eval()));
  tl.constant += R;
  AffineMatrixExpr tr = map_doubled_variable(
      out.vs, out.vP, 2, 2, [&](const ComplexMatrix& H) { return (2.0 * H * J * E.adjoint()).eval(); });
  AffineMatrixExpr br = scalar_term(out.vs, out.vu, (-ComplexMatrix::Identity(2, 2)).eval());
  out.lmi = assemble_blocks({{tl, tr}, {adjoint_expr(tr), br}});
  return out;
}

}  // namespace

TEST_CASE("pack/unpack round trip and structured materialization") {
  Rng rng(19);
  for (Index n : {1, 2, 3}) {
    VariableSpace vs;
    const int v = vs.add(VariableSpec::DoubledHermitianVar("X", n));
    CHECK(vs.params() == 2 * n * n + n);
    for (int trial = 0; trial < 10; ++trial) {
      const DoubledMatrix X = rng.doubled_hermitian(n);
      const RealVector coords = vs.pack(v, X);
      const DoubledMatrix back = vs.unpack(v, coords);
      CHECK((back.X1 - X.X1).norm() <= 1e-14 * std::max(1.0, X.X1.norm()));
      CHECK((back.X2 - X.X2).norm() <= 1e-14 * std::max(1.0, X.X2.norm()));
      CHECK(validate_structure(back.assembled(), StructureKind::Hamiltonian).empty());
    }
    // every basis direction is Hermitian and structured
    for (int k = 0; k < vs.size(v); ++k) {
      const ComplexMatrix B = vs.basis(v, k);
      CHECK((B - B.adjoint()).norm() <= 1e-15);
      CHECK(validate_structure(B, StructureKind::Hamiltonian).empty());
    }
  }
}

TEST_CASE("evaluate: constant, unit directions, Hermitian residual") {
  AnalysisExpr ae = cavity_analysis_expr(2.0);
  const int n_params = ae.vs.params();

  const ComplexMatrix at_zero = ae.lmi.evaluate(RealVector::Zero(n_params));
  CHECK((at_zero - ae.lmi.constant).norm() == 0.0);

  Rng rng(77);
  for (int i = 0; i < n_params; ++i) {
    RealVector e = RealVector::Zero(n_params);
    e[i] = 1.0;
    ComplexMatrix expected = ae.lmi.constant;
    for (const auto& t : ae.lmi.terms) {
      if (t.param == i) expected += t.coeff;
    }
    CHECK((ae.lmi.evaluate(e) - expected).norm() <= 1e-15);
  }
  for (int trial = 0; trial < 10; ++trial) {
    RealVector x(n_params);
    for (int i = 0; i < n_params; ++i) x[i] = rng.normal();
    const ComplexMatrix V = ae.lmi.evaluate(x);
    CHECK((V - V.adjoint()).norm() <= 1e-12 * std::max(1.0, V.norm()));
  }
}

TEST_CASE("assemble_blocks: small grids") {
  VariableSpace vs;
  const int vx = vs.add(VariableSpec::ScalarFreeVar("x"));

  // 1x1 grid [x·I2]
  AffineMatrixExpr xI = scalar_term(vs, vx, ComplexMatrix::Identity(2, 2));
  const AffineMatrixExpr g1 = assemble_blocks({{xI}});
  CHECK(g1.dim() == 2);
  RealVector x1(1);
  x1 << 3.0;
  CHECK((g1.evaluate(x1) - 3.0 * ComplexMatrix::Identity(2, 2)).norm() <= 1e-15);

  // 2x2 grid [[xI, I],[I, xI]]
  AffineMatrixExpr xI1 = scalar_term(vs, vx, ComplexMatrix::Identity(2, 2));
  AffineMatrixExpr one = constant_expr(vs, ComplexMatrix::Identity(2, 2));
  const AffineMatrixExpr g2 = assemble_blocks({{xI1, one}, {one, xI1}});
  CHECK(g2.dim() == 4);
  const ComplexMatrix V = g2.evaluate(x1);
  CHECK(V(0, 0) == Complex(3.0, 0.0));
  CHECK(V(0, 2) == Complex(1.0, 0.0));
  CHECK((V - V.adjoint()).norm() == 0.0);
}

TEST_CASE("assemble_blocks: Theorem-1 grid matches a direct hand assembly") {
  AnalysisExpr ae = cavity_analysis_expr(2.0);
  RealVector x = RealVector::Zero(ae.vs.params());
  x[ae.vs.offset(ae.vP)] = 1.0;  // P = I
  x[ae.vs.offset(ae.vu)] = 1.0;  // u = 1

  const PlantModel plant = cavity_plant(2.0);
  const ComplexMatrix F = drift(plant);
  const ComplexMatrix E = plant.quadratic().assembled();
  const ComplexMatrix J = fundamental_j(1);
  const ComplexMatrix P = ComplexMatrix::Identity(2, 2);
  ComplexMatrix hand(4, 4);
  hand.topLeftCorner(2, 2) =
      F.adjoint() * P + P * F + E.adjoint() * E + ComplexMatrix::Identity(2, 2);
  hand.topRightCorner(2, 2) = 2.0 * P * J * E.adjoint();
  hand.bottomLeftCorner(2, 2) = hand.topRightCorner(2, 2).adjoint();
  hand.bottomRightCorner(2, 2) = -ComplexMatrix::Identity(2, 2);

  CHECK((ae.lmi.evaluate(x) - hand).norm() <= 1e-12);
}

TEST_CASE("assemble_blocks: rejects non-Hermitian grids and bad dimensions") {
  VariableSpace vs;
  const int vx = vs.add(VariableSpec::ScalarFreeVar("x"));
  AffineMatrixExpr xI = scalar_term(vs, vx, ComplexMatrix::Identity(2, 2));
  ComplexMatrix Asym(2, 2);
  Asym << 0, 1, 0, 0;
  AffineMatrixExpr upper = constant_expr(vs, Asym);
  CHECK_THROWS_AS(assemble_blocks({{xI, upper}, {upper, xI}}), NotHermitianGridError);

  AffineMatrixExpr small = constant_expr(vs, ComplexMatrix::Identity(1, 1));
  CHECK_THROWS_AS(assemble_blocks({{xI, small}, {small, xI}}), DimensionError);
}

TEST_CASE("realify: definiteness and margins preserved") {
  // identity constant -> diagonal embedding
  VariableSpace vs;
  vs.add(VariableSpec::ScalarFreeVar("x"));
  const RealAffineExpr emb = realify(constant_expr(vs, ComplexMatrix::Identity(2, 2)));
  CHECK((emb.constant - RealMatrix::Identity(4, 4)).norm() <= 1e-15);

  // pure-imaginary off-diagonal constant has margin +1 both ways
  ComplexMatrix H(2, 2);
  H << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  const AffineMatrixExpr ce = constant_expr(vs, H);
  RealVector zero = RealVector::Zero(1);
  CHECK(feasibility_margin(ce, zero) == doctest::Approx(1.0));
  CHECK(feasibility_margin(realify(ce), zero) == doctest::Approx(1.0));

  // margins agree at random points of the Theorem-1 expression
  AnalysisExpr ae = cavity_analysis_expr(2.0);
  const RealAffineExpr real_lmi = realify(ae.lmi);
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    RealVector x(ae.vs.params());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const double mc = feasibility_margin(ae.lmi, x);
    const double mr = feasibility_margin(real_lmi, x);
    CHECK(mr == doctest::Approx(mc).epsilon(1e-10));
    CHECK(((mc <= 0) == (mr <= 0)));
  }
}

TEST_CASE("feasibility_margin: fixed signs") {
  VariableSpace vs;
  vs.add(VariableSpec::ScalarFreeVar("x"));
  RealVector zero = RealVector::Zero(1);
  CHECK(feasibility_margin(constant_expr(vs, (-ComplexMatrix::Identity(3, 3)).eval()), zero) ==
        doctest::Approx(-1.0));
  CHECK(feasibility_margin(constant_expr(vs, ComplexMatrix::Identity(3, 3)), zero) ==
        doctest::Approx(1.0));
}

TEST_CASE("assembled expressions are self-adjoint at random points") {
  AnalysisExpr ae = cavity_analysis_expr(3.0);
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    RealVector x(ae.vs.params());
    for (int i = 0; i < x.size(); ++i) x[i] = rng.normal();
    const ComplexMatrix V = ae.lmi.evaluate(x);
    CHECK((V - V.adjoint()).norm() <= 1e-12 * std::max(1.0, V.norm()));
  }
}
