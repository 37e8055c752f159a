#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qgcc/numkernel.hpp"
#include "qgcc/qmodel.hpp"
#include "test_support.hpp"

using namespace qgcc;
using qgcc::testing::Rng;
using qgcc::testing::cavity_plant;

TEST_CASE("drift: zero plant, cavity plant, pure-damping plant") {
  PlantModel zero = cavity_plant(1.0);
  zero.M = DoubledMatrix::Zero(1);
  zero.N = CouplingMatrix::Zero(1, 1);
  CHECK(drift(zero).norm() == 0.0);

  const PlantModel plant = cavity_plant(2.0);
  ComplexMatrix expected(2, 2);
  expected << -1.0, 0.5, 0.5, -1.0;
  CHECK((drift(plant) - expected).norm() <= 1e-14);

  PlantModel damped = cavity_plant(1.0);
  damped.M = DoubledMatrix::Zero(1);
  CHECK((drift(damped) + 0.5 * ComplexMatrix::Identity(2, 2)).norm() <= 1e-14);
}

TEST_CASE("closed_loop_drift: identity cases and the doubled Hamiltonian") {
  const PlantModel plant = cavity_plant(2.0);
  const DoubledMatrix K0 = DoubledMatrix::Zero(1);
  CHECK((closed_loop_drift(plant, K0, DoubledMatrix::Zero(1)) - drift(plant)).norm() == 0.0);

  // Δ equal to M itself (the reference perturbation) doubles the coupling.
  const std::optional<DoubledMatrix> delta = plant.M;
  ComplexMatrix expected(2, 2);
  expected << -1.0, 1.0, 1.0, -1.0;
  CHECK((closed_loop_drift(plant, K0, delta) - expected).norm() <= 1e-14);
}

TEST_CASE("closed_loop_drift: output keeps the doubled block structure") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    PlantModel plant = cavity_plant(1.0 + rng.uniform());
    const Index n = 2;
    PlantModel big;
    big.M = rng.doubled_hermitian(n);
    big.N = CouplingMatrix{rng.general(2, n), rng.general(2, n)};
    QuadraticUncertainty u;
    u.E1 = rng.general(1, n);
    u.E2 = rng.general(1, n);
    u.gamma = 0.5 + rng.uniform();
    u.delta = rng.uniform();
    big.uncertainty = u;
    big.weights.R = DoubledMatrix::Identity(n);
    const DoubledMatrix K = rng.doubled_hermitian(n);
    DoubledMatrix delta{rng.hermitian(1), rng.complex_symmetric(1)};
    const double norm = spectral_norm(delta.assembled());
    if (norm > 0) delta = delta.scaled(2.0 / u.gamma / norm * rng.uniform());
    const ComplexMatrix F = closed_loop_drift(big, K, delta);
    CHECK(validate_structure(F, StructureKind::Coupling).empty());
    (void)plant;
  }
}

TEST_CASE("closed_loop_drift: inadmissible Delta rejected") {
  const PlantModel plant = cavity_plant(2.0);
  DoubledMatrix delta = plant.M.scaled(10.0);  // norm 5 > 2
  CHECK_THROWS_AS(closed_loop_drift(plant, DoubledMatrix::Zero(1), delta),
                  InadmissibleDeltaError);
}

TEST_CASE("diffusion: fixed values and PSD property") {
  CHECK(diffusion(CouplingMatrix::Zero(2, 2)).norm() == 0.0);

  const PlantModel plant = cavity_plant(3.0);
  ComplexMatrix expected = ComplexMatrix::Zero(2, 2);
  expected(0, 0) = 3.0;
  CHECK((diffusion(plant.N) - expected).norm() <= 1e-14);

  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const CouplingMatrix N{rng.general(2, 3), rng.general(2, 3)};
    const ComplexMatrix D = diffusion(N);
    CHECK((D - D.adjoint()).norm() <= 1e-12 * std::max(1.0, D.norm()));
    CHECK(herm_eig(D).eigenvalues.minCoeff() >= -1e-10 * std::max(1.0, D.norm()));
  }
}

TEST_CASE("lambda_tilde: fixed values, positivity, linearity") {
  const PlantModel plant = cavity_plant(3.0);
  CHECK(lambda_tilde(DoubledMatrix::Identity(1), plant.N) == doctest::Approx(3.0));
  CHECK(lambda_tilde(DoubledMatrix::Identity(1).scaled(2.0), plant.N) == doctest::Approx(6.0));
  CHECK(lambda_tilde(DoubledMatrix::Identity(1), CouplingMatrix::Zero(1, 1)) == 0.0);

  Rng rng(29);
  for (int trial = 0; trial < 30; ++trial) {
    const DoubledMatrix P1 = rng.doubled_positive(1);
    const DoubledMatrix P2 = rng.doubled_positive(1);
    const double a = 0.5 + rng.uniform(), b = 0.5 + rng.uniform();
    CHECK(lambda_tilde(P1, plant.N) >= 0.0);
    const DoubledMatrix mix{a * P1.X1 + b * P2.X1, a * P1.X2 + b * P2.X2};
    CHECK(lambda_tilde(mix, plant.N) ==
          doctest::Approx(a * lambda_tilde(P1, plant.N) + b * lambda_tilde(P2, plant.N))
              .epsilon(1e-10));
  }
}

TEST_CASE("lambda_tilde: rejects indefinite P") {
  const PlantModel plant = cavity_plant(2.0);
  DoubledMatrix bad = DoubledMatrix::Identity(1);
  bad.X1(0, 0) = -1.0;
  CHECK_THROWS_AS(lambda_tilde(bad, plant.N), NotPositiveDefiniteError);
}

TEST_CASE("mu_constant: fixed values and scaling") {
  Eigen::RowVectorXcd e0 = Eigen::RowVectorXcd::Zero(2);
  CHECK(std::abs(mu_constant(DoubledMatrix::Identity(1), e0)) == 0.0);

  Eigen::RowVectorXcd e10(2);
  e10 << 1.0, 0.0;
  CHECK(std::abs(mu_constant(DoubledMatrix::Identity(1), e10)) <= 1e-15);

  Eigen::RowVectorXcd e11(2);
  e11 << 1.0, 1.0;
  CHECK(mu_constant(DoubledMatrix::Identity(1), e11).real() == doctest::Approx(-2.0));

  // linear in P; q^{-1}·I gives -q^{-1}·E Σ E^T
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const double q = 0.5 + rng.uniform();
    const Complex mu = mu_constant(DoubledMatrix::Identity(1).scaled(1.0 / q), e11);
    CHECK(std::abs(mu - Complex(-2.0 / q, 0.0)) <= 1e-12);
  }
}

TEST_CASE("validate_structure: accepts valid forms, reports violations") {
  CHECK(validate_structure(ComplexMatrix::Identity(4, 4), StructureKind::Hamiltonian).empty());

  const PlantModel plant = cavity_plant(2.0);
  CHECK(validate_structure(plant.M.assembled(), StructureKind::Hamiltonian).empty());

  ComplexMatrix bad(2, 2);
  bad << 1, 0, 1, 1;
  const auto violations = validate_structure(bad, StructureKind::Hamiltonian);
  REQUIRE(!violations.empty());
  CHECK(violations.front().find("X2#") != std::string::npos);

  // coupling kind skips the Hermitian/symmetric sub-block requirements
  Rng rng(9);
  const CouplingMatrix N{rng.general(2, 2), rng.general(2, 2)};
  CHECK(validate_structure(N.assembled(), StructureKind::Coupling).empty());
  CHECK(!validate_structure(N.assembled(), StructureKind::Hamiltonian).empty());

  CHECK(!validate_structure(ComplexMatrix::Identity(3, 3), StructureKind::Hamiltonian).empty());
}

TEST_CASE("drift output is structured for random structured inputs") {
  Rng rng(55);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + trial % 3;
    PlantModel plant;
    plant.M = rng.doubled_hermitian(n);
    plant.N = CouplingMatrix{rng.general(2, n), rng.general(2, n)};
    QuadraticUncertainty u;
    u.E1 = rng.general(1, n);
    u.E2 = rng.general(1, n);
    plant.uncertainty = u;
    plant.weights.R = DoubledMatrix::Identity(n);
    CHECK(validate_structure(drift(plant), StructureKind::Coupling).empty());
  }
}

TEST_CASE("plant validation catches inconsistent blocks") {
  PlantModel plant = cavity_plant(2.0);
  plant.weights.rho = -1.0;
  CHECK_THROWS_AS(plant.validate(), Error);

  PlantModel plant2 = cavity_plant(2.0);
  QuadraticUncertainty u = plant2.quadratic();
  u.gamma = 0.0;
  plant2.uncertainty = u;
  CHECK_THROWS_AS(plant2.validate(), Error);
}
