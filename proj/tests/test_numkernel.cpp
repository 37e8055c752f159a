#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qgcc/numkernel.hpp"
#include "test_support.hpp"

using namespace qgcc;
using qgcc::testing::Rng;

namespace {

ComplexMatrix cavity_drift(double kappa) {
  ComplexMatrix F(2, 2);
  F << -kappa / 2, 0.5, 0.5, -kappa / 2;
  return F;
}

}  // namespace

TEST_CASE("herm_eig: fixed spectra") {
  ComplexMatrix A = ComplexMatrix::Zero(2, 2);
  A(0, 0) = 3.0;
  A(1, 1) = 1.0;
  EigResult r = herm_eig(A);
  CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-12));

  ComplexMatrix B(2, 2);
  B << 0, 1, 1, 0;
  r = herm_eig(B);
  CHECK(r.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(1.0));

  // closed form -kappa/2 ± 1/2 at kappa = 3
  r = herm_eig(cavity_drift(3.0));
  CHECK(r.eigenvalues[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("herm_eig: unitary eigenvectors and reconstruction up to 16x16") {
  Rng rng(11);
  for (Index n : {1, 2, 3, 5, 8, 16}) {
    const ComplexMatrix A = rng.hermitian(n);
    const EigResult r = herm_eig(A);
    const double scale = std::max(A.norm(), 1e-300);
    CHECK((r.eigenvectors.adjoint() * r.eigenvectors - ComplexMatrix::Identity(n, n)).norm() <=
          1e-10);
    const ComplexMatrix recon =
        r.eigenvectors * r.eigenvalues.cast<Complex>().asDiagonal() * r.eigenvectors.adjoint();
    CHECK((recon - A).norm() <= 1e-10 * scale);
    for (Index i = 0; i + 1 < n; ++i) CHECK(r.eigenvalues[i] <= r.eigenvalues[i + 1]);
  }
}

TEST_CASE("herm_eig: rejects non-Hermitian input") {
  ComplexMatrix A(2, 2);
  A << 1, 2, 3, 4;
  CHECK_THROWS_AS(herm_eig(A), NotHermitianError);
}

TEST_CASE("spectral_abscissa: fixed values") {
  CHECK(spectral_abscissa(-ComplexMatrix::Identity(3, 3)) == doctest::Approx(-1.0));
  CHECK(spectral_abscissa(cavity_drift(0.5)) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(spectral_abscissa(cavity_drift(2.0)) == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("spectral_abscissa: agrees with the realified matrix") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix A = rng.general(4, 4);
    RealMatrix Y(8, 8);
    Y << A.real(), -A.imag(), A.imag(), A.real();
    CHECK(spectral_abscissa(A) ==
          doctest::Approx(spectral_abscissa(Y.cast<Complex>())).epsilon(1e-9));
  }
}

TEST_CASE("solve_lyapunov: fixed solutions") {
  const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
  CHECK((solve_lyapunov(-I2, 2.0 * I2) - I2).norm() <= 1e-12);

  ComplexMatrix A = ComplexMatrix::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -2.0;
  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = 2.0;
  D(1, 1) = 4.0;
  CHECK((solve_lyapunov(A, D) - I2).norm() <= 1e-12);

  // hand-solved system: A = [[-1, .5],[.5, -1]], D = diag(2, 0)
  ComplexMatrix F = cavity_drift(2.0);
  ComplexMatrix D2 = ComplexMatrix::Zero(2, 2);
  D2(0, 0) = 2.0;
  ComplexMatrix expected(2, 2);
  expected << 7.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0;
  CHECK((solve_lyapunov(F, D2) - expected).norm() <= 1e-12);
}

TEST_CASE("solve_lyapunov: residual, symmetry, and definiteness invariants") {
  Rng rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    const Index n = 2 + trial % 5;
    ComplexMatrix A = rng.general(n, n);
    A -= (spectral_abscissa(A) + 0.5 + rng.uniform()) * ComplexMatrix::Identity(n, n);
    ComplexMatrix G = rng.general(n, n);
    const ComplexMatrix D = G * G.adjoint();  // Hermitian PSD
    const ComplexMatrix S = solve_lyapunov(A, D);
    CHECK((S - S.adjoint()).norm() <= 1e-10 * S.norm());
    const double resid = (A * S + S * A.adjoint() + D).norm();
    CHECK(resid <= 1e-9 * (A.norm() * S.norm() + D.norm()));
    CHECK(herm_eig(S).eigenvalues.minCoeff() >= -1e-9 * S.norm());
  }
}

TEST_CASE("solve_lyapunov: rejects non-Hurwitz A") {
  CHECK_THROWS_AS(solve_lyapunov(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)),
                  NotHurwitzError);
}

TEST_CASE("psd_sqrt: fixed values and square property") {
  const ComplexMatrix I3 = ComplexMatrix::Identity(3, 3);
  CHECK((psd_sqrt(I3) - I3).norm() <= 1e-14);

  ComplexMatrix A = ComplexMatrix::Zero(2, 2);
  A(0, 0) = 4.0;
  A(1, 1) = 9.0;
  ComplexMatrix S = psd_sqrt(A);
  CHECK(S(0, 0).real() == doctest::Approx(2.0));
  CHECK(S(1, 1).real() == doctest::Approx(3.0));

  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix G = rng.general(4, 4);
    const ComplexMatrix P = G * G.adjoint();
    const ComplexMatrix R = psd_sqrt(P);
    CHECK((R * R - P).norm() <= 1e-10 * std::max(P.norm(), 1e-300));
    CHECK(herm_eig(R).eigenvalues.minCoeff() >= -1e-12 * R.norm());
  }
}

TEST_CASE("psd_sqrt: rejects indefinite input") {
  ComplexMatrix A = ComplexMatrix::Identity(2, 2);
  A(1, 1) = -1.0;
  CHECK_THROWS_AS(psd_sqrt(A), NotPsdError);
}

TEST_CASE("real_embed: fixed cases") {
  ComplexMatrix one = ComplexMatrix::Identity(1, 1);
  RealMatrix e = real_embed(one);
  CHECK(e.rows() == 2);
  CHECK((e - RealMatrix::Identity(2, 2)).norm() <= 1e-15);

  ComplexMatrix H(2, 2);
  H << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  const RealMatrix Y = real_embed(H);
  const EigResult r = herm_eig(Y.cast<Complex>());
  CHECK(r.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(r.eigenvalues[1] == doctest::Approx(-1.0));
  CHECK(r.eigenvalues[2] == doctest::Approx(1.0));
  CHECK(r.eigenvalues[3] == doctest::Approx(1.0));
}

TEST_CASE("real_embed: spectrum doubled with multiplicity, definiteness preserved") {
  Rng rng(31);
  for (int trial = 0; trial < 15; ++trial) {
    const Index n = 1 + trial % 6;
    const ComplexMatrix H = rng.hermitian(n);
    const EigResult orig = herm_eig(H);
    const EigResult emb = herm_eig(real_embed(H).cast<Complex>());
    for (Index i = 0; i < n; ++i) {
      CHECK(emb.eigenvalues[2 * i] == doctest::Approx(orig.eigenvalues[i]).epsilon(1e-10));
      CHECK(emb.eigenvalues[2 * i + 1] == doctest::Approx(orig.eigenvalues[i]).epsilon(1e-10));
    }
    CHECK(emb.eigenvalues.minCoeff() ==
          doctest::Approx(orig.eigenvalues.minCoeff()).epsilon(1e-10));
  }
}

TEST_CASE("spectral_norm: matches largest singular value") {
  ComplexMatrix A(2, 2);
  A << Complex(0, 0), Complex(0, 2), Complex(0, -2), Complex(0, 0);
  CHECK(spectral_norm(A) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(spectral_norm(ComplexMatrix::Zero(3, 3)) == 0.0);
}
