#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qgcc/sdp.hpp"
#include "test_support.hpp"

using namespace qgcc;
using qgcc::testing::Rng;

namespace {

SdpProblem toy_psd_order() {
  // min x s.t. [[x, 1],[1, x]] ⪰ 0, written as [[-x, -1],[-1, -x]] ⪯ 0; x* = 1.
  SdpProblem p;
  p.objective = RealVector::Ones(1);
  RealAffineExpr e(1, RealMatrix::Zero(2, 2));
  e.constant << 0, -1, -1, 0;
  RealMatrix c(2, 2);
  c << -1, 0, 0, -1;
  e.add_term(0, c);
  p.constraints.push_back(std::move(e));
  return p;
}

SdpProblem toy_scalar() {
  // min -x s.t. x ≤ 3; x* = 3.
  SdpProblem p;
  p.objective = -RealVector::Ones(1);
  RealAffineExpr e(1, RealMatrix::Constant(1, 1, -3.0));
  e.add_term(0, RealMatrix::Constant(1, 1, 1.0));
  p.constraints.push_back(std::move(e));
  return p;
}

// Random feasible problem with a known interior point, and its infeasible
// twin built from an I ⪯ 0 shift.
SdpProblem random_feasible(Rng& rng, int n_params, Index dim) {
  SdpProblem p;
  p.objective = RealVector::Zero(n_params);
  for (int i = 0; i < n_params; ++i) p.objective[i] = rng.normal();
  RealVector x0(n_params);
  for (int i = 0; i < n_params; ++i) x0[i] = rng.normal();

  for (int block = 0; block < 2; ++block) {
    RealAffineExpr e(n_params, RealMatrix::Zero(dim, dim));
    for (int i = 0; i < n_params; ++i) {
      RealMatrix G(dim, dim);
      for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c) G(r, c) = rng.normal();
      e.add_term(i, 0.5 * (G + G.transpose()));
    }
    // shift so that A(x0) = -(0.5 + u)·I is strictly inside
    const RealMatrix at_x0 = e.evaluate(x0);
    e.constant -= at_x0 + (0.5 + rng.uniform()) * RealMatrix::Identity(dim, dim);
    p.constraints.push_back(std::move(e));
  }
  return p;
}

SdpProblem make_infeasible(Rng& rng, int n_params, Index dim) {
  SdpProblem p = random_feasible(rng, n_params, dim);
  // contradictory pair: A(x) ⪯ -I and -A(x) ⪯ -I cannot both hold
  RealAffineExpr e(n_params, RealMatrix::Zero(dim, dim));
  for (int i = 0; i < n_params; ++i) {
    RealMatrix G(dim, dim);
    for (Index r = 0; r < dim; ++r)
      for (Index c = 0; c < dim; ++c) G(r, c) = rng.normal();
    e.add_term(i, 0.5 * (G + G.transpose()));
  }
  RealAffineExpr neg(n_params, RealMatrix::Identity(dim, dim) - e.constant);
  for (const auto& t : e.terms) neg.add_term(t.param, (-t.coeff).eval());
  e.constant += RealMatrix::Identity(dim, dim);
  p.constraints.push_back(std::move(e));
  p.constraints.push_back(std::move(neg));
  return p;
}

}  // namespace

TEST_CASE("toy problems reach their optima to 1e-6") {
  const SdpSolution s1 = solve(toy_psd_order());
  REQUIRE(s1.status == SdpStatus::Optimal);
  CHECK(std::abs(s1.objective_value - 1.0) <= 1e-6);
  const CertificateReport r1 = check_certificate(toy_psd_order(), s1);
  CHECK(r1.pass);
  CHECK(std::abs(r1.max_margin) <= 1e-6);  // active at the optimum

  const SdpSolution s2 = solve(toy_scalar());
  REQUIRE(s2.status == SdpStatus::Optimal);
  CHECK(std::abs(s2.x[0] - 3.0) <= 1e-6);
  CHECK(check_certificate(toy_scalar(), s2).pass);
}

TEST_CASE("infeasibility is detected with a strictly positive phase-I optimum") {
  SdpProblem p;
  p.objective = RealVector::Zero(1);
  p.constraints.push_back(RealAffineExpr(1, RealMatrix::Identity(2, 2)));
  const SdpSolution s = solve(p);
  CHECK(s.status == SdpStatus::Infeasible);
}

TEST_CASE("unbounded objectives are flagged") {
  // min -x s.t. -x ⪯ 0 (x ≥ 0): unbounded below.
  SdpProblem p;
  p.objective = -RealVector::Ones(1);
  RealAffineExpr e(1, RealMatrix::Zero(1, 1));
  e.add_term(0, RealMatrix::Constant(1, 1, -1.0));
  p.constraints.push_back(std::move(e));
  SdpOptions opts;
  opts.max_iterations = 2000;
  const SdpSolution s = solve(p, opts);
  CHECK(s.status == SdpStatus::Unbounded);
}

TEST_CASE("perturbed certificates fail the check") {
  SdpProblem p = toy_scalar();
  SdpSolution s = solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  s.x[0] += 1e-3;
  const CertificateReport r = check_certificate(p, s);
  CHECK(!r.pass);
  CHECK(r.max_margin == doctest::Approx(1e-3).epsilon(1e-3));
}

TEST_CASE("solver is deterministic") {
  const SdpSolution a = solve(toy_psd_order());
  const SdpSolution b = solve(toy_psd_order());
  CHECK(a.status == b.status);
  CHECK(a.objective_value == b.objective_value);  // bitwise
  CHECK(a.iterations == b.iterations);
  CHECK((a.x - b.x).norm() == 0.0);
}

TEST_CASE("classification suite: 50 feasible + 50 infeasible, 100% accuracy") {
  Rng rng(2024);
  int correct = 0;
  for (int k = 0; k < 50; ++k) {
    const SdpProblem p = random_feasible(rng, 2 + k % 4, 2 + k % 3);
    const SdpSolution s = solve(p);
    if (s.status == SdpStatus::Optimal || s.status == SdpStatus::Unbounded) {
      ++correct;
    } else {
      CAPTURE(k);
      CHECK_MESSAGE(false, "feasible problem misclassified as ", to_string(s.status));
    }
  }
  for (int k = 0; k < 50; ++k) {
    const SdpProblem p = make_infeasible(rng, 2 + k % 4, 2 + k % 3);
    const SdpSolution s = solve(p);
    if (s.status == SdpStatus::Infeasible) {
      ++correct;
    } else {
      CAPTURE(k);
      CHECK_MESSAGE(false, "infeasible problem misclassified as ", to_string(s.status));
    }
  }
  CHECK(correct == 100);
}

TEST_CASE("optimal certificates re-verify on the random feasible suite") {
  Rng rng(77);
  for (int k = 0; k < 10; ++k) {
    SdpProblem p = random_feasible(rng, 3, 3);
    // bound the objective so these stay solvable
    p.bounds.assign(3, VarBound{-50.0, 50.0});
    const SdpSolution s = solve(p);
    REQUIRE(s.status == SdpStatus::Optimal);
    CHECK(check_certificate(p, s).pass);
    CHECK(s.worst_margin <= 1e-8);
  }
}

TEST_CASE("shrinking the margin shift only improves the objective") {
  // min x s.t. [[x,1],[1,x]] ⪰ ε·I for two values of ε.
  auto shifted = [](double eps) {
    SdpProblem p = toy_psd_order();
    p.constraints[0].constant.diagonal().array() += eps;
    return p;
  };
  const SdpSolution tight = solve(shifted(1e-3));
  const SdpSolution loose = solve(shifted(1e-8));
  REQUIRE(tight.status == SdpStatus::Optimal);
  REQUIRE(loose.status == SdpStatus::Optimal);
  CHECK(loose.objective_value <= tight.objective_value + 1e-9);
}
