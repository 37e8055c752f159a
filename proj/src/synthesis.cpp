#include "qgcc/synthesis.hpp"

#include <cmath>

#include "qgcc/numkernel.hpp"

namespace qgcc {

namespace {

std::vector<VarBound> bounds_from_space(const VariableSpace& vs) {
  std::vector<VarBound> bounds(vs.params());
  for (int v = 0; v < vs.count(); ++v) {
    const VariableSpec& s = vs.spec(v);
    if (s.kind == VarKind::DoubledHermitian) continue;
    bounds[vs.offset(v)] = VarBound{s.lower, s.upper};
  }
  return bounds;
}

CertStatus map_status(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return CertStatus::Optimal;
    case SdpStatus::Infeasible: return CertStatus::Infeasible;
    default: return CertStatus::NumericalFailure;
  }
}

// Shared core of Theorems 3 and 4 with the ξ-minimization epigraph;
// the channel C is E (quadratic class) or Ẽ#Σ (scalar class).
SynthesisResult synthesize_impl(const PlantModel& plant, const CertOptions& opts,
                                const ComplexMatrix& channel, double gamma,
                                double sector_offset) {
  SynthesisResult result;
  plant.validate();

  const Index n = plant.modes();
  const Index dim_p = 2 * n;
  const Index dim_c = channel.rows();
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix F = drift(plant);
  const ComplexMatrix Ra = plant.weights.R.assembled();
  const double rho = plant.weights.rho;
  if (herm_eig(Ra).eigenvalues.minCoeff() <= 0.0) {
    throw NotPositiveDefiniteError("synthesize: R must be positive definite");
  }
  const ComplexMatrix Rhalf = psd_sqrt(Ra);

  const double B = diffusion(plant.N).trace().real();
  if (B < -1e-10) {
    throw NumericalError("synthesize: diffusion trace B is negative (assembly bug)");
  }
  const double b_trace = std::max(B, 0.0);

  VariableSpace vs;
  const int vq = vs.add(VariableSpec::ScalarPositiveVar("q", opts.eps_q));
  const int vY = vs.add(VariableSpec::DoubledHermitianVar("Y", n));
  const int vS = vs.add(VariableSpec::ScalarPositiveVar("s", opts.eps_q));
  const int vXi = vs.add(VariableSpec::ScalarFreeVar("xi"));

  const Complex i1(0.0, 1.0);
  const double sqrt_rho = std::sqrt(rho);
  const ComplexMatrix eye_p = ComplexMatrix::Identity(dim_p, dim_p);
  const ComplexMatrix eye_c = ComplexMatrix::Identity(dim_c, dim_c);

  // Main LMI, congruence-scaled by diag(I, √ρ·I, I, I) — exactly equivalent
  // to the raw form with blocks (Y, −I/ρ) and better conditioned for large ρ:
  //   [[qF†+Fq+iYJ−iJY+4s·JC†CJ, √ρ·Y, q·R^½, q·C†],
  //    [√ρ·Y, −I, 0, 0],
  //    [q·R^½, 0, −I, 0],
  //    [q·C, 0, 0, −γ²s·I]] ⪯ −ε·I
  AffineMatrixExpr b11 = scalar_term(vs, vq, (F.adjoint() + F).eval());
  b11 = add_exprs(b11, map_doubled_variable(vs, vY, dim_p, dim_p, [&](const ComplexMatrix& H) {
                    return (i1 * H * J - i1 * J * H).eval();
                  }));
  b11 = add_exprs(b11,
                  scalar_term(vs, vS, (4.0 * J * channel.adjoint() * channel * J).eval()));

  AffineMatrixExpr b12 = map_doubled_variable(
      vs, vY, dim_p, dim_p, [&](const ComplexMatrix& H) { return (sqrt_rho * H).eval(); });
  AffineMatrixExpr b13 = scalar_term(vs, vq, Rhalf);
  AffineMatrixExpr b14 = scalar_term(vs, vq, channel.adjoint().eval());

  AffineMatrixExpr diag_m1 = constant_expr(vs, (-eye_p).eval());
  AffineMatrixExpr b44 = scalar_term(vs, vS, (-gamma * gamma * eye_c).eval());

  const AffineMatrixExpr z_pp = zero_expr(vs, dim_p, dim_p);
  const AffineMatrixExpr z_pc = zero_expr(vs, dim_p, dim_c);
  const AffineMatrixExpr z_cp = zero_expr(vs, dim_c, dim_p);

  AffineMatrixExpr lmi = assemble_blocks({
      {b11, b12, b13, b14},
      {adjoint_expr(b12), diag_m1, z_pp, z_pc},
      {adjoint_expr(b13), z_pp, diag_m1, z_pc},
      {adjoint_expr(b14), z_cp, z_cp, b44},
  });
  AffineMatrixExpr lmi_shifted = lmi;
  lmi_shifted.constant += opts.eps_margin * ComplexMatrix::Identity(lmi.dim(), lmi.dim());

  // Bound epigraph [[−ξ, √δ, √B],[√δ, −s, 0],[√B, 0, −q]] ⪯ 0 (non-strict),
  // i.e. ξ ≥ B/q + δ/s by Schur complement.
  AffineMatrixExpr bound_lmi(vs.params(), ComplexMatrix::Zero(3, 3));
  bound_lmi.constant(0, 1) = bound_lmi.constant(1, 0) = std::sqrt(sector_offset);
  bound_lmi.constant(0, 2) = bound_lmi.constant(2, 0) = std::sqrt(b_trace);
  {
    ComplexMatrix d = ComplexMatrix::Zero(3, 3);
    d(0, 0) = -1.0;
    bound_lmi.add_term(vs.offset(vXi), d);
    d.setZero();
    d(1, 1) = -1.0;
    bound_lmi.add_term(vs.offset(vS), d);
    d.setZero();
    d(2, 2) = -1.0;
    bound_lmi.add_term(vs.offset(vq), d);
  }

  SdpProblem problem;
  problem.objective = RealVector::Zero(vs.params());
  problem.objective[vs.offset(vXi)] = 1.0;
  problem.constraints.push_back(realify(lmi_shifted));
  problem.constraints.push_back(realify(bound_lmi));
  problem.bounds = bounds_from_space(vs);

  const SdpSolution sol = solve(problem, opts.sdp);
  result.status = map_status(sol.status);
  result.iterations = sol.iterations;
  result.message = sol.message;
  if (result.status != CertStatus::Optimal) return result;

  const CertificateReport cert = check_certificate(problem, sol);
  result.q = vs.scalar(vq, sol.x);
  result.s = vs.scalar(vS, sol.x);
  result.tau = std::sqrt(result.s);
  result.xi = vs.scalar(vXi, sol.x);
  result.Y = vs.unpack(vY, sol.x);
  result.K = DoubledMatrix{result.Y.X1 / result.q, result.Y.X2 / result.q};
  result.margin = feasibility_margin(lmi, sol.x);
  result.bound = b_trace / result.q + sector_offset / result.s;

  if (!cert.pass || result.margin > -0.5 * opts.eps_margin) {
    result.status = CertStatus::NumericalFailure;
    result.message = "certificate re-check failed (margin " + std::to_string(result.margin) + ")";
    return result;
  }

  // Post-checks: a failure here is a solver defect and must abort loudly.
  const auto violations = validate_structure(result.K.assembled(), StructureKind::Hamiltonian);
  if (!violations.empty()) {
    throw PostCheckError("synthesize: K failed structure validation: " + violations.front());
  }
  const ComplexMatrix f_closed = closed_loop_drift(plant, result.K);
  result.closed_loop_abscissa = spectral_abscissa(f_closed);
  if (result.closed_loop_abscissa >= 0.0) {
    throw PostCheckError("synthesize: closed-loop drift is not Hurwitz (abscissa " +
                         std::to_string(result.closed_loop_abscissa) + ")");
  }
  const Complex detK = result.K.assembled().determinant();
  result.k_near_singular = std::abs(detK) < 1e-12;

  result.feasible = true;
  return result;
}

}  // namespace

SynthesisResult synthesize_quadratic(const PlantModel& plant, const CertOptions& options) {
  const auto& unc = plant.quadratic();
  return synthesize_impl(plant, options, unc.assembled(), unc.gamma, unc.delta);
}

SynthesisResult synthesize_nonquadratic(const PlantModel& plant, const CertOptions& options) {
  const auto& unc = plant.nonquadratic();
  const ComplexMatrix channel = unc.etilde().conjugate() * swap_sigma(plant.modes());
  SynthesisResult result = synthesize_impl(plant, options, channel, unc.gamma, unc.delta1);
  if (result.feasible) {
    // μ for P = q⁻¹·I; the bound adds the constant terms after the solve.
    result.mu = mu_constant(DoubledMatrix::Identity(plant.modes()).scaled(1.0 / result.q),
                            unc.etilde());
    result.bound = result.xi + 0.25 * std::norm(result.mu) + unc.delta2;
  }
  return result;
}

double synthesis_margin(const PlantModel& plant, const DoubledMatrix& Y, double q, double s,
                        bool raw_form) {
  const Index n = plant.modes();
  ComplexMatrix channel;
  double gamma = 1.0;
  if (plant.has_quadratic_uncertainty()) {
    channel = plant.quadratic().assembled();
    gamma = plant.quadratic().gamma;
  } else {
    channel = plant.nonquadratic().etilde().conjugate() * swap_sigma(n);
    gamma = plant.nonquadratic().gamma;
  }
  const Index dp = 2 * n;
  const Index dc = channel.rows();
  const ComplexMatrix F = drift(plant);
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix Ya = Y.assembled();
  const ComplexMatrix Rhalf = psd_sqrt(plant.weights.R.assembled());
  const Complex i1(0.0, 1.0);
  const double rho = plant.weights.rho;
  const double y_scale = raw_form ? 1.0 : std::sqrt(rho);
  const ComplexMatrix mid = raw_form
                                ? (-1.0 / rho * ComplexMatrix::Identity(dp, dp)).eval()
                                : (-ComplexMatrix::Identity(dp, dp)).eval();

  ComplexMatrix G = ComplexMatrix::Zero(3 * dp + dc, 3 * dp + dc);
  G.block(0, 0, dp, dp) = q * F.adjoint() + F * q + i1 * Ya * J - i1 * J * Ya +
                          4.0 * s * J * channel.adjoint() * channel * J;
  G.block(0, dp, dp, dp) = y_scale * Ya;
  G.block(dp, 0, dp, dp) = y_scale * Ya;
  G.block(dp, dp, dp, dp) = mid;
  G.block(0, 2 * dp, dp, dp) = q * Rhalf;
  G.block(2 * dp, 0, dp, dp) = q * Rhalf;
  G.block(2 * dp, 2 * dp, dp, dp) = -ComplexMatrix::Identity(dp, dp);
  G.block(0, 3 * dp, dp, dc) = q * channel.adjoint();
  G.block(3 * dp, 0, dc, dp) = q * channel;
  G.block(3 * dp, 3 * dp, dc, dc) = -gamma * gamma * s * ComplexMatrix::Identity(dc, dc);
  return herm_eig(G, 1e-9).eigenvalues.maxCoeff();
}

}  // namespace qgcc
