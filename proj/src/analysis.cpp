#include "qgcc/analysis.hpp"

#include <cmath>

#include "qgcc/numkernel.hpp"

namespace qgcc {

const char* to_string(CertStatus status) {
  switch (status) {
    case CertStatus::Optimal: return "optimal";
    case CertStatus::Infeasible: return "infeasible";
    case CertStatus::NotNominallyStable: return "not-nominally-stable";
    case CertStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

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

// Shared core of Theorems 1 and 2: the two differ only in the perturbation
// channel matrix C (C = E for the quadratic class, C = Ẽ#Σ for the scalar
// class), the sector offset, and the extra μ-epigraph of the scalar class.
AnalysisResult analyze_impl(const PlantModel& plant, const CertOptions& opts,
                            const ComplexMatrix& channel, double gamma, double sector_offset,
                            bool with_mu_epigraph, double constant_offset) {
  AnalysisResult result;
  plant.validate();

  const ComplexMatrix F = drift(plant);
  const double nominal_abscissa = spectral_abscissa(F);
  if (nominal_abscissa >= 0.0) {
    result.status = CertStatus::NotNominallyStable;
    result.message = "nominal drift has spectral abscissa " + std::to_string(nominal_abscissa);
    return result;
  }

  const Index n = plant.modes();
  const Index dim_p = 2 * n;
  const Index dim_c = channel.rows();
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix D = diffusion(plant.N);
  const ComplexMatrix Ra = plant.weights.R.assembled();
  const Eigen::RowVectorXcd etilde =
      with_mu_epigraph ? plant.nonquadratic().etilde() : Eigen::RowVectorXcd();

  VariableSpace vs;
  const int vP = vs.add(VariableSpec::DoubledHermitianVar("P", n));
  const int vu = vs.add(VariableSpec::ScalarPositiveVar("u", opts.eps_q));
  const int vt = with_mu_epigraph ? vs.add(VariableSpec::ScalarFreeVar("t")) : -1;

  // [[F†P + PF + u·C†C/γ² + R,  2PJC†],
  //  [2CJP,                     −u·I ]]  ⪯ −ε·I
  AffineMatrixExpr top_left = map_doubled_variable(
      vs, vP, dim_p, dim_p,
      [&](const ComplexMatrix& H) { return (F.adjoint() * H + H * F).eval(); });
  top_left = add_exprs(top_left,
                       scalar_term(vs, vu, (channel.adjoint() * channel / (gamma * gamma)).eval()));
  top_left.constant += Ra;

  AffineMatrixExpr top_right = map_doubled_variable(
      vs, vP, dim_p, dim_c,
      [&](const ComplexMatrix& H) { return (2.0 * H * J * channel.adjoint()).eval(); });

  AffineMatrixExpr bottom_right =
      scalar_term(vs, vu, (-ComplexMatrix::Identity(dim_c, dim_c)).eval());

  AffineMatrixExpr lmi =
      assemble_blocks({{top_left, top_right}, {adjoint_expr(top_right), bottom_right}});
  AffineMatrixExpr lmi_shifted = lmi;
  lmi_shifted.constant += opts.eps_margin * ComplexMatrix::Identity(lmi.dim(), lmi.dim());

  // ε·I − P ⪯ 0.
  AffineMatrixExpr p_floor = map_doubled_variable(
      vs, vP, dim_p, dim_p, [](const ComplexMatrix& H) { return (-H).eval(); });
  p_floor.constant += opts.eps_margin * ComplexMatrix::Identity(dim_p, dim_p);

  SdpProblem problem;
  problem.objective = RealVector::Zero(vs.params());
  for (int k = 0; k < vs.size(vP); ++k) {
    problem.objective[vs.offset(vP) + k] = (vs.basis(vP, k) * D).trace().real();
  }
  problem.objective[vs.offset(vu)] = sector_offset;
  problem.constraints.push_back(realify(lmi_shifted));
  problem.constraints.push_back(realify(p_floor));

  if (with_mu_epigraph) {
    // [[−t, −μ(P)/2],[−μ(P)*/2, −1]] ⪯ 0  encodes t ≥ |μ(P)|²/4.
    AffineMatrixExpr epi = map_doubled_variable(
        vs, vP, 2, 2, [&](const ComplexMatrix& H) {
          const Complex mu_dir = mu_constant(DoubledMatrix::FromAssembled(H), etilde);
          ComplexMatrix C = ComplexMatrix::Zero(2, 2);
          C(0, 1) = -0.5 * mu_dir;
          C(1, 0) = -0.5 * std::conj(mu_dir);
          return C;
        });
    ComplexMatrix t_dir = ComplexMatrix::Zero(2, 2);
    t_dir(0, 0) = -1.0;
    epi = add_exprs(epi, scalar_term(vs, vt, t_dir));
    epi.constant(1, 1) = -1.0;
    problem.constraints.push_back(realify(epi));
    problem.objective[vs.offset(vt)] = 1.0;
  }

  problem.bounds = bounds_from_space(vs);

  const SdpSolution sol = solve(problem, opts.sdp);
  result.status = map_status(sol.status);
  result.iterations = sol.iterations;
  result.message = sol.message;
  if (result.status != CertStatus::Optimal) return result;

  const CertificateReport cert = check_certificate(problem, sol);
  result.P = vs.unpack(vP, sol.x);
  result.u = vs.scalar(vu, sol.x);
  result.tau = 1.0 / std::sqrt(result.u);
  result.lambda_tilde = lambda_tilde(result.P, plant.N);
  result.margin = feasibility_margin(lmi, sol.x);
  result.bound = result.lambda_tilde + sector_offset * result.u + constant_offset;
  if (with_mu_epigraph) {
    result.mu = mu_constant(result.P, etilde);
    result.bound += 0.25 * std::norm(result.mu);
  }
  if (!cert.pass || result.margin > -0.5 * opts.eps_margin) {
    result.status = CertStatus::NumericalFailure;
    result.feasible = false;
    result.message = "certificate re-check failed (margin " + std::to_string(result.margin) + ")";
    return result;
  }
  result.feasible = true;
  return result;
}

}  // namespace

AnalysisResult analyze_quadratic(const PlantModel& plant, const CertOptions& options) {
  const auto& unc = plant.quadratic();
  return analyze_impl(plant, options, unc.assembled(), unc.gamma, unc.delta,
                      /*with_mu_epigraph=*/false, /*constant_offset=*/0.0);
}

AnalysisResult analyze_nonquadratic(const PlantModel& plant, const CertOptions& options) {
  const auto& unc = plant.nonquadratic();
  // Channel C = Ẽ#Σ, so that C†C = ΣẼᵀẼ#Σ and 2PJC† = 2PJΣẼᵀ.
  const ComplexMatrix channel =
      unc.etilde().conjugate() * swap_sigma(plant.modes());
  return analyze_impl(plant, options, channel, unc.gamma, unc.delta1,
                      /*with_mu_epigraph=*/true, /*constant_offset=*/unc.delta2);
}

double analysis_margin(const PlantModel& plant, const DoubledMatrix& P, double u) {
  // Dense re-assembly, independent of the affine-expression machinery.
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
  const ComplexMatrix F = drift(plant);
  const ComplexMatrix J = fundamental_j(n);
  const ComplexMatrix Pa = P.assembled();
  const Index dc = channel.rows();
  ComplexMatrix G(2 * n + dc, 2 * n + dc);
  G.topLeftCorner(2 * n, 2 * n) = F.adjoint() * Pa + Pa * F +
                                  (u / (gamma * gamma)) * channel.adjoint() * channel +
                                  plant.weights.R.assembled();
  G.topRightCorner(2 * n, dc) = 2.0 * Pa * J * channel.adjoint();
  G.bottomLeftCorner(dc, 2 * n) = G.topRightCorner(2 * n, dc).adjoint();
  G.bottomRightCorner(dc, dc) = -u * ComplexMatrix::Identity(dc, dc);
  return herm_eig(G, 1e-9).eigenvalues.maxCoeff();
}

}  // namespace qgcc
