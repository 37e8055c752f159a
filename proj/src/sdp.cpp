#include "qgcc/sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace qgcc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Converts box bounds into 1x1 constraint blocks so the barrier treats
// them uniformly with the LMI blocks.
std::vector<RealAffineExpr> with_bound_blocks(const SdpProblem& problem) {
  const int n = static_cast<int>(problem.objective.size());
  std::vector<RealAffineExpr> exprs = problem.constraints;
  if (problem.bounds.empty()) return exprs;
  for (int i = 0; i < n; ++i) {
    const VarBound& b = problem.bounds[i];
    if (std::isfinite(b.lower)) {
      RealAffineExpr e(n, RealMatrix::Constant(1, 1, b.lower));
      e.add_term(i, RealMatrix::Constant(1, 1, -1.0));
      exprs.push_back(std::move(e));
    }
    if (std::isfinite(b.upper)) {
      RealAffineExpr e(n, RealMatrix::Constant(1, 1, -b.upper));
      e.add_term(i, RealMatrix::Constant(1, 1, 1.0));
      exprs.push_back(std::move(e));
    }
  }
  return exprs;
}

double max_eigenvalue(const RealMatrix& S) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Slack factorizations S_j = -A_j(x) with the barrier value
// φ(x) = -Σ log det S_j. Returns false when x is not strictly feasible.
bool factor_slacks(const std::vector<RealAffineExpr>& exprs, const RealVector& x,
                   std::vector<Eigen::LLT<RealMatrix>>& llts, double* phi) {
  llts.resize(exprs.size());
  double logdet_total = 0.0;
  for (std::size_t j = 0; j < exprs.size(); ++j) {
    RealMatrix S = -exprs[j].evaluate(x);
    llts[j].compute(S);
    if (llts[j].info() != Eigen::Success) return false;
    const auto& packed = llts[j].matrixLLT();
    for (Index i = 0; i < S.rows(); ++i) {
      const double d = packed(i, i);
      if (!(d > 0.0) || !std::isfinite(d)) return false;
      logdet_total += std::log(d);
    }
  }
  if (phi != nullptr) *phi = -2.0 * logdet_total;
  return true;
}

// Barrier gradient and Hessian:
//   ∇φ_i  = Σ_j tr(S_j⁻¹ A_{j,i})
//   ∇²φ_ik = Σ_j tr(S_j⁻¹ A_{j,i} S_j⁻¹ A_{j,k})
// computed through V_a = L⁻¹ A_a L⁻ᵀ so the Hessian is a Gram matrix.
void barrier_derivatives(const std::vector<RealAffineExpr>& exprs,
                         const std::vector<Eigen::LLT<RealMatrix>>& llts, int n,
                         RealVector* grad, RealMatrix* hess) {
  grad->setZero(n);
  hess->setZero(n, n);
  std::vector<RealMatrix> V;
  for (std::size_t j = 0; j < exprs.size(); ++j) {
    const auto& terms = exprs[j].terms;
    if (terms.empty()) continue;
    const auto L = llts[j].matrixL();
    V.clear();
    V.reserve(terms.size());
    for (const auto& t : terms) {
      RealMatrix tmp = L.solve(t.coeff);
      V.push_back(L.solve(tmp.transpose()).transpose());
    }
    for (std::size_t a = 0; a < terms.size(); ++a) {
      (*grad)[terms[a].param] += V[a].trace();
      for (std::size_t b = 0; b <= a; ++b) {
        const double h = V[a].cwiseProduct(V[b]).sum();
        (*hess)(terms[a].param, terms[b].param) += h;
        if (terms[a].param != terms[b].param) {
          (*hess)(terms[b].param, terms[a].param) += h;
        }
      }
    }
  }
}

struct CenterOutcome {
  bool converged = false;
  bool stalled = false;
  double last_decrement = kInf;
};

// Newton minimization of t·cᵀx + φ(x) from a strictly feasible x.
CenterOutcome newton_center(const std::vector<RealAffineExpr>& exprs, const RealVector& c,
                            double t, RealVector& x, const SdpOptions& opts,
                            int* iterations, std::optional<std::function<bool(const RealVector&)>>
                                                 early_exit = std::nullopt) {
  const int n = static_cast<int>(x.size());
  std::vector<Eigen::LLT<RealMatrix>> llts;
  double phi = 0.0;
  if (!factor_slacks(exprs, x, llts, &phi)) {
    return {false, true, kInf};
  }
  if (early_exit && (*early_exit)(x)) {
    return {true, false, 0.0};
  }
  RealVector grad(n);
  RealMatrix hess(n, n);
  CenterOutcome out;
  for (int step = 0; step < 100; ++step) {
    if (*iterations >= opts.max_iterations) return out;
    ++(*iterations);

    barrier_derivatives(exprs, llts, n, &grad, &hess);
    grad += t * c;

    RealVector d;
    double decrement_sq = 0.0;
    // A small always-on Levenberg ridge keeps rank-deficient barrier
    // Hessians (flat valley directions) solvable.
    double ridge = 1e-12 * (1.0 + hess.diagonal().maxCoeff());
    for (int attempt = 0; attempt < 4; ++attempt) {
      RealMatrix H = hess;
      H.diagonal().array() += ridge;
      Eigen::LDLT<RealMatrix> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        d = ldlt.solve(-grad);
        decrement_sq = -grad.dot(d);
        if (d.allFinite() && decrement_sq >= 0.0) break;
      }
      d.resize(0);
      ridge *= 1e4;
    }
    if (d.size() == 0) {
      out.stalled = true;
      return out;
    }

    out.last_decrement = decrement_sq;
    if (0.5 * decrement_sq <= opts.newton_tol) {
      out.converged = true;
      return out;
    }

    const double f0 = t * c.dot(x) + phi;
    // Line search: full Newton step first, then the self-concordant damped
    // step 1/(1+λ), then plain halving. The raw step length is clamped so
    // flat valley directions cannot fling the iterate away.
    const double lambda = std::sqrt(std::max(decrement_sq, 0.0));
    const double dmax = d.cwiseAbs().maxCoeff();
    const double step_cap = 100.0 * (1.0 + x.cwiseAbs().maxCoeff());
    double alpha = std::min(1.0, step_cap / dmax);
    const double damped = std::min(1.0 / (1.0 + lambda), alpha);
    bool accepted = false;
    bool tried_damped = false;
    std::vector<Eigen::LLT<RealMatrix>> trial_llts;
    for (int ls = 0; ls < 60; ++ls) {
      RealVector xt = x + alpha * d;
      double phit = 0.0;
      if (factor_slacks(exprs, xt, trial_llts, &phit)) {
        const double ft = t * c.dot(xt) + phit;
        if (ft <= f0 + 1e-4 * alpha * grad.dot(d)) {
          x = std::move(xt);
          phi = phit;
          llts.swap(trial_llts);
          accepted = true;
          break;
        }
      }
      if (!tried_damped && lambda > 0.25 && damped < alpha) {
        alpha = damped;
        tried_damped = true;
      } else {
        alpha *= 0.5;
      }
    }
    if (!accepted) {
      out.stalled = true;
      return out;
    }
    if (early_exit && (*early_exit)(x)) {
      out.converged = true;
      return out;
    }
  }
  return out;
}

Index total_block_dim(const std::vector<RealAffineExpr>& exprs) {
  Index m = 0;
  for (const auto& e : exprs) m += e.dim();
  return m;
}

}  // namespace

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::Optimal: return "optimal";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::Unbounded: return "unbounded";
    case SdpStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options) {
  const int n = static_cast<int>(problem.objective.size());
  if (n == 0) throw DimensionError("sdp::solve: empty objective");
  if (problem.constraints.empty()) throw Error("sdp::solve: at least one constraint required");
  for (const auto& e : problem.constraints) {
    if (e.num_params != n) {
      throw DimensionError("sdp::solve: constraint parameter count differs from objective");
    }
  }
  if (!problem.bounds.empty() && static_cast<int>(problem.bounds.size()) != n) {
    throw DimensionError("sdp::solve: bounds must be empty or one per parameter");
  }

  SdpSolution solution;
  solution.x = RealVector::Zero(n);

  const std::vector<RealAffineExpr> exprs = with_bound_blocks(problem);

  // ---- Phase I: minimize tv s.t. A_j(x) − tv·I ⪯ 0. ----
  const int ne = n + 1;
  std::vector<RealAffineExpr> phase1(exprs.size());
  for (std::size_t j = 0; j < exprs.size(); ++j) {
    RealAffineExpr e(ne, exprs[j].constant);
    for (const auto& t : exprs[j].terms) e.add_term(t.param, t.coeff);
    e.add_term(n, -RealMatrix::Identity(exprs[j].dim(), exprs[j].dim()));
    phase1[j] = std::move(e);
  }

  RealVector xe = RealVector::Zero(ne);
  double worst0 = -kInf;
  for (const auto& e : exprs) {
    worst0 = std::max(worst0, max_eigenvalue(e.evaluate(xe.head(n))));
  }
  xe[n] = worst0 + 1.0;

  RealVector c1 = RealVector::Zero(ne);
  c1[n] = 1.0;
  const double interior_target = -std::max(1e-9, 1e-9 * std::abs(worst0));
  const auto feasible_enough = [&](const RealVector& y) { return y[n] <= 100.0 * interior_target; };

  const double m1 = static_cast<double>(total_block_dim(phase1));
  double t_barrier = 1.0;
  int iters = 0;
  while (true) {
    const CenterOutcome oc = newton_center(phase1, c1, t_barrier, xe, options, &iters,
                                           std::optional<std::function<bool(const RealVector&)>>(
                                               feasible_enough));
    const double tv = xe[n];
    const double gap = m1 / t_barrier;
    if (tv <= interior_target) break;
    // The duality surrogate tv − m/t lower-bounds the phase-I optimum only
    // at a converged center.
    if (oc.converged && tv - gap >= options.infeasibility_margin) {
      solution.status = SdpStatus::Infeasible;
      solution.x = xe.head(n);
      solution.objective_value = 0.0;
      solution.worst_margin = tv;
      solution.iterations = iters;
      solution.message = "phase-I optimum ≥ " + std::to_string(tv - gap);
      return solution;
    }
    if (gap <= 0.25 * options.infeasibility_margin || oc.stalled ||
        iters >= options.max_iterations) {
      if (tv < 0.0) break;
      solution.status = SdpStatus::NumericalFailure;
      solution.x = xe.head(n);
      solution.worst_margin = tv;
      solution.iterations = iters;
      solution.message = oc.stalled ? "phase-I Newton stalled near the feasibility boundary"
                                    : "phase-I could not certify feasibility either way";
      return solution;
    }
    t_barrier *= options.barrier_shrink;
  }

  // ---- Phase II: minimize cᵀx over the strictly feasible region. ----
  RealVector x = xe.head(n);
  const double m2 = static_cast<double>(total_block_dim(exprs));
  t_barrier = 1.0;
  bool reached_gap = false;
  std::string message;
  while (true) {
    const CenterOutcome oc = newton_center(exprs, problem.objective, t_barrier, x, options, &iters);
    const double obj = problem.objective.dot(x);
    if (obj < options.unbounded_threshold) {
      solution.status = SdpStatus::Unbounded;
      solution.x = x;
      solution.objective_value = obj;
      solution.iterations = iters;
      solution.message = "objective diverges below the unboundedness threshold";
      return solution;
    }
    const double gap = m2 / t_barrier;
    if (gap <= options.gap_tol * (1.0 + std::abs(obj))) {
      reached_gap = true;
      break;
    }
    if (oc.stalled || iters >= options.max_iterations) {
      message = oc.stalled ? "phase-II Newton stalled at gap " + std::to_string(gap)
                           : "iteration budget exhausted at gap " + std::to_string(gap);
      break;
    }
    t_barrier *= options.barrier_shrink;
  }

  solution.x = x;
  solution.objective_value = problem.objective.dot(x);
  solution.iterations = iters;
  double worst = -kInf;
  for (const auto& e : problem.constraints) {
    worst = std::max(worst, max_eigenvalue(e.evaluate(x)));
  }
  solution.worst_margin = worst;
  if (reached_gap && worst <= 0.0) {
    solution.status = SdpStatus::Optimal;
    solution.message = "gap target reached";
  } else if (!reached_gap) {
    solution.status = SdpStatus::NumericalFailure;
    solution.message = message;
  } else {
    solution.status = SdpStatus::NumericalFailure;
    solution.message = "interior point left the feasible region";
  }
  return solution;
}

CertificateReport check_certificate(const SdpProblem& problem, const SdpSolution& solution,
                                    double margin_tol) {
  CertificateReport report;
  report.objective = problem.objective.dot(solution.x);
  report.constraint_margins.reserve(problem.constraints.size());
  double worst = -kInf;
  for (const auto& e : problem.constraints) {
    const double margin = feasibility_margin(e, solution.x);
    report.constraint_margins.push_back(margin);
    worst = std::max(worst, margin);
  }
  report.max_margin = worst;
  if (!problem.bounds.empty()) {
    for (int i = 0; i < static_cast<int>(problem.bounds.size()); ++i) {
      const VarBound& b = problem.bounds[i];
      if (solution.x[i] < b.lower - 1e-9 || solution.x[i] > b.upper + 1e-9) {
        report.bound_violations.push_back("x[" + std::to_string(i) + "] = " +
                                          std::to_string(solution.x[i]) + " outside [" +
                                          std::to_string(b.lower) + ", " +
                                          std::to_string(b.upper) + "]");
      }
    }
  }
  report.pass = solution.status == SdpStatus::Optimal && report.max_margin <= margin_tol &&
                report.bound_violations.empty();
  return report;
}

}  // namespace qgcc
