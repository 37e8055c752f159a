#include "qgcc/oracle.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "qgcc/numkernel.hpp"

namespace qgcc {

namespace {

// splitmix64-seeded xorshift-free generator: std::mt19937_64 is seeded per
// draw stream; uniforms and normals are derived by hand so the byte stream
// is identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {  // [0, 1)
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

ComplexMatrix cost_weight(const PlantModel& plant, const std::optional<DoubledMatrix>& K) {
  ComplexMatrix W = plant.weights.R.assembled();
  if (K.has_value()) {
    const ComplexMatrix Ka = K->assembled();
    W += plant.weights.rho * Ka * Ka;
  }
  return W;
}

ComplexMatrix rhs(const ComplexMatrix& F, const ComplexMatrix& Sigma, const ComplexMatrix& D) {
  return F * Sigma + Sigma * F.adjoint() + D;
}

}  // namespace

DeltaSample sample_delta(Index m, double gamma, std::uint64_t seed, DeltaMode mode) {
  if (m < 1) throw DimensionError("sample_delta: need m >= 1");
  if (gamma <= 0) throw Error("sample_delta: gamma must be positive");

  if (mode == DeltaMode::Paper) {
    if (2 * m != 2) {
      throw DimensionError("sample_delta: the paper Δ is 2x2, requested 2m = " +
                           std::to_string(2 * m));
    }
    ComplexMatrix d1 = ComplexMatrix::Zero(1, 1);
    ComplexMatrix d2(1, 1);
    d2(0, 0) = Complex(0.0, 0.5);
    DoubledMatrix delta{d1, d2};
    return {delta, spectral_norm(delta.assembled())};
  }

  Rng rng(seed);
  ComplexMatrix d1(m, m);
  ComplexMatrix d2(m, m);
  for (Index i = 0; i < m; ++i) {
    d1(i, i) = rng.normal();
    for (Index j = i + 1; j < m; ++j) {
      d1(i, j) = Complex(rng.normal(), rng.normal());
      d1(j, i) = std::conj(d1(i, j));
    }
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      d2(i, j) = Complex(rng.normal(), rng.normal());
      d2(j, i) = d2(i, j);
    }
  }
  DoubledMatrix delta{d1, d2};
  const double raw_norm = spectral_norm(delta.assembled());
  if (raw_norm == 0.0) return {delta, 0.0};

  const double radius = 2.0 / gamma;
  const double target = (mode == DeltaMode::Boundary) ? radius : rng.uniform() * radius;
  delta = delta.scaled(target / raw_norm);
  return {delta, target};
}

double steady_state_cost_matrix(const Eigen::Ref<const ComplexMatrix>& F,
                                const Eigen::Ref<const ComplexMatrix>& D,
                                const Eigen::Ref<const ComplexMatrix>& W) {
  if (spectral_abscissa(F) >= 0.0) {
    throw NotHurwitzError("steady_state_cost: closed-loop drift is not Hurwitz");
  }
  const ComplexMatrix Sigma = solve_lyapunov(F, D);
  const Complex cost = (W * Sigma).trace();
  if (std::abs(cost.imag()) > 1e-9 * std::max(1.0, std::abs(cost.real()))) {
    throw NumericalError("steady_state_cost: cost has imaginary residue");
  }
  return cost.real();
}

double steady_state_cost(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                         const std::optional<DoubledMatrix>& Delta) {
  const DoubledMatrix k_eff = K.value_or(DoubledMatrix::Zero(plant.modes()));
  const ComplexMatrix F = closed_loop_drift(plant, k_eff, Delta);
  return steady_state_cost_matrix(F, diffusion(plant.N), cost_weight(plant, K));
}

MomentTrajectory integrate_moments(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                                   const std::optional<DoubledMatrix>& Delta,
                                   const ComplexMatrix& Sigma0, double T, double dt) {
  const DoubledMatrix k_eff = K.value_or(DoubledMatrix::Zero(plant.modes()));
  const ComplexMatrix F = closed_loop_drift(plant, k_eff, Delta);
  return integrate_moments_matrix(F, diffusion(plant.N), cost_weight(plant, K), Sigma0, T, dt);
}

MomentTrajectory integrate_moments_matrix(const Eigen::Ref<const ComplexMatrix>& F,
                                          const Eigen::Ref<const ComplexMatrix>& D,
                                          const Eigen::Ref<const ComplexMatrix>& W,
                                          const ComplexMatrix& Sigma0, double T, double dt) {
  if (dt <= 0.0) throw Error("integrate_moments: dt must be positive");
  if (T < 100.0 * dt) throw Error("integrate_moments: need T >= 100·dt");
  const Index d = F.rows();
  if (Sigma0.rows() != d || Sigma0.cols() != d) {
    throw DimensionError("integrate_moments: Sigma0 has the wrong size");
  }

  const int steps = static_cast<int>(std::llround(T / dt));
  MomentTrajectory traj;
  traj.points.reserve(steps + 1);

  ComplexMatrix Sigma = 0.5 * (Sigma0 + Sigma0.adjoint());
  double cost_prev = (W * Sigma).trace().real();
  double integral = 0.0;
  traj.points.push_back({0.0, cost_prev});

  for (int k = 1; k <= steps; ++k) {
    const ComplexMatrix k1 = rhs(F, Sigma, D);
    const ComplexMatrix k2 = rhs(F, Sigma + 0.5 * dt * k1, D);
    const ComplexMatrix k3 = rhs(F, Sigma + 0.5 * dt * k2, D);
    const ComplexMatrix k4 = rhs(F, Sigma + dt * k3, D);
    Sigma += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    Sigma = 0.5 * (Sigma + Sigma.adjoint()).eval();

    if (Sigma.norm() > 1e12) {
      throw NotHurwitzError("integrate_moments: second moments diverged");
    }

    const double t = k * dt;
    const double cost_now = (W * Sigma).trace().real();
    integral += 0.5 * dt * (cost_prev + cost_now);
    cost_prev = cost_now;
    traj.points.push_back({t, integral / t});
  }
  traj.sigma_final = Sigma;
  return traj;
}

ValidationReport validate_bound(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                                double bound, int n_samples, std::uint64_t seed) {
  if (!plant.has_quadratic_uncertainty()) {
    throw Error("validate_bound: only quadratic uncertainties have a moment oracle");
  }
  if (!std::isfinite(bound)) throw Error("validate_bound: bound must be finite");
  const auto& unc = plant.quadratic();
  const Index m = unc.channels();

  ValidationReport report;
  report.guaranteed_bound = bound;

  std::vector<DeltaSample> samples;
  if (unc.assembled().norm() == 0.0) {
    // No perturbation channel: Δ never enters the loop, one zero sample.
    samples.push_back({DoubledMatrix::Zero(m), 0.0});
  } else {
    const bool paper_applicable = (2 * m == 2);
    const int n_paper = paper_applicable ? 1 : 0;
    const int n_interior = n_samples / 2;
    const int n_boundary = n_samples - n_interior - n_paper;
    for (int k = 0; k < n_interior; ++k) {
      samples.push_back(sample_delta(m, unc.gamma, seed + k, DeltaMode::Random));
    }
    for (int k = 0; k < n_boundary; ++k) {
      samples.push_back(sample_delta(m, unc.gamma, seed + n_interior + k, DeltaMode::Boundary));
    }
    if (paper_applicable) samples.push_back(sample_delta(m, unc.gamma, 0, DeltaMode::Paper));
  }

  report.samples = static_cast<int>(samples.size());
  double worst_cost = -std::numeric_limits<double>::infinity();
  bool have_unstable = false;
  for (const auto& s : samples) {
    double cost;
    try {
      cost = steady_state_cost(plant, K, s.Delta);
    } catch (const NotHurwitzError&) {
      // Claimed robust stability is contradicted by this sample.
      ++report.violations;
      if (!have_unstable) {
        report.worst_delta = s;
        have_unstable = true;
      }
      continue;
    }
    if (cost > worst_cost) {
      worst_cost = cost;
      if (!have_unstable) report.worst_delta = s;
    }
    if (cost > bound + 1e-6 * (1.0 + std::abs(bound))) ++report.violations;
  }
  report.max_realized_cost = std::isfinite(worst_cost) ? worst_cost : 0.0;
  return report;
}

}  // namespace qgcc
