#ifndef QGCC_ORACLE_HPP
#define QGCC_ORACLE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qgcc/qmodel.hpp"

namespace qgcc {

enum class DeltaMode { Random, Boundary, Paper };

/// One admissible quadratic perturbation: Δ1 Hermitian, Δ2 symmetric,
/// spectral norm ≤ 2/γ (boundary mode rescales to exactly 2/γ).
struct DeltaSample {
  DoubledMatrix Delta;
  double norm = 0.0;
};

/// Draws a structured Δ of channel count m. Fully deterministic per seed
/// (own Box–Muller over a 64-bit generator, no stdlib distributions).
/// Paper mode returns [[0, i/2],[−i/2, 0]] and requires 2m == 2.
DeltaSample sample_delta(Index m, double gamma, std::uint64_t seed, DeltaMode mode);

/// Exact steady-state time-averaged cost of the linear closed loop:
/// solves F_cl Σ + Σ F_cl† + D = 0 and returns Tr((R + ρK²)·Σ)
/// (the ρK² term only when a controller is present).
/// Throws NotHurwitzError when F_cl is not Hurwitz.
double steady_state_cost(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                         const std::optional<DoubledMatrix>& Delta);

/// Matrix-level core of steady_state_cost: Σ from F Σ + Σ F† + D = 0 and
/// cost Tr(W·Σ).
double steady_state_cost_matrix(const Eigen::Ref<const ComplexMatrix>& F,
                                const Eigen::Ref<const ComplexMatrix>& D,
                                const Eigen::Ref<const ComplexMatrix>& W);

struct MomentTrajectory {
  struct Point {
    double t;
    double running_average;
  };
  std::vector<Point> points;
  ComplexMatrix sigma_final;
};

/// Second, independent oracle: fixed-step RK4 integration of
/// dΣ/dt = F_cl Σ + Σ F_cl† + D with the running time-average of the cost.
/// Diverging ‖Σ‖ (> 1e12) reports NotHurwitzError.
MomentTrajectory integrate_moments(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                                   const std::optional<DoubledMatrix>& Delta,
                                   const ComplexMatrix& Sigma0, double T, double dt);

/// Matrix-level core of integrate_moments.
MomentTrajectory integrate_moments_matrix(const Eigen::Ref<const ComplexMatrix>& F,
                                          const Eigen::Ref<const ComplexMatrix>& D,
                                          const Eigen::Ref<const ComplexMatrix>& W,
                                          const ComplexMatrix& Sigma0, double T, double dt);

struct ValidationReport {
  int samples = 0;
  double max_realized_cost = 0.0;
  double guaranteed_bound = 0.0;
  int violations = 0;
  DeltaSample worst_delta;
};

/// Samples admissible Δ (half random-interior, the rest boundary, plus the
/// paper Δ when the channel is 2×2), computes the realized cost of each, and
/// counts violations of `bound`. Seed-deterministic regardless of evaluation
/// order: sample k is drawn from seed + k. Quadratic uncertainty only.
ValidationReport validate_bound(const PlantModel& plant, const std::optional<DoubledMatrix>& K,
                                double bound, int n_samples, std::uint64_t seed);

}  // namespace qgcc

#endif  // QGCC_ORACLE_HPP
