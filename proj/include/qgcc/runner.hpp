#ifndef QGCC_RUNNER_HPP
#define QGCC_RUNNER_HPP

#include <string>
#include <vector>

#include "qgcc/analysis.hpp"
#include "qgcc/config.hpp"
#include "qgcc/oracle.hpp"
#include "qgcc/synthesis.hpp"

namespace qgcc {

/// One sweep grid point. The oracle columns refer to the uncontrolled plant
/// (K = 0) validated against the analysis bound.
struct SweepRow {
  double param = 0.0;
  AnalysisResult analysis;
  SynthesisResult synthesis;
  double k_norm = std::numeric_limits<double>::quiet_NaN();
  double oracle_max_cost = std::numeric_limits<double>::quiet_NaN();
  int violations = 0;
  bool oracle_ran = false;
  bool hard_failure = false;  // NumericalFailure / PostCheckFailed at this point
};

/// Evaluates the sweep grid (deterministic for a fixed config + seed).
std::vector<SweepRow> sweep_rows(const LoadedConfig& config);

/// Byte-stable CSV with the fixed header
/// param,analysis_feasible,analysis_bound,synth_feasible,xi,synth_bound,k_norm,cl_abscissa,oracle_max_cost,violations
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// 800×600 polyline plot of bound-vs-parameter: analysis dashed, synthesis
/// solid; infeasible points break the curves.
std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& param_name,
                      bool log_y);

std::string analysis_json(const AnalysisResult& result);
std::string synthesis_json(const SynthesisResult& result);

/// The bundled open-cavity example (same text as fixtures/example.json).
const std::string& example_config_text();

int run_analyze(const LoadedConfig& config);
int run_synthesize(const LoadedConfig& config);
int run_validate(const LoadedConfig& config);
int run_sweep(const LoadedConfig& config);
int run_selftest();

}  // namespace qgcc

#endif  // QGCC_RUNNER_HPP
