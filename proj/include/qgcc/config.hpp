#ifndef QGCC_CONFIG_HPP
#define QGCC_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "qgcc/certification.hpp"
#include "qgcc/qmodel.hpp"

namespace qgcc {

enum class RunMode { Analyze, Synthesize, Sweep, Validate, Selftest };

struct SweepSpec {
  std::string parameter = "kappa";
  double start = 0.0;
  double stop = 0.0;
  int points = 0;
};

/// Everything a single CLI invocation needs besides the plant itself.
struct RunConfig {
  RunMode mode = RunMode::Analyze;
  std::string config_path;
  std::string out_path;   // CSV for sweep, JSON result otherwise
  std::string svg_path;   // sweep only
  std::string cert_path;  // sweep only: JSON certificate sidecar
  std::uint64_t seed = 1;
  int samples = 200;
  std::optional<double> rho_override;
  bool log_y = false;
  std::optional<SweepSpec> sweep;
  CertOptions cert;
};

/// A parsed plant file: the base coupling is kept separately so sweeps can
/// rescale N = √κ·N_base per grid point.
struct LoadedConfig {
  std::string name;
  RunConfig run;
  PlantModel plant;  // with the file's kappa already applied
  CouplingMatrix coupling_base;
  double kappa = 1.0;
};

/// Parses and validates a JSON plant file. Complex entries are written as
/// two-element arrays [re, im] (a bare number means a real entry); matrices
/// are row-major nested arrays. Throws ParseError with field context or
/// StructureError listing structure violations.
LoadedConfig load_config(const std::string& path);

/// Same, from an in-memory document (used by the embedded fixtures).
LoadedConfig parse_config_text(const std::string& text, const std::string& origin);

/// Rebuilds the plant with one scalar parameter replaced ("kappa" rescales
/// the base coupling; "gamma", "delta", "delta1", "delta2", "rho" set the
/// corresponding field).
PlantModel plant_with(const LoadedConfig& config, const std::string& parameter, double value);

}  // namespace qgcc

#endif  // QGCC_CONFIG_HPP
