#ifndef QGCC_TYPES_HPP
#define QGCC_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qgcc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class of all qgcc exceptions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};
struct NotHermitianError : Error {
  using Error::Error;
};
struct NotHermitianGridError : Error {
  using Error::Error;
};
struct NotHurwitzError : Error {
  using Error::Error;
};
struct NotPsdError : Error {
  using Error::Error;
};
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};
struct SingularSystemError : Error {
  using Error::Error;
};
struct ConvergenceError : Error {
  using Error::Error;
};
struct InadmissibleDeltaError : Error {
  using Error::Error;
};
struct StructureError : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct PostCheckError : Error {
  using Error::Error;
};
struct NumericalError : Error {
  using Error::Error;
};

namespace tol {
// Module-level default tolerances. Every operation that uses one of these
// accepts an override argument, so callers can tighten or relax per call.
inline constexpr double kHermitianCheck = 1e-12;
inline constexpr double kEigResidual = 1e-10;
inline constexpr double kLyapunovResidual = 1e-9;
inline constexpr double kPsdClip = 1e-12;
inline constexpr double kPsdReject = 1e-8;
inline constexpr double kStructure = 1e-10;
inline constexpr double kImagTrace = 1e-12;
}  // namespace tol

}  // namespace qgcc

#endif  // QGCC_TYPES_HPP
