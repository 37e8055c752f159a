#include "qgcc/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qgcc {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const json& field(const json& j, const std::string& where, const std::string& name) {
  if (!j.contains(name)) fail(where, "missing field \"" + name + "\"");
  return j.at(name);
}

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return Complex(j[0].get<double>(), j[1].get<double>());
  }
  fail(where, "expected a number or a [re, im] pair");
}

ComplexMatrix parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  Index cols = -1;
  ComplexMatrix M;
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || row.empty()) {
      fail(where, "row " + std::to_string(r) + " is not a non-empty array");
    }
    if (cols < 0) {
      cols = static_cast<Index>(row.size());
      M.resize(rows, cols);
    } else if (static_cast<Index>(row.size()) != cols) {
      fail(where, "row " + std::to_string(r) + " has inconsistent length");
    }
    for (Index c = 0; c < cols; ++c) {
      M(r, c) = parse_complex(row[c], where + "[" + std::to_string(r) + "][" +
                                          std::to_string(c) + "]");
    }
  }
  return M;
}

double parse_number(const json& j, const std::string& where, const std::string& name) {
  const json& v = field(j, where, name);
  if (!v.is_number()) fail(where, "field \"" + name + "\" must be a number");
  return v.get<double>();
}

double parse_number_or(const json& j, const std::string& where, const std::string& name,
                       double fallback) {
  if (!j.contains(name)) return fallback;
  return parse_number(j, where, name);
}

void require_structured(const ComplexMatrix& X, StructureKind kind, const std::string& where) {
  const auto violations = validate_structure(X, kind);
  if (!violations.empty()) {
    std::string msg = where + ":";
    for (const auto& v : violations) msg += " " + v + ";";
    throw StructureError(msg);
  }
}

Uncertainty parse_uncertainty(const json& j, const std::string& where, Index n) {
  const std::string type = field(j, where, "type").get<std::string>();
  if (type == "quadratic") {
    QuadraticUncertainty u;
    u.E1 = parse_matrix(field(j, where, "E1"), where + ".E1");
    u.E2 = parse_matrix(field(j, where, "E2"), where + ".E2");
    u.gamma = parse_number(j, where, "gamma");
    u.delta = parse_number(j, where, "delta");
    if (u.E1.rows() != u.E2.rows() || u.E1.cols() != u.E2.cols()) {
      fail(where, "E1 and E2 must have equal shape");
    }
    if (u.E1.cols() != n) fail(where, "E1/E2 must have n columns");
    return u;
  }
  if (type == "nonquadratic") {
    NonQuadraticUncertainty u;
    const ComplexMatrix e1 = parse_matrix(field(j, where, "E1"), where + ".E1");
    const ComplexMatrix e2 = parse_matrix(field(j, where, "E2"), where + ".E2");
    if (e1.rows() != 1 || e2.rows() != 1) fail(where, "E1 and E2 must be 1-row matrices");
    if (e1.cols() != n || e2.cols() != n) fail(where, "E1/E2 must have n columns");
    u.E1 = e1.row(0);
    u.E2 = e2.row(0);
    u.gamma = parse_number(j, where, "gamma");
    u.delta1 = parse_number(j, where, "delta1");
    u.delta2 = parse_number(j, where, "delta2");
    return u;
  }
  fail(where, "unknown uncertainty type \"" + type + "\"");
}

}  // namespace

LoadedConfig parse_config_text(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(origin + ": " + e.what());
  }

  LoadedConfig out;
  out.name = root.contains("name") ? root.at("name").get<std::string>() : origin;

  const ComplexMatrix M = parse_matrix(field(root, origin, "M"), origin + ".M");
  if (M.rows() != M.cols() || M.rows() % 2 != 0) {
    fail(origin + ".M", "must be a square matrix of even dimension");
  }
  require_structured(M, StructureKind::Hamiltonian, origin + ".M");
  const Index n = M.rows() / 2;

  const json& nj = field(root, origin, "N");
  ComplexMatrix N1 = parse_matrix(field(nj, origin + ".N", "N1"), origin + ".N.N1");
  ComplexMatrix N2 = parse_matrix(field(nj, origin + ".N", "N2"), origin + ".N.N2");
  if (N1.rows() != N2.rows() || N1.cols() != N2.cols()) {
    fail(origin + ".N", "N1 and N2 must have equal shape");
  }
  if (N1.cols() != n) fail(origin + ".N", "N1/N2 must have n columns");
  out.coupling_base = CouplingMatrix{std::move(N1), std::move(N2)};

  out.kappa = parse_number_or(root, origin, "kappa", 1.0);
  if (out.kappa < 0) fail(origin, "kappa must be non-negative");

  PlantModel plant;
  plant.M = DoubledMatrix::FromAssembled(M);
  plant.N = out.coupling_base.scaled(std::sqrt(out.kappa));
  plant.uncertainty = parse_uncertainty(field(root, origin, "uncertainty"),
                                        origin + ".uncertainty", n);

  if (root.contains("cost")) {
    const json& cj = root.at("cost");
    if (cj.contains("R")) {
      const ComplexMatrix R = parse_matrix(cj.at("R"), origin + ".cost.R");
      if (R.rows() != 2 * n || R.cols() != 2 * n) {
        fail(origin + ".cost.R", "must be 2n x 2n");
      }
      require_structured(R, StructureKind::Hamiltonian, origin + ".cost.R");
      plant.weights.R = DoubledMatrix::FromAssembled(R);
    } else {
      plant.weights.R = DoubledMatrix::Identity(n);
    }
    plant.weights.rho = parse_number_or(cj, origin + ".cost", "rho", 0.01);
  } else {
    plant.weights.R = DoubledMatrix::Identity(n);
    plant.weights.rho = 0.01;
  }

  if (root.contains("sweep")) {
    const json& sj = root.at("sweep");
    SweepSpec spec;
    spec.parameter = field(sj, origin + ".sweep", "parameter").get<std::string>();
    spec.start = parse_number(sj, origin + ".sweep", "start");
    spec.stop = parse_number(sj, origin + ".sweep", "stop");
    spec.points = static_cast<int>(parse_number(sj, origin + ".sweep", "points"));
    if (spec.points < 2) fail(origin + ".sweep", "points must be >= 2");
    if (!(spec.stop > spec.start)) fail(origin + ".sweep", "stop must exceed start");
    out.run.sweep = spec;
  }

  if (root.contains("solver")) {
    const json& oj = root.at("solver");
    out.run.cert.eps_margin = parse_number_or(oj, origin + ".solver", "eps_margin", 1e-6);
    out.run.cert.eps_q = parse_number_or(oj, origin + ".solver", "eps_q", 1e-6);
    out.run.cert.sdp.max_iterations = static_cast<int>(
        parse_number_or(oj, origin + ".solver", "max_iterations", 200));
    out.run.cert.sdp.gap_tol = parse_number_or(oj, origin + ".solver", "gap_tol", 1e-9);
  }
  if (root.contains("oracle")) {
    const json& oj = root.at("oracle");
    out.run.samples = static_cast<int>(parse_number_or(oj, origin + ".oracle", "samples", 200));
    out.run.seed = static_cast<std::uint64_t>(
        parse_number_or(oj, origin + ".oracle", "seed", 1));
  }

  plant.validate();
  out.plant = std::move(plant);
  out.run.config_path = origin;
  return out;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

PlantModel plant_with(const LoadedConfig& config, const std::string& parameter, double value) {
  PlantModel plant = config.plant;
  if (parameter == "kappa") {
    if (value < 0) throw Error("plant_with: kappa must be non-negative");
    plant.N = config.coupling_base.scaled(std::sqrt(value));
    return plant;
  }
  if (parameter == "rho") {
    plant.weights.rho = value;
    return plant;
  }
  if (parameter == "gamma") {
    std::visit([&](auto& u) { u.gamma = value; }, plant.uncertainty);
    return plant;
  }
  if (parameter == "delta") {
    std::get<QuadraticUncertainty>(plant.uncertainty).delta = value;
    return plant;
  }
  if (parameter == "delta1") {
    std::get<NonQuadraticUncertainty>(plant.uncertainty).delta1 = value;
    return plant;
  }
  if (parameter == "delta2") {
    std::get<NonQuadraticUncertainty>(plant.uncertainty).delta2 = value;
    return plant;
  }
  throw Error("plant_with: unknown sweep parameter \"" + parameter + "\"");
}

}  // namespace qgcc
