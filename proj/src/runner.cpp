#include "qgcc/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "qgcc/numkernel.hpp"

namespace qgcc {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& M) {
  json rows = json::array();
  for (Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < M.cols(); ++c) row.push_back(complex_json(M(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json doubled_json(const DoubledMatrix& X) {
  return json{{"X1", matrix_json(X.X1)}, {"X2", matrix_json(X.X2)}};
}

json analysis_to_json(const AnalysisResult& r) {
  json j{{"status", to_string(r.status)}, {"feasible", r.feasible},
         {"iterations", r.iterations}};
  if (!r.message.empty()) j["message"] = r.message;
  if (r.feasible) {
    j["bound"] = r.bound;
    j["lambda_tilde"] = r.lambda_tilde;
    j["tau"] = r.tau;
    j["u"] = r.u;
    j["margin"] = r.margin;
    j["mu"] = complex_json(r.mu);
    j["P"] = doubled_json(r.P);
  }
  return j;
}

json synthesis_to_json(const SynthesisResult& r) {
  json j{{"status", to_string(r.status)}, {"feasible", r.feasible},
         {"iterations", r.iterations}};
  if (!r.message.empty()) j["message"] = r.message;
  if (r.feasible) {
    j["xi"] = r.xi;
    j["bound"] = r.bound;
    j["q"] = r.q;
    j["s"] = r.s;
    j["tau"] = r.tau;
    j["margin"] = r.margin;
    j["mu"] = complex_json(r.mu);
    j["closed_loop_abscissa"] = r.closed_loop_abscissa;
    j["k_near_singular"] = r.k_near_singular;
    j["K"] = doubled_json(r.K);
    j["Y"] = doubled_json(r.Y);
  }
  return j;
}

json validation_to_json(const ValidationReport& r) {
  return json{{"samples", r.samples},
              {"max_realized_cost", r.max_realized_cost},
              {"guaranteed_bound", r.guaranteed_bound},
              {"violations", r.violations},
              {"worst_delta_norm", r.worst_delta.norm}};
}

AnalysisResult run_analysis(const PlantModel& plant, const CertOptions& opts) {
  return plant.has_quadratic_uncertainty() ? analyze_quadratic(plant, opts)
                                           : analyze_nonquadratic(plant, opts);
}

SynthesisResult run_synthesis(const PlantModel& plant, const CertOptions& opts) {
  return plant.has_quadratic_uncertainty() ? synthesize_quadratic(plant, opts)
                                           : synthesize_nonquadratic(plant, opts);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open output file " + path);
  out << text;
}

void emit_result(const LoadedConfig& config, json j) {
  j["plant"] = config.name;
  j["config"] = config.run.config_path;
  const std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!config.run.out_path.empty()) write_text(config.run.out_path, text);
}

PlantModel plant_for_run(const LoadedConfig& config) {
  PlantModel plant = config.plant;
  if (config.run.rho_override) plant.weights.rho = *config.run.rho_override;
  return plant;
}

int exit_code_for(CertStatus status) {
  return status == CertStatus::NumericalFailure ? 2 : 0;
}

}  // namespace

std::vector<SweepRow> sweep_rows(const LoadedConfig& config) {
  if (!config.run.sweep) throw Error("sweep requested but the config has no sweep block");
  const SweepSpec& spec = *config.run.sweep;
  std::vector<SweepRow> rows;
  rows.reserve(spec.points);
  for (int k = 0; k < spec.points; ++k) {
    const double value =
        spec.start + (spec.stop - spec.start) * static_cast<double>(k) /
                         static_cast<double>(spec.points - 1);
    SweepRow row;
    row.param = value;
    PlantModel plant = plant_with(config, spec.parameter, value);
    if (config.run.rho_override && spec.parameter != "rho") {
      plant.weights.rho = *config.run.rho_override;
    }
    try {
      row.analysis = run_analysis(plant, config.run.cert);
    } catch (const Error& e) {
      row.analysis.status = CertStatus::NumericalFailure;
      row.analysis.message = e.what();
    }
    try {
      row.synthesis = run_synthesis(plant, config.run.cert);
      if (row.synthesis.feasible) {
        row.k_norm = spectral_norm(row.synthesis.K.assembled());
      }
    } catch (const Error& e) {
      row.synthesis.status = CertStatus::NumericalFailure;
      row.synthesis.message = e.what();
    }
    row.hard_failure = row.analysis.status == CertStatus::NumericalFailure ||
                       row.synthesis.status == CertStatus::NumericalFailure;
    if (config.run.samples > 0 && plant.has_quadratic_uncertainty() && row.analysis.feasible) {
      const ValidationReport report = validate_bound(plant, std::nullopt, row.analysis.bound,
                                                     config.run.samples, config.run.seed);
      row.oracle_ran = true;
      row.oracle_max_cost = report.max_realized_cost;
      row.violations = report.violations;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "param,analysis_feasible,analysis_bound,synth_feasible,xi,synth_bound,"
      "k_norm,cl_abscissa,oracle_max_cost,violations\n";
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : rows) {
    out += fmt(r.param);
    out += ',';
    out += r.analysis.feasible ? '1' : '0';
    out += ',';
    out += fmt(r.analysis.feasible ? r.analysis.bound : nan);
    out += ',';
    out += r.synthesis.feasible ? '1' : '0';
    out += ',';
    out += fmt(r.synthesis.feasible ? r.synthesis.xi : nan);
    out += ',';
    out += fmt(r.synthesis.feasible ? r.synthesis.bound : nan);
    out += ',';
    out += fmt(r.synthesis.feasible ? r.k_norm : nan);
    out += ',';
    out += fmt(r.synthesis.feasible ? r.synthesis.closed_loop_abscissa : nan);
    out += ',';
    out += fmt(r.oracle_ran ? r.oracle_max_cost : nan);
    out += ',';
    out += r.oracle_ran ? std::to_string(r.violations) : "0";
    out += '\n';
  }
  return out;
}

namespace {

struct PlotSeries {
  std::vector<std::pair<double, double>> points;  // param -> bound, NaN = gap
  std::string dash;
  std::string color;
  std::string label;
};

}  // namespace

std::string sweep_svg(const std::vector<SweepRow>& rows, const std::string& param_name,
                      bool log_y) {
  const int width = 800, height = 600;
  const double ml = 80, mr = 30, mt = 40, mb = 60;

  std::vector<PlotSeries> series(2);
  series[0].dash = "8,5";
  series[0].color = "#c0392b";
  series[0].label = "analysis bound (no controller)";
  series[1].dash = "";
  series[1].color = "#2c3e50";
  series[1].label = "synthesis bound (with controller)";

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  auto y_of = [&](double v) { return log_y ? std::log10(v) : v; };
  for (const auto& r : rows) {
    xmin = std::min(xmin, r.param);
    xmax = std::max(xmax, r.param);
    const double a = r.analysis.feasible && (!log_y || r.analysis.bound > 0)
                         ? y_of(r.analysis.bound)
                         : std::numeric_limits<double>::quiet_NaN();
    const double s = r.synthesis.feasible && (!log_y || r.synthesis.bound > 0)
                         ? y_of(r.synthesis.bound)
                         : std::numeric_limits<double>::quiet_NaN();
    series[0].points.push_back({r.param, a});
    series[1].points.push_back({r.param, s});
    for (double v : {a, s}) {
      if (std::isfinite(v)) {
        ymin = std::min(ymin, v);
        ymax = std::max(ymax, v);
      }
    }
  }
  if (!(ymax > ymin)) {
    ymin = 0.0;
    ymax = 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;
  if (!(xmax > xmin)) xmax = xmin + 1.0;

  auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - ymin) / (ymax - ymin) * (height - mt - mb); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";

  const int nticks = 6;
  for (int i = 0; i <= nticks; ++i) {
    const double x = xmin + (xmax - xmin) * i / nticks;
    svg << "<line x1=\"" << px(x) << "\" y1=\"" << height - mb << "\" x2=\"" << px(x)
        << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << px(x) << "\" y=\"" << height - mb + 20
        << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    const double y = ymin + (ymax - ymin) * i / nticks;
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << py(y) << "\" x2=\"" << ml << "\" y2=\""
        << py(y) << "\" stroke=\"black\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(y) + 4
        << "\" font-size=\"12\" text-anchor=\"end\">"
        << fmt(log_y ? std::pow(10.0, y) : y) << "</text>\n";
  }
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 15
      << "\" font-size=\"14\" text-anchor=\"middle\">" << param_name << "</text>\n"
      << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
      << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << (mt + height - mb) / 2 << ")\">guaranteed cost bound"
      << (log_y ? " (log scale)" : "") << "</text>\n";

  for (const auto& s : series) {
    std::ostringstream path;
    bool open = false;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(y)) {
        open = false;
        continue;
      }
      path << (open ? 'L' : 'M') << px(x) << ' ' << py(y) << ' ';
      open = true;
    }
    svg << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
    svg << "/>\n";
    for (const auto& [x, y] : s.points) {
      if (std::isfinite(y)) {
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"3\" fill=\""
            << s.color << "\"/>\n";
      }
    }
  }

  // legend
  double ly = mt + 10;
  for (const auto& s : series) {
    svg << "<line x1=\"" << width - mr - 260 << "\" y1=\"" << ly << "\" x2=\""
        << width - mr - 220 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"";
    if (!s.dash.empty()) svg << " stroke-dasharray=\"" << s.dash << "\"";
    svg << "/>\n<text x=\"" << width - mr - 212 << "\" y=\"" << ly + 4
        << "\" font-size=\"12\">" << s.label << "</text>\n";
    ly += 20;
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string analysis_json(const AnalysisResult& result) {
  return analysis_to_json(result).dump(2);
}

std::string synthesis_json(const SynthesisResult& result) {
  return synthesis_to_json(result).dump(2);
}

int run_analyze(const LoadedConfig& config) {
  const AnalysisResult result = run_analysis(plant_for_run(config), config.run.cert);
  json j{{"mode", "analyze"}, {"analysis", analysis_to_json(result)}};
  emit_result(config, std::move(j));
  return exit_code_for(result.status);
}

int run_synthesize(const LoadedConfig& config) {
  const SynthesisResult result = run_synthesis(plant_for_run(config), config.run.cert);
  json j{{"mode", "synthesize"}, {"synthesis", synthesis_to_json(result)}};
  emit_result(config, std::move(j));
  return exit_code_for(result.status);
}

int run_validate(const LoadedConfig& config) {
  const PlantModel plant = plant_for_run(config);
  if (!plant.has_quadratic_uncertainty()) {
    throw Error("validate: the moment oracle covers quadratic uncertainties only");
  }
  json j{{"mode", "validate"}};
  int code = 0;

  const AnalysisResult analysis = run_analysis(plant, config.run.cert);
  j["analysis"] = analysis_to_json(analysis);
  code = std::max(code, exit_code_for(analysis.status));
  if (analysis.feasible) {
    const ValidationReport rep = validate_bound(plant, std::nullopt, analysis.bound,
                                                config.run.samples, config.run.seed);
    j["analysis_validation"] = validation_to_json(rep);
    if (rep.violations > 0) code = 2;
  }

  const SynthesisResult synthesis = run_synthesis(plant, config.run.cert);
  j["synthesis"] = synthesis_to_json(synthesis);
  code = std::max(code, exit_code_for(synthesis.status));
  if (synthesis.feasible) {
    const ValidationReport rep = validate_bound(plant, synthesis.K, synthesis.bound,
                                                config.run.samples, config.run.seed);
    j["synthesis_validation"] = validation_to_json(rep);
    if (rep.violations > 0) code = 2;
  }

  emit_result(config, std::move(j));
  return code;
}

int run_sweep(const LoadedConfig& config) {
  const std::vector<SweepRow> rows = sweep_rows(config);
  const std::string csv = sweep_csv(rows);

  const std::string& param = config.run.sweep->parameter;
  std::cerr << "# sweep " << param << " over [" << config.run.sweep->start << ", "
            << config.run.sweep->stop << "], " << rows.size() << " points; R/rho from config"
            << (config.run.rho_override ? " (rho overridden to " + fmt(*config.run.rho_override) + ")"
                                        : "")
            << "; oracle seed " << config.run.seed << ", samples " << config.run.samples
            << "\n";

  if (config.run.out_path.empty()) {
    std::cout << csv;
  } else {
    write_text(config.run.out_path, csv);
  }
  if (!config.run.svg_path.empty()) {
    write_text(config.run.svg_path, sweep_svg(rows, param, config.run.log_y));
  }
  if (!config.run.cert_path.empty()) {
    json points = json::array();
    for (const auto& r : rows) {
      points.push_back(json{{"param", r.param},
                            {"analysis", analysis_to_json(r.analysis)},
                            {"synthesis", synthesis_to_json(r.synthesis)}});
    }
    json j{{"mode", "sweep"},
           {"plant", config.name},
           {"parameter", param},
           {"rho", config.run.rho_override ? *config.run.rho_override : config.plant.weights.rho},
           {"seed", config.run.seed},
           {"samples", config.run.samples},
           {"points", std::move(points)}};
    write_text(config.run.cert_path, j.dump(2) + "\n");
  }

  for (const auto& r : rows) {
    if (r.hard_failure) return 2;
  }
  return 0;
}

const std::string& example_config_text() {
  static const std::string text = R"({
  "name": "open-cavity-example",
  "M": [[0, [0, 0.5]], [[0, -0.5], 0]],
  "N": {"N1": [[1]], "N2": [[0]]},
  "kappa": 2.0,
  "uncertainty": {"type": "quadratic", "E1": [[1]], "E2": [[0]], "gamma": 1.0, "delta": 1.0},
  "cost": {"R": [[1, 0], [0, 1]], "rho": 0.01},
  "sweep": {"parameter": "kappa", "start": 0.3, "stop": 6.0, "points": 25},
  "oracle": {"samples": 200, "seed": 1}
}
)";
  return text;
}

int run_selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& name, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name;
    if (!detail.empty()) std::cout << " — " << detail;
    std::cout << "\n";
    if (!ok) ++failures;
  };

  LoadedConfig cfg = parse_config_text(example_config_text(), "<bundled example>");

  // 1. drift of the bundled plant at kappa = 2.
  {
    ComplexMatrix expected(2, 2);
    expected << -1.0, 0.5, 0.5, -1.0;
    const double err = (drift(cfg.plant) - expected).norm();
    check(err <= 1e-14, "drift matches the closed form", "‖F − F_expected‖ = " + fmt(err));
  }

  // 2. reference perturbation: ΔΔ = I/4, ‖Δ‖ = 1/2 ≤ 2/γ.
  {
    const DeltaSample paper = sample_delta(1, 1.0, 0, DeltaMode::Paper);
    const ComplexMatrix sq = paper.Delta.assembled() * paper.Delta.assembled();
    const double err = (sq - 0.25 * ComplexMatrix::Identity(2, 2)).norm();
    check(err <= 1e-14 && std::abs(paper.norm - 0.5) <= 1e-12 && paper.norm <= 2.0,
          "reference Δ has ΔΔ = I/4 and norm 1/2", "");
  }

  // 3-5. zero-uncertainty fixture: bound vs both oracles.
  {
    LoadedConfig zero = cfg;
    QuadraticUncertainty u = zero.plant.quadratic();
    u.E1.setZero();
    u.E2.setZero();
    u.delta = 0.0;
    zero.plant.uncertainty = u;
    const AnalysisResult ar = analyze_quadratic(zero.plant);
    check(ar.feasible && ar.bound >= 4.0 / 3.0 && ar.bound <= 4.0 / 3.0 + 5e-3,
          "zero-uncertainty analysis bound in [4/3, 4/3 + 5e-3]", "bound = " + fmt(ar.bound));
    const double steady = steady_state_cost(zero.plant, std::nullopt, std::nullopt);
    check(std::abs(steady - 4.0 / 3.0) <= 1e-9, "steady-state cost equals 4/3",
          "cost = " + fmt(steady));
    const MomentTrajectory traj = integrate_moments(
        zero.plant, std::nullopt, std::nullopt, ComplexMatrix::Zero(2, 2), 40.0, 1e-3);
    const ComplexMatrix sig_inf = solve_lyapunov(drift(zero.plant), diffusion(zero.plant.N));
    const double sig_err = (traj.sigma_final - sig_inf).norm();
    const double ode_cost =
        (zero.plant.weights.R.assembled() * traj.sigma_final).trace().real();
    check(sig_err <= 1e-6 && std::abs(ode_cost - steady) <= 1e-6,
          "moment integration agrees with the Lyapunov solve",
          "‖ΔΣ‖ = " + fmt(sig_err) + ", cost err = " + fmt(std::abs(ode_cost - steady)));

    const ValidationReport rep = validate_bound(zero.plant, std::nullopt, ar.bound, 10, 1);
    const ValidationReport neg = validate_bound(zero.plant, std::nullopt, ar.bound / 2, 10, 1);
    check(rep.violations == 0 && neg.violations > 0,
          "oracle accepts the bound and rejects the corrupted bound", "");
  }

  // 6. SDP toy optima.
  {
    SdpProblem toy;
    toy.objective = RealVector::Ones(1);
    RealAffineExpr e(1, RealMatrix::Zero(2, 2));
    e.constant << 0, -1, -1, 0;
    RealMatrix c(2, 2);
    c << -1, 0, 0, -1;
    e.add_term(0, c);
    toy.constraints.push_back(e);
    const SdpSolution s1 = solve(toy);
    const bool ok1 = s1.status == SdpStatus::Optimal && std::abs(s1.objective_value - 1.0) <= 1e-6;

    SdpProblem toy2;
    toy2.objective = -RealVector::Ones(1);
    RealAffineExpr e2(1, RealMatrix::Constant(1, 1, -3.0));
    e2.add_term(0, RealMatrix::Constant(1, 1, 1.0));
    toy2.constraints.push_back(e2);
    const SdpSolution s2 = solve(toy2);
    const bool ok2 = s2.status == SdpStatus::Optimal && std::abs(s2.x[0] - 3.0) <= 1e-6;

    SdpProblem bad;
    bad.objective = RealVector::Zero(1);
    bad.constraints.push_back(RealAffineExpr(1, RealMatrix::Identity(2, 2)));
    const SdpSolution s3 = solve(bad);
    const bool ok3 = s3.status == SdpStatus::Infeasible;
    check(ok1 && ok2 && ok3, "SDP core toy problems", "x*=1: " + fmt(s1.objective_value) +
                                                          ", x*=3: " + fmt(s2.x.size() ? s2.x[0] : 0));
  }

  // 7. determinism of a small sweep.
  {
    LoadedConfig mini = cfg;
    mini.run.sweep = SweepSpec{"kappa", 5.2, 6.0, 3};
    mini.run.samples = 10;
    const std::string csv1 = sweep_csv(sweep_rows(mini));
    const std::string csv2 = sweep_csv(sweep_rows(mini));
    check(csv1 == csv2, "sweep CSV is byte-stable", "");
  }

  std::cout << (failures == 0 ? "selftest: all checks passed\n"
                              : "selftest: " + std::to_string(failures) + " check(s) failed\n");
  return failures == 0 ? 0 : 2;
}

}  // namespace qgcc
