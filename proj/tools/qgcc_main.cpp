#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qgcc/config.hpp"
#include "qgcc/runner.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_path;
  std::string svg_path;
  std::string cert_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int samples = -1;
  double rho = 0.0;
  bool rho_set = false;
  bool log_y = false;
};

void add_common(CLI::App* cmd, CliArgs& args, bool config_required) {
  auto* copt = cmd->add_option("--config", args.config_path, "plant configuration (JSON)");
  if (config_required) copt->required();
  cmd->add_option("--out", args.out_path, "output file (CSV for sweep, JSON otherwise)");
  cmd->add_option("--svg", args.svg_path, "SVG plot output (sweep)");
  cmd->add_option("--json", args.cert_path, "per-point certificate JSON (sweep)");
  cmd->add_option("--seed", args.seed, "oracle sampling seed")->each([&](const std::string&) {
    args.seed_set = true;
  });
  cmd->add_option("--samples", args.samples, "oracle sample count");
  cmd->add_option("--rho", args.rho, "controller effort weight override")
      ->each([&](const std::string&) { args.rho_set = true; });
  cmd->add_flag("--log-y", args.log_y, "logarithmic y axis in the SVG plot");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guaranteed cost bounds and coherent controller synthesis for "
               "uncertain linear quantum systems"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::App* analyze = app.add_subcommand("analyze", "certify a cost bound for the plant");
  CLI::App* synthesize =
      app.add_subcommand("synthesize", "design a controller Hamiltonian minimizing the bound");
  CLI::App* sweep = app.add_subcommand("sweep", "evaluate bounds over a parameter grid (CSV/SVG)");
  CLI::App* validate =
      app.add_subcommand("validate", "check certified bounds against sampled perturbations");
  CLI::App* selftest = app.add_subcommand("selftest", "run the bundled fixtures");
  for (CLI::App* cmd : {analyze, synthesize, sweep, validate}) {
    add_common(cmd, args, /*config_required=*/true);
  }
  add_common(selftest, args, /*config_required=*/false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (selftest->parsed()) return qgcc::run_selftest();

    qgcc::LoadedConfig config = qgcc::load_config(args.config_path);
    config.run.out_path = args.out_path;
    config.run.svg_path = args.svg_path;
    config.run.cert_path = args.cert_path;
    if (args.seed_set) config.run.seed = args.seed;
    if (args.samples >= 0) config.run.samples = args.samples;
    if (args.rho_set) config.run.rho_override = args.rho;
    config.run.log_y = args.log_y;

    if (analyze->parsed()) return qgcc::run_analyze(config);
    if (synthesize->parsed()) return qgcc::run_synthesize(config);
    if (sweep->parsed()) return qgcc::run_sweep(config);
    if (validate->parsed()) return qgcc::run_validate(config);
  } catch (const qgcc::ParseError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qgcc::StructureError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const qgcc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
