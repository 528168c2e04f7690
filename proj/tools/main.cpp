#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace fluxkit::cli;

  CLI::App app{"fluxkit: inductively coupled flux-qubit simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string data_path;
  int threads = -1;
  bool svg = false;

  app.add_option("--config", config_path, "run configuration (JSON)")
      ->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--threads", threads, "worker threads (default: machine)");
  app.add_flag("--svg", svg, "also write SVG line plots");

  auto* c_resp = app.add_subcommand("coupler-response",
                                    "ground-state current and 1/L_eff vs f_C");
  auto* c_coup = app.add_subcommand(
      "coupling-sweep", "J(f_C) from the semiclassical and composite models");
  auto* c_coh =
      app.add_subcommand("coherence", "Delta, kappa, T1, T2 vs coupler bias");
  auto* c_fit = app.add_subcommand(
      "noise-fit", "invert measured decay rates to a flux-noise amplitude");
  c_fit->add_option("--data", data_path, "measured rates CSV")->required();
  auto* c_eta =
      app.add_subcommand("eta-table", "Ramsey/echo sequence factors vs gamma");
  auto* c_spec =
      app.add_subcommand("spectrum", "composite transition spectrum sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  fluxkit::RunConfig cfg;
  try {
    cfg = fluxkit::load_run_config(resolve_config_path(config_path));
  } catch (const fluxkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (threads >= 0) cfg.threads = threads;
  if (svg) cfg.svg = true;

  if (c_resp->parsed()) return run_coupler_response(cfg);
  if (c_coup->parsed()) return run_coupling_sweep(cfg);
  if (c_coh->parsed()) return run_coherence(cfg);
  if (c_fit->parsed()) return run_noise_fit(cfg, data_path);
  if (c_eta->parsed()) return run_eta_table(cfg);
  if (c_spec->parsed()) return run_spectrum(cfg);
  return kConfigError;
}
