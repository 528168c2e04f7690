#pragma once

#include <string>
#include <vector>

#include "fluxkit/circuits.hpp"
#include "fluxkit/noise.hpp"

namespace fluxkit {

// One structured JSON document with sections `device`, `noise`, `sweep`,
// `output`; unknown keys are rejected to catch typos.
struct RunConfig {
  DeviceParams device;
  NoiseModel noise;
  CoherenceBackgrounds backgrounds;

  std::string output_dir = ".";
  bool svg = false;
  int threads = 0;  // 0 = machine parallelism

  // coupler-response sweep
  double coupler_f_start = -0.6, coupler_f_stop = 0.6, coupler_f_step = 2e-3;

  // coupling sweep: f_C points evaluated by both models
  std::vector<double> coupling_grid{0.402, 0.42, 0.44, 0.46, 0.48, 0.49, 0.5};
  double coupling_f_b_offset = 0.01;  // qubit-B detuning from degeneracy

  // coherence sweep
  double coherence_f_start = 0.40, coherence_f_stop = 0.60,
         coherence_f_step = 2.5e-3;
  std::string coherence_qubit = "B";
  std::vector<double> envelope_points;  // optional f_C values for decay curves

  // spectrum sweep
  char spectrum_axis = 'a';
  double spectrum_start = 0.49, spectrum_stop = 0.53, spectrum_step = 5e-4;
  FluxPoint spectrum_fixed{0.0, 0.51, 0.5};
  int spectrum_branches = 4;

  // eta table
  double eta_gamma_start = 0.8, eta_gamma_stop = 1.0, eta_gamma_step = 0.01;

  std::string source_path;  // where this config was loaded from
  std::uint64_t config_hash = 0;
};

RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& json_text,
                           const std::string& source_path = "<memory>");

// Rows of a measured-coherence table for the noise-fit command.
struct MeasuredRate {
  std::string channel;  // "ramsey" | "echo" | "t1"
  double value_per_s = 0;
  double background_per_s = 0;
  double f_c = 0;
};

std::vector<MeasuredRate> load_measured_rates(const std::string& path);

}  // namespace fluxkit
