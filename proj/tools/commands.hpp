#pragma once

#include <string>

#include "fluxkit/config.hpp"

namespace fluxkit::cli {

inline constexpr const char* kToolVersion = "fluxkit 0.1.0";

// Exit codes shared by every command.
enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericError = 3,
  kDataError = 4,
};

int run_coupler_response(const RunConfig& cfg);
int run_coupling_sweep(const RunConfig& cfg);
int run_coherence(const RunConfig& cfg);
int run_noise_fit(const RunConfig& cfg, const std::string& data_path);
int run_eta_table(const RunConfig& cfg);
int run_spectrum(const RunConfig& cfg);

// Resolves a config path, consulting FLUXKIT_CONFIG_DIR when the literal
// path does not exist.
std::string resolve_config_path(const std::string& path);

}  // namespace fluxkit::cli
