#include "fluxkit/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fluxkit/constants.hpp"
#include "fluxkit/csv.hpp"

namespace fluxkit {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError("config: " + msg); }

void check_keys(const json& j, const std::string& where,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) bad("unknown key '" + it.key() + "' in " + where);
  }
}

double num(const json& j, const char* key, double fallback,
           bool* present = nullptr) {
  if (!j.contains(key)) {
    if (present) *present = false;
    return fallback;
  }
  if (!j.at(key).is_number()) bad(std::string(key) + " must be a number");
  if (present) *present = true;
  return j.at(key).get<double>();
}

QubitParams qubit_params(const json& j, const std::string& where) {
  check_keys(j, where, {"I0_small_nA", "I0_large_nA", "C_sh_fF", "L_q_pH"});
  QubitParams q;
  q.i0_small_nA = num(j, "I0_small_nA", 0);
  q.i0_large_nA = num(j, "I0_large_nA", 0);
  q.c_sh_fF = num(j, "C_sh_fF", 0);
  q.l_q_pH = num(j, "L_q_pH", 0);
  return q;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text,
                           const std::string& source_path) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    bad(std::string("not valid JSON: ") + e.what());
  }
  check_keys(root, "top level", {"device", "noise", "sweep", "output"});
  if (!root.contains("device")) bad("missing 'device' section");

  RunConfig cfg;
  cfg.source_path = source_path;
  cfg.config_hash = fnv1a64(json_text);

  const json& dev = root.at("device");
  check_keys(dev, "device",
             {"parameter_set", "J_c_uA_per_um2", "S_c_fF_per_um2", "qubit_a",
              "qubit_b", "coupler", "M_pH"});
  cfg.device.parameter_set = dev.value("parameter_set", "semiclassical");
  cfg.device.j_c_uA_per_um2 = num(dev, "J_c_uA_per_um2", 0);
  cfg.device.s_c_fF_per_um2 = num(dev, "S_c_fF_per_um2", 0);
  if (!dev.contains("qubit_a") || !dev.contains("qubit_b") ||
      !dev.contains("coupler"))
    bad("device needs qubit_a, qubit_b and coupler subsections");
  cfg.device.qubit_a = qubit_params(dev.at("qubit_a"), "device.qubit_a");
  cfg.device.qubit_b = qubit_params(dev.at("qubit_b"), "device.qubit_b");
  const json& cup = dev.at("coupler");
  check_keys(cup, "device.coupler", {"I0_nA", "L_C_pH"});
  cfg.device.i0_coupler_nA = num(cup, "I0_nA", 0);
  cfg.device.l_coupler_pH = num(cup, "L_C_pH", 0);
  cfg.device.m_pH = num(dev, "M_pH", 0);
  try {
    cfg.device.validate();
  } catch (const ValidationError& e) {
    bad(e.what());
  }

  if (root.contains("noise")) {
    const json& nz = root.at("noise");
    check_keys(nz, "noise",
               {"amplitude_uPhi0_sqrtHz", "gamma", "omega_low_over_2pi_Hz",
                "t_evol_ns", "t1_qubit_us", "gamma0_other_per_s",
                "gamma1_other_per_s"});
    cfg.noise.amplitude_Phi0_per_sqrtHz =
        num(nz, "amplitude_uPhi0_sqrtHz", 15.0) * 1e-6;
    cfg.noise.gamma = num(nz, "gamma", 0.91);
    cfg.noise.omega_low_rad_s =
        2.0 * units::pi * num(nz, "omega_low_over_2pi_Hz", 3e-3);
    cfg.noise.t_evol_s = num(nz, "t_evol_ns", 200.0) * 1e-9;
    cfg.backgrounds.t1_qubit_s = num(nz, "t1_qubit_us", 3.5) * 1e-6;
    bool present = false;
    double g0 = num(nz, "gamma0_other_per_s", 0, &present);
    if (present) cfg.backgrounds.gamma0_other_per_s = g0;
    double g1 = num(nz, "gamma1_other_per_s", 0, &present);
    if (present) cfg.backgrounds.gamma1_other_per_s = g1;
    try {
      cfg.noise.validate();
    } catch (const ValidationError& e) {
      bad(e.what());
    }
  } else {
    cfg.noise.amplitude_Phi0_per_sqrtHz = 15e-6;
    cfg.noise.gamma = 0.91;
  }

  if (root.contains("sweep")) {
    const json& sw = root.at("sweep");
    check_keys(sw, "sweep",
               {"coupler_response", "coupling", "coherence", "spectrum", "eta"});
    if (sw.contains("coupler_response")) {
      const json& s = sw.at("coupler_response");
      check_keys(s, "sweep.coupler_response", {"f_start", "f_stop", "f_step"});
      cfg.coupler_f_start = num(s, "f_start", cfg.coupler_f_start);
      cfg.coupler_f_stop = num(s, "f_stop", cfg.coupler_f_stop);
      cfg.coupler_f_step = num(s, "f_step", cfg.coupler_f_step);
      if (!(cfg.coupler_f_step > 0) || !(cfg.coupler_f_stop > cfg.coupler_f_start))
        bad("coupler_response sweep must have f_stop > f_start and f_step > 0");
    }
    if (sw.contains("coupling")) {
      const json& s = sw.at("coupling");
      check_keys(s, "sweep.coupling", {"f_c_grid", "f_b_offset"});
      if (s.contains("f_c_grid")) {
        if (!s.at("f_c_grid").is_array() || s.at("f_c_grid").empty())
          bad("sweep.coupling.f_c_grid must be a non-empty array");
        cfg.coupling_grid = s.at("f_c_grid").get<std::vector<double>>();
      }
      cfg.coupling_f_b_offset = num(s, "f_b_offset", cfg.coupling_f_b_offset);
    }
    if (sw.contains("coherence")) {
      const json& s = sw.at("coherence");
      check_keys(s, "sweep.coherence",
                 {"f_start", "f_stop", "f_step", "qubit", "envelope_points"});
      cfg.coherence_f_start = num(s, "f_start", cfg.coherence_f_start);
      cfg.coherence_f_stop = num(s, "f_stop", cfg.coherence_f_stop);
      cfg.coherence_f_step = num(s, "f_step", cfg.coherence_f_step);
      cfg.coherence_qubit = s.value("qubit", cfg.coherence_qubit);
      if (cfg.coherence_qubit != "A" && cfg.coherence_qubit != "B")
        bad("sweep.coherence.qubit must be 'A' or 'B'");
      if (s.contains("envelope_points"))
        cfg.envelope_points = s.at("envelope_points").get<std::vector<double>>();
      if (!(cfg.coherence_f_step > 0) ||
          !(cfg.coherence_f_stop > cfg.coherence_f_start))
        bad("coherence sweep must have f_stop > f_start and f_step > 0");
    }
    if (sw.contains("spectrum")) {
      const json& s = sw.at("spectrum");
      check_keys(s, "sweep.spectrum",
                 {"axis", "start", "stop", "step", "f_a", "f_b", "f_c",
                  "branches"});
      std::string axis = s.value("axis", std::string("a"));
      if (axis != "a" && axis != "b" && axis != "c")
        bad("sweep.spectrum.axis must be 'a', 'b' or 'c'");
      cfg.spectrum_axis = axis[0];
      cfg.spectrum_start = num(s, "start", cfg.spectrum_start);
      cfg.spectrum_stop = num(s, "stop", cfg.spectrum_stop);
      cfg.spectrum_step = num(s, "step", cfg.spectrum_step);
      cfg.spectrum_fixed.f_a = num(s, "f_a", cfg.spectrum_fixed.f_a);
      cfg.spectrum_fixed.f_b = num(s, "f_b", cfg.spectrum_fixed.f_b);
      cfg.spectrum_fixed.f_c = num(s, "f_c", cfg.spectrum_fixed.f_c);
      cfg.spectrum_branches = int(num(s, "branches", cfg.spectrum_branches));
      if (!(cfg.spectrum_step > 0) || !(cfg.spectrum_stop > cfg.spectrum_start))
        bad("spectrum sweep must have stop > start and step > 0");
    }
    if (sw.contains("eta")) {
      const json& s = sw.at("eta");
      check_keys(s, "sweep.eta", {"gamma_start", "gamma_stop", "gamma_step"});
      cfg.eta_gamma_start = num(s, "gamma_start", cfg.eta_gamma_start);
      cfg.eta_gamma_stop = num(s, "gamma_stop", cfg.eta_gamma_stop);
      cfg.eta_gamma_step = num(s, "gamma_step", cfg.eta_gamma_step);
      if (!(cfg.eta_gamma_step > 0) ||
          !(cfg.eta_gamma_stop >= cfg.eta_gamma_start))
        bad("eta sweep must have gamma_stop >= gamma_start and step > 0");
    }
  }

  if (root.contains("output")) {
    const json& out = root.at("output");
    check_keys(out, "output", {"dir", "svg", "threads"});
    cfg.output_dir = out.value("dir", cfg.output_dir);
    if (out.contains("svg") && !out.at("svg").is_boolean())
      bad("output.svg must be a boolean");
    cfg.svg = out.value("svg", cfg.svg);
    cfg.threads = int(num(out, "threads", cfg.threads));
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path);
}

std::vector<MeasuredRate> load_measured_rates(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("data: cannot open '" + path + "'");
  std::vector<MeasuredRate> rows;
  std::string line;
  int lineno = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header_skipped) {
      header_skipped = true;
      if (line.find("channel") != std::string::npos) continue;  // header row
    }
    std::istringstream ls(line);
    MeasuredRate r;
    std::string field;
    try {
      if (!std::getline(ls, r.channel, ',')) throw std::invalid_argument("channel");
      if (!std::getline(ls, field, ',')) throw std::invalid_argument("value");
      r.value_per_s = std::stod(field);
      if (!std::getline(ls, field, ',')) throw std::invalid_argument("background");
      r.background_per_s = std::stod(field);
      if (!std::getline(ls, field, ',')) throw std::invalid_argument("f_C");
      r.f_c = std::stod(field);
    } catch (const std::exception&) {
      throw DataError("data: malformed row " + std::to_string(lineno) + " in " +
                      path);
    }
    if (r.channel != "ramsey" && r.channel != "echo" && r.channel != "t1")
      throw DataError("data: unknown channel '" + r.channel + "' at row " +
                      std::to_string(lineno));
    if (r.value_per_s < r.background_per_s)
      throw DataError("data: rate below background at row " +
                      std::to_string(lineno));
    rows.push_back(r);
  }
  if (rows.empty()) throw DataError("data: no rows in " + path);
  return rows;
}

}  // namespace fluxkit
