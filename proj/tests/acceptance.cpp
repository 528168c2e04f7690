// Acceptance suite: one pass/fail line per criterion, exit code counts the
// failures. Criteria 4, 5, 7 and 10 drive the installed CLI binary; the rest
// exercise the library directly.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fluxkit/config.hpp"
#include "fluxkit/constants.hpp"
#include "fluxkit/coupled.hpp"
#include "fluxkit/coupler.hpp"
#include "fluxkit/csv.hpp"
#include "fluxkit/noise.hpp"
#include "fluxkit/semiclassical.hpp"

namespace fs = std::filesystem;
using namespace fluxkit;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass,
            const std::string& detail) {
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << idx << ". " << name << ": "
            << detail << std::endl;
  if (!pass) ++failures;
}

double rel(double v, double t) { return std::abs(v - t) / std::abs(t); }

std::string fmt(double v) { return CsvWriter::format_double(v); }

struct Csv {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, std::vector<std::string>> metadata;

  int col(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return int(i);
    throw DataError("acceptance: column not found: " + name);
  }
  double value(int row, const std::string& name) const {
    return std::stod(rows[row][col(name)]);
  }
};

Csv read_csv(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw DataError("acceptance: cannot read " + p.string());
  Csv out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon != std::string::npos)
        out.metadata[line.substr(2, colon - 2)].push_back(line.substr(colon + 2));
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (out.columns.empty())
      out.columns = fields;
    else
      out.rows.push_back(fields);
  }
  return out;
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = cli + " " + args;
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli, configs_dir, workdir = "acceptance_out";
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--cli") cli = argv[i + 1];
    if (flag == "--configs") configs_dir = argv[i + 1];
    if (flag == "--workdir") workdir = argv[i + 1];
  }
  if (cli.empty() || configs_dir.empty()) {
    std::cerr << "usage: fluxkit_acceptance --cli PATH --configs DIR "
                 "[--workdir DIR]\n";
    return 64;
  }
  fs::remove_all(workdir);
  fs::create_directories(workdir);
  const std::string config = (fs::path(configs_dir) / "table1_semiclassical.json").string();
  RunConfig cfg = load_run_config(config);
  const DeviceParams& dev = cfg.device;

  // ---- 1. beta reproduction -------------------------------------------------
  {
    const double beta =
        2.0 * units::pi * 470e-12 * 730e-9 / units::flux_quantum_Wb;
    report(1, "beta reproduction", rel(beta, 1.04) < 0.005,
           "2 pi L_C I0_C / Phi0 = " + fmt(beta) + " (target 1.04 within 0.5%)");
  }

  // ---- 2. bare qubit gaps ---------------------------------------------------
  double inv_l0 = 0;
  {
    inv_l0 = effective_inductance_inv_pH(dev, 0.0);
    const double la =
        loaded_inductance_pH(dev.qubit_a.l_q_pH, dev.m_pH, inv_l0);
    const double lb =
        loaded_inductance_pH(dev.qubit_b.l_q_pH, dev.m_pH, inv_l0);
    const TwoLevelModel ma = qubit_degeneracy_point(dev, QubitId::A, la);
    const TwoLevelModel mb = qubit_degeneracy_point(dev, QubitId::B, lb);
    const bool ok = rel(ma.delta_GHz, 5.042) < 0.02 && rel(mb.delta_GHz, 5.145) < 0.02;
    report(2, "bare qubit gaps", ok,
           "Delta_A/2pi = " + fmt(ma.delta_GHz) + " GHz (target 5.042 +-2%), " +
               "Delta_B/2pi = " + fmt(mb.delta_GHz) + " GHz (target 5.145 +-2%)");
  }

  // ---- 3. coupler response ranges ------------------------------------------
  {
    CouplerScanOptions opts;
    opts.check_convergence = false;
    double imax = 0, imin = 0, inv_max = -1e300, inv_min = 1e300;
    for (double f = 0.0; f <= 1.0 + 1e-12; f += 2.5e-3) {
      const double cur = circulating_current(dev, f, opts).slope_nA;
      imax = std::max(imax, cur);
      imin = std::min(imin, cur);
      const double inv = effective_inductance_inv_pH(dev, f, opts);
      inv_max = std::max(inv_max, inv);
      inv_min = std::min(inv_min, inv);
    }
    const double leff_pos = 1.0 / inv_max;   // stiffest positive response
    const double leff_neg = 1.0 / inv_min;   // most negative, near f_C = 0.5
    const bool ok_i = rel(imax, 700.0) < 0.05 && rel(imin, -700.0) < 0.05;
    const bool ok_neg = rel(leff_neg, -48.0) < 0.10;
    const bool ok_pos = rel(leff_pos, 1070.0) < 0.10;
    report(3, "coupler response ranges", ok_i && ok_neg && ok_pos,
           "I extrema " + fmt(imin) + " / " + fmt(imax) +
               " nA (target -700/700 +-5%); L_eff endpoints " + fmt(leff_pos) +
               " pH (target 1070 +-10%), " + fmt(leff_neg) +
               " pH (target -48 +-10%)");
  }

  // ---- 4 & 5. coupling strength via the CLI ---------------------------------
  {
    std::ofstream cc(fs::path(workdir) / "coupling_config.json");
    cc << R"({"device": {"parameter_set": "semiclassical",
      "J_c_uA_per_um2": 2.78, "S_c_fF_per_um2": 50,
      "qubit_a": {"I0_small_nA": 78, "I0_large_nA": 206, "C_sh_fF": 53, "L_q_pH": 115},
      "qubit_b": {"I0_small_nA": 78, "I0_large_nA": 209, "C_sh_fF": 53, "L_q_pH": 115},
      "coupler": {"I0_nA": 727, "L_C_pH": 467}, "M_pH": 39},
      "sweep": {"coupling": {"f_c_grid": [0.402, 0.48, 0.5]}}})";
    cc.close();
    const int rc = run_cli(
        cli, "--config " + (fs::path(workdir) / "coupling_config.json").string() +
                 " --out " + workdir + " coupling-sweep");
    if (rc != 0) {
      report(4, "maximum coupling", false, "CLI exited with code " + std::to_string(rc));
      report(5, "on/off ratio", false, "CLI exited with code " + std::to_string(rc));
    } else {
      Csv csv = read_csv(fs::path(workdir) / "coupling_sweep.csv");
      double j_semi_05 = 0, j_split_05 = 0, j_semi_402 = 0, j_split_402 = 0;
      for (size_t r = 0; r < csv.rows.size(); ++r) {
        const double f = csv.value(int(r), "f_C");
        const double js = csv.value(int(r), "J_semiclassical_over_2pi_MHz");
        const double jx = csv.value(int(r), "J_splitting_over_2pi_MHz");
        if (std::abs(f - 0.5) < 1e-9) {
          j_semi_05 = js;
          j_split_05 = jx;
        }
        if (std::abs(f - 0.402) < 1e-9) {
          j_semi_402 = js;
          j_split_402 = jx;
        }
      }
      const bool ok4 = rel(j_semi_05, 94.0) < 0.15 && rel(j_split_05, 94.0) < 0.15 &&
                       rel(j_split_05, j_semi_05) < 0.10;
      report(4, "maximum coupling", ok4,
             "|J|/2pi at f_C=0.5: semiclassical " + fmt(j_semi_05) +
                 " MHz, splitting " + fmt(j_split_05) +
                 " MHz (target 94 +-15%, mutual 10%)");
      const double bound_MHz = 94.0 / 425.0;
      const bool ok5 = j_semi_402 <= bound_MHz && j_split_402 <= bound_MHz;
      report(5, "on/off ratio", ok5,
             "|J|/2pi at f_C=0.402: semiclassical " + fmt(j_semi_402) +
                 " MHz, splitting " + fmt(j_split_402) + " MHz (bound " +
                 fmt(bound_MHz) + " MHz, i.e. on/off >= 425; model on/off = " +
                 fmt(j_split_05 / std::max(j_split_402, 1e-12)) + ")");
    }
  }

  // ---- 6. eta factors -------------------------------------------------------
  {
    const double wlt = 2 * units::pi * 3e-3 * 200e-9;
    const double e1 = eta(1, 1.0, wlt);
    const double e0 = eta(0, 1.0, wlt);
    const bool ok = std::abs(e1 - std::log(2.0)) < 1e-6 &&
                    rel(e0, std::log(1.0 / wlt)) < 0.05;
    report(6, "eta factors", ok,
           "eta1(1) = " + fmt(e1) + " (ln 2 within 1e-6), eta0(1) = " + fmt(e0) +
               " vs ln(1/omega_low t) = " + fmt(std::log(1.0 / wlt)) +
               " (within 5%)");
  }

  // ---- 7. noise-fit round trip via the CLI ----------------------------------
  {
    const double f_c = 0.49, gamma_true = 0.91, a_true = 15e-6;
    NoiseModel noise = cfg.noise;
    noise.amplitude_Phi0_per_sqrtHz = a_true;
    noise.gamma = gamma_true;

    // model kappa exactly as the fitting pipeline computes it
    DeltaCurveOptions dopts;
    dopts.qubit.check_convergence = false;
    const double h = 2e-3;
    const auto curve =
        delta_vs_coupler(dev, QubitId::B, {f_c - h, f_c, f_c + h}, dopts);
    const double kappa = curve[1].kappa_rad_s_per_Phi0;
    CompositeOptions copts;
    copts.check_convergence = false;
    CompositeBuilder builder(dev, copts);
    const T1Element el = t1_matrix_element(builder.at({0.0, 0.5, f_c}));

    const double g0_other = 1.0 / (2 * 3.5e-6), g1_other = 1.0 / (2 * 3.5e-6);
    const double g0 =
        1.0 / t2_time_s(g0_other, dephasing_rate_per_s(kappa, noise, 0), gamma_true);
    const double g1 =
        1.0 / t2_time_s(g1_other, dephasing_rate_per_s(kappa, noise, 1), gamma_true);
    const double t1c = t1_coupler_limit_s(el.element_nA, noise, el.omega01_rad_s);
    const double g_t1 = 1.0 / t1_total_s(t1c, 3.5e-6);

    std::ofstream data(fs::path(workdir) / "synthetic_rates.csv");
    data << "channel,gamma_total_per_s,gamma_background_per_s,f_C\n";
    data << "ramsey," << fmt(g0) << "," << fmt(g0_other) << "," << fmt(f_c) << "\n";
    data << "echo," << fmt(g1) << "," << fmt(g1_other) << "," << fmt(f_c) << "\n";
    data << "t1," << fmt(g_t1) << "," << fmt(1.0 / 3.5e-6) << "," << fmt(f_c) << "\n";
    data.close();

    const int rc = run_cli(
        cli, "--config " + config + " --out " + workdir + " noise-fit --data " +
                 (fs::path(workdir) / "synthetic_rates.csv").string());
    if (rc != 0) {
      report(7, "noise-fit round trip", false,
             "CLI exited with code " + std::to_string(rc));
    } else {
      Csv csv = read_csv(fs::path(workdir) / "noise_fit.csv");
      double ar = 0, ae = 0, at = 0;
      for (size_t r = 0; r < csv.rows.size(); ++r) {
        if (std::abs(csv.value(int(r), "gamma") - gamma_true) < 1e-9) {
          ar = csv.value(int(r), "A_ramsey_uPhi0_sqrtHz");
          ae = csv.value(int(r), "A_echo_uPhi0_sqrtHz");
          at = csv.value(int(r), "A_t1_uPhi0_sqrtHz");
        }
      }
      const bool ok = rel(ar, 15.0) < 0.02 && rel(ae, 15.0) < 0.02 &&
                      rel(at, 15.0) < 0.02;
      report(7, "noise-fit round trip", ok,
             "recovered A(gamma=0.91) = " + fmt(ar) + " / " + fmt(ae) + " / " +
                 fmt(at) + " uPhi0/sqrtHz per channel (target 15 within 2%)");
    }
  }

  // ---- 8. coherence-curve shape ---------------------------------------------
  {
    const std::vector<double> grid = make_grid(0.40, 0.60, 2.5e-3);
    CoherenceBackgrounds bg;
    CoherenceReport rep =
        coherence_vs_coupler(dev, QubitId::B, cfg.noise, grid, bg);
    size_t mid = 0;
    double peak_kappa = 0;
    for (size_t i = 0; i < rep.points.size(); ++i) {
      if (std::abs(rep.points[i].f_c - 0.5) < 1e-9) mid = i;
      peak_kappa =
          std::max(peak_kappa, std::abs(rep.points[i].kappa_rad_s_per_Phi0));
    }
    const CoherencePoint& c = rep.points[mid];
    const bool kappa_zero =
        std::abs(c.kappa_rad_s_per_Phi0) < 1e-3 * peak_kappa;
    const bool recover =
        rel(c.t2_ramsey_s, 1.0 / bg.gamma0()) < 1e-3 &&
        rel(c.t2_echo_s, 1.0 / bg.gamma1()) < 1e-3;
    const CoherencePoint& l = rep.points[mid - 4];
    const CoherencePoint& r = rep.points[mid + 4];
    const bool dips = l.t2_ramsey_s < 0.5 * c.t2_ramsey_s &&
                      r.t2_ramsey_s < 0.5 * c.t2_ramsey_s &&
                      l.t2_echo_s < 0.5 * c.t2_echo_s &&
                      r.t2_echo_s < 0.5 * c.t2_echo_s;
    const bool t1_dip = c.t1_total_s < 0.95 * bg.t1_qubit_s;
    report(8, "coherence-curve shape", kappa_zero && recover && dips && t1_dip,
           std::string("kappa(0.5)/peak = ") +
               fmt(std::abs(c.kappa_rad_s_per_Phi0) / peak_kappa) +
               ", T2 recovery at 0.5 " + (recover ? "exact" : "violated") +
               ", flank dips " + (dips ? "present" : "missing") +
               ", T1(0.5) = " + fmt(c.t1_total_s * 1e6) + " us vs 3.5 us background");
  }

  // ---- 9. oracle and property suites ----------------------------------------
  {
    std::vector<std::string> notes;
    bool ok = true;

    // Hellmann-Feynman vs finite difference
    {
      BuildOptions fast;
      fast.check_convergence = false;
      CircuitHamiltonian ch = build_flux_qubit(dev, QubitId::B, 0.48, {}, fast);
      EigenSolution es = eigendecompose(ch.hamiltonian, 1);
      const double hf = (es.states.adjoint() *
                         ch.flux_derivative_op.dense_complex() * es.states)(0, 0)
                            .real();
      auto e0 = [&](double f) {
        return eigendecompose(
                   build_flux_qubit(dev, QubitId::B, f, {}, fast).hamiltonian, 1)
            .energies(0);
      };
      const double fd = (e0(0.48 + 1e-5) - e0(0.48 - 1e-5)) / 2e-5;
      const bool pass = rel(hf, fd) < 1e-3;
      ok = ok && pass;
      notes.push_back("Hellmann-Feynman " + fmt(rel(hf, fd) * 100) + "%");
    }
    // gauge invariance
    {
      BuildOptions fast;
      fast.check_convergence = false;
      BuildOptions g0 = fast;
      g0.gauge_branch = 0;
      EigenSolution a = eigendecompose(
          build_flux_qubit(dev, QubitId::B, 0.48, {}, fast).hamiltonian, 3);
      EigenSolution b = eigendecompose(
          build_flux_qubit(dev, QubitId::B, 0.48, {}, g0).hamiltonian, 3);
      const double shift = (a.energies - b.energies).cwiseAbs().maxCoeff();
      const bool pass = shift < 1e-6;
      ok = ok && pass;
      notes.push_back("gauge " + fmt(shift * 1e6) + " kHz");
    }
    // non-interacting factorization
    {
      DeviceParams decoupled = dev;
      decoupled.m_pH = 1e-9;
      CompositeOptions copts;
      copts.check_convergence = false;
      CompositeBuilder builder(decoupled, copts);
      CompositeSystem sys = builder.at({0.5, 0.51, 0.3});
      EigenSolution es = eigendecompose(sys.hamiltonian, 6);
      std::vector<double> sums;
      for (int a = 0; a < 5; ++a)
        for (int b = 0; b < 5; ++b)
          for (int c2 = 0; c2 < 5; ++c2)
            sums.push_back(sys.bare_a(a) + sys.bare_b(b) + sys.bare_c(c2));
      std::sort(sums.begin(), sums.end());
      double worst = 0;
      for (int i = 0; i < 6; ++i)
        worst = std::max(worst, std::abs(es.energies(i) - sums[i]));
      const bool pass = worst < 1e-7;
      ok = ok && pass;
      notes.push_back("factorization " + fmt(worst * 1e6) + " kHz");
    }
    // synthetic two-level extractor
    {
      const double j_GHz = 0.094, slope = 280.0, f0 = 0.5131;
      TransitionSpectrum sp;
      sp.axis = 'a';
      sp.n_branches = 2;
      for (int i = 0; i < 21; ++i) {
        const double f = f0 - 2e-3 + i * 2e-4;
        sp.grid.push_back(f);
        const double half = 0.5 * std::hypot(slope * (f - f0), 2 * j_GHz);
        sp.points.push_back({f, 0, 5.3 - half, ""});
        sp.points.push_back({f, 1, 5.3 + half, ""});
      }
      ExtractedSplitting ex = extract_splitting(sp);
      const double err = rel(ex.two_j_rad_s / units::GHz_to_rad_s, 2 * j_GHz);
      const bool pass = err < 1e-3;
      ok = ok && pass;
      notes.push_back("extractor " + fmt(err * 100) + "%");
    }
    // flux reflection and periodicity
    {
      BuildOptions fast;
      fast.check_convergence = false;
      EigenSolution a = eigendecompose(
          build_flux_qubit(dev, QubitId::B, 0.47, {}, fast).hamiltonian, 3);
      EigenSolution b = eigendecompose(
          build_flux_qubit(dev, QubitId::B, 0.53, {}, fast).hamiltonian, 3);
      const double refl = (a.energies - b.energies).cwiseAbs().maxCoeff();
      const double per = std::abs(coupler_ground_energy_GHz(dev, 0.3) -
                                  coupler_ground_energy_GHz(dev, 1.3));
      const bool pass = refl < 1e-6 && per < 2e-6;
      ok = ok && pass;
      notes.push_back("reflection " + fmt(refl * 1e6) + " kHz, periodicity " +
                      fmt(per * 1e6) + " kHz");
    }
    std::string joined;
    for (const auto& n : notes) joined += (joined.empty() ? "" : "; ") + n;
    report(9, "oracle/property suites", ok, joined);
  }

  // ---- 10. determinism -------------------------------------------------------
  {
    std::ofstream cc(fs::path(workdir) / "det_config.json");
    cc << R"({"device": {"parameter_set": "semiclassical",
      "J_c_uA_per_um2": 2.78, "S_c_fF_per_um2": 50,
      "qubit_a": {"I0_small_nA": 78, "I0_large_nA": 206, "C_sh_fF": 53, "L_q_pH": 115},
      "qubit_b": {"I0_small_nA": 78, "I0_large_nA": 209, "C_sh_fF": 53, "L_q_pH": 115},
      "coupler": {"I0_nA": 727, "L_C_pH": 467}, "M_pH": 39},
      "sweep": {"coupler_response": {"f_start": -0.05, "f_stop": 0.05, "f_step": 2e-3}}})";
    cc.close();
    const std::string det_cfg = (fs::path(workdir) / "det_config.json").string();
    bool ok = true;
    std::string detail;
    for (const std::string verb : {std::string("coupler-response"), std::string("eta-table")}) {
      const std::string out1 = (fs::path(workdir) / ("det1_" + verb)).string();
      const std::string out2 = (fs::path(workdir) / ("det2_" + verb)).string();
      const int rc1 = run_cli(cli, "--config " + det_cfg + " --out " + out1 + " " + verb);
      const int rc2 = run_cli(cli, "--config " + det_cfg + " --out " + out2 + " " + verb);
      if (rc1 != 0 || rc2 != 0) {
        ok = false;
        detail += verb + " exited nonzero; ";
        continue;
      }
      const std::string name =
          verb == "eta-table" ? "eta_table.csv" : "coupler_response.csv";
      const std::string b1 = slurp(fs::path(out1) / name);
      const std::string b2 = slurp(fs::path(out2) / name);
      const bool same = !b1.empty() && b1 == b2;
      ok = ok && same;
      detail += verb + (same ? " byte-identical; " : " DIFFERS; ");
    }
    report(10, "determinism", ok, detail);
  }

  std::cout << (failures == 0 ? "all criteria passed"
                              : std::to_string(failures) + " criterion(s) failed")
            << std::endl;
  return failures;
}
