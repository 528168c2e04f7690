#include "commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>

#include "fluxkit/constants.hpp"
#include "fluxkit/coupled.hpp"
#include "fluxkit/coupler.hpp"
#include "fluxkit/csv.hpp"
#include "fluxkit/noise.hpp"
#include "fluxkit/parallel.hpp"
#include "fluxkit/semiclassical.hpp"
#include "svg.hpp"

namespace fluxkit::cli {

namespace fs = std::filesystem;

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.output_dir);
  const fs::path p = fs::path(cfg.output_dir) / name;
  std::ofstream os(p, std::ios::binary);
  if (!os) throw ConfigError("cannot open output file " + p.string());
  return os;
}

void stamp(CsvWriter& csv, const RunConfig& cfg, const std::string& command) {
  csv.metadata("tool", kToolVersion);
  csv.metadata("command", command);
  csv.metadata("config", cfg.source_path);
  csv.metadata("config_hash", hash_hex(cfg.config_hash));
}

int guard(const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericError;
  }
}

// pairwise renormalized mutuals combine as their geometric mean in the
// mediated-J formula; exact when the two qubit inductances are equal
double geometric_m_tilde(const DeviceParams& p) {
  const auto ra = galvanic_to_mutual(p.qubit_a.l_q_pH, p.l_coupler_pH, p.m_pH);
  const auto rb = galvanic_to_mutual(p.qubit_b.l_q_pH, p.l_coupler_pH, p.m_pH);
  return std::sqrt(ra.m_tilde_pH * rb.m_tilde_pH);
}

}  // namespace

std::string resolve_config_path(const std::string& path) {
  if (fs::exists(path)) return path;
  if (const char* dir = std::getenv("FLUXKIT_CONFIG_DIR")) {
    const fs::path candidate = fs::path(dir) / path;
    if (fs::exists(candidate)) return candidate.string();
  }
  throw ConfigError("config file not found: " + path);
}

int run_coupler_response(const RunConfig& cfg) {
  return guard([&] {
    CouplerScanOptions opts;
    opts.threads = cfg.threads;
    const std::vector<double> grid =
        make_grid(cfg.coupler_f_start, cfg.coupler_f_stop, cfg.coupler_f_step);
    const CouplerResponse resp = coupling_region_map(cfg.device, grid, opts);

    std::ofstream os = open_output(cfg, "coupler_response.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "coupler-response");
    for (double zc : resp.zero_crossings)
      csv.metadata("zero_crossing", CsvWriter::format_double(zc));
    for (const auto& w : resp.warnings) csv.metadata("warning", w);
    csv.header({"f_C", "E0_GHz", "Icirc_slope_nA", "Icirc_op_nA",
                "invLeff_per_pH", "region"});
    for (const auto& pt : resp.points)
      csv.row({pt.f_c, pt.e0_GHz, pt.i_slope_nA, pt.i_op_nA,
               pt.inv_l_eff_per_pH, pt.region});

    if (cfg.svg) {
      SvgSeries s1{"I slope (nA)", {}, {}}, s2{"I operator (nA)", {}, {}},
          s3{"1/L_eff (1/nH)", {}, {}};
      for (const auto& pt : resp.points) {
        s1.x.push_back(pt.f_c);
        s1.y.push_back(pt.i_slope_nA);
        s2.x.push_back(pt.f_c);
        s2.y.push_back(pt.i_op_nA);
        s3.x.push_back(pt.f_c);
        s3.y.push_back(pt.inv_l_eff_per_pH * 1e3);
      }
      write_line_svg(
          (fs::path(cfg.output_dir) / "coupler_response.svg").string(),
          "coupler response", "f_C (Phi0)", "current / susceptibility",
          {s1, s2, s3});
    }
  });
}

int run_coupling_sweep(const RunConfig& cfg) {
  return guard([&] {
    const DeviceParams& p = cfg.device;
    const double m_tilde = geometric_m_tilde(p);

    // flux-independent ingredients: bare persistent currents
    const TwoLevelModel qa = qubit_degeneracy_point(p, QubitId::A);
    const TwoLevelModel qb = qubit_degeneracy_point(p, QubitId::B);

    CompositeOptions copts;
    copts.check_convergence = false;
    CompositeBuilder builder(p, copts);
    const double f_b = 0.5 + cfg.coupling_f_b_offset;

    // bare resonance: where qubit A's transition meets qubit B's
    const double omega_b = [&] {
      CircuitHamiltonian ch = build_flux_qubit(p, QubitId::B, f_b);
      EigenSolution es = eigendecompose(ch.hamiltonian, 2);
      return es.energies(1) - es.energies(0);
    }();
    auto detune = [&](double f_a) {
      CircuitHamiltonian ch = build_flux_qubit(p, QubitId::A, f_a);
      EigenSolution es = eigendecompose(ch.hamiltonian, 2);
      return es.energies(1) - es.energies(0) - omega_b;
    };
    double lo = 0.5 + 0.2 * cfg.coupling_f_b_offset;
    double hi = 0.5 + 3.0 * cfg.coupling_f_b_offset + 0.01;
    double dlo = detune(lo), dhi = detune(hi);
    if (dlo * dhi > 0)
      throw RangeError(
          "coupling-sweep: qubit A does not cross qubit B in the scan window");
    while (hi - lo > 1e-5) {
      const double mid = 0.5 * (lo + hi);
      const double dm = detune(mid);
      if (dlo * dm <= 0) {
        hi = mid;
        dhi = dm;
      } else {
        lo = mid;
        dlo = dm;
      }
    }
    const double f_res = 0.5 * (lo + hi);

    struct Row {
      double f_c, j_semi_MHz, j_split_MHz, m_eff_pH;
      bool resolved;
    };
    std::vector<Row> rows(cfg.coupling_grid.size());
    CouplerScanOptions cs;
    cs.check_convergence = false;
    for (size_t i = 0; i < cfg.coupling_grid.size(); ++i) {
      const double f_c = cfg.coupling_grid[i];
      const double inv_l = effective_inductance_inv_pH(p, f_c, cs);
      const CouplingResult semi =
          mediated_coupling(m_tilde, inv_l, qa.ip_nA, qb.ip_nA);
      SweepOptions so;
      so.threads = cfg.threads;
      ExtractedSplitting split;
      try {
        split = splitting_at(builder, 'a', f_res, 0.006, {0, f_b, f_c}, 2e-4, so);
      } catch (const RangeError&) {
        split = splitting_at(builder, 'a', f_res, 0.02, {0, f_b, f_c}, 2e-4, so);
      }
      rows[i] = {f_c, std::abs(semi.j_rad_s) / units::GHz_to_rad_s * 1e3,
                 split.two_j_rad_s / 2.0 / units::GHz_to_rad_s * 1e3,
                 semi.m_eff_pH, split.resolved};
    }

    std::ofstream os = open_output(cfg, "coupling_sweep.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "coupling-sweep");
    csv.metadata("f_b", CsvWriter::format_double(f_b));
    csv.metadata("f_a_resonance", CsvWriter::format_double(f_res));
    csv.metadata("Ip_A_nA", CsvWriter::format_double(qa.ip_nA));
    csv.metadata("Ip_B_nA", CsvWriter::format_double(qb.ip_nA));
    csv.header({"f_C", "J_semiclassical_over_2pi_MHz",
                "J_splitting_over_2pi_MHz", "M_eff_pH", "splitting_resolved"});
    for (const auto& r : rows)
      csv.row({r.f_c, r.j_semi_MHz, r.j_split_MHz, r.m_eff_pH,
               (long long)(r.resolved ? 1 : 0)});

    if (cfg.svg) {
      SvgSeries s1{"|J|/2pi semiclassical (MHz)", {}, {}},
          s2{"|J|/2pi splitting (MHz)", {}, {}};
      for (const auto& r : rows) {
        s1.x.push_back(r.f_c);
        s1.y.push_back(r.j_semi_MHz);
        s2.x.push_back(r.f_c);
        s2.y.push_back(r.j_split_MHz);
      }
      write_line_svg((fs::path(cfg.output_dir) / "coupling_sweep.svg").string(),
                     "coupling strength vs coupler bias", "f_C (Phi0)",
                     "|J|/2pi (MHz)", {s1, s2});
    }
  });
}

int run_coherence(const RunConfig& cfg) {
  return guard([&] {
    const QubitId which = cfg.coherence_qubit == "A" ? QubitId::A : QubitId::B;
    const std::vector<double> grid = make_grid(
        cfg.coherence_f_start, cfg.coherence_f_stop, cfg.coherence_f_step);
    CoherenceOptions opts;
    opts.threads = cfg.threads;
    const CoherenceReport report = coherence_vs_coupler(
        cfg.device, which, cfg.noise, grid, cfg.backgrounds, opts);

    std::ofstream os = open_output(cfg, "coherence.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "coherence");
    csv.metadata("qubit", cfg.coherence_qubit);
    csv.metadata("eta0", CsvWriter::format_double(report.eta0));
    csv.metadata("eta1", CsvWriter::format_double(report.eta1));
    csv.header({"f_C", "Delta_GHz", "kappa_rad_per_s_per_Phi0", "element_nA",
                "T1_coupler_us", "T1_total_us", "T2_ramsey_us", "T2_echo_us",
                "Gamma0_per_s", "Gamma1_per_s"});
    for (const auto& pt : report.points) {
      const double t1c_us = std::isinf(pt.t1_coupler_s)
                                ? std::numeric_limits<double>::infinity()
                                : pt.t1_coupler_s * 1e6;
      csv.row({pt.f_c, pt.delta_GHz, pt.kappa_rad_s_per_Phi0, pt.element_nA,
               t1c_us, pt.t1_total_s * 1e6, pt.t2_ramsey_s * 1e6,
               pt.t2_echo_s * 1e6, pt.gamma0_per_s, pt.gamma1_per_s});
    }

    if (!cfg.envelope_points.empty()) {
      std::ofstream eos = open_output(cfg, "envelopes.csv");
      CsvWriter ecsv(eos);
      stamp(ecsv, cfg, "coherence (decay envelopes)");
      ecsv.header({"f_C", "tau_ns", "ramsey_envelope", "echo_envelope"});
      for (double f_want : cfg.envelope_points) {
        size_t best = 0;
        for (size_t i = 0; i < report.points.size(); ++i)
          if (std::abs(report.points[i].f_c - f_want) <
              std::abs(report.points[best].f_c - f_want))
            best = i;
        const CoherencePoint& pt = report.points[best];
        const double tmax = 3.0 * std::max(pt.t2_ramsey_s, pt.t2_echo_s);
        for (int i = 0; i <= 120; ++i) {
          const double tau = tmax * i / 120.0;
          ecsv.row({pt.f_c, tau * 1e9,
                    decay_envelope(report.backgrounds.gamma0(),
                                   pt.gamma0_phi_per_s, cfg.noise.gamma, tau),
                    decay_envelope(report.backgrounds.gamma1(),
                                   pt.gamma1_phi_per_s, cfg.noise.gamma, tau)});
        }
      }
    }

    if (cfg.svg) {
      SvgSeries s1{"T2 Ramsey (us)", {}, {}}, s2{"T2 echo (us)", {}, {}},
          s3{"T1 total (us)", {}, {}};
      for (const auto& pt : report.points) {
        s1.x.push_back(pt.f_c);
        s1.y.push_back(pt.t2_ramsey_s * 1e6);
        s2.x.push_back(pt.f_c);
        s2.y.push_back(pt.t2_echo_s * 1e6);
        s3.x.push_back(pt.f_c);
        s3.y.push_back(pt.t1_total_s * 1e6);
      }
      write_line_svg((fs::path(cfg.output_dir) / "coherence.svg").string(),
                     "coherence vs coupler bias", "f_C (Phi0)", "time (us)",
                     {s1, s2, s3});
    }
  });
}

int run_noise_fit(const RunConfig& cfg, const std::string& data_path) {
  return guard([&] {
    const std::vector<MeasuredRate> rows = load_measured_rates(data_path);

    std::vector<double> gammas;
    for (double g = cfg.eta_gamma_start; g <= cfg.eta_gamma_stop + 1e-12;
         g += cfg.eta_gamma_step)
      gammas.push_back(g);

    // model ingredients per unique f_C
    std::set<double> fcs;
    for (const auto& r : rows) fcs.insert(r.f_c);
    struct PointModel {
      double kappa = 0;
      double element_nA = 0;
      double omega01 = 0;
    };
    std::map<double, PointModel> model;
    CompositeOptions copts;
    copts.check_convergence = false;
    CompositeBuilder builder(cfg.device, copts);
    const double h = 2e-3;
    for (double f_c : fcs) {
      PointModel pm;
      std::vector<double> local{f_c - h, f_c, f_c + h};
      DeltaCurveOptions dopts;
      dopts.threads = cfg.threads;
      dopts.qubit.check_convergence = false;
      const auto curve = delta_vs_coupler(cfg.device, QubitId::B, local, dopts);
      pm.kappa = curve[1].kappa_rad_s_per_Phi0;
      T1Element el = t1_matrix_element(builder.at({0.0, 0.5, f_c}));
      pm.element_nA = el.element_nA;
      pm.omega01 = el.omega01_rad_s;
      model[f_c] = pm;
    }

    const double wlt = cfg.noise.omega_low_t();
    auto amplitude = [&](const MeasuredRate& r, double gamma) -> double {
      const PointModel& pm = model.at(r.f_c);
      if (r.channel == "t1") {
        return estimate_amplitude_from_t1(1.0 / r.value_per_s,
                                          1.0 / r.background_per_s,
                                          pm.element_nA, pm.omega01, gamma);
      }
      const int n = r.channel == "ramsey" ? 0 : 1;
      return estimate_amplitude(r.value_per_s, r.background_per_s, pm.kappa,
                                gamma, n, wlt);
    };

    std::map<std::string, std::vector<double>> curves;  // channel -> A(gamma)
    for (const char* ch : {"ramsey", "echo", "t1"}) {
      bool any = false;
      for (const auto& r : rows) any = any || r.channel == ch;
      if (!any) continue;
      std::vector<double> curve(gammas.size(), 0.0);
      for (size_t gi = 0; gi < gammas.size(); ++gi) {
        double sum = 0;
        int count = 0;
        for (const auto& r : rows) {
          if (r.channel != ch) continue;
          sum += amplitude(r, gammas[gi]);
          ++count;
        }
        curve[gi] = sum / count;
      }
      curves[ch] = std::move(curve);
    }

    std::ofstream os = open_output(cfg, "noise_fit.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "noise-fit");
    csv.metadata("data", data_path);

    struct Crossing {
      std::string pair;
      double gamma, a;
    };
    std::vector<Crossing> crossings;
    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"ramsey", "echo"}, {"ramsey", "t1"}, {"echo", "t1"}};
    for (const auto& [c1, c2] : pairs) {
      if (!curves.count(c1) || !curves.count(c2)) continue;
      const auto& a1 = curves[c1];
      const auto& a2 = curves[c2];
      for (size_t i = 0; i + 1 < gammas.size(); ++i) {
        const double d0 = a1[i] - a2[i], d1 = a1[i + 1] - a2[i + 1];
        if (d0 == 0 || d0 * d1 < 0) {
          const double t = (d0 == d1) ? 0.0 : d0 / (d0 - d1);
          const double g = gammas[i] + t * (gammas[i + 1] - gammas[i]);
          const double a = a1[i] + t * (a1[i + 1] - a1[i]);
          crossings.push_back({c1 + "/" + c2, g, a});
          break;
        }
      }
    }
    for (const auto& c : crossings)
      csv.metadata("intersection_" + c.pair,
                   "gamma=" + CsvWriter::format_double(c.gamma) +
                       " A_uPhi0_sqrtHz=" + CsvWriter::format_double(c.a * 1e6));
    if (crossings.size() >= 2) {
      double gmin = 1e300, gmax = -1e300, amin = 1e300, amax = -1e300;
      for (const auto& c : crossings) {
        gmin = std::min(gmin, c.gamma);
        gmax = std::max(gmax, c.gamma);
        amin = std::min(amin, c.a);
        amax = std::max(amax, c.a);
      }
      csv.metadata("triangle_gamma", CsvWriter::format_double(gmin) + " to " +
                                         CsvWriter::format_double(gmax));
      csv.metadata("triangle_A_uPhi0_sqrtHz",
                   CsvWriter::format_double(amin * 1e6) + " to " +
                       CsvWriter::format_double(amax * 1e6));
    }

    csv.header({"gamma", "A_ramsey_uPhi0_sqrtHz", "A_echo_uPhi0_sqrtHz",
                "A_t1_uPhi0_sqrtHz"});
    for (size_t gi = 0; gi < gammas.size(); ++gi) {
      auto val = [&](const char* ch) -> CsvValue {
        if (!curves.count(ch)) return std::string("");
        return curves[ch][gi] * 1e6;
      };
      csv.row({gammas[gi], val("ramsey"), val("echo"), val("t1")});
    }

    if (cfg.svg) {
      std::vector<SvgSeries> series;
      for (const auto& [ch, curve] : curves) {
        SvgSeries s{"A " + ch + " (uPhi0/sqrtHz)", gammas, {}};
        for (double a : curve) s.y.push_back(a * 1e6);
        series.push_back(std::move(s));
      }
      write_line_svg((fs::path(cfg.output_dir) / "noise_fit.svg").string(),
                     "flux-noise amplitude estimates", "gamma",
                     "A (uPhi0/sqrtHz)", series);
    }
  });
}

int run_eta_table(const RunConfig& cfg) {
  return guard([&] {
    std::vector<double> gammas;
    for (double g = cfg.eta_gamma_start; g <= cfg.eta_gamma_stop + 1e-12;
         g += cfg.eta_gamma_step)
      gammas.push_back(g);
    const double wlt = cfg.noise.omega_low_t();

    std::vector<std::array<double, 2>> vals(gammas.size());
    parallel_for(int(gammas.size()), cfg.threads, [&](int i) {
      vals[i] = {eta(0, gammas[i], wlt), eta(1, gammas[i], wlt)};
    });

    std::ofstream os = open_output(cfg, "eta_table.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "eta-table");
    csv.metadata("omega_low_t", CsvWriter::format_double(wlt));
    csv.header({"gamma", "eta0", "eta1", "sqrt_eta0", "sqrt_eta1"});
    for (size_t i = 0; i < gammas.size(); ++i)
      csv.row({gammas[i], vals[i][0], vals[i][1], std::sqrt(vals[i][0]),
               std::sqrt(vals[i][1])});

    if (cfg.svg) {
      SvgSeries s0{"sqrt(eta0)", gammas, {}}, s1{"sqrt(eta1)", gammas, {}};
      for (const auto& v : vals) {
        s0.y.push_back(std::sqrt(v[0]));
        s1.y.push_back(std::sqrt(v[1]));
      }
      write_line_svg((fs::path(cfg.output_dir) / "eta_table.svg").string(),
                     "dephasing sequence factors", "gamma", "sqrt(eta)",
                     {s0, s1});
    }
  });
}

int run_spectrum(const RunConfig& cfg) {
  return guard([&] {
    CompositeOptions copts;
    copts.check_convergence = false;
    CompositeBuilder builder(cfg.device, copts);
    const std::vector<double> grid =
        make_grid(cfg.spectrum_start, cfg.spectrum_stop, cfg.spectrum_step);
    SweepOptions so;
    so.threads = cfg.threads;
    so.n_branches = cfg.spectrum_branches;
    const TransitionSpectrum sp = spectroscopy_sweep(
        builder, cfg.spectrum_axis, grid, cfg.spectrum_fixed, so);

    std::ofstream os = open_output(cfg, "spectrum.csv");
    CsvWriter csv(os);
    stamp(csv, cfg, "spectrum");
    csv.metadata("axis", std::string(1, cfg.spectrum_axis));
    csv.header({"swept_flux", "branch_index", "freq_GHz", "tag"});
    for (const auto& tp : sp.points)
      csv.row({tp.flux, (long long)tp.branch_index, tp.freq_GHz, tp.tag});

    if (cfg.svg) {
      std::vector<SvgSeries> series(sp.n_branches);
      for (int b = 0; b < sp.n_branches; ++b) {
        series[b].label = "branch " + std::to_string(b);
        for (size_t i = 0; i < sp.grid.size(); ++i) {
          series[b].x.push_back(sp.grid[i]);
          series[b].y.push_back(sp.freq(int(i), b));
        }
      }
      write_line_svg((fs::path(cfg.output_dir) / "spectrum.svg").string(),
                     "composite transitions", "f (Phi0)", "freq (GHz)", series);
    }
  });
}

}  // namespace fluxkit::cli
