#include "fluxkit/noise.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "fluxkit/constants.hpp"
#include "fluxkit/parallel.hpp"

namespace fluxkit {

namespace {

using units::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1], computed once by Newton
// iteration on P_16.
struct Gauss16 {
  std::array<double, 16> x{}, w{};
  Gauss16() {
    const int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(pi * (i + 0.75) / (n + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1, p1 = t;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = n * (t * p1 - p0) / (t * t - 1);
        const double dt = p1 / dp;
        t -= dt;
        if (std::abs(dt) < 1e-16) break;
      }
      double p0 = 1, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1);
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = 2.0 / ((1 - t * t) * dp * dp);
      w[n - 1 - i] = w[i];
    }
  }
};

const Gauss16& gauss16() {
  static const Gauss16 g;
  return g;
}

template <typename F>
double gauss_panel(F&& f, double a, double b) {
  const auto& g = gauss16();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0;
  for (int i = 0; i < 16; ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

// integrand z^-gamma g_N(z), stable at small z
double eta_integrand(int n, double gamma, double z) {
  if (z <= 0) return 0;
  const double s2 = std::sin(z / 2);
  if (n == 0) return 4.0 * s2 * s2 * std::pow(z, -2.0 - gamma);
  const double s4 = std::sin(z / 4);
  return 16.0 * s4 * s4 * s4 * s4 * std::pow(z, -2.0 - gamma);
}

}  // namespace

void NoiseModel::validate() const {
  if (!(amplitude_Phi0_per_sqrtHz >= 0))
    throw ValidationError("NoiseModel: amplitude must be >= 0");
  if (!(gamma > 0 && gamma < 2))
    throw ValidationError("NoiseModel: gamma must lie in (0, 2)");
  if (!(omega_low_rad_s > 0) || !(t_evol_s > 0) || !(omega_low_t() < 1))
    throw ValidationError("NoiseModel: need omega_low, t > 0 and omega_low*t < 1");
}

double psd_Phi0sq_per_Hz(const NoiseModel& m, double omega_rad_s) {
  if (!(omega_rad_s > 0))
    throw ValidationError("psd: omega must be positive");
  const double a = m.amplitude_Phi0_per_sqrtHz;
  return a * a * std::pow(2.0 * pi * 1.0 / omega_rad_s, m.gamma);
}

double filter_function(int n, double z) {
  if (z < 0) throw ValidationError("filter_function: z must be >= 0");
  if (n != 0 && n != 1) throw ValidationError("filter_function: N must be 0 or 1");
  if (z == 0) return n == 0 ? 1.0 : 0.0;
  if (n == 0) {
    const double s = std::sin(z / 2) / (z / 2);
    return s * s;
  }
  const double s = std::sin(z / 4) / (z / 4);
  const double sq = std::sin(z / 4);
  return s * s * sq * sq;
}

double eta(int n, double gamma, double omega_low_t) {
  if (n != 0 && n != 1) throw ValidationError("eta: N must be 0 or 1");
  if (!(gamma > 0 && gamma < 2))
    throw ValidationError("eta: gamma must lie in (0, 2)");
  double z0;
  if (n == 0) {
    if (!(omega_low_t > 0 && omega_low_t < 1))
      throw ValidationError("eta: Ramsey window needs 0 < omega_low*t < 1");
    z0 = omega_low_t;
  } else {
    // echo integrand ~ z^(2-gamma)/16 at the origin; start at a negligible
    // floor instead of 0
    z0 = 1e-12;
  }

  auto f = [&](double z) { return eta_integrand(n, gamma, z); };

  double total = 0;
  // geometric panels up to 2 pi
  double a = z0;
  while (a < 2 * pi) {
    double b = std::min(a * 2.0, 2 * pi);
    if (b - a < 1e-300) break;
    total += gauss_panel(f, a, b);
    a = b;
  }
  // one panel per oscillation period
  const int periods = 1500;
  for (int k = 1; k <= periods; ++k)
    total += gauss_panel(f, 2 * pi * k, 2 * pi * (k + 1));
  // tail: mean of g_N is 2 (Ramsey) or 6 (echo) times z^-(2+gamma)
  const double zcap = 2 * pi * (periods + 1);
  const double mean = (n == 0) ? 2.0 : 6.0;
  total += mean * std::pow(zcap, -(1.0 + gamma)) / (1.0 + gamma);

  if (!std::isfinite(total))
    throw NumericError("eta: quadrature diverged (gamma=" + std::to_string(gamma) +
                       ", omega_low*t=" + std::to_string(omega_low_t) + ")");
  return std::pow(2.0 * pi, gamma - 1.0) * total;
}

double dephasing_rate_per_s(double kappa_rad_s_per_Phi0, const NoiseModel& m,
                            int n) {
  if (!std::isfinite(kappa_rad_s_per_Phi0))
    throw ValidationError("dephasing_rate: kappa must be finite");
  m.validate();
  const double k = std::abs(kappa_rad_s_per_Phi0);
  if (k == 0 || m.amplitude_Phi0_per_sqrtHz == 0) return 0;
  const double e = eta(n, m.gamma, m.omega_low_t());
  return std::pow(k * m.amplitude_Phi0_per_sqrtHz * std::sqrt(e),
                  2.0 / (1.0 + m.gamma));
}

double t1_coupler_limit_s(double element_nA, const NoiseModel& m,
                          double omega01_rad_s) {
  if (!(omega01_rad_s > 0))
    throw ValidationError("t1_coupler_limit: omega01 must be positive");
  if (element_nA == 0) return std::numeric_limits<double>::infinity();
  const double i_A = std::abs(element_nA) * 1e-9;
  const double s_Wb2 = psd_Phi0sq_per_Hz(m, omega01_rad_s) *
                       units::flux_quantum_Wb * units::flux_quantum_Wb;
  const double rate =
      2.0 * i_A * i_A * s_Wb2 / (units::hbar_J_s * units::hbar_J_s);
  return rate > 0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double t1_total_s(double t1_coupler_s, double t1_background_s) {
  const double rc = std::isinf(t1_coupler_s) ? 0.0 : 1.0 / t1_coupler_s;
  return 1.0 / (rc + 1.0 / t1_background_s);
}

double decay_envelope(double gamma_other_per_s, double gamma_phi_per_s,
                      double gamma, double tau_s) {
  if (tau_s < 0) throw ValidationError("decay_envelope: tau must be >= 0");
  return std::exp(-gamma_other_per_s * tau_s -
                  std::pow(gamma_phi_per_s * tau_s, 1.0 + gamma));
}

double t2_time_s(double gamma_other_per_s, double gamma_phi_per_s, double gamma) {
  if (gamma_other_per_s <= 0 && gamma_phi_per_s <= 0)
    return std::numeric_limits<double>::infinity();
  if (gamma_phi_per_s <= 0) return 1.0 / gamma_other_per_s;
  if (gamma_other_per_s <= 0) return 1.0 / gamma_phi_per_s;
  // solve Go T + (Gp T)^(1+gamma) = 1, monotone in T
  double lo = 0, hi = 1.0 / gamma_other_per_s;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double v = gamma_other_per_s * mid +
                     std::pow(gamma_phi_per_s * mid, 1.0 + gamma);
    (v < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double estimate_amplitude(double gamma_n_per_s, double gamma_other_per_s,
                          double kappa_rad_s_per_Phi0, double gamma, int n,
                          double omega_low_t) {
  if (!(gamma_other_per_s > 0) || gamma_n_per_s < gamma_other_per_s)
    throw DataError("estimate_amplitude: need Gamma_N >= Gamma_other > 0");
  if (kappa_rad_s_per_Phi0 == 0)
    throw DataError("estimate_amplitude: kappa = 0 leaves the amplitude unbounded");
  const double gphi =
      gamma_n_per_s *
      std::pow(1.0 - gamma_other_per_s / gamma_n_per_s, 1.0 / (1.0 + gamma));
  const double e = eta(n, gamma, omega_low_t);
  return std::pow(gphi, (1.0 + gamma) / 2.0) /
         (std::abs(kappa_rad_s_per_Phi0) * std::sqrt(e));
}

double estimate_amplitude_from_t1(double t1_total_s, double t1_background_s,
                                  double element_nA, double omega01_rad_s,
                                  double gamma) {
  if (!(t1_total_s > 0) || !(t1_background_s > 0))
    throw DataError("estimate_amplitude_from_t1: T1 values must be positive");
  const double excess = 1.0 / t1_total_s - 1.0 / t1_background_s;
  if (excess < 0)
    throw DataError("estimate_amplitude_from_t1: total T1 exceeds background");
  if (element_nA == 0)
    throw DataError("estimate_amplitude_from_t1: zero matrix element");
  const double i_A = std::abs(element_nA) * 1e-9;
  const double s_Wb2 =
      excess * units::hbar_J_s * units::hbar_J_s / (2.0 * i_A * i_A);
  const double s_Phi0 =
      s_Wb2 / (units::flux_quantum_Wb * units::flux_quantum_Wb);
  return std::sqrt(s_Phi0 /
                   std::pow(2.0 * pi / omega01_rad_s, gamma));
}

double kappa_total(double eps_rad_s, double delta_rad_s, double kappa_eps,
                   double kappa_delta) {
  const double w = std::hypot(eps_rad_s, delta_rad_s);
  if (w == 0) return 0;
  return (eps_rad_s / w) * kappa_eps + (delta_rad_s / w) * kappa_delta;
}

CoherenceReport coherence_vs_coupler(const DeviceParams& p, QubitId which,
                                     const NoiseModel& noise,
                                     const std::vector<double>& f_c_grid,
                                     const CoherenceBackgrounds& backgrounds,
                                     const CoherenceOptions& opts) {
  noise.validate();
  CoherenceReport report;
  report.backgrounds = backgrounds;
  report.eta0 = eta(0, noise.gamma, noise.omega_low_t());
  report.eta1 = eta(1, noise.gamma, noise.omega_low_t());

  DeltaCurveOptions dopts = opts.delta;
  dopts.threads = opts.threads;
  const std::vector<DeltaCurvePoint> delta_curve =
      delta_vs_coupler(p, which, f_c_grid, dopts);

  CompositeOptions copts = opts.composite;
  copts.check_convergence = false;
  CompositeBuilder builder(p, copts);
  // warm the qubit caches once (flux-independent along f_C)
  {
    FluxPoint fp{opts.f_a, 0.5, f_c_grid.front()};
    if (which == QubitId::A) std::swap(fp.f_a, fp.f_b);
    (void)builder.at(fp);
  }

  const double g0_other = backgrounds.gamma0();
  const double g1_other = backgrounds.gamma1();

  report.points.resize(f_c_grid.size());
  parallel_for(int(f_c_grid.size()), opts.threads, [&](int i) {
    CoherencePoint pt;
    pt.f_c = f_c_grid[i];
    pt.delta_GHz = delta_curve[i].delta_GHz;
    pt.kappa_rad_s_per_Phi0 = delta_curve[i].kappa_rad_s_per_Phi0;
    pt.t1_background_s = backgrounds.t1_qubit_s;

    FluxPoint fp{opts.f_a, 0.5, pt.f_c};
    if (which == QubitId::A) std::swap(fp.f_a, fp.f_b);
    T1Element el = t1_matrix_element(builder.at(fp));
    pt.element_nA = el.element_nA;
    pt.omega01_rad_s = el.omega01_rad_s;
    pt.t1_coupler_s = t1_coupler_limit_s(pt.element_nA, noise, pt.omega01_rad_s);
    pt.t1_total_s = t1_total_s(pt.t1_coupler_s, pt.t1_background_s);

    pt.gamma0_phi_per_s = dephasing_rate_per_s(pt.kappa_rad_s_per_Phi0, noise, 0);
    pt.gamma1_phi_per_s = dephasing_rate_per_s(pt.kappa_rad_s_per_Phi0, noise, 1);
    pt.t2_ramsey_s = t2_time_s(g0_other, pt.gamma0_phi_per_s, noise.gamma);
    pt.t2_echo_s = t2_time_s(g1_other, pt.gamma1_phi_per_s, noise.gamma);
    pt.gamma0_per_s = 1.0 / pt.t2_ramsey_s;
    pt.gamma1_per_s = 1.0 / pt.t2_echo_s;
    report.points[i] = pt;
  });
  return report;
}

}  // namespace fluxkit
