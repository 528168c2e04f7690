#include "fluxkit/circuits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxkit/constants.hpp"

namespace fluxkit {

namespace {

using units::pi;

struct Branch {
  Vector w;          // node coefficients of the oriented branch flux
  bool junction;     // junction (cosine) or linear inductor
  double ej_GHz = 0;
  double l_pH = 0;
};

struct RingSpec {
  RealMatrix cap_fF;  // node capacitance matrix
  std::vector<Branch> branches;
  int gauge_branch = 0;  // branch whose argument carries -f
  std::string name;
};

double branch_flux(const Branch& b, const Vector& phi, double f, bool gauged) {
  return b.w.dot(phi) - (gauged ? f : 0.0);
}

double potential(const RingSpec& s, const Vector& phi, double f) {
  double u = 0;
  for (size_t i = 0; i < s.branches.size(); ++i) {
    const Branch& b = s.branches[i];
    const double x = branch_flux(b, phi, f, int(i) == s.gauge_branch);
    if (b.junction)
      u -= b.ej_GHz * std::cos(2 * pi * x);
    else
      u += units::inductive_GHz_pH * x * x / (2.0 * b.l_pH);
  }
  return u;
}

Vector gradient(const RingSpec& s, const Vector& phi, double f) {
  Vector g = Vector::Zero(phi.size());
  for (size_t i = 0; i < s.branches.size(); ++i) {
    const Branch& b = s.branches[i];
    const double x = branch_flux(b, phi, f, int(i) == s.gauge_branch);
    if (b.junction)
      g += b.ej_GHz * 2 * pi * std::sin(2 * pi * x) * b.w;
    else
      g += units::inductive_GHz_pH * x / b.l_pH * b.w;
  }
  return g;
}

RealMatrix hessian(const RingSpec& s, const Vector& phi, double f) {
  RealMatrix h = RealMatrix::Zero(phi.size(), phi.size());
  for (size_t i = 0; i < s.branches.size(); ++i) {
    const Branch& b = s.branches[i];
    const double x = branch_flux(b, phi, f, int(i) == s.gauge_branch);
    const double c = b.junction
                         ? b.ej_GHz * 4 * pi * pi * std::cos(2 * pi * x)
                         : units::inductive_GHz_pH / b.l_pH;
    h += c * (b.w * b.w.transpose());
  }
  return h;
}

// Damped Newton descent from a deterministic multistart seed set; the lowest
// converged minimum wins, ties broken lexicographically.
Vector find_minimum(const RingSpec& s, double f) {
  const int n = s.cap_fF.rows();
  double escale = 0;
  for (const auto& b : s.branches)
    if (b.junction) escale = std::max(escale, b.ej_GHz);
  const double gtol = 1e-9 * std::max(escale, 1.0);

  std::vector<Vector> seeds;
  auto add = [&](std::initializer_list<double> v) {
    Vector x(n);
    int i = 0;
    for (double d : v) {
      if (i >= n) break;
      x(i++) = d;
    }
    for (; i < n; ++i) x(i) = 0;
    seeds.push_back(x);
  };
  for (int k = -3; k <= 3; ++k) {
    add({0.10 * k, 0.20 * k, 0.025 * k});
    if (n == 1) add({-f + 0.25 * k});
  }
  if (n >= 3)
    for (int k = -2; k <= 2; ++k) add({0.10 * k, 0.20 * k, -f + 0.02 * k});

  double best_u = std::numeric_limits<double>::infinity();
  Vector best = Vector::Zero(n);
  for (const auto& seed : seeds) {
    Vector x = seed;
    bool ok = false;
    for (int it = 0; it < 200; ++it) {
      Vector g = gradient(s, x, f);
      if (g.norm() < gtol) {
        ok = true;
        break;
      }
      RealMatrix h = hessian(s, x, f);
      Vector d;
      Eigen::LDLT<RealMatrix> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        d = ldlt.solve(-g);
      } else {
        d = -g / std::max(g.norm(), 1e-300) * 0.05;
      }
      double t = 1.0;
      const double u0 = potential(s, x, f);
      const double slope = g.dot(d);
      int halves = 0;
      while (halves < 50 &&
             potential(s, x + t * d, f) > u0 + 1e-4 * t * slope) {
        t *= 0.5;
        ++halves;
      }
      if (halves >= 50) break;
      x += t * d;
    }
    if (!ok) continue;
    // reject saddle points
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(hessian(s, x, f));
    if (es.eigenvalues()(0) <= 0) continue;
    const double u = potential(s, x, f);
    if (u < best_u - 1e-9 * std::max(escale, 1.0)) {
      best_u = u;
      best = x;
    } else if (std::abs(u - best_u) <= 1e-9 * std::max(escale, 1.0)) {
      for (int i = 0; i < n; ++i) {
        if (std::abs(x(i) - best(i)) < 1e-9) continue;
        if (x(i) < best(i)) {
          best = x;
          best_u = std::min(best_u, u);
        }
        break;
      }
    }
  }
  if (!std::isfinite(best_u))
    throw ConvergenceError(s.name + ": potential minimization failed at f=" +
                           std::to_string(f));
  return best;
}

struct NormalModes {
  Vector omega;   // ascending
  RealMatrix v;   // columns: mode vectors, V^T M V = 1
  Vector x_zpf, p_zpf, nu_GHz;
};

NormalModes normal_modes(const RingSpec& s, const Vector& phi_min, double f) {
  const RealMatrix k = hessian(s, phi_min, f);
  const RealMatrix m = s.cap_fF / (2.0 * units::charging_GHz_fF);
  Eigen::LLT<RealMatrix> llt(m);
  if (llt.info() != Eigen::Success)
    throw ValidationError(s.name + ": capacitance matrix not positive definite");
  const RealMatrix l = llt.matrixL();
  const RealMatrix a = l.triangularView<Eigen::Lower>().solve(
      l.triangularView<Eigen::Lower>()
          .solve(k)
          .transpose());  // L^-1 K L^-T (K symmetric)
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (a + a.transpose()));
  if (es.info() != Eigen::Success)
    throw SolverError(s.name + ": normal-mode eigensolver failed");
  NormalModes nm;
  const int n = k.rows();
  nm.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const double w2 = es.eigenvalues()(i);
    if (w2 <= 0)
      throw ConvergenceError(s.name +
                             ": non-positive normal-mode curvature at f=" +
                             std::to_string(f));
    nm.omega(i) = std::sqrt(w2);
  }
  nm.v = l.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors());
  nm.x_zpf.resize(n);
  nm.p_zpf.resize(n);
  nm.nu_GHz.resize(n);
  for (int i = 0; i < n; ++i) {
    nm.x_zpf(i) = std::sqrt(units::hbar_reduced / (2.0 * nm.omega(i)));
    nm.p_zpf(i) = std::sqrt(units::hbar_reduced * nm.omega(i) / 2.0);
    nm.nu_GHz(i) = units::hbar_reduced * nm.omega(i);
  }
  return nm;
}

RealMatrix real_kron(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Matrix cplx_kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

RealMatrix embed_real(const RealMatrix& op, int slot,
                      const std::vector<int>& dims) {
  RealMatrix out = RealMatrix::Identity(1, 1);
  for (size_t i = 0; i < dims.size(); ++i) {
    if (int(i) == slot)
      out = real_kron(out, op);
    else
      out = real_kron(out, RealMatrix::Identity(dims[i], dims[i]));
  }
  return out;
}

// op_i (slot i) x op_j (slot j), identity elsewhere, as one Kronecker pass
RealMatrix embed_real_pair(const RealMatrix& a, int slot_a, const RealMatrix& b,
                           int slot_b, const std::vector<int>& dims) {
  RealMatrix out = RealMatrix::Identity(1, 1);
  for (size_t i = 0; i < dims.size(); ++i) {
    if (int(i) == slot_a)
      out = real_kron(out, a);
    else if (int(i) == slot_b)
      out = real_kron(out, b);
    else
      out = real_kron(out, RealMatrix::Identity(dims[i], dims[i]));
  }
  return out;
}

struct BuiltOperators {
  RealMatrix h, dhdf;
};

BuiltOperators assemble(const RingSpec& s, double f,
                        const std::vector<int>& levels) {
  const Vector phi_min = find_minimum(s, f);
  const NormalModes nm = normal_modes(s, phi_min, f);
  const int n_modes = phi_min.size();

  int dim = 1;
  for (int l : levels) dim *= l;

  RealMatrix h = RealMatrix::Zero(dim, dim);
  // kinetic: 1/2 sum p_i^2
  for (int i = 0; i < n_modes; ++i)
    h += 0.5 * embed_real(ho_momentum_sq(levels[i], nm.p_zpf(i)), i, levels);

  std::vector<RealMatrix> x_full(n_modes);
  for (int i = 0; i < n_modes; ++i)
    x_full[i] = embed_real(ho_position(levels[i], nm.x_zpf(i)), i, levels);

  RealMatrix dhdf = RealMatrix::Zero(dim, dim);

  for (size_t bi = 0; bi < s.branches.size(); ++bi) {
    const Branch& b = s.branches[bi];
    const bool gauged = int(bi) == s.gauge_branch;
    const double q0 = branch_flux(b, phi_min, f, gauged);
    const Vector d = (b.w.transpose() * nm.v).transpose();
    if (!b.junction) {
      const double c = units::inductive_GHz_pH / b.l_pH;
      h += (c * q0 * q0 / 2.0) * RealMatrix::Identity(dim, dim);
      for (int i = 0; i < n_modes; ++i) {
        h += (c * q0 * d(i)) * x_full[i];
        h += (c * d(i) * d(i) / 2.0) *
             embed_real(ho_position_sq(levels[i], nm.x_zpf(i)), i, levels);
        for (int j = i + 1; j < n_modes; ++j)
          h += (c * d(i) * d(j)) *
               embed_real_pair(ho_position(levels[i], nm.x_zpf(i)), i,
                               ho_position(levels[j], nm.x_zpf(j)), j, levels);
      }
      if (gauged) {
        // d/df of c (w.phi - f)^2/2 = -c (w.phi - f)
        dhdf -= c * q0 * RealMatrix::Identity(dim, dim);
        for (int i = 0; i < n_modes; ++i) dhdf -= c * d(i) * x_full[i];
      }
    } else {
      // -EJ cos(2 pi (q0 + sum d_i x_i)) via per-mode displacement factors
      Matrix e = Matrix::Identity(1, 1) * std::exp(Complex(0, 2 * pi * q0));
      for (int i = 0; i < n_modes; ++i)
        e = cplx_kron(e, ho_displacement_exp(levels[i], nm.x_zpf(i),
                                             2 * pi * d(i), 0.0));
      h -= b.ej_GHz * e.real();
      if (gauged) {
        // d/df of -EJ cos(2 pi(w.phi - f)) = -2 pi EJ sin(2 pi(w.phi - f))
        dhdf -= (2 * pi * b.ej_GHz) * e.imag();
      }
    }
  }
  return {std::move(h), std::move(dhdf)};
}

CircuitHamiltonian build_ring(const RingSpec& s, double f,
                              const std::vector<int>& levels,
                              const BuildOptions& opts) {
  BuiltOperators ops = assemble(s, f, levels);

  CircuitHamiltonian out;
  out.hamiltonian = HermitianOperator(std::move(ops.h));
  out.flux_derivative_op = HermitianOperator(std::move(ops.dhdf));
  out.current_op = HermitianOperator(
      RealMatrix(units::current_nA_per_GHz_Phi0 *
                 out.flux_derivative_op.real_entries()));
  out.gauge_branch = s.gauge_branch;
  out.f_ext = f;
  const Vector phi_min = find_minimum(s, f);
  const NormalModes nm = normal_modes(s, phi_min, f);
  for (size_t i = 0; i < levels.size(); ++i)
    out.basis.push_back({levels[i], BasisKind::harmonic, nm.x_zpf(int(i))});
  out.convergence.levels = levels;

  if (opts.check_convergence) {
    const int k = std::min<int>(opts.retained, out.hamiltonian.dim());
    EigenSolution base = eigendecompose(out.hamiltonian, k);
    std::vector<int> cur = levels;
    for (int round = 0;; ++round) {
      std::vector<int> bumped = cur;
      for (int& l : bumped) l += 2;
      BuiltOperators big = assemble(s, f, bumped);
      EigenSolution ref = eigendecompose(HermitianOperator(std::move(big.h)), k);
      double shift = 0;
      for (int i = 0; i < k; ++i)
        shift = std::max(shift, std::abs((ref.energies(i) - ref.energies(0)) -
                                         (base.energies(i) - base.energies(0))));
      shift = std::max(shift, std::abs(ref.energies(0) - base.energies(0)));
      if (shift < opts.tolerance_GHz) {
        out.convergence.checked = true;
        out.convergence.max_shift_GHz = shift;
        break;
      }
      if (round >= opts.max_rounds) {
        // name the mode that moves the spectrum most
        int worst = 0;
        double worst_shift = -1;
        for (size_t mi = 0; mi < cur.size(); ++mi) {
          std::vector<int> one = cur;
          one[mi] += 2;
          BuiltOperators bo = assemble(s, f, one);
          EigenSolution es = eigendecompose(HermitianOperator(std::move(bo.h)), k);
          const double sh = (es.energies - base.energies).cwiseAbs().maxCoeff();
          if (sh > worst_shift) {
            worst_shift = sh;
            worst = int(mi);
          }
        }
        throw ConvergenceError(
            s.name + ": mode " + std::to_string(worst) +
            " not converged (eigenvalue shift " +
            std::to_string(worst_shift * 1e6) + " kHz at " +
            std::to_string(cur[worst]) + " levels)");
      }
      // adopt the bumped truncation and try again
      cur = bumped;
      BuiltOperators re = assemble(s, f, cur);
      out.hamiltonian = HermitianOperator(std::move(re.h));
      out.flux_derivative_op = HermitianOperator(std::move(re.dhdf));
      out.current_op = HermitianOperator(
          RealMatrix(units::current_nA_per_GHz_Phi0 *
                     out.flux_derivative_op.real_entries()));
      out.basis.clear();
      for (size_t i = 0; i < cur.size(); ++i)
        out.basis.push_back({cur[i], BasisKind::harmonic, nm.x_zpf(int(i))});
      out.convergence.levels = cur;
      base = eigendecompose(out.hamiltonian, k);
    }
  }
  return out;
}

RingSpec coupler_spec(const DeviceParams& p) {
  RingSpec s;
  s.name = "coupler";
  const double cj = junction_capacitance_fF(p.i0_coupler_nA, p);
  s.cap_fF = RealMatrix::Constant(1, 1, cj);
  Branch jj;
  jj.w = Vector::Constant(1, 1.0);
  jj.junction = true;
  jj.ej_GHz = units::ej_GHz_per_nA * p.i0_coupler_nA;
  Branch ind;
  ind.w = Vector::Constant(1, -1.0);
  ind.junction = false;
  ind.l_pH = p.l_coupler_pH;
  s.branches = {jj, ind};
  s.gauge_branch = 1;
  return s;
}

RingSpec qubit_spec(const DeviceParams& p, QubitId which,
                    std::optional<double> l_override) {
  const QubitParams& q = p.qubit(which);
  RingSpec s;
  s.name = which == QubitId::A ? "qubit A" : "qubit B";
  const double c_sm = junction_capacitance_fF(q.i0_small_nA, p);
  const double c_lg = junction_capacitance_fF(q.i0_large_nA, p);
  RealMatrix c(3, 3);
  c << c_sm + q.c_sh_fF + c_lg, -c_lg, 0,
       -c_lg, 2 * c_lg, -c_lg,
       0, -c_lg, c_lg;
  s.cap_fF = c;
  const double ej_sm = units::ej_GHz_per_nA * q.i0_small_nA;
  const double ej_lg = units::ej_GHz_per_nA * q.i0_large_nA;
  Branch sm, lg1, lg2, ind;
  sm.w = Vector(3);
  sm.w << 1, 0, 0;
  sm.junction = true;
  sm.ej_GHz = ej_sm;
  lg1.w = Vector(3);
  lg1.w << -1, 1, 0;
  lg1.junction = true;
  lg1.ej_GHz = ej_lg;
  lg2.w = Vector(3);
  lg2.w << 0, -1, 1;
  lg2.junction = true;
  lg2.ej_GHz = ej_lg;
  ind.w = Vector(3);
  ind.w << 0, 0, -1;
  ind.junction = false;
  ind.l_pH = l_override.value_or(q.l_q_pH);
  if (ind.l_pH <= 0)
    throw ValidationError("qubit inductance must be positive");
  s.branches = {sm, lg1, lg2, ind};
  s.gauge_branch = 3;
  return s;
}

}  // namespace

void DeviceParams::validate() const {
  auto pos = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v))
      throw ValidationError(std::string("DeviceParams: ") + what +
                            " must be positive and finite");
  };
  pos(j_c_uA_per_um2, "J_c");
  pos(s_c_fF_per_um2, "S_c");
  for (const QubitParams* q : {&qubit_a, &qubit_b}) {
    pos(q->i0_small_nA, "I0_small");
    pos(q->i0_large_nA, "I0_large");
    pos(q->c_sh_fF, "C_sh");
    pos(q->l_q_pH, "L_q");
  }
  pos(i0_coupler_nA, "I0_coupler");
  pos(l_coupler_pH, "L_C");
  pos(m_pH, "M");
  if (parameter_set != "semiclassical" && parameter_set != "full")
    throw ValidationError("DeviceParams: parameter_set must be 'semiclassical' or 'full'");
}

double junction_capacitance_fF(double i0_nA, const DeviceParams& p) {
  if (!(i0_nA > 0)) throw ValidationError("junction_capacitance: I0 must be > 0");
  // area [um^2] = I0 [uA] / J_c [uA/um^2]
  const double c = p.s_c_fF_per_um2 * (i0_nA * 1e-3 / p.j_c_uA_per_um2);
  if (!(c > 0) || !std::isfinite(c))
    throw ValidationError("junction_capacitance: derived capacitance not positive/finite");
  return c;
}

CircuitHamiltonian build_coupler(const DeviceParams& p, double f_c,
                                 const BuildOptions& opts) {
  p.validate();
  RingSpec s = coupler_spec(p);
  if (opts.gauge_branch >= 0) s.gauge_branch = opts.gauge_branch;
  std::vector<int> levels = opts.levels.empty() ? std::vector<int>{70} : opts.levels;
  if (levels.size() != 1)
    throw ValidationError("build_coupler: single-mode circuit takes one level count");
  for (int l : levels)
    if (l < 4) throw ValidationError("build_coupler: levels must be >= 4");
  return build_ring(s, f_c, levels, opts);
}

CircuitHamiltonian build_flux_qubit(const DeviceParams& p, QubitId which,
                                    double f_q,
                                    std::optional<double> l_override_pH,
                                    const BuildOptions& opts) {
  p.validate();
  RingSpec s = qubit_spec(p, which, l_override_pH);
  if (opts.gauge_branch >= 0) s.gauge_branch = opts.gauge_branch;
  std::vector<int> levels =
      opts.levels.empty() ? std::vector<int>{16, 11, 6} : opts.levels;
  if (levels.size() != 3)
    throw ValidationError("build_flux_qubit: three level counts expected");
  for (int l : levels)
    if (l < 4) throw ValidationError("build_flux_qubit: levels must be >= 4");
  return build_ring(s, f_q, levels, opts);
}

TwoLevelModel two_level_reduction(
    const std::function<CircuitHamiltonian(double)>& build, double f_lo,
    double f_hi, double f_tol) {
  if (!(f_hi > f_lo)) throw ValidationError("two_level_reduction: empty bracket");
  auto gap = [&](double f) {
    EigenSolution es = eigendecompose(build(f).hamiltonian, 2);
    return es.energies(1) - es.energies(0);
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = f_lo, b = f_hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = gap(c), fd = gap(d);
  while (b - a > f_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = gap(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = gap(d);
    }
  }
  const double f_min = 0.5 * (a + b);
  const double edge = std::min(f_min - f_lo, f_hi - f_min);
  if (edge < 2 * f_tol)
    throw RangeError("two_level_reduction: gap minimum not interior to bracket");

  TwoLevelModel m;
  m.f_degeneracy = f_min;
  CircuitHamiltonian ch = build(f_min);
  EigenSolution es = eigendecompose(ch.hamiltonian, 2);
  m.delta_GHz = es.energies(1) - es.energies(0);
  m.delta_rad_s = m.delta_GHz * units::GHz_to_rad_s;
  const Matrix i01 = es.states.adjoint() * ch.current_op.dense_complex() * es.states;
  m.ip_nA = std::abs(i01(0, 1));
  return m;
}

double two_level_epsilon_rad_s(double ip_nA, double f) {
  return 2.0 * units::bias_GHz_per_nA * ip_nA * (f - 0.5) * units::GHz_to_rad_s;
}

double two_level_gap_rad_s(double eps_rad_s, double delta_rad_s) {
  return std::hypot(eps_rad_s, delta_rad_s);
}

TwoLevelModel qubit_degeneracy_point(const DeviceParams& p, QubitId which,
                                     std::optional<double> l_override_pH,
                                     const BuildOptions& opts) {
  CircuitHamiltonian ch = build_flux_qubit(p, which, 0.5, l_override_pH, opts);
  EigenSolution es = eigendecompose(ch.hamiltonian, 2);
  TwoLevelModel m;
  m.f_degeneracy = 0.5;
  m.delta_GHz = es.energies(1) - es.energies(0);
  m.delta_rad_s = m.delta_GHz * units::GHz_to_rad_s;
  const Matrix i01 = es.states.adjoint() * ch.current_op.dense_complex() * es.states;
  m.ip_nA = std::abs(i01(0, 1));
  return m;
}

}  // namespace fluxkit
